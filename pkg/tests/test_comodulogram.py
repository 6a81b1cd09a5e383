"""Grid evaluation, matrix containers, peak readout, and method comparison."""

import math

import numpy as np
import pytest

from paclab import (
    FilterBank,
    GridSpec,
    InvalidInputError,
    InvalidMethodError,
    PacMatrix,
    Signal,
    argmax,
    benchmark_spec,
    compute_matrix,
    localization_error,
    normalize,
    pink_noise,
    run_comparison,
    synth_pac,
)

FS = 1000.0

# tight window around the (8, 45) benchmark cell keeps grid tests fast
SMALL = GridSpec(m_start=6, m_stop=10, n_start=42, n_stop=48)


def coupled(seed=None, noise=6250.0):
    spec = benchmark_spec((8, 45), seed=seed)
    if noise == 0.0:
        spec = type(spec)(
            m=spec.m, n=spec.n, ami=spec.ami, duration=spec.duration,
            fs=spec.fs, noise_power=0.0, clean_scale=spec.clean_scale,
        )
    return synth_pac(spec).composite


class TestGridSpec:
    def test_defaults_span_fifty(self):
        g = GridSpec()
        assert list(g.m_values) == list(range(1, 51))
        assert list(g.n_values) == list(range(1, 51))

    def test_rejects_bad_bounds(self):
        with pytest.raises(InvalidInputError):
            GridSpec(m_start=0)
        with pytest.raises(InvalidInputError):
            GridSpec(m_start=5, m_stop=4)
        with pytest.raises(InvalidInputError):
            GridSpec(n_start=10, n_stop=9)


class TestPacMatrix:
    def grid(self):
        return GridSpec(m_start=1, m_stop=3, n_start=2, n_stop=4)

    def test_shape_must_match_grid(self):
        with pytest.raises(InvalidInputError):
            PacMatrix(np.zeros((2, 3)), "mca", False, self.grid())

    def test_rejects_negative_and_nonfinite(self):
        vals = np.zeros((3, 3))
        vals[2, 0] = -0.1
        with pytest.raises(InvalidInputError):
            PacMatrix(vals, "mca", False, self.grid())
        vals = np.zeros((3, 3))
        vals[2, 0] = np.nan
        with pytest.raises(InvalidInputError):
            PacMatrix(vals, "mca", False, self.grid())

    def test_rejects_mass_on_or_below_diagonal(self):
        vals = np.zeros((3, 3))
        vals[0, 1] = 0.5  # m=2, n=2
        with pytest.raises(InvalidInputError):
            PacMatrix(vals, "mca", False, self.grid())

    def test_values_are_readonly(self):
        mat = PacMatrix(np.zeros((3, 3)), "mca", False, self.grid())
        with pytest.raises(ValueError):
            mat.values[0, 0] = 1.0

    def test_cell_addresses_by_frequency(self):
        vals = np.zeros((3, 3))
        vals[1, 0] = 0.7  # m=1, n=3
        mat = PacMatrix(vals, "mca", False, self.grid())
        assert mat.cell(1, 3) == 0.7
        assert mat.cell(2, 4) == 0.0


class TestFilterBank:
    def test_caches_by_key(self):
        bank = FilterBank(pink_noise(4000, FS, 1.0, seed=0))
        a = bank.gabor(8.0, 1.0)
        b = bank.gabor(8.0, 1.0)
        assert a is b
        assert bank.n_filterings == 1
        bank.gabor(8.0, 2.0)
        bank.morlet(45.0, 4.0)
        assert bank.n_filterings == 3


class TestComputeMatrix:
    def test_unknown_method(self):
        with pytest.raises(InvalidMethodError):
            compute_matrix(coupled(seed=0), method="magic")

    def test_grid_beyond_nyquist(self):
        x = Signal(np.zeros(4000), 100.0)
        with pytest.raises(InvalidInputError):
            compute_matrix(x, grid=GridSpec(n_start=40, n_stop=50))

    def test_finds_benchmark_peak(self):
        mat = compute_matrix(coupled(noise=0.0), grid=SMALL)
        m, n, v = argmax(mat)
        assert (m, n) == (8, 45)
        assert v > 0.95

    def test_triangle_stays_zero(self):
        x = pink_noise(10000, FS, 1.0, seed=1)
        g = GridSpec(m_start=1, m_stop=12, n_start=1, n_stop=12)
        mat = compute_matrix(x, grid=g)
        mm, nn = np.meshgrid(g.m_values, g.n_values)
        assert np.all(mat.values[mm >= nn] == 0.0)

    def test_out_of_band_cells_score_zero(self):
        x = pink_noise(1200, 120.0, 1.0, seed=2)
        g = GridSpec(m_start=1, m_stop=10, n_start=55, n_stop=58)
        mat = compute_matrix(x, grid=g)
        # n + m crosses Nyquist at 60 Hz for the larger modulators
        assert mat.cell(10, 55) == 0.0
        assert mat.cell(8, 55) == 0.0

    def test_cache_changes_nothing(self):
        x = coupled(seed=3)
        a = compute_matrix(x, grid=SMALL, use_cache=True)
        b = compute_matrix(x, grid=SMALL, use_cache=False)
        assert np.array_equal(a.values, b.values)

    def test_parallel_matches_serial(self):
        x = coupled(seed=4)
        a = compute_matrix(x, grid=SMALL, jobs=None)
        b = compute_matrix(x, grid=SMALL, jobs=4)
        assert np.array_equal(a.values, b.values)

    def test_filtering_cost_stays_near_linear(self):
        mat = compute_matrix(coupled(seed=5))
        used = mat.meta["cached_filterings"]
        # 2450 cells x 6 bands would be 3675 distinct filterings uncached
        assert 0 < used <= 200

    def test_meta_records_provenance(self):
        mat = compute_matrix(coupled(seed=6), grid=SMALL)
        assert mat.meta["fs"] == FS
        assert mat.meta["n_samples"] == 10000
        assert mat.meta["config"]["mca_bw"] == 1.0
        assert mat.method == "mca"
        assert not mat.normalized


class TestNormalize:
    def test_peak_becomes_exactly_one(self):
        mat = compute_matrix(coupled(seed=7), grid=SMALL)
        norm = normalize(mat)
        assert norm.values.max() == 1.0
        assert norm.normalized
        # ratios survive
        i, j = np.unravel_index(np.argmax(mat.values), mat.values.shape)
        ref = mat.values / mat.values[i, j]
        assert np.allclose(norm.values, ref, rtol=1e-15)

    def test_idempotent(self):
        norm = normalize(compute_matrix(coupled(seed=8), grid=SMALL))
        again = normalize(norm)
        assert np.array_equal(norm.values, again.values)

    def test_all_zero_stays_zero(self):
        g = GridSpec(m_start=1, m_stop=3, n_start=2, n_stop=4)
        mat = PacMatrix(np.zeros((3, 3)), "mca", False, g)
        norm = normalize(mat)
        assert norm.normalized
        assert np.all(norm.values == 0.0)


class TestArgmax:
    def grid(self):
        return GridSpec(m_start=1, m_stop=3, n_start=2, n_stop=4)

    def test_ties_go_to_lowest_frequencies(self):
        vals = np.zeros((3, 3))
        vals[0, 0] = 1.0  # m=1, n=2
        vals[2, 1] = 1.0  # m=2, n=4
        mat = PacMatrix(vals, "mca", False, self.grid())
        assert argmax(mat) == (1, 2, 1.0)

    def test_all_zero_has_no_peak(self):
        mat = PacMatrix(np.zeros((3, 3)), "mca", False, self.grid())
        assert argmax(mat) is None


class TestLocalizationError:
    def test_exact_hit(self):
        assert localization_error((8, 45, 1.0), (8, 45)) == 0.0

    def test_manhattan_distance(self):
        assert localization_error((9, 44, 0.5), (8, 45)) == 2.0

    def test_missing_peak_is_infinite(self):
        assert math.isinf(localization_error(None, (8, 45)))


class TestRunComparison:
    def test_report_structure(self):
        sunk = []
        report = run_comparison(
            [(8, 45)],
            methods=("mca",),
            n_seeds=2,
            grid=SMALL,
            matrix_sink=lambda mat, pair, meth, seed: sunk.append(
                (pair, meth, seed, mat.normalized)
            ),
        )
        assert len(report.runs) == 2
        assert {r.seed for r in report.runs} == {0, 1}
        agg = report.aggregates["mca"]["8:45"]
        assert agg["runs"] == 2
        assert agg["mean_error"] is not None or agg["missing_peak"] > 0
        assert len(sunk) == 2
        assert all(entry[3] for entry in sunk)
        d = report.as_dict()
        assert d["runs"][0]["pair"] == {"m": 8, "n": 45}
        assert "aggregates" in d

    def test_rejects_empty_and_unknown(self):
        with pytest.raises(InvalidInputError):
            run_comparison([], methods=("mca",), n_seeds=1)
        with pytest.raises(InvalidMethodError):
            run_comparison([(8, 45)], methods=("nope",), n_seeds=1)

    def test_jobs_do_not_change_results(self):
        kw = dict(methods=("mca",), n_seeds=2, grid=SMALL)
        serial = run_comparison([(8, 45)], **kw)
        threaded = run_comparison([(8, 45)], jobs=4, **kw)
        assert [r.found for r in serial.runs] == [r.found for r in threaded.runs]
        assert [r.error for r in serial.runs] == [r.error for r in threaded.runs]
