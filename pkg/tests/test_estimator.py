"""Estimator front end: parameter handling and fitted state."""

import numpy as np
import pytest

from paclab import (
    GridSpec,
    InvalidInputError,
    PacAnalyzer,
    benchmark_spec,
    synth_pac,
)

SMALL = GridSpec(m_start=6, m_stop=10, n_start=42, n_stop=48)


def coupled(seed=0):
    return synth_pac(benchmark_spec((8, 45), seed=seed)).composite


class TestParams:
    def test_get_params_round_trip(self):
        est = PacAnalyzer(method="eps", jobs=2, fs=500.0)
        params = est.get_params()
        clone = PacAnalyzer(**params)
        assert clone.get_params() == params

    def test_set_params_chains(self):
        est = PacAnalyzer().set_params(method="kld", grid=SMALL)
        assert est.method == "kld"
        assert est.grid == SMALL

    def test_unknown_param_rejected(self):
        with pytest.raises(InvalidInputError):
            PacAnalyzer().set_params(bogus=1)

    def test_defaults(self):
        est = PacAnalyzer()
        assert est.method == "mca"
        assert est.normalize is True
        assert est.grid is None


class TestFit:
    def test_fit_exposes_matrix_and_peak(self):
        est = PacAnalyzer(grid=SMALL)
        out = est.fit(coupled())
        assert out is est
        assert est.matrix_.normalized
        assert est.n_samples_in_ == 10000
        m, n, v = est.argmax_
        assert (m, n) == (8, 45)
        assert v == 1.0

    def test_fit_without_normalize(self):
        est = PacAnalyzer(grid=SMALL, normalize=False)
        est.fit(coupled())
        assert not est.matrix_.normalized

    def test_raw_array_needs_fs(self):
        x = coupled()
        with pytest.raises(InvalidInputError):
            PacAnalyzer(grid=SMALL).fit(x.samples)
        est = PacAnalyzer(grid=SMALL, fs=1000.0).fit(x.samples)
        assert est.argmax_[:2] == (8, 45)

    def test_2d_input_rejected(self):
        with pytest.raises(InvalidInputError):
            PacAnalyzer(fs=1000.0).fit(np.zeros((10, 10)))


class TestTransform:
    def test_transform_matches_fit(self):
        x = coupled()
        est = PacAnalyzer(grid=SMALL)
        fitted = est.fit_transform(x)
        fresh = PacAnalyzer(grid=SMALL).transform(x)
        assert np.array_equal(fitted, fresh)

    def test_transform_leaves_fitted_state_alone(self):
        est = PacAnalyzer(grid=SMALL)
        est.fit(coupled(seed=0))
        kept = est.matrix_
        est.transform(coupled(seed=1))
        assert est.matrix_ is kept

    def test_transform_output_is_detached(self):
        est = PacAnalyzer(grid=SMALL)
        vals = est.fit_transform(coupled())
        vals[0, 0] = 123.0
        assert est.matrix_.values[0, 0] != 123.0
