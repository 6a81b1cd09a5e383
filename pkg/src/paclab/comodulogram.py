"""Comodulogram engine: evaluate a coupling measure over the (m, n) grid,
normalize, locate maxima, and compare methods across seeds."""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import filters, measures
from .errors import (
    DegenerateDistributionError,
    DegeneratePhaseError,
    InvalidInputError,
    InvalidMethodError,
    OutOfBandError,
)
from .filters import FilterSpec
from .measures import MeasureConfig
from .signal_core import Signal
from .synthesis import SynthesisSpec, clean_power_unit, synth_pac

METHODS = ("mca", "eps", "mvl", "cv", "kld")

_MEASURE_FNS = {
    "mca": measures.mca_pac,
    "eps": measures.eps,
    "mvl": measures.mvl,
    "cv": measures.cv,
    "kld": measures.kld,
}

# Errors that mean "this cell has nothing to score", not "the run is broken".
_ZERO_CELL_ERRORS = (OutOfBandError, DegeneratePhaseError, DegenerateDistributionError)


@dataclass(frozen=True)
class GridSpec:
    """Integer Hz evaluation grid, 1 Hz step, both ranges inclusive."""

    m_start: int = 1
    m_stop: int = 50
    n_start: int = 1
    n_stop: int = 50

    def __post_init__(self):
        for v in (self.m_start, self.m_stop, self.n_start, self.n_stop):
            if int(v) != v or v < 1:
                raise InvalidInputError("grid bounds must be integers >= 1")
        if self.m_stop < self.m_start or self.n_stop < self.n_start:
            raise InvalidInputError("grid ranges must be nondecreasing")

    @property
    def m_values(self) -> np.ndarray:
        return np.arange(self.m_start, self.m_stop + 1)

    @property
    def n_values(self) -> np.ndarray:
        return np.arange(self.n_start, self.n_stop + 1)


@dataclass(frozen=True)
class PacMatrix:
    """Coupling values on the grid; rows follow n, columns follow m."""

    values: np.ndarray
    method: str
    normalized: bool
    grid: GridSpec
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        expected = (len(self.grid.n_values), len(self.grid.m_values))
        if v.shape != expected:
            raise InvalidInputError(f"values shape {v.shape} does not match grid {expected}")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise InvalidInputError("matrix values must be finite and nonnegative")
        mm, nn = np.meshgrid(self.grid.m_values, self.grid.n_values)
        if np.any(v[mm >= nn] != 0.0):
            raise InvalidInputError("cells with m >= n must be zero")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def cell(self, m: int, n: int) -> float:
        i = int(n) - self.grid.n_start
        j = int(m) - self.grid.m_start
        return float(self.values[i, j])


class FilterBank:
    """Cached band outputs of one input signal.

    Keyed by (family, center, bandwidth-or-cycles). Plain dict storage:
    concurrent readers are safe, concurrent first-fill may compute a band
    twice and the identical result wins.
    """

    def __init__(self, x: Signal):
        self.x = x
        self._cache: dict = {}

    def gabor(self, center: float, bw: float) -> np.ndarray:
        key = ("gabor", float(center), float(bw))
        out = self._cache.get(key)
        if out is None:
            out = filters.bandpass(self.x, FilterSpec(center=center, bw_hz=bw)).samples
            self._cache[key] = out
        return out

    def morlet(self, center: float, cycles: float) -> np.ndarray:
        key = ("morlet", float(center), float(cycles))
        out = self._cache.get(key)
        if out is None:
            out = filters.morlet_bandpass(self.x, center, cycles).values
            self._cache[key] = out
        return out

    @property
    def n_filterings(self) -> int:
        return len(self._cache)


def compute_matrix(
    x: Signal,
    method: str = "mca",
    grid: GridSpec | None = None,
    cfg: MeasureConfig | None = None,
    jobs: Optional[int] = None,
    use_cache: bool = True,
) -> PacMatrix:
    """Evaluate one measure at every cell with m < n.

    Cells outside the measure's valid band and degenerate cells score 0,
    so the result is always a complete triangular matrix. With jobs > 1
    cells are evaluated by a thread pool; results are identical to the
    serial order because every cell is a pure function.
    """
    if method not in _MEASURE_FNS:
        raise InvalidMethodError(f"unknown method {method!r}; pick one of {METHODS}")
    grid = grid or GridSpec()
    cfg = cfg or MeasureConfig()
    if grid.n_stop >= x.fs / 2:
        raise InvalidInputError(
            f"grid reaches {grid.n_stop} Hz, at or above Nyquist {x.fs / 2} Hz"
        )
    fn = _MEASURE_FNS[method]
    bank = FilterBank(x) if use_cache else None
    n_vals = grid.n_values
    m_vals = grid.m_values
    out = np.zeros((len(n_vals), len(m_vals)))

    cells = [
        (i, j, int(m), int(n))
        for i, n in enumerate(n_vals)
        for j, m in enumerate(m_vals)
        if m < n
    ]

    def one(cell):
        i, j, m, n = cell
        try:
            v = fn(x, m, n, cfg, bands=bank)
        except _ZERO_CELL_ERRORS:
            v = 0.0
        return i, j, v

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, cells))
    else:
        results = [one(c) for c in cells]
    for i, j, v in results:
        out[i, j] = v

    meta = {
        "fs": x.fs,
        "n_samples": len(x),
        "config": {
            "mca_bw": cfg.mca_bw,
            "morlet_cycles": cfg.morlet_cycles,
            "kld_bins": cfg.kld_bins,
            "edge_trim": cfg.edge_trim,
            "welch_window": cfg.welch.window_len,
            "welch_overlap": cfg.welch.overlap,
        },
        "cached_filterings": bank.n_filterings if bank is not None else None,
    }
    return PacMatrix(out, method, False, grid, meta)


def normalize(mat: PacMatrix) -> PacMatrix:
    """Scale so the largest cell is exactly 1; an all-zero matrix only
    gets its flag set. Applying twice changes nothing."""
    mx = float(mat.values.max()) if mat.values.size else 0.0
    vals = mat.values if mx <= 0 else mat.values / mx
    return PacMatrix(vals, mat.method, True, mat.grid, dict(mat.meta))


def argmax(mat: PacMatrix):
    """Largest cell as (m, n, value); ties go to the smallest n, then the
    smallest m. Returns None when every cell is zero."""
    vals = mat.values
    best = 0.0
    found = None
    for i, n in enumerate(mat.grid.n_values):
        for j, m in enumerate(mat.grid.m_values):
            v = vals[i, j]
            if v > best:
                best = v
                found = (int(m), int(n), float(v))
    return found


def localization_error(found, truth) -> float:
    """Grid (Manhattan) distance between a detected and a true cell.

    `found` may be the argmax triple or None; None maps to +inf so a
    missing peak never masquerades as a good detection.
    """
    if found is None:
        return math.inf
    fm, fn = found[0], found[1]
    tm, tn = truth[0], truth[1]
    return float(abs(fm - tm) + abs(fn - tn))


@dataclass
class ComparisonRun:
    """One (pair, method, seed) evaluation."""

    pair: tuple
    method: str
    seed: int
    found: Optional[tuple]
    peak: float
    error: float


@dataclass
class PacReport:
    """Comparison results plus per-(method, pair) error aggregates."""

    runs: list
    aggregates: dict

    def as_dict(self) -> dict:
        return {
            "runs": [
                {
                    "pair": {"m": r.pair[0], "n": r.pair[1]},
                    "method": r.method,
                    "seed": r.seed,
                    "argmax": None if r.found is None else {
                        "m": r.found[0], "n": r.found[1], "value": r.found[2]
                    },
                    "error": None if math.isinf(r.error) else r.error,
                }
                for r in self.runs
            ],
            "aggregates": self.aggregates,
        }


def _aggregate(errors: list) -> dict:
    finite = [e for e in errors if not math.isinf(e)]
    missing = len(errors) - len(finite)
    agg = {
        "runs": len(errors),
        "missing_peak": missing,
        "mean_error": None,
        "median_error": None,
        "max_error": None,
    }
    if finite and not missing:
        agg["mean_error"] = float(statistics.fmean(errors))
        agg["median_error"] = float(statistics.median(errors))
        agg["max_error"] = float(max(errors))
    elif finite:
        # keep the medians of what exists, flag the rest as missing
        agg["median_error"] = float(statistics.median(finite))
    return agg


def run_comparison(
    pairs,
    methods=METHODS,
    n_seeds: int = 10,
    *,
    ami: float = 0.25,
    duration: float = 10.0,
    fs: float = 1000.0,
    noise_power: float = 6250.0,
    clean_power: Optional[float] = 630.0,
    clean_scale: Optional[float] = None,
    grid: GridSpec | None = None,
    cfg: MeasureConfig | None = None,
    jobs: Optional[int] = None,
    base_seed: int = 0,
    matrix_sink: Optional[Callable] = None,
) -> PacReport:
    """Synthesize each pair over seeds, run every method, collect errors.

    matrix_sink, when given, receives (matrix, pair, method, seed) for
    each normalized matrix; results are deterministic for a fixed
    base_seed regardless of jobs.
    """
    pairs = [tuple(p) for p in pairs]
    methods = list(methods)
    if not pairs:
        raise InvalidInputError("need at least one (m, n) pair")
    for meth in methods:
        if meth not in _MEASURE_FNS:
            raise InvalidMethodError(f"unknown method {meth!r}")
    grid = grid or GridSpec()
    cfg = cfg or MeasureConfig()
    if clean_scale is None:
        scale = 1.0 if clean_power is None else math.sqrt(
            clean_power / clean_power_unit(ami)
        )
    else:
        scale = clean_scale

    tasks = []
    for pair in pairs:
        for seed in range(base_seed, base_seed + n_seeds):
            spec = SynthesisSpec(
                m=pair[0], n=pair[1], ami=ami, duration=duration, fs=fs,
                noise_power=noise_power, clean_scale=scale, seed=seed,
            )
            x = synth_pac(spec).composite
            for meth in methods:
                tasks.append((pair, meth, seed, x))

    def run_one(task):
        pair, meth, seed, x = task
        mat = normalize(compute_matrix(x, meth, grid, cfg))
        found = argmax(mat)
        err = localization_error(found, pair)
        peak = 0.0 if found is None else found[2]
        return ComparisonRun(pair, meth, seed, found, peak, err), mat

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run_one, tasks))
    else:
        outcomes = [run_one(t) for t in tasks]

    runs = []
    for run, mat in outcomes:
        runs.append(run)
        if matrix_sink is not None:
            matrix_sink(mat, run.pair, run.method, run.seed)

    aggregates: dict = {}
    for meth in methods:
        aggregates[meth] = {}
        for pair in pairs:
            errs = [r.error for r in runs if r.method == meth and r.pair == pair]
            aggregates[meth][f"{pair[0]}:{pair[1]}"] = _aggregate(errs)
    return PacReport(runs, aggregates)
