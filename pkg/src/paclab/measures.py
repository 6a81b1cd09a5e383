"""Phase-amplitude coupling measures.

Five estimators share this module: the narrowband-triplet measure
(mca_pac) and four reference measures (eps, mvl, cv, kld), plus the
phase-locking value and phase-binning support they build on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import hilbert

from . import filters
from .errors import (
    DegenerateDistributionError,
    DegeneratePhaseError,
    InvalidInputError,
    OutOfBandError,
    SignalTooShortError,
)
from .filters import FilterSpec, gabor_half_length, morlet_half_length
from .signal_core import Signal
from .spectral import WelchSpec, coherence

# Degeneracy thresholds, relative to the reference level of each check.
# A filtered band whose energy sits at the kernel's stopband floor carries
# no phase information worth scoring. The envelope floor must sit above the
# truncated kernel's DC leakage (about 1.4e-7 of a constant input) so that
# a flat envelope counts as having no m-component at all.
ENVELOPE_FLOOR_REL = 1e-6
SLOW_BAND_FLOOR_REL = 1e-6
TRIPLET_FLOOR_REL = 1e-6

# Sideband legs whose RMS ratio falls below this are one-sided: the cell's
# envelope beat rides a single sideband, which double-counts intersections
# with harmonics of the true modulation. Such cells keep half credit.
BALANCE_RATIO = 1.0 / 3.0
BALANCE_PENALTY = 0.5


@dataclass(frozen=True)
class MeasureConfig:
    """Shared knobs for all coupling measures."""

    mca_bw: float = 1.0
    morlet_cycles: float = 4.0
    kld_bins: int = 50
    edge_trim: Optional[int] = None  # None: largest kernel half-length in use
    welch: WelchSpec = WelchSpec()

    def __post_init__(self):
        if not (self.mca_bw > 0):
            raise InvalidInputError("mca_bw must be positive")
        if not (self.morlet_cycles >= 1):
            raise InvalidInputError("morlet_cycles must be at least 1")
        if self.kld_bins < 2:
            raise InvalidInputError("kld_bins must be at least 2")


@dataclass(frozen=True)
class PhaseAmplitudeDistribution:
    """Mean amplitude per phase bin, normalized to unit total."""

    bin_means: np.ndarray
    bin_counts: np.ndarray

    @property
    def n_bins(self) -> int:
        return len(self.bin_means)

    @property
    def bin_centers(self) -> np.ndarray:
        edges = np.linspace(-np.pi, np.pi, self.n_bins + 1)
        return 0.5 * (edges[:-1] + edges[1:])


class _DirectBands:
    """Uncached band provider; the comodulogram module supplies a cached one."""

    def __init__(self, x: Signal):
        self.x = x

    def gabor(self, center: float, bw: float) -> np.ndarray:
        return filters.bandpass(self.x, FilterSpec(center=center, bw_hz=bw)).samples

    def morlet(self, center: float, cycles: float) -> np.ndarray:
        return filters.morlet_bandpass(self.x, center, cycles).values


def _rms(a: np.ndarray) -> float:
    return float(np.sqrt(np.mean(a * a)))


def _as_array(series, name: str) -> np.ndarray:
    if isinstance(series, Signal):
        return series.samples
    a = np.asarray(series, dtype=float)
    if a.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional")
    return a


def _check_trim(n_total: int, tr: int) -> None:
    if n_total - 2 * tr < 8:
        raise SignalTooShortError(
            f"signal of {n_total} samples leaves nothing after trimming {tr} per edge"
        )


def plv(phase_u, phase_v) -> float:
    """Phase-locking value: modulus of the mean unit phasor of the
    phase difference. 1 means perfect locking, 0 none."""
    u = _as_array(phase_u, "phase_u")
    v = _as_array(phase_v, "phase_v")
    if u.size != v.size or u.size == 0:
        raise InvalidInputError("phase series must have equal nonzero length")
    return float(np.abs(np.mean(np.exp(1j * (u - v)))))


def envelope_phase(env: Signal, m: float, bw: float = 1.0) -> Signal:
    """Phase of an amplitude envelope's component at m Hz.

    A strictly positive envelope is DC-dominated, so its raw analytic
    phase is meaningless; band-passing at the modulation frequency first
    isolates the oscillation whose phase matters. Raises when the envelope
    has no usable m Hz content.
    """
    filtered = filters.bandpass(env, FilterSpec(center=m, bw_hz=bw))
    ref = _rms(env.samples)
    if _rms(filtered.samples) <= ENVELOPE_FLOOR_REL * max(ref, 1e-300):
        raise DegeneratePhaseError(f"envelope has no component at {m} Hz")
    z = hilbert(filtered.samples)
    p = np.angle(z)
    p = np.where(p == np.pi, -np.pi, p)
    return Signal(p, env.fs)


def mca_pac(x: Signal, m: float, n: float, cfg: MeasureConfig | None = None,
            bands=None) -> float:
    """Narrowband-triplet coupling strength of the (m, n) cell.

    The triplet of 1 Hz bands at n-m, n (doubled), n+m reconstructs the
    amplitude modulation of an n Hz carrier while rejecting wideband
    noise; the phase of that envelope's m Hz component is then compared
    against the phase of the slow band at m by PLV.

    The raw PLV saturates at any cell whose bands catch scaled copies of
    the same spectral lines, so three scale-invariant weights sharpen it:

    * capture: RMS ratio of the n band at nominal vs doubled bandwidth.
      Detuned centers lose narrowband energy twice as fast, so only a
      carrier actually centered on n scores full weight.
    * slow-band credibility: nested-band noise estimate at m. With narrow
      power p1 and doubled-bandwidth power p2, signal 2*p1 - p2 and noise
      p2 - p1 give an in-band SNR; cells whose slow band is mostly noise
      (or pure stopband floor) are suppressed or zeroed.
    * balance: a cell whose envelope beat rides one sideband leg only
      (the other near-empty) is an intersection artifact, not symmetric
      amplitude modulation; it keeps half credit.

    Degenerate cells score 0: empty slow band, empty carrier band, both
    sideband bands empty, or an envelope without an m component.
    """
    cfg = cfg or MeasureConfig()
    fs = x.fs
    if not (m >= 1) or n - m < 1 or n + m >= fs / 2:
        raise OutOfBandError(f"triplet bands for ({m}, {n}) Hz leave the valid range")
    provider = bands if bands is not None else _DirectBands(x)
    bw = cfg.mca_bw
    tr = cfg.edge_trim if cfg.edge_trim is not None else gabor_half_length(bw, fs)
    _check_trim(len(x), tr)

    xm = provider.gabor(m, bw)
    xm_t = xm[tr:-tr]
    x_ref = _rms(x.samples)
    if _rms(xm_t) <= SLOW_BAND_FLOOR_REL * x_ref:
        return 0.0

    xm_wide = provider.gabor(m, 2.0 * bw)
    p1 = float(np.mean(xm_t * xm_t))
    p2 = float(np.mean(xm_wide[tr:-tr] ** 2))
    s_est = 2.0 * p1 - p2
    if s_est <= 0.0:
        return 0.0
    n_est = p2 - p1
    if n_est <= 0.0 or s_est >= n_est:
        slow_weight = 1.0
    else:
        ratio = s_est / n_est
        slow_weight = ratio / (1.0 + ratio)

    lo = provider.gabor(n - m, bw)
    mid = provider.gabor(n, bw)
    hi = provider.gabor(n + m, bw)
    r_lo = _rms(lo[tr:-tr])
    r_mid = _rms(mid[tr:-tr])
    r_hi = _rms(hi[tr:-tr])
    # coupling needs a carrier at n and at least one sideband; a cell
    # holding only filter-tail residue of distant lines would otherwise
    # score on numerically coherent envelope ripple
    if r_mid <= TRIPLET_FLOOR_REL * x_ref:
        return 0.0
    if max(r_lo, r_hi) <= TRIPLET_FLOOR_REL * x_ref:
        return 0.0
    trip = lo + 2.0 * mid + hi

    env = np.abs(hilbert(trip))
    try:
        ph_env = envelope_phase(Signal(env, fs), m, bw)
    except DegeneratePhaseError:
        return 0.0
    ph_slow = np.angle(hilbert(xm))
    value = float(np.abs(np.mean(np.exp(1j * (ph_slow[tr:-tr] - ph_env.samples[tr:-tr])))))

    mid_wide = provider.gabor(n, 2.0 * bw)
    r_wide = _rms(mid_wide[tr:-tr])
    capture = 1.0 if r_wide == 0.0 else min(1.0, r_mid / r_wide)

    big = max(r_lo, r_hi)
    balance = 1.0 if (big == 0.0 or min(r_lo, r_hi) > big * BALANCE_RATIO) else BALANCE_PENALTY

    return value * capture * slow_weight * balance


def _morlet_pair(x, m, n, cfg, provider):
    zm = provider.morlet(m, cfg.morlet_cycles)
    zn = provider.morlet(n, cfg.morlet_cycles)
    return zm, zn


def _morlet_trim(x, m, n, cfg, with_envelope_filter: bool) -> int:
    if cfg.edge_trim is not None:
        return cfg.edge_trim
    tr = max(
        morlet_half_length(m, cfg.morlet_cycles, x.fs),
        morlet_half_length(n, cfg.morlet_cycles, x.fs),
    )
    if with_envelope_filter:
        tr = max(tr, gabor_half_length(cfg.mca_bw, x.fs))
    return tr


def _check_band(m: float, n: float, fs: float) -> None:
    if not (m >= 1):
        raise OutOfBandError("modulating frequency must be at least 1 Hz")
    if n >= fs / 2:
        raise OutOfBandError(f"modulated frequency {n} Hz reaches Nyquist")


def eps(x: Signal, m: float, n: float, cfg: MeasureConfig | None = None,
        bands=None) -> float:
    """Envelope phase synchronization with proportional-bandwidth filters.

    PLV between the slow band's phase and the phase of the fast band's
    envelope, both bands from Morlet filtering. Degenerate envelopes
    score 0.
    """
    cfg = cfg or MeasureConfig()
    _check_band(m, n, x.fs)
    provider = bands if bands is not None else _DirectBands(x)
    zm, zn = _morlet_pair(x, m, n, cfg, provider)
    tr = _morlet_trim(x, m, n, cfg, with_envelope_filter=True)
    _check_trim(len(x), tr)
    env = Signal(np.abs(zn), x.fs)
    try:
        ph_env = envelope_phase(env, m, cfg.mca_bw)
    except DegeneratePhaseError:
        return 0.0
    ph_slow = np.angle(zm)
    return float(np.abs(np.mean(np.exp(
        1j * (ph_slow[tr:-tr] - ph_env.samples[tr:-tr])
    ))))


def vector_length(phase, amp) -> float:
    """Modulus of the amplitude-weighted mean phasor |mean(a*e^{i*phase})|."""
    ph = _as_array(phase, "phase")
    a = _as_array(amp, "amp")
    if len(ph) != len(a):
        raise InvalidInputError("phase and amp lengths differ")
    return float(np.abs(np.mean(a * np.exp(1j * ph))))


def mvl(x: Signal, m: float, n: float, cfg: MeasureConfig | None = None,
        bands=None) -> float:
    """Mean vector length: amplitude-weighted mean phasor of the slow phase."""
    cfg = cfg or MeasureConfig()
    _check_band(m, n, x.fs)
    provider = bands if bands is not None else _DirectBands(x)
    zm, zn = _morlet_pair(x, m, n, cfg, provider)
    tr = _morlet_trim(x, m, n, cfg, with_envelope_filter=False)
    _check_trim(len(x), tr)
    return vector_length(np.angle(zm)[tr:-tr], np.abs(zn)[tr:-tr])


def cv(x: Signal, m: float, n: float, cfg: MeasureConfig | None = None,
       bands=None) -> float:
    """Coherence between the raw signal and the fast band's envelope,
    read at the bin nearest the modulating frequency."""
    cfg = cfg or MeasureConfig()
    _check_band(m, n, x.fs)
    provider = bands if bands is not None else _DirectBands(x)
    zn = provider.morlet(n, cfg.morlet_cycles)
    tr = cfg.edge_trim if cfg.edge_trim is not None else morlet_half_length(
        n, cfg.morlet_cycles, x.fs
    )
    _check_trim(len(x), tr)
    raw = Signal(x.samples[tr:-tr], x.fs)
    env = Signal(np.abs(zn)[tr:-tr], x.fs)
    spectrum = coherence(raw, env, cfg.welch)
    return spectrum.value_at(m)


def bin_amplitude_by_phase(phase, amp, n_bins: int) -> PhaseAmplitudeDistribution:
    """Mean amplitude in each of n_bins equal phase bins over [-pi, pi).

    Bin means are normalized to sum to one; empty bins contribute zero and
    are visible through bin_counts.
    """
    ph = _as_array(phase, "phase")
    a = _as_array(amp, "amp")
    if ph.size != a.size or ph.size == 0:
        raise InvalidInputError("phase and amp must have equal nonzero length")
    if int(n_bins) < 2:
        raise InvalidInputError("need at least 2 bins")
    if np.any(a < 0):
        raise InvalidInputError("amplitudes must be nonnegative")
    n_bins = int(n_bins)
    idx = np.floor((ph + np.pi) / (2.0 * np.pi) * n_bins).astype(int)
    idx = np.clip(idx, 0, n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    sums = np.bincount(idx, weights=a, minlength=n_bins)
    means = np.zeros(n_bins)
    nonempty = counts > 0
    means[nonempty] = sums[nonempty] / counts[nonempty]
    total = means.sum()
    if total <= 0.0:
        raise DegenerateDistributionError("no amplitude mass to distribute")
    return PhaseAmplitudeDistribution(means / total, counts)


def kld_from_distribution(dist: PhaseAmplitudeDistribution) -> float:
    """Normalized entropy deficit of a phase-amplitude distribution."""
    p = dist.bin_means
    nz = p > 0
    h = -float(np.sum(p[nz] * np.log(p[nz])))
    value = 1.0 - h / math.log(dist.n_bins)
    value = min(1.0, max(0.0, value))
    # a uniform distribution must score exactly zero, not summation dust
    if value < 1e-12:
        value = 0.0
    return value


def kld(x: Signal, m: float, n: float, cfg: MeasureConfig | None = None,
        bands=None) -> float:
    """Entropy-based coupling: deviation of the amplitude-by-phase
    distribution from uniformity, normalized to [0, 1]."""
    cfg = cfg or MeasureConfig()
    _check_band(m, n, x.fs)
    provider = bands if bands is not None else _DirectBands(x)
    zm, zn = _morlet_pair(x, m, n, cfg, provider)
    tr = _morlet_trim(x, m, n, cfg, with_envelope_filter=False)
    _check_trim(len(x), tr)
    ph = np.angle(zm)[tr:-tr]
    a = np.abs(zn)[tr:-tr]
    dist = bin_amplitude_by_phase(ph, a, cfg.kld_bins)
    return kld_from_distribution(dist)
