"""paclab: narrowband phase-amplitude coupling detection and the
comodulogram tooling around it.

The central measure scores how strongly the envelope of a fast band
(carrier n, reconstructed together with its n-m and n+m sidebands) is
phase-locked to a slow component at m Hz. Four standard wideband
measures, a coupled-signal synthesizer with pink noise, Welch spectra,
and a CLI are included for benchmarking.
"""

__version__ = "0.1.0"

from .comodulogram import (
    METHODS,
    FilterBank,
    GridSpec,
    PacMatrix,
    PacReport,
    argmax,
    compute_matrix,
    localization_error,
    normalize,
    run_comparison,
)
from .errors import (
    AliasingError,
    DegenerateDistributionError,
    DegeneratePhaseError,
    EmptyResultError,
    InvalidInputError,
    InvalidMethodError,
    OutOfBandError,
    PacError,
    SignalTooShortError,
    UnreliableEstimateError,
)
from .estimator import PacAnalyzer
from .filters import FilterSpec, bandpass, morlet_bandpass, triplet
from .io import (
    manifest_path,
    read_json,
    read_matrix_csv,
    read_signal_csv,
    write_json,
    write_manifest,
    write_matrix_csv,
    write_pgm,
    write_signal_csv,
)
from .measures import (
    MeasureConfig,
    PhaseAmplitudeDistribution,
    bin_amplitude_by_phase,
    cv,
    envelope_phase,
    eps,
    kld,
    kld_from_distribution,
    mca_pac,
    mvl,
    plv,
    vector_length,
)
from .signal_core import (
    ComplexSeries,
    Signal,
    amplitude,
    analytic,
    instantaneous_frequency,
    phase,
    power,
    trim,
)
from .spectral import Spectrum, WelchSpec, coherence, welch_psd
from .synthesis import (
    BENCHMARK_PAIRS,
    SynthesisSpec,
    benchmark_spec,
    clean_power_unit,
    pink_noise,
    snr,
    synth_pac,
)

__all__ = [
    "__version__",
    "METHODS",
    "BENCHMARK_PAIRS",
    "AliasingError",
    "ComplexSeries",
    "DegenerateDistributionError",
    "DegeneratePhaseError",
    "EmptyResultError",
    "FilterBank",
    "FilterSpec",
    "GridSpec",
    "InvalidInputError",
    "InvalidMethodError",
    "MeasureConfig",
    "OutOfBandError",
    "PacAnalyzer",
    "PacError",
    "PacMatrix",
    "PacReport",
    "PhaseAmplitudeDistribution",
    "Signal",
    "SignalTooShortError",
    "Spectrum",
    "SynthesisSpec",
    "UnreliableEstimateError",
    "WelchSpec",
    "amplitude",
    "analytic",
    "argmax",
    "bandpass",
    "benchmark_spec",
    "bin_amplitude_by_phase",
    "clean_power_unit",
    "coherence",
    "compute_matrix",
    "cv",
    "envelope_phase",
    "eps",
    "instantaneous_frequency",
    "kld",
    "kld_from_distribution",
    "localization_error",
    "manifest_path",
    "mca_pac",
    "morlet_bandpass",
    "mvl",
    "normalize",
    "phase",
    "pink_noise",
    "plv",
    "power",
    "read_json",
    "read_matrix_csv",
    "read_signal_csv",
    "run_comparison",
    "snr",
    "synth_pac",
    "trim",
    "triplet",
    "vector_length",
    "welch_psd",
    "write_json",
    "write_manifest",
    "write_matrix_csv",
    "write_pgm",
    "write_signal_csv",
]
