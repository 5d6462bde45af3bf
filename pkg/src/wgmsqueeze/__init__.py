"""Standardize the public API for the wgmsqueeze package."""

from .cavity import (
    CavityParams,
    CouplingRegime,
    OperatingPoint,
    calibrate_threshold_constant,
    coupling_regime,
    normalized_sideband,
    pump_parameter,
    threshold_power,
)
from .config import (
    apply_overrides,
    cavity_from_parameters,
    chain_from_parameters,
    load_parameters,
    load_preset,
    sweep_config_from_parameters,
    validate_parameters,
)
from .constants import DEFAULT_SEED, PRESET_NAME
from .core import RunSettings
from .detection import (
    Beam,
    CombineMode,
    DetectionChain,
    PhotocurrentPair,
    ZeroSpanResult,
    analyze_pair,
    balanced_combine,
    dark_photocurrents,
    estimator_standard_error,
    implied_rejection_db,
    shot_noise_reference,
    simulate_photocurrents,
    zero_span_analyze,
)
from .engine import CommandEngine
from .errors import (
    CorrectionError,
    DataParseError,
    DivergenceError,
    FitConvergenceError,
    ParameterError,
    WgmSqueezeError,
)
from .fitting import (
    FitConfig,
    FitPoint,
    FitResult,
    fit_single_beam_noise,
    fitted_curve,
    mean_squeezing,
    synthetic_single_beam_data,
)
from .sweep import ChannelSpec, SweepConfig, SweepTrace, channel_minimum, detuning_sweep, pump_transmission
from .variance import (
    NoiseKind,
    NoiseResult,
    RelaxationInfo,
    add_electronic_noise,
    apply_passive_loss,
    correct_electronic_noise,
    critical_coupling_limits,
    from_db,
    relaxation_frequency,
    relaxation_pump_band,
    single_beam_asymptote,
    single_beam_variance,
    to_db,
    twin_difference_variance,
    twin_sum_variance,
)
from .writer import ResultWriter, Table, read_fit_data, read_table

__version__ = "0.1.0"

__all__ = [
    "CavityParams",
    "CouplingRegime",
    "OperatingPoint",
    "calibrate_threshold_constant",
    "coupling_regime",
    "normalized_sideband",
    "pump_parameter",
    "threshold_power",
    "apply_overrides",
    "cavity_from_parameters",
    "chain_from_parameters",
    "load_parameters",
    "load_preset",
    "sweep_config_from_parameters",
    "validate_parameters",
    "DEFAULT_SEED",
    "PRESET_NAME",
    "RunSettings",
    "Beam",
    "CombineMode",
    "DetectionChain",
    "PhotocurrentPair",
    "ZeroSpanResult",
    "analyze_pair",
    "balanced_combine",
    "dark_photocurrents",
    "estimator_standard_error",
    "implied_rejection_db",
    "shot_noise_reference",
    "simulate_photocurrents",
    "zero_span_analyze",
    "CommandEngine",
    "CorrectionError",
    "DataParseError",
    "DivergenceError",
    "FitConvergenceError",
    "ParameterError",
    "WgmSqueezeError",
    "FitConfig",
    "FitPoint",
    "FitResult",
    "fit_single_beam_noise",
    "fitted_curve",
    "mean_squeezing",
    "synthetic_single_beam_data",
    "ChannelSpec",
    "SweepConfig",
    "SweepTrace",
    "channel_minimum",
    "detuning_sweep",
    "pump_transmission",
    "NoiseKind",
    "NoiseResult",
    "RelaxationInfo",
    "add_electronic_noise",
    "apply_passive_loss",
    "correct_electronic_noise",
    "critical_coupling_limits",
    "from_db",
    "relaxation_frequency",
    "relaxation_pump_band",
    "single_beam_asymptote",
    "single_beam_variance",
    "to_db",
    "twin_difference_variance",
    "twin_sum_variance",
    "ResultWriter",
    "Table",
    "read_fit_data",
    "read_table",
]
