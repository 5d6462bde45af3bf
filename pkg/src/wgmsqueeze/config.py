"""Parameter files, the shipped preset and builders for the domain objects."""

import copy
import json
import logging
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from .cavity import CavityParams, OperatingPoint, threshold_power
from .constants import PRESET_NAME, PRESET_PACKAGE
from .detection import Beam, DetectionChain
from .errors import ParameterError
from .sweep import ChannelSpec, SweepConfig
from .utils import khz_to_hz, mhz_to_hz, uw_to_w

SCALAR_KEYS = (
    "gamma_p_MHz", "gamma_p0_MHz", "gamma_MHz", "coupling_ratio", "nu_det_MHz",
    "eta_twin", "eta_single", "threshold_uW", "pump_uW",
)
NESTED_KEYS = ("detection", "sweep_twin", "sweep_single", "simulate", "variance", "relax")
# Nested block -> keys that must hold numbers when present.
NESTED_NUMERIC_KEYS = {
    "detection": ("nu_center_MHz", "rbw_kHz", "vbw_kHz", "avg_count", "cmrr_imbalance", "electronic_floor"),
    "sweep_twin": ("span_MHz", "points", "sweep_time_ms"),
    "sweep_single": ("span_MHz", "points", "sweep_time_ms"),
    "simulate": ("duration_s", "sample_rate_MHz"),
    "variance": ("min", "max", "count"),
    "relax": ("sigma_min", "sigma_max", "count"),
}
# Nested block -> (key, allowed values) for the string-valued settings.
NESTED_CHOICE_KEYS = {
    "simulate": ("beam", ("twin", "single")),
    "variance": ("axis", ("sigma", "omega")),
}

# Command-line override name -> parameter key.
OVERRIDE_KEYS = {
    "pump_uw": "pump_uW",
    "threshold_uw": "threshold_uW",
    "gamma_mhz": "gamma_MHz",
    "gamma_p_mhz": "gamma_p_MHz",
    "coupling_ratio": "coupling_ratio",
    "nu_det_mhz": "nu_det_MHz",
}


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def load_preset(name: str = PRESET_NAME) -> Dict[str, Any]:
    """Load a preset shipped with the package.

    Args:
        name: Preset name without the .json suffix.

    Returns:
        A fresh copy of the preset dictionary.
    """
    try:
        text = resources.files(PRESET_PACKAGE).joinpath(f"{name}.json").read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ParameterError(f"unknown preset '{name}'") from None
    return json.loads(text)


def validate_parameters(params: Mapping[str, Any]) -> bool:
    """Basic structural check for a parameter dictionary.

    Only keys that are present are checked, so partial files that override
    a few values of the preset are valid.

    Args:
        params: Parameter dictionary to validate.

    Returns:
        True if the structure is valid, False otherwise.
    """
    if not isinstance(params, Mapping):
        return False

    for key in SCALAR_KEYS + ("k_threshold_W_per_Hz3", "sigma"):
        if key in params and not _is_number(params[key]):
            return False

    if "threshold_uW_options" in params:
        options = params["threshold_uW_options"]
        if not isinstance(options, list) or not all(_is_number(v) for v in options):
            return False

    for key in NESTED_KEYS:
        if key in params and not isinstance(params[key], dict):
            return False

    for block, keys in NESTED_NUMERIC_KEYS.items():
        values = params.get(block, {})
        if any(key in values and not _is_number(values[key]) for key in keys):
            return False

    for block, (key, allowed) in NESTED_CHOICE_KEYS.items():
        values = params.get(block, {})
        if key in values and values[key] not in allowed:
            return False

    for key in ("sweep_twin", "sweep_single"):
        channels = params.get(key, {}).get("channels", [])
        if not isinstance(channels, list):
            return False
        for channel in channels:
            if not isinstance(channel, dict):
                return False
            if not all(_is_number(channel.get(k)) for k in ("center_MHz", "sigma", "width_MHz")):
                return False

    return True


def merge_parameters(base: Mapping[str, Any], update: Mapping[str, Any]) -> Dict[str, Any]:
    """Merge update over base; nested blocks are merged one level deep."""
    merged = copy.deepcopy(dict(base))
    for key, value in update.items():
        if key in NESTED_KEYS and isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = {**merged[key], **value}
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def load_parameters(
    path: Optional[Union[str, Path]] = None,
    logger: Optional[logging.Logger] = None,
) -> Dict[str, Any]:
    """Load the preset and merge a user parameter file over it.

    An unreadable or structurally invalid file is reported and the preset is
    used instead.

    Args:
        path: Optional JSON parameter file.
        logger: Optional logger instance.

    Returns:
        The merged parameter dictionary.

    Raises:
        ParameterError: If path was given but does not exist.
    """
    logger = logger or logging.getLogger(__name__)
    params = load_preset()
    if path is None:
        return params

    param_path = Path(path)
    if not param_path.exists():
        raise ParameterError(f"parameter file not found: {param_path}")

    try:
        with open(param_path, "r", encoding="utf-8") as f:
            loaded = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.warning(f"Failed to read parameter file {param_path}: {e}; using {PRESET_NAME}")
        return params

    if not validate_parameters(loaded):
        logger.warning(f"Parameter file {param_path} has invalid structure, using {PRESET_NAME}")
        return params

    if "threshold_uW" in loaded and "k_threshold_W_per_Hz3" not in loaded:
        params.pop("k_threshold_W_per_Hz3", None)
    return merge_parameters(params, loaded)


def apply_overrides(params: Mapping[str, Any], overrides: Mapping[str, Optional[float]]) -> Dict[str, Any]:
    """Apply command-line overrides on top of the loaded parameters.

    Args:
        params: Parameter dictionary.
        overrides: Flag values keyed by argparse dest; None means not given.
            ``eta`` sets both detection efficiencies, ``sigma`` fixes the
            pump parameter instead of the pump power, ``nu_det_mhz`` also
            moves the analyzer center of the detection block.

    Returns:
        A new parameter dictionary.
    """
    updated = copy.deepcopy(dict(params))
    for dest, key in OVERRIDE_KEYS.items():
        value = overrides.get(dest)
        if value is not None:
            updated[key] = value
    if overrides.get("threshold_uw") is not None:
        updated.pop("k_threshold_W_per_Hz3", None)
    if overrides.get("nu_det_mhz") is not None:
        # The analyzer center follows the measurement frequency.
        detection = updated.get("detection")
        detection = dict(detection) if isinstance(detection, dict) else {}
        detection["nu_center_MHz"] = overrides["nu_det_mhz"]
        updated["detection"] = detection
    if overrides.get("eta") is not None:
        updated["eta_twin"] = updated["eta_single"] = overrides["eta"]
    if overrides.get("sigma") is not None:
        updated["sigma"] = overrides["sigma"]
    elif overrides.get("pump_uw") is not None:
        # An explicit pump power wins over a sigma taken from a file.
        updated.pop("sigma", None)
    return updated


def cavity_from_parameters(params: Mapping[str, Any]) -> CavityParams:
    """Build the resonator description from a parameter dictionary."""
    return CavityParams.from_coupling_ratio(
        gamma_p=mhz_to_hz(params["gamma_p_MHz"]),
        gamma_p0=mhz_to_hz(params["gamma_p0_MHz"]),
        gamma=mhz_to_hz(params["gamma_MHz"]),
        coupling_ratio=params["coupling_ratio"],
    )


def threshold_from_parameters(params: Mapping[str, Any]) -> float:
    """Threshold power (W): from the k constant when given, else threshold_uW."""
    k_const = params.get("k_threshold_W_per_Hz3")
    if k_const is not None:
        return threshold_power(k_const, mhz_to_hz(params["gamma_p_MHz"]), mhz_to_hz(params["gamma_MHz"]))
    return uw_to_w(params["threshold_uW"])


def operating_point_from_parameters(params: Mapping[str, Any], cavity: Optional[CavityParams] = None) -> OperatingPoint:
    """Operating point at pump_uW, or at an explicit sigma when one is set."""
    cavity = cavity or cavity_from_parameters(params)
    p_th = threshold_from_parameters(params)
    nu_det = mhz_to_hz(params["nu_det_MHz"])
    if params.get("sigma") is not None:
        return OperatingPoint.from_sigma(params["sigma"], p_th, nu_det, cavity)
    return OperatingPoint.from_powers(uw_to_w(params["pump_uW"]), p_th, nu_det, cavity)


def chain_from_parameters(params: Mapping[str, Any], beam: Union[Beam, str] = Beam.TWIN) -> DetectionChain:
    """Build the detection chain; the efficiency follows the beam configuration."""
    detection = params.get("detection", {})
    eta = params["eta_twin"] if Beam(beam) is Beam.TWIN else params["eta_single"]
    defaults = DetectionChain(eta=eta)
    return DetectionChain(
        eta=eta,
        cmrr_imbalance=detection.get("cmrr_imbalance", defaults.cmrr_imbalance),
        electronic_floor=detection.get("electronic_floor", defaults.electronic_floor),
        rbw=khz_to_hz(detection["rbw_kHz"]) if "rbw_kHz" in detection else defaults.rbw,
        vbw=khz_to_hz(detection["vbw_kHz"]) if "vbw_kHz" in detection else defaults.vbw,
        avg_count=int(detection.get("avg_count", defaults.avg_count)),
        nu_center=mhz_to_hz(detection.get("nu_center_MHz", params["nu_det_MHz"])),
    )


def sweep_config_from_parameters(
    params: Mapping[str, Any],
    beam: Union[Beam, str] = Beam.TWIN,
    with_channels: bool = True,
    fluctuations: bool = False,
) -> SweepConfig:
    """Build the sweep settings for the twin-beam or single-beam configuration."""
    block = params["sweep_twin"] if Beam(beam) is Beam.TWIN else params["sweep_single"]
    channels = tuple(
        ChannelSpec(
            center=mhz_to_hz(c["center_MHz"]),
            sigma=c["sigma"],
            width=mhz_to_hz(c["width_MHz"]),
        )
        for c in block.get("channels", [])
    ) if with_channels else ()
    return SweepConfig(
        channels=channels,
        span=mhz_to_hz(block.get("span_MHz", 80.0)),
        points=int(block.get("points", 500)),
        sweep_time=block.get("sweep_time_ms", 50.0) * 1e-3,
        fluctuations=fluctuations,
    )
