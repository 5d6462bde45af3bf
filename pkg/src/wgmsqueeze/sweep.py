"""Pump-detuning sweeps across the pump resonance."""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.ndimage import uniform_filter1d

from .cavity import CavityParams, normalized_sideband
from .constants import DEFAULT_SEED, PUMP_DIP_DEPTH
from .detection import DetectionChain
from .errors import ParameterError
from .variance import (
    NoiseKind,
    add_electronic_noise,
    single_beam_variance,
    twin_difference_variance,
    twin_sum_variance,
)

CSV_COLUMNS = ("detuning", "snl", "noise_diff", "noise_sum", "noise_single", "pump_transmission")


@dataclass(frozen=True)
class ChannelSpec:
    """One parametric downconversion channel crossed by the pump sweep.

    Attributes:
        center: Pump detuning at the channel center (Hz).
        sigma: Pump parameter reached at the channel center.
        width: Full detuning width over which the channel can oscillate (Hz).
    """
    center: float
    sigma: float
    width: float

    def __post_init__(self) -> None:
        if not self.width > 0:
            raise ParameterError(f"channel width must be positive, got {self.width!r}")
        if not self.sigma >= 0:
            raise ParameterError(f"channel sigma must be nonnegative, got {self.sigma!r}")

    @property
    def bounds(self) -> Tuple[float, float]:
        return self.center - self.width / 2.0, self.center + self.width / 2.0

    def sigma_at(self, detuning: np.ndarray) -> np.ndarray:
        """Pump parameter along the sweep: squared-Lorentzian taper, zero outside the channel."""
        offset = 2.0 * (np.asarray(detuning, dtype=float) - self.center) / self.width
        taper = self.sigma / (1.0 + offset ** 2) ** 2
        return np.where(np.abs(offset) <= 1.0, taper, 0.0)


@dataclass(frozen=True)
class SweepConfig:
    """Pump sweep settings.

    Attributes:
        channels: Non-overlapping PDC channels.
        span: Full detuning span, centered on the pump resonance (Hz).
        points: Number of analyzer points across the sweep.
        sweep_time: Duration of one sweep (s).
        fluctuations: Add seeded estimator noise to every reading.
    """
    channels: Tuple[ChannelSpec, ...] = field(default_factory=tuple)
    span: float = 80e6
    points: int = 500
    sweep_time: float = 50e-3
    fluctuations: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "channels", tuple(self.channels))
        if not self.span > 0:
            raise ParameterError("sweep span must be positive")
        if self.points < 2:
            raise ParameterError("a sweep needs at least two points")
        if not self.sweep_time > 0:
            raise ParameterError("sweep_time must be positive")
        ordered = sorted(self.channels, key=lambda channel: channel.center)
        for left, right in zip(ordered, ordered[1:]):
            if left.bounds[1] > right.bounds[0]:
                raise ParameterError(
                    f"channels at {left.center} Hz and {right.center} Hz overlap"
                )

    @classmethod
    def from_timing(
        cls,
        channels: Sequence[ChannelSpec],
        span: float,
        sweep_time: float = 50e-3,
        time_resolution: float = 1e-4,
        fluctuations: bool = False,
    ) -> "SweepConfig":
        """Derive the point count from the sweep time and analyzer time resolution."""
        points = int(round(sweep_time / time_resolution))
        return cls(tuple(channels), span, points, sweep_time, fluctuations)

    @property
    def time_resolution(self) -> float:
        return self.sweep_time / self.points


@dataclass(frozen=True, eq=False)
class SweepTrace:
    """Analyzer readings along one pump sweep.

    Noise readings are in SNU and include the electronic floor.

    Attributes:
        detuning: Pump detuning (Hz).
        snl: SNL reference reading.
        noise_sum: Sum-channel reading.
        noise_diff: Difference-channel reading.
        noise_single: Single-beam reading.
        channel_markers: (center detuning, sigma) for each channel.
        pump_transmission: Normalized pump transmission.
    """
    detuning: np.ndarray
    snl: np.ndarray
    noise_sum: np.ndarray
    noise_diff: np.ndarray
    noise_single: np.ndarray
    channel_markers: Tuple[Tuple[float, float], ...] = ()
    pump_transmission: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.pump_transmission is None:
            object.__setattr__(self, "pump_transmission", np.ones_like(self.detuning))
        length = self.detuning.shape
        for name in CSV_COLUMNS[1:]:
            if getattr(self, name).shape != length:
                raise ParameterError(f"{name} length differs from detuning length")
        if not np.all(self.snl > 0):
            raise ParameterError("snl entries must be positive")

    def __len__(self) -> int:
        return int(self.detuning.shape[0])

    def column(self, name: str) -> np.ndarray:
        """Return one of the CSV_COLUMNS arrays."""
        if name not in CSV_COLUMNS:
            raise KeyError(name)
        return getattr(self, name)

    def channel(self, kind: Union[NoiseKind, str]) -> np.ndarray:
        """Noise reading for a channel kind."""
        kind = NoiseKind(kind)
        return {
            NoiseKind.DIFFERENCE: self.noise_diff,
            NoiseKind.SUM: self.noise_sum,
            NoiseKind.SINGLE_BEAM: self.noise_single,
        }[kind]


def pump_transmission(detuning: np.ndarray, gamma_p: float, depth: float = PUMP_DIP_DEPTH) -> np.ndarray:
    """Pump transmission dip: a Lorentzian of FWHM gamma_p centered at zero detuning."""
    return 1.0 - depth / (1.0 + (2.0 * np.asarray(detuning, dtype=float) / gamma_p) ** 2)


def _fluctuate(
    readings: np.ndarray, rng: np.random.Generator, degrees: float
) -> np.ndarray:
    return readings * rng.gamma(shape=degrees, scale=1.0 / degrees, size=readings.shape)


def detuning_sweep(
    cavity: CavityParams,
    chain: DetectionChain,
    sweep_cfg: SweepConfig,
    seed: int = DEFAULT_SEED,
    logger: Optional[logging.Logger] = None,
) -> SweepTrace:
    """Sweep the pump through its resonance and record all noise channels.

    Inside a channel where the local pump parameter exceeds 1 the readings
    follow the above-threshold variances; everywhere else they sit at the SNL.

    Args:
        cavity: Resonator parameters.
        chain: Detection chain; its nu_center sets the measurement sideband.
        sweep_cfg: Sweep settings and channel list.
        seed: Seed of the estimator fluctuations.
        logger: Optional logger instance.

    Returns:
        SweepTrace with sweep_cfg.points samples.
    """
    logger = logger or logging.getLogger(__name__)
    omega = normalized_sideband(chain.nu_center, cavity)
    ratio = cavity.coupling_ratio
    detuning = np.linspace(-sweep_cfg.span / 2.0, sweep_cfg.span / 2.0, sweep_cfg.points)

    sigma = np.zeros_like(detuning)
    for channel in sweep_cfg.channels:
        sigma += channel.sigma_at(detuning)
    active = sigma > 1.0

    v_diff = np.ones_like(detuning)
    v_sum = np.ones_like(detuning)
    v_single = np.ones_like(detuning)
    if np.any(active):
        v_diff[active] = twin_difference_variance(ratio, chain.eta, omega).value_snu
        v_sum[active] = [twin_sum_variance(ratio, chain.eta, omega, s).value_snu for s in sigma[active]]
        v_single[active] = [single_beam_variance(ratio, chain.eta, omega, s).value_snu for s in sigma[active]]

    readings = [np.ones_like(detuning)] + [
        add_electronic_noise(v, chain.electronic_floor) for v in (v_diff, v_sum, v_single)
    ]
    if sweep_cfg.fluctuations:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        degrees = chain.rbw / chain.vbw
        readings = [_fluctuate(r, rng, degrees) for r in readings]
    if chain.avg_count > 1:
        readings = [uniform_filter1d(r, size=chain.avg_count, mode="nearest") for r in readings]
    snl, noise_diff, noise_sum, noise_single = readings

    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            f"Sweep: {sweep_cfg.points} points, {len(sweep_cfg.channels)} channels, "
            f"{int(np.count_nonzero(active))} points above threshold"
        )

    return SweepTrace(
        detuning=detuning,
        snl=snl,
        noise_sum=noise_sum,
        noise_diff=noise_diff,
        noise_single=noise_single,
        channel_markers=tuple((c.center, c.sigma) for c in sweep_cfg.channels),
        pump_transmission=pump_transmission(detuning, cavity.gamma_p),
    )


def channel_minimum(trace: SweepTrace, channel: ChannelSpec, kind: Union[NoiseKind, str]) -> float:
    """Lowest reading of a noise channel inside one PDC channel."""
    low, high = channel.bounds
    inside = (trace.detuning >= low) & (trace.detuning <= high)
    if not np.any(inside):
        raise ParameterError(f"no sweep points inside the channel at {channel.center} Hz")
    return float(np.min(trace.channel(kind)[inside]))


def channel_maximum(trace: SweepTrace, channel: ChannelSpec, kind: Union[NoiseKind, str]) -> float:
    """Highest reading of a noise channel inside one PDC channel."""
    low, high = channel.bounds
    inside = (trace.detuning >= low) & (trace.detuning <= high)
    if not np.any(inside):
        raise ParameterError(f"no sweep points inside the channel at {channel.center} Hz")
    return float(np.max(trace.channel(kind)[inside]))
