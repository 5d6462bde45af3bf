"""Balanced detection chain: photocurrent synthesis, sum/difference combining and zero-span analysis."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.signal import butter, sosfilt

from .cavity import CavityParams, OperatingPoint
from .constants import BANDPASS_ORDER, DEFAULT_WORKERS, SEGMENT_SAMPLES, VIDEO_ORDER
from .errors import ParameterError
from .variance import (
    apply_passive_loss,
    single_beam_variance,
    twin_difference_variance,
    twin_sum_variance,
)


class CombineMode(str, Enum):
    """Output of the balanced detector pair."""

    SUM = "sum"
    DIFFERENCE = "difference"


class Beam(str, Enum):
    """What the two detectors look at."""

    TWIN = "twin"      # signal on one detector, idler on the other
    SINGLE = "single"  # one beam split 50/50 (self-homodyne)


@dataclass(frozen=True)
class DetectionChain:
    """Detector pair and spectrum-analyzer settings.

    Attributes:
        eta: Total detection efficiency in [0, 1].
        cmrr_imbalance: Fractional gain mismatch between the detectors.
        electronic_floor: Electronic noise in SNU, in [0, 1).
        rbw: Resolution bandwidth (Hz).
        vbw: Video bandwidth (Hz), below rbw.
        avg_count: Length of the running average in analyzer points.
        nu_center: Zero-span center frequency (Hz).
    """
    eta: float
    cmrr_imbalance: float = 0.0
    electronic_floor: float = 0.0
    rbw: float = 300e3
    vbw: float = 10e3
    avg_count: int = 50
    nu_center: float = 3.2e6

    def __post_init__(self) -> None:
        if not 0 <= self.eta <= 1:
            raise ParameterError(f"eta must lie in [0, 1], got {self.eta!r}")
        if not self.cmrr_imbalance >= 0:
            raise ParameterError("cmrr_imbalance must be nonnegative")
        if not 0 <= self.electronic_floor < 1:
            raise ParameterError("electronic_floor must lie in [0, 1)")
        if not self.rbw > self.vbw > 0:
            raise ParameterError(f"need rbw > vbw > 0, got rbw={self.rbw}, vbw={self.vbw}")
        if self.avg_count < 1:
            raise ParameterError("avg_count must be at least 1")
        if not self.nu_center - self.rbw / 2 > 0:
            raise ParameterError("nu_center must exceed rbw / 2")

    @property
    def implied_rejection_db(self) -> float:
        """Common-mode rejection implied by the gain imbalance (dB)."""
        return implied_rejection_db(self.cmrr_imbalance)


@dataclass(frozen=True, eq=False)
class PhotocurrentPair:
    """Fluctuation samples of the two detectors.

    Attributes:
        sample_rate: Samples per second.
        duration: Record length (s).
        seed: Seed the traces were generated from.
        signal_trace: Detector 1 samples (SNL per detector = unit variance).
        idler_trace: Detector 2 samples.
        beam: Whether the detectors see twin beams or a split single beam.
    """
    sample_rate: float
    duration: float
    seed: int
    signal_trace: np.ndarray
    idler_trace: np.ndarray
    beam: Beam = Beam.TWIN

    def __post_init__(self) -> None:
        expected = sample_count(self.sample_rate, self.duration)
        if self.signal_trace.shape != (expected,) or self.idler_trace.shape != (expected,):
            raise ParameterError(
                f"traces must both hold {expected} samples, got "
                f"{self.signal_trace.shape} and {self.idler_trace.shape}"
            )

    @property
    def n_samples(self) -> int:
        return int(self.signal_trace.shape[0])

    @property
    def times(self) -> np.ndarray:
        """Sample times (s)."""
        return np.arange(self.n_samples) / self.sample_rate


@dataclass(frozen=True, eq=False)
class ZeroSpanResult:
    """Zero-span reading of one channel.

    Attributes:
        times: Time of each analyzer point (s).
        power_snu: Video-filtered, averaged power normalized to the SNL.
        mean_snu: Mean detected power over the settled record, normalized to the SNL.
        standard_error: Standard error of mean_snu.
    """
    times: np.ndarray
    power_snu: np.ndarray
    mean_snu: float
    standard_error: float


def sample_count(sample_rate: float, duration: float) -> int:
    """Number of samples in a record, floor(sample_rate * duration)."""
    if sample_rate <= 0 or duration <= 0:
        raise ParameterError("sample_rate and duration must be positive")
    return int(math.floor(sample_rate * duration))


def implied_rejection_db(epsilon: float) -> float:
    """Rejection of a common-mode input relative to one detector's contribution (dB)."""
    if epsilon < 0:
        raise ParameterError("epsilon must be nonnegative")
    if epsilon == 0:
        return math.inf
    return -10.0 * math.log10(epsilon ** 2)


def estimator_standard_error(value: float, rbw: float, duration: float) -> float:
    """Standard error of a band-limited power estimate, value / sqrt(rbw * duration)."""
    if rbw <= 0 or duration <= 0:
        raise ParameterError("rbw and duration must be positive")
    return abs(value) / math.sqrt(rbw * duration)


def shot_noise_reference(dc_level: float, calibration: float = 1.0) -> float:
    """SNL power expected for a detector DC level.

    Args:
        dc_level: DC photocurrent level (arbitrary power units), nonnegative.
        calibration: Analyzer power per unit DC level.

    Returns:
        calibration * dc_level.
    """
    if dc_level < 0:
        raise ParameterError(f"dc_level must be nonnegative, got {dc_level!r}")
    if calibration <= 0:
        raise ParameterError("calibration must be positive")
    return calibration * dc_level


def _segment_bounds(n_samples: int) -> list:
    return [
        (start, min(start + SEGMENT_SAMPLES, n_samples))
        for start in range(0, n_samples, SEGMENT_SAMPLES)
    ]


def _segment_normals(seed: int, index: int, size: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))
    return rng.standard_normal((4, size))


def _synthesize(
    seed: int,
    n_samples: int,
    v_plus: float,
    v_minus: float,
    electronic_floor: float,
    workers: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Draw detector traces whose sum/difference quadratures carry v_plus/v_minus.

    Each segment draws from its own substream, so the output does not depend on
    how many workers generate it.
    """
    signal = np.empty(n_samples)
    idler = np.empty(n_samples)
    optical = math.sqrt(1.0 - electronic_floor)
    plus_amp = optical * math.sqrt(v_plus)
    minus_amp = optical * math.sqrt(v_minus)
    floor_amp = math.sqrt(electronic_floor)
    root2 = math.sqrt(2.0)

    def fill(item: Tuple[int, Tuple[int, int]]) -> None:
        index, (start, stop) = item
        draws = _segment_normals(seed, index, stop - start)
        plus = plus_amp * draws[0]
        minus = minus_amp * draws[1]
        signal[start:stop] = (plus + minus) / root2 + floor_amp * draws[2]
        idler[start:stop] = (plus - minus) / root2 + floor_amp * draws[3]

    bounds = list(enumerate(_segment_bounds(n_samples)))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        list(executor.map(fill, bounds))
    return signal, idler


def target_variances(
    cavity: CavityParams, op: OperatingPoint, chain: DetectionChain, beam: Union[Beam, str] = Beam.TWIN
) -> Tuple[float, float]:
    """Optical (sum, difference) variances the detector pair should see.

    For a split single beam the sum carries the single-beam variance and the
    difference is shot-noise limited.
    """
    beam = Beam(beam)
    if beam is Beam.TWIN:
        v_plus = twin_sum_variance(cavity.coupling_ratio, chain.eta, op.omega, op.sigma).value_snu
        v_minus = twin_difference_variance(cavity.coupling_ratio, chain.eta, op.omega).value_snu
    else:
        v_plus = single_beam_variance(cavity.coupling_ratio, chain.eta, op.omega, op.sigma).value_snu
        v_minus = 1.0
    return v_plus, v_minus


def simulate_photocurrents(
    cavity: CavityParams,
    op: OperatingPoint,
    chain: DetectionChain,
    duration: float,
    sample_rate: float,
    seed: int,
    beam: Union[Beam, str] = Beam.TWIN,
    transmission: float = 1.0,
    workers: int = DEFAULT_WORKERS,
    logger: Optional[logging.Logger] = None,
) -> PhotocurrentPair:
    """Generate seeded detector traces for one operating point.

    Args:
        cavity: Resonator parameters.
        op: Operating point; sigma must be at least 1 and not at the pole.
        chain: Detection chain.
        duration: Record length (s).
        sample_rate: Samples per second, above 4 * chain.nu_center.
        seed: Seed of the random streams.
        beam: Twin beams or a split single beam.
        transmission: Extra passive attenuation applied before detection.
        workers: Threads used to generate segments.
        logger: Optional logger instance.

    Returns:
        PhotocurrentPair with bit-identical content for identical inputs.
    """
    logger = logger or logging.getLogger(__name__)
    if not sample_rate > 4 * chain.nu_center:
        raise ParameterError(
            f"sample_rate {sample_rate} must exceed 4 * nu_center ({4 * chain.nu_center})"
        )
    beam = Beam(beam)
    v_plus, v_minus = target_variances(cavity, op, chain, beam)
    v_plus = apply_passive_loss(v_plus, transmission)
    v_minus = apply_passive_loss(v_minus, transmission)
    n_samples = sample_count(sample_rate, duration)

    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            f"Synthesizing {n_samples} samples ({beam.value}): "
            f"V+ = {v_plus:.6g}, V- = {v_minus:.6g}, floor = {chain.electronic_floor}"
        )

    signal, idler = _synthesize(seed, n_samples, v_plus, v_minus, chain.electronic_floor, workers)
    return PhotocurrentPair(
        sample_rate=sample_rate,
        duration=duration,
        seed=seed,
        signal_trace=signal,
        idler_trace=idler,
        beam=beam,
    )


def dark_photocurrents(
    chain: DetectionChain, duration: float, sample_rate: float, seed: int, workers: int = DEFAULT_WORKERS
) -> PhotocurrentPair:
    """Detector traces with the light blocked: electronic noise only."""
    n_samples = sample_count(sample_rate, duration)
    signal = np.empty(n_samples)
    idler = np.empty(n_samples)
    floor_amp = math.sqrt(chain.electronic_floor)

    def fill(item: Tuple[int, Tuple[int, int]]) -> None:
        index, (start, stop) = item
        draws = _segment_normals(seed, index, stop - start)
        signal[start:stop] = floor_amp * draws[2]
        idler[start:stop] = floor_amp * draws[3]

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        list(executor.map(fill, list(enumerate(_segment_bounds(n_samples)))))
    return PhotocurrentPair(sample_rate, duration, seed, signal, idler)


def balanced_combine(
    pair: PhotocurrentPair, mode: Union[CombineMode, str], chain: DetectionChain
) -> np.ndarray:
    """Sum or difference photocurrent of the detector pair.

    The detector gains are 1 + eps/2 and 1 - eps/2 with eps = chain.cmrr_imbalance.
    """
    mode = CombineMode(mode)
    half = chain.cmrr_imbalance / 2.0
    weighted_signal = pair.signal_trace * (1.0 + half)
    weighted_idler = pair.idler_trace * (1.0 - half)
    if mode is CombineMode.DIFFERENCE:
        return (weighted_signal - weighted_idler) / math.sqrt(2.0)
    return (weighted_signal + weighted_idler) / math.sqrt(2.0)


def _analyzer_filters(chain: DetectionChain, sample_rate: float) -> Tuple[np.ndarray, np.ndarray]:
    band = [chain.nu_center - chain.rbw / 2.0, chain.nu_center + chain.rbw / 2.0]
    resolution = butter(BANDPASS_ORDER, band, btype="bandpass", output="sos", fs=sample_rate)
    video = butter(VIDEO_ORDER, chain.vbw, btype="lowpass", output="sos", fs=sample_rate)
    return resolution, video


def bandpass_noise_gain(chain: DetectionChain, sample_rate: float) -> float:
    """Power passed by the resolution filter for unit-variance white noise."""
    resolution, _ = _analyzer_filters(chain, sample_rate)
    impulse = np.zeros(int(math.ceil(200.0 / chain.rbw * sample_rate)))
    impulse[0] = 1.0
    response = sosfilt(resolution, impulse)
    return float(np.sum(response ** 2))


def zero_span_analyze(
    trace: np.ndarray,
    sample_rate: float,
    chain: DetectionChain,
    snl_power: Optional[float] = None,
) -> ZeroSpanResult:
    """Emulate a spectrum analyzer in zero span at chain.nu_center.

    Band-pass at the resolution bandwidth, square-law detection, video low-pass,
    one point per 1/vbw and a running average over chain.avg_count points.

    Args:
        trace: Photocurrent samples.
        sample_rate: Samples per second.
        chain: Detection chain holding the analyzer settings.
        snl_power: Detected power of the SNL; defaults to the calibrated reference
            for a unit DC level, so white noise of unit variance reads 1 SNU.

    Returns:
        ZeroSpanResult in shot-noise units.
    """
    if not sample_rate > 2.0 * (chain.nu_center + chain.rbw):
        raise ParameterError(
            f"sample_rate {sample_rate} too low for nu_center {chain.nu_center} and rbw {chain.rbw}"
        )
    if snl_power is None:
        snl_power = shot_noise_reference(1.0, calibration=bandpass_noise_gain(chain, sample_rate))
    if not snl_power > 0:
        raise ParameterError("snl_power must be positive")

    trace = np.asarray(trace, dtype=float)
    resolution, video = _analyzer_filters(chain, sample_rate)
    detected = sosfilt(resolution, trace) ** 2
    smoothed = sosfilt(video, detected)

    resolution_settle = int(math.ceil(10.0 / chain.rbw * sample_rate))
    video_settle = resolution_settle + int(math.ceil(2.0 / chain.vbw * sample_rate))
    step = max(1, int(round(sample_rate / chain.vbw)))
    if video_settle + step * chain.avg_count > trace.shape[0]:
        raise ParameterError("trace too short for the analyzer settling time and running average")

    points = smoothed[video_settle::step] / snl_power
    times = (video_settle + step * np.arange(points.shape[0])) / sample_rate
    if chain.avg_count > 1:
        window = np.ones(chain.avg_count) / chain.avg_count
        points = np.convolve(points, window, mode="valid")
        times = times[chain.avg_count - 1:]

    settled = detected[resolution_settle:]
    mean_snu = float(np.mean(settled)) / snl_power
    settled_duration = settled.shape[0] / sample_rate
    return ZeroSpanResult(
        times=times,
        power_snu=points,
        mean_snu=mean_snu,
        standard_error=estimator_standard_error(mean_snu, chain.rbw, settled_duration),
    )


def analyze_pair(pair: PhotocurrentPair, chain: DetectionChain) -> Dict[CombineMode, ZeroSpanResult]:
    """Zero-span readings of both the sum and the difference channel."""
    return {
        mode: zero_span_analyze(balanced_combine(pair, mode, chain), pair.sample_rate, chain)
        for mode in (CombineMode.SUM, CombineMode.DIFFERENCE)
    }
