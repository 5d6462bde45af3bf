"""Closed-form intensity-noise variances of an above-threshold triply resonant OPO.

All variances are normalized to the shot-noise limit (SNL = 1 SNU = 0 dB).
Signal and idler are described by the same coupling ratio gamma0/gamma, the
detection efficiency eta and the normalized sideband Omega = nu_det / gamma.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from .constants import CRITICAL_COUPLING_RATIO
from .errors import CorrectionError, DivergenceError, ParameterError


class NoiseKind(str, Enum):
    """Detection channel a variance belongs to."""

    DIFFERENCE = "difference"
    SUM = "sum"
    SINGLE_BEAM = "single_beam"


@dataclass(frozen=True)
class NoiseResult:
    """A variance in shot-noise units.

    Attributes:
        value_snu: Variance relative to the SNL.
        kind: Channel the variance was computed for.
        value_db: 10*log10(value_snu), derived.
    """
    value_snu: float
    kind: NoiseKind
    value_db: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.value_snu > 0:
            raise ParameterError(f"variance must be positive, got {self.value_snu!r}")
        object.__setattr__(self, "value_db", to_db(self.value_snu))

    @property
    def squeezed(self) -> bool:
        """True when the variance lies below the SNL."""
        return self.value_snu < 1.0


@dataclass(frozen=True)
class RelaxationInfo:
    """Relaxation-oscillation frequency and the pump range where it is in band.

    Attributes:
        sigma: Pump parameter the frequency was evaluated at.
        sigma_threshold: 1 + gamma_p / (4 gamma).
        nu_n: Relaxation frequency normalized to gamma; None below sigma_threshold.
        in_band_window: Closed sigma interval where 0 <= nu_n <= 1.
    """
    sigma: float
    sigma_threshold: float
    nu_n: Optional[float]
    in_band_window: Tuple[float, float]

    @property
    def below_threshold(self) -> bool:
        """True when no relaxation oscillation exists at this sigma."""
        return self.nu_n is None

    @property
    def in_band(self) -> bool:
        """True when the oscillation lies inside the cavity bandwidth."""
        low, high = self.in_band_window
        return low <= self.sigma <= high


def _check_common(coupling_ratio: float, eta: float, omega: float) -> None:
    if not 0 < coupling_ratio <= 1:
        raise ParameterError(f"coupling_ratio must lie in (0, 1], got {coupling_ratio!r}")
    if not 0 <= eta <= 1:
        raise ParameterError(f"eta must lie in [0, 1], got {eta!r}")
    if not omega >= 0:
        raise ParameterError(f"omega must be nonnegative, got {omega!r}")


def _check_sigma(sigma: float, quantity: str, omega: float) -> None:
    if not sigma >= 1:
        raise ParameterError(f"{quantity} needs sigma >= 1 (above threshold), got {sigma!r}")
    if sigma == 1 and omega == 0:
        raise DivergenceError(quantity)


def to_db(snu: float) -> float:
    """Convert a variance in SNU to dB (10*log10)."""
    if not snu > 0:
        raise ParameterError(f"cannot express nonpositive variance {snu!r} in dB")
    return 10.0 * math.log10(snu)


def from_db(db: float) -> float:
    """Convert a dB value back to SNU."""
    return 10.0 ** (db / 10.0)


def twin_difference_variance(coupling_ratio: float, eta: float, omega: float) -> NoiseResult:
    """Variance of the signal-idler intensity difference.

    Independent of the pump parameter.

    Args:
        coupling_ratio: gamma0/gamma in (0, 1].
        eta: Detection efficiency in [0, 1].
        omega: Normalized sideband frequency.

    Returns:
        NoiseResult of kind DIFFERENCE, 1 - (gamma0/gamma) * eta / (1 + Omega^2).

    Raises:
        ParameterError: For perfect correlation (ratio = eta = 1 at Omega = 0),
            where the variance vanishes and has no dB value.
    """
    _check_common(coupling_ratio, eta, omega)
    value = 1.0 - coupling_ratio * eta / (1.0 + omega ** 2)
    if value <= 0.0:
        raise ParameterError("perfect correlation: zero difference variance has no dB value")
    return NoiseResult(value, NoiseKind.DIFFERENCE)


def twin_sum_variance(coupling_ratio: float, eta: float, omega: float, sigma: float) -> NoiseResult:
    """Variance of the signal-idler intensity sum.

    Raises:
        DivergenceError: At sigma = 1 with omega = 0.
    """
    _check_common(coupling_ratio, eta, omega)
    _check_sigma(sigma, "sum variance", omega)
    value = 1.0 + coupling_ratio * eta / ((sigma - 1.0) ** 2 + omega ** 2)
    return NoiseResult(value, NoiseKind.SUM)


def single_beam_variance(coupling_ratio: float, eta: float, omega: float, sigma: float) -> NoiseResult:
    """Amplitude-quadrature variance of the signal (or idler) beam alone.

    Equals the SNL at sigma = 2, lies above it between threshold and sigma = 2,
    and below it for sigma > 2.

    Raises:
        DivergenceError: At sigma = 1 with omega = 0.
    """
    _check_common(coupling_ratio, eta, omega)
    _check_sigma(sigma, "single-beam variance", omega)
    numerator = sigma * (sigma - 2.0)
    denominator = (1.0 + omega ** 2) * (omega ** 2 + (sigma - 1.0) ** 2)
    value = 1.0 - 0.5 * eta * coupling_ratio * numerator / denominator
    return NoiseResult(value, NoiseKind.SINGLE_BEAM)


def single_beam_asymptote(coupling_ratio: float, eta: float, omega: float) -> NoiseResult:
    """Limit of single_beam_variance for sigma -> infinity."""
    _check_common(coupling_ratio, eta, omega)
    value = 1.0 - 0.5 * eta * coupling_ratio / (1.0 + omega ** 2)
    return NoiseResult(value, NoiseKind.SINGLE_BEAM)


def critical_coupling_limits(eta_twin: float, eta_single: float, omega: float) -> Tuple[NoiseResult, NoiseResult]:
    """Twin-beam difference variance and single-beam asymptote at gamma0/gamma = 0.5."""
    return (
        twin_difference_variance(CRITICAL_COUPLING_RATIO, eta_twin, omega),
        single_beam_asymptote(CRITICAL_COUPLING_RATIO, eta_single, omega),
    )


def apply_passive_loss(v_in: float, transmission: float) -> float:
    """Propagate a variance through a beamsplitter of given transmission.

    Returns:
        1 + transmission * (v_in - 1).
    """
    if not v_in > 0:
        raise ParameterError(f"variance must be positive, got {v_in!r}")
    if not 0 <= transmission <= 1:
        raise ParameterError(f"transmission must lie in [0, 1], got {transmission!r}")
    return 1.0 + transmission * (v_in - 1.0)


def add_electronic_noise(v_optical: float, electronic_floor: float) -> float:
    """Reading of a variance when an independent floor adds to signal and SNL reference.

    The reference is calibrated so that a shot-noise-limited input reads 1.
    """
    if not 0 <= electronic_floor < 1:
        raise ParameterError(f"electronic_floor must lie in [0, 1), got {electronic_floor!r}")
    return electronic_floor + (1.0 - electronic_floor) * v_optical


def correct_electronic_noise(v_measured: float, electronic_floor: float) -> float:
    """Remove the electronic floor from a measured variance.

    Raises:
        CorrectionError: If the measurement does not exceed the floor.
    """
    if not 0 <= electronic_floor < 1:
        raise ParameterError(f"electronic_floor must lie in [0, 1), got {electronic_floor!r}")
    if v_measured <= electronic_floor:
        raise CorrectionError(
            f"measured variance {v_measured} does not exceed the electronic floor {electronic_floor}"
        )
    return (v_measured - electronic_floor) / (1.0 - electronic_floor)


def relaxation_threshold(gamma_p: float, gamma: float) -> float:
    """Pump parameter above which relaxation oscillations exist."""
    if gamma_p <= 0 or gamma <= 0:
        raise ParameterError("linewidths must be positive")
    return 1.0 + gamma_p / (4.0 * gamma)


def relaxation_frequency(sigma: float, gamma_p: float, gamma: float) -> RelaxationInfo:
    """Normalized relaxation-oscillation frequency at a pump parameter.

    Args:
        sigma: Pump parameter, nonnegative.
        gamma_p: Pump total linewidth (Hz).
        gamma: Parametric total linewidth (Hz).

    Returns:
        RelaxationInfo; nu_n is None below the relaxation threshold.
    """
    if sigma < 0:
        raise ParameterError(f"sigma must be nonnegative, got {sigma!r}")
    sigma_threshold = relaxation_threshold(gamma_p, gamma)
    window = (sigma_threshold, sigma_threshold + 2.0 * gamma / gamma_p)
    nu_n: Optional[float] = None
    if sigma >= sigma_threshold:
        nu_n = math.sqrt(gamma_p / (2.0 * gamma)) * math.sqrt(sigma - sigma_threshold)
    return RelaxationInfo(sigma=sigma, sigma_threshold=sigma_threshold, nu_n=nu_n, in_band_window=window)


def relaxation_pump_band(gamma_p: float, gamma: float, threshold_power: float) -> Tuple[float, float]:
    """Pump powers (W) for which the relaxation oscillation lies inside the cavity bandwidth."""
    if threshold_power <= 0:
        raise ParameterError("threshold_power must be positive")
    low, high = relaxation_frequency(0.0, gamma_p, gamma).in_band_window
    return low ** 2 * threshold_power, high ** 2 * threshold_power
