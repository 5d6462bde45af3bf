"""Resonator parameters, operating points and the threshold-power law."""

import math
from dataclasses import dataclass
from enum import Enum

from .constants import CRITICAL_COUPLING_RATIO, CRITICAL_COUPLING_RTOL, RATE_SUM_RTOL
from .errors import ParameterError


class CouplingRegime(str, Enum):
    """Coupling of the parametric modes relative to their intrinsic loss."""

    UNDERCOUPLED = "undercoupled"
    CRITICAL = "critical"
    OVERCOUPLED = "overcoupled"


@dataclass(frozen=True)
class CavityParams:
    """Linewidths and coupling rates of the pump and parametric modes.

    All rates are full widths in Hz. Signal and idler share one description.

    Attributes:
        gamma_p: Pump total linewidth.
        gamma_p0: Pump coupling rate.
        gamma: Parametric total linewidth.
        gamma0: Parametric coupling rate.
        alpha: Parametric intrinsic loss rate.
    """
    gamma_p: float
    gamma_p0: float
    gamma: float
    gamma0: float
    alpha: float

    def __post_init__(self) -> None:
        for name in ("gamma_p", "gamma_p0", "gamma", "gamma0", "alpha"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ParameterError(f"{name} must be a positive rate, got {value!r}")
        if abs(self.alpha + self.gamma0 - self.gamma) > RATE_SUM_RTOL * self.gamma:
            raise ParameterError(
                f"gamma ({self.gamma}) must equal alpha + gamma0 ({self.alpha + self.gamma0})"
            )
        if self.gamma0 > self.gamma:
            raise ParameterError("gamma0 cannot exceed gamma")
        if self.gamma_p0 > self.gamma_p:
            raise ParameterError("gamma_p0 cannot exceed gamma_p")

    @classmethod
    def from_coupling_ratio(
        cls, gamma_p: float, gamma_p0: float, gamma: float, coupling_ratio: float
    ) -> "CavityParams":
        """Build a cavity from its total linewidths and the ratio gamma0/gamma.

        Args:
            gamma_p: Pump total linewidth (Hz).
            gamma_p0: Pump coupling rate (Hz).
            gamma: Parametric total linewidth (Hz).
            coupling_ratio: gamma0/gamma, in (0, 1).

        Returns:
            CavityParams with alpha = gamma - gamma0.
        """
        if not 0 < coupling_ratio < 1:
            raise ParameterError(
                f"coupling_ratio must lie in (0, 1) to leave a nonzero intrinsic loss, got {coupling_ratio!r}"
            )
        gamma0 = coupling_ratio * gamma
        return cls(gamma_p=gamma_p, gamma_p0=gamma_p0, gamma=gamma, gamma0=gamma0, alpha=gamma - gamma0)

    @property
    def coupling_ratio(self) -> float:
        """Parametric coupling ratio gamma0/gamma."""
        return self.gamma0 / self.gamma

    @property
    def pump_coupling_ratio(self) -> float:
        """Pump coupling ratio gamma_p0/gamma_p."""
        return self.gamma_p0 / self.gamma_p

    @property
    def regime(self) -> CouplingRegime:
        """Coupling regime of the parametric modes."""
        return coupling_regime(self.gamma0, self.gamma)


@dataclass(frozen=True)
class OperatingPoint:
    """Pump power, threshold and measurement sideband of one measurement.

    Attributes:
        pump_power: Pump power (W).
        threshold_power: OPO threshold power (W).
        sigma: Pump parameter sqrt(pump_power / threshold_power).
        nu_det: Measurement sideband frequency (Hz).
        omega: nu_det normalized to the parametric linewidth.
    """
    pump_power: float
    threshold_power: float
    sigma: float
    nu_det: float
    omega: float

    def __post_init__(self) -> None:
        if self.threshold_power <= 0:
            raise ParameterError(f"threshold_power must be positive, got {self.threshold_power!r}")
        if self.pump_power < 0 or self.nu_det < 0 or self.omega < 0:
            raise ParameterError("pump_power, nu_det and omega must be nonnegative")
        expected = math.sqrt(self.pump_power / self.threshold_power)
        if not math.isclose(self.sigma, expected, rel_tol=RATE_SUM_RTOL, abs_tol=0.0):
            raise ParameterError(f"sigma {self.sigma} inconsistent with powers (expected {expected})")

    @classmethod
    def from_powers(
        cls, pump_power: float, threshold_power: float, nu_det: float, cavity: CavityParams
    ) -> "OperatingPoint":
        """Build an operating point from pump and threshold powers."""
        return cls(
            pump_power=pump_power,
            threshold_power=threshold_power,
            sigma=pump_parameter(pump_power, threshold_power),
            nu_det=nu_det,
            omega=normalized_sideband(nu_det, cavity),
        )

    @classmethod
    def from_sigma(
        cls, sigma: float, threshold_power: float, nu_det: float, cavity: CavityParams
    ) -> "OperatingPoint":
        """Build an operating point for a given pump parameter."""
        if sigma < 0:
            raise ParameterError(f"sigma must be nonnegative, got {sigma!r}")
        pump_power = sigma * sigma * threshold_power
        return cls(
            pump_power=pump_power,
            threshold_power=threshold_power,
            sigma=pump_parameter(pump_power, threshold_power),
            nu_det=nu_det,
            omega=normalized_sideband(nu_det, cavity),
        )


def normalized_sideband(nu_det: float, cavity: CavityParams) -> float:
    """Return the sideband frequency normalized to the parametric linewidth.

    Args:
        nu_det: Sideband frequency (Hz), nonnegative.
        cavity: Resonator parameters.

    Returns:
        Omega = nu_det / gamma.
    """
    if nu_det < 0:
        raise ParameterError(f"nu_det must be nonnegative, got {nu_det!r}")
    return nu_det / cavity.gamma


def pump_parameter(pump_power: float, threshold_power: float) -> float:
    """Return sigma = sqrt(P / P_th).

    Raises:
        ParameterError: If threshold_power is not positive or pump_power is negative.
    """
    if threshold_power <= 0:
        raise ParameterError(f"threshold_power must be positive, got {threshold_power!r}")
    if pump_power < 0:
        raise ParameterError(f"pump_power must be nonnegative, got {pump_power!r}")
    return math.sqrt(pump_power / threshold_power)


def threshold_power(k_const: float, gamma_p: float, gamma: float) -> float:
    """Return the OPO threshold k * gamma_p * gamma**2 (W)."""
    if k_const <= 0:
        raise ParameterError(f"k_const must be positive, got {k_const!r}")
    return k_const * gamma_p * gamma ** 2


def calibrate_threshold_constant(p_th_measured: float, gamma_p: float, gamma: float) -> float:
    """Return the constant k (W/Hz^3) that reproduces a measured threshold.

    Args:
        p_th_measured: Measured threshold power (W).
        gamma_p: Pump total linewidth (Hz).
        gamma: Parametric total linewidth (Hz).

    Returns:
        k such that threshold_power(k, gamma_p, gamma) == p_th_measured.
    """
    if p_th_measured <= 0 or gamma_p <= 0 or gamma <= 0:
        raise ParameterError("threshold calibration needs positive power and linewidths")
    k_const = p_th_measured / (gamma_p * gamma ** 2)
    # Division can land a few ulps off; nudge k toward the input and keep the closest.
    best, best_error = k_const, abs(threshold_power(k_const, gamma_p, gamma) - p_th_measured)
    direction = 0.0
    for _ in range(16):
        reproduced = threshold_power(k_const, gamma_p, gamma)
        if reproduced == p_th_measured:
            return k_const
        step = math.inf if reproduced < p_th_measured else -math.inf
        if direction and step != direction:
            break
        direction = step
        k_const = math.nextafter(k_const, step)
        error = abs(threshold_power(k_const, gamma_p, gamma) - p_th_measured)
        if error < best_error:
            best, best_error = k_const, error
    return best


def coupling_regime(gamma0: float, gamma: float) -> CouplingRegime:
    """Classify gamma0/gamma as under-, critically or overcoupled.

    Raises:
        ParameterError: If gamma0 > gamma or either rate is not positive.
    """
    if gamma0 <= 0 or gamma <= 0:
        raise ParameterError("coupling rates must be positive")
    if gamma0 > gamma:
        raise ParameterError(f"gamma0 ({gamma0}) cannot exceed gamma ({gamma})")
    ratio = gamma0 / gamma
    if abs(ratio - CRITICAL_COUPLING_RATIO) <= CRITICAL_COUPLING_RTOL * CRITICAL_COUPLING_RATIO:
        return CouplingRegime.CRITICAL
    if ratio < CRITICAL_COUPLING_RATIO:
        return CouplingRegime.UNDERCOUPLED
    return CouplingRegime.OVERCOUPLED
