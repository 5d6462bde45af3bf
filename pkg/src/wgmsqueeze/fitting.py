"""Nonlinear least-squares fits of single-beam noise data and twin-beam squeezing means.

The single-beam model has two free parameters: the threshold power and an
effective prefactor (eta * gamma0/gamma), because the variance only depends
on their product.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares, minimize

from .constants import (
    FIT_CURVE_POINTS,
    FIT_MAX_ITERATIONS,
    FIT_MIN_POINTS,
    FIT_MIN_POWER_SPAN,
    FIT_OBJECTIVE_RTOL,
)
from .errors import FitConvergenceError, ParameterError
from .variance import single_beam_variance, to_db

# Lower bound of sigma used inside the model when omega == 0 (pole guard).
_POLE_GUARD = 1.0e-6


@dataclass(frozen=True)
class FitPoint:
    """One measured variance.

    Attributes:
        power: Pump power (W).
        variance: Measured variance (SNU).
        weight: Relative weight of the point.
    """
    power: float
    variance: float
    weight: float = 1.0

    def __post_init__(self) -> None:
        if not self.power > 0:
            raise ParameterError(f"pump power must be positive, got {self.power!r}")
        if not self.weight > 0:
            raise ParameterError(f"weight must be positive, got {self.weight!r}")
        if not math.isfinite(self.variance):
            raise ParameterError("variance must be finite")


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings.

    Attributes:
        max_iterations: Iteration budget of each optimizer stage.
        objective_rtol: Relative objective change that counts as converged.
        penalty_weight: Weight of the quadratic penalty for sigma < 1.
        curve_points: Points in the sampled fitted curve.
        restart_on_stagnation: Fall back to a simplex search when the damped
            least-squares stage stalls.
    """
    max_iterations: int = FIT_MAX_ITERATIONS
    objective_rtol: float = FIT_OBJECTIVE_RTOL
    penalty_weight: float = 1.0e4
    curve_points: int = FIT_CURVE_POINTS
    restart_on_stagnation: bool = True


@dataclass(frozen=True)
class FitResult:
    """Fitted single-beam noise parameters.

    Attributes:
        p_th_hat: Threshold power (W).
        asymptote_hat: High-power limit of the variance (SNU).
        scale_hat: Effective prefactor eta * gamma0/gamma.
        residual_rms: Weighted RMS residual (SNU).
        p_th_sigma: Standard uncertainty of p_th_hat (W).
        scale_sigma: Standard uncertainty of scale_hat.
        asymptote_sigma: Standard uncertainty of asymptote_hat (SNU).
        converged: Whether the optimizer met its tolerance.
        iterations: Iterations used over all stages.
        omega: Normalized sideband the model was evaluated at.
        method: Optimizer stages that produced the result.
        objective_history: Objective at the start, after every simplex
            iteration and at the end of every stage, in call order.
    """
    p_th_hat: float
    asymptote_hat: float
    scale_hat: float
    residual_rms: float
    p_th_sigma: float
    scale_sigma: float
    asymptote_sigma: float
    converged: bool
    iterations: int
    omega: float
    method: str = "least_squares"
    objective_history: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not self.p_th_hat > 0:
            raise ParameterError("fitted threshold must be positive")
        if not 0 < self.asymptote_hat <= 1:
            raise ParameterError(f"fitted asymptote {self.asymptote_hat} outside (0, 1]")
        if self.residual_rms < 0:
            raise ParameterError("residual_rms must be nonnegative")
        if min(self.p_th_sigma, self.scale_sigma, self.asymptote_sigma) < 0:
            raise ParameterError("uncertainties must be nonnegative")

    def to_dict(self) -> dict:
        """Plain-dict view for serialization."""
        data = asdict(self)
        data["objective_history"] = list(self.objective_history)
        return data


def asymptote_from_scale(scale: float, omega: float) -> float:
    """High-power variance limit for an effective prefactor."""
    return 1.0 - scale / (2.0 * (1.0 + omega ** 2))


def single_beam_model(powers: np.ndarray, p_th: float, scale: float, omega: float) -> np.ndarray:
    """Single-beam variance for each pump power at threshold p_th.

    Powers below threshold are evaluated at sigma = 1, the model's domain edge.
    """
    floor = 1.0 + (_POLE_GUARD if omega == 0 else 0.0)
    sigmas = np.maximum(np.sqrt(np.asarray(powers, dtype=float) / p_th), floor)
    return np.array([single_beam_variance(1.0, scale, omega, float(s)).value_snu for s in sigmas])


class _Problem:
    """Weighted residuals of the single-beam model in scaled variables.

    x = (p_th / p_ref, scale) with p_ref the smallest pump power.
    """

    def __init__(self, points: Sequence[FitPoint], omega: float, config: FitConfig):
        ordered = sorted(points, key=lambda p: (p.power, p.variance, p.weight))
        self.powers = np.array([p.power for p in ordered])
        self.values = np.array([p.variance for p in ordered])
        weights = np.array([p.weight for p in ordered])
        self.sqrt_weights = np.sqrt(weights / weights.mean())
        self.omega = omega
        self.p_ref = float(self.powers.min())
        self.penalty = math.sqrt(config.penalty_weight)

    def data_residuals(self, x: np.ndarray) -> np.ndarray:
        p_th = max(float(x[0]), 1e-12) * self.p_ref
        scale = min(max(float(x[1]), 0.0), 1.0)
        model = single_beam_model(self.powers, p_th, scale, self.omega)
        return self.sqrt_weights * (self.values - model)

    def penalty_residuals(self, x: np.ndarray) -> np.ndarray:
        p_th = max(float(x[0]), 1e-12) * self.p_ref
        sigmas = np.sqrt(self.powers / p_th)
        domain = self.penalty * np.maximum(0.0, 1.0 - sigmas)
        scale = float(x[1])
        bounds = self.penalty * np.array([max(0.0, -scale), max(0.0, scale - 1.0), max(0.0, -float(x[0]))])
        return np.concatenate([domain, bounds])

    def residuals(self, x: np.ndarray) -> np.ndarray:
        return np.concatenate([self.data_residuals(x), self.penalty_residuals(x)])

    def objective(self, x: np.ndarray) -> float:
        r = self.residuals(np.asarray(x, dtype=float))
        return float(np.dot(r, r))

    def penalty_active(self, x: np.ndarray) -> bool:
        return bool(np.any(self.penalty_residuals(x) > 0))

    def initial_guess(self) -> np.ndarray:
        most_squeezed = float(self.values.min())
        scale0 = 2.0 * (1.0 + self.omega ** 2) * (1.0 - most_squeezed)
        return np.array([0.9, min(max(scale0, 1e-3), 0.999)])


def _validate_data(points: Sequence[FitPoint], omega: float) -> None:
    if omega < 0:
        raise ParameterError("omega must be nonnegative")
    if len(points) < FIT_MIN_POINTS:
        raise ParameterError(f"need at least {FIT_MIN_POINTS} data points, got {len(points)}")
    powers = [p.power for p in points]
    if max(powers) < FIT_MIN_POWER_SPAN * min(powers):
        raise ParameterError(
            f"pump powers must span at least a factor {FIT_MIN_POWER_SPAN:g}, "
            f"got {min(powers):.6g} W to {max(powers):.6g} W"
        )


def fit_objective(points: Sequence[FitPoint], omega: float, p_th: float, scale: float,
                  config: Optional[FitConfig] = None) -> float:
    """Weighted squared residuals plus domain penalty at (p_th, scale)."""
    problem = _Problem(points, omega, config or FitConfig())
    return problem.objective(np.array([p_th / problem.p_ref, scale]))


def _least_squares_stage(problem: _Problem, x0: np.ndarray, config: FitConfig):
    return least_squares(
        problem.residuals,
        x0,
        method="trf",
        bounds=([1e-6, 0.0], [np.inf, 1.0]),
        x_scale="jac",
        ftol=config.objective_rtol,
        xtol=1e-12,
        gtol=1e-12,
        max_nfev=config.max_iterations,
    )


def _simplex_stage(problem: _Problem, x0: np.ndarray, config: FitConfig,
                   on_iteration: Callable[[np.ndarray], None]):
    return minimize(
        problem.objective,
        x0,
        method="Nelder-Mead",
        callback=on_iteration,
        options={
            "maxiter": config.max_iterations,
            "xatol": 1e-10,
            "fatol": config.objective_rtol,
        },
    )


def fit_single_beam_noise(
    data: Sequence[FitPoint],
    omega: float,
    config: Optional[FitConfig] = None,
    logger: Optional[logging.Logger] = None,
) -> FitResult:
    """Fit threshold power and effective prefactor to single-beam noise data.

    Damped least squares (trust-region reflective) runs first; if it stalls or
    ends inside the sigma < 1 penalty region, a Nelder-Mead simplex restarts
    from the best point and a final least-squares pass polishes the result.

    Args:
        data: Measured points; at least four, powers spanning a factor four.
        omega: Normalized sideband frequency of the measurement.
        config: Optimizer settings.
        logger: Optional logger instance.

    Returns:
        FitResult with uncertainties from the Gauss-Newton Hessian scaled by
        the residual variance.

    Raises:
        ParameterError: If the data do not meet the preconditions.
        FitConvergenceError: If no stage converges; carries the best iterate.
    """
    config = config or FitConfig()
    logger = logger or logging.getLogger(__name__)
    points = [p if isinstance(p, FitPoint) else FitPoint(*p) for p in data]
    _validate_data(points, omega)

    problem = _Problem(points, omega, config)
    x_best = problem.initial_guess()
    best_value = problem.objective(x_best)
    history: List[float] = [best_value]
    iterations = 0
    stages: List[str] = []

    def record(x: np.ndarray) -> None:
        nonlocal x_best, best_value
        value = problem.objective(x)
        history.append(value)
        if value <= best_value:
            x_best = np.array(x, dtype=float)
            best_value = value

    result = _least_squares_stage(problem, x_best, config)
    iterations += int(result.njev or result.nfev)
    stages.append("least_squares")
    record(result.x)
    converged = bool(result.success) and not problem.penalty_active(x_best)

    if not converged and config.restart_on_stagnation:
        logger.info("Least-squares stage stalled; restarting with a simplex search")
        simplex = _simplex_stage(problem, x_best, config, record)
        iterations += int(simplex.nit)
        stages.append("nelder_mead")
        record(simplex.x)
        start = np.clip(x_best, [1e-6, 0.0], [np.inf, 1.0])
        result = _least_squares_stage(problem, start, config)
        iterations += int(result.njev or result.nfev)
        stages.append("least_squares")
        record(result.x)
        converged = (bool(result.success) or bool(simplex.success)) and not problem.penalty_active(x_best)

    jacobian = np.asarray(result.jac)[: problem.powers.shape[0]]
    fit = _build_result(problem, x_best, jacobian, converged, iterations, "+".join(stages), history)

    if not converged:
        raise FitConvergenceError(
            f"fit did not converge within {config.max_iterations} iterations per stage "
            f"(best P_th = {fit.p_th_hat:.6g} W, scale = {fit.scale_hat:.6g})",
            best_iterate=fit,
        )
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"Fit converged after {iterations} iterations via {fit.method}")
    return fit


def _build_result(
    problem: _Problem,
    x: np.ndarray,
    jacobian: np.ndarray,
    converged: bool,
    iterations: int,
    method: str,
    history: Sequence[float],
) -> FitResult:
    residuals = problem.data_residuals(x)
    n_points = residuals.shape[0]
    residual_rms = float(math.sqrt(np.dot(residuals, residuals) / n_points))
    dof = max(n_points - 2, 1)
    residual_variance = float(np.dot(residuals, residuals)) / dof

    covariance = np.linalg.pinv(jacobian.T @ jacobian) * residual_variance
    variances = np.clip(np.diag(covariance), 0.0, None)
    p_th_sigma = float(math.sqrt(variances[0])) * problem.p_ref
    scale_sigma = float(math.sqrt(variances[1]))
    scale = min(max(float(x[1]), 0.0), 1.0)

    return FitResult(
        p_th_hat=float(x[0]) * problem.p_ref,
        asymptote_hat=asymptote_from_scale(scale, problem.omega),
        scale_hat=scale,
        residual_rms=residual_rms,
        p_th_sigma=p_th_sigma,
        scale_sigma=scale_sigma,
        asymptote_sigma=scale_sigma / (2.0 * (1.0 + problem.omega ** 2)),
        converged=converged,
        iterations=iterations,
        omega=problem.omega,
        method=method,
        objective_history=tuple(history),
    )


def fitted_curve(result: FitResult, p_max: float, n_points: int = FIT_CURVE_POINTS) -> Tuple[np.ndarray, np.ndarray]:
    """Sample the fitted variance from just above threshold up to p_max.

    Returns:
        (powers in W, variances in SNU).
    """
    if n_points < 2:
        raise ParameterError("a fitted curve needs at least two points")
    p_start = result.p_th_hat * (1.0 + 1e-4)
    if p_max <= p_start:
        raise ParameterError("p_max must lie above the fitted threshold")
    powers = np.geomspace(p_start, p_max, n_points)
    return powers, single_beam_model(powers, result.p_th_hat, result.scale_hat, result.omega)


def synthetic_single_beam_data(
    p_th: float,
    scale: float,
    omega: float,
    powers: Optional[Sequence[float]] = None,
    noise_sd: float = 0.0,
    seed: int = 0,
) -> List[FitPoint]:
    """Draw single-beam data from the model with Gaussian measurement noise.

    Args:
        p_th: Threshold power (W).
        scale: Effective prefactor eta * gamma0/gamma.
        omega: Normalized sideband frequency.
        powers: Pump powers (W); defaults to 20 log-spaced points on 15-500 uW.
        noise_sd: Standard deviation of the added noise (SNU).
        seed: Seed of the noise.

    Returns:
        List of FitPoint with unit weights.
    """
    if powers is None:
        powers = np.geomspace(15e-6, 500e-6, 20)
    powers = np.asarray(powers, dtype=float)
    values = single_beam_model(powers, p_th, scale, omega)
    if noise_sd > 0:
        values = values + np.random.default_rng(seed).normal(0.0, noise_sd, size=values.shape)
    return [FitPoint(float(p), float(v)) for p, v in zip(powers, values)]


def mean_squeezing(data: Sequence[Tuple[float, float]]) -> Tuple[float, float]:
    """Mean squeezing in dB over a set of (pump power, difference variance) points.

    Returns:
        (unweighted mean in dB, standard error of the mean in dB).

    Raises:
        ParameterError: For empty input or fewer than two points.
    """
    if not data:
        raise ParameterError("mean_squeezing needs data, got an empty sequence")
    if len(data) < 2:
        raise ParameterError("mean_squeezing needs at least two points")
    values_db = np.array([to_db(v) for _, v in data])
    mean_db = float(np.mean(values_db))
    standard_error = float(np.std(values_db, ddof=1) / math.sqrt(values_db.shape[0]))
    return mean_db, standard_error
