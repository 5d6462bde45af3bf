"""CommandEngine - runs one wgmsqueeze subcommand and writes its outputs."""

import contextlib
import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from .cavity import normalized_sideband
from .config import (
    cavity_from_parameters,
    chain_from_parameters,
    operating_point_from_parameters,
    sweep_config_from_parameters,
    threshold_from_parameters,
)
from .constants import DEFAULT_WORKERS
from .core import RunSettings
from .detection import Beam, analyze_pair, simulate_photocurrents
from .errors import CorrectionError, DivergenceError, ParameterError
from .fitting import fit_single_beam_noise, fitted_curve
from .sweep import channel_minimum, detuning_sweep
from .utils import atomic_output, mhz_to_hz, setup_logger, uw_to_w, w_to_uw
from .variance import (
    NoiseKind,
    correct_electronic_noise,
    critical_coupling_limits,
    relaxation_frequency,
    relaxation_pump_band,
    single_beam_variance,
    to_db,
    twin_difference_variance,
    twin_sum_variance,
)
from .writer import ResultWriter, Table, photocurrent_table, read_fit_data, sweep_table

VARIANCE_COLUMNS = (
    "sigma", "omega",
    "v_minus_snu", "v_minus_db",
    "v_plus_snu", "v_plus_db",
    "v_single_snu", "v_single_db",
)
RELAX_COLUMNS = ("sigma", "nu_n", "nu_MHz", "in_band")
CURVE_COLUMNS = ("power_uW", "variance_snu")

# An output is (path, format, payload); payload is a Table or a JSON document.
Output = Tuple[Path, str, Union[Table, Dict[str, Any]]]


def _db_or_pole(value: float) -> float:
    return math.inf if math.isinf(value) else to_db(value)


class CommandEngine:
    """Execute a subcommand against a parameter set and write its results."""

    def __init__(
        self,
        params: Dict[str, Any],
        settings: RunSettings,
        writer_cls: type = ResultWriter,
        logger: Optional[logging.Logger] = None,
    ):
        """Initialize the engine.

        Args:
            params: Merged parameter dictionary (preset, file and flags).
            settings: Run settings.
            writer_cls: ResultWriter class to use (dependency injection point).
            logger: Optional logger; defaults to the package logger.
        """
        self.params = params
        self.settings = settings
        self.writer_cls = writer_cls
        self.extra_metadata: Dict[str, Any] = {}
        self.logger = logger or setup_logger("wgmsqueeze", verbose=settings.verbose)
        self.commands: Dict[str, Callable[[], List[Output]]] = {
            "variance": self.cmd_variance,
            "sweep": self.cmd_sweep,
            "simulate": self.cmd_simulate,
            "fit": self.cmd_fit,
            "relax": self.cmd_relax,
        }

    @property
    def options(self) -> Dict[str, Any]:
        return self.settings.options

    def _option(self, name: str, block: str, key: str) -> Any:
        """Command option from the flags, falling back to the parameter block."""
        value = self.options.get(name)
        if value is None:
            value = self.params.get(block, {}).get(key)
        if value is None:
            raise ParameterError(f"missing setting '{key}' in the '{block}' parameters")
        return value

    def run(self) -> int:
        """Run the selected command and write every output atomically.

        Returns:
            0 when all outputs were written.
        """
        command = self.commands.get(self.settings.command)
        if command is None:
            raise ParameterError(f"unknown command '{self.settings.command}'")

        if self.logger.isEnabledFor(logging.DEBUG):
            self.logger.debug(f"Running '{self.settings.command}' with seed {self.settings.seed}")

        outputs = command()
        try:
            self._write_outputs(outputs)
        except Exception as e:
            self.logger.error(f"Error while writing outputs: {e}")
            raise
        return 0

    def _write_outputs(self, outputs: List[Output]) -> None:
        # All temporary files are complete before the first rename happens.
        written = []
        with contextlib.ExitStack() as stack:
            for path, fmt, payload in outputs:
                stream = stack.enter_context(atomic_output(path))
                writer = self.writer_cls(stream, fmt)
                if isinstance(payload, Table):
                    writer.write_table(payload, metadata=self._metadata())
                else:
                    writer.write_document(payload)
                written.append((path, writer.rows_written))
        for path, rows in written:
            self.logger.info(f"Wrote {rows} rows to {path}")

    def _metadata(self) -> Dict[str, Any]:
        metadata = {"command": self.settings.command, "seed": self.settings.seed, "parameters": self.params}
        metadata.update(self.extra_metadata)
        return metadata

    def cmd_variance(self) -> List[Output]:
        """Analytic variances on a sigma or Omega grid."""
        cavity = cavity_from_parameters(self.params)
        axis = self._option("axis", "variance", "axis")
        low = float(self._option("grid_min", "variance", "min"))
        high = float(self._option("grid_max", "variance", "max"))
        count = int(self._option("count", "variance", "count"))
        if count < 0:
            raise ParameterError(f"grid count must be nonnegative, got {count}")
        grid = np.linspace(low, high, count)

        ratio = cavity.coupling_ratio
        eta_twin = self.params["eta_twin"]
        eta_single = self.params["eta_single"]
        if axis == "sigma":
            if count and min(low, high) < 1:
                raise ParameterError("the sigma grid must not go below threshold (sigma >= 1)")
            omega = normalized_sideband(mhz_to_hz(self.params["nu_det_MHz"]), cavity)
            points = [(float(s), omega) for s in grid]
        elif axis == "omega":
            if count and min(low, high) < 0:
                raise ParameterError("the Omega grid must be nonnegative")
            sigma = operating_point_from_parameters(self.params, cavity).sigma
            if sigma < 1:
                raise ParameterError(f"pump parameter {sigma:.6g} is below threshold")
            points = [(sigma, float(o)) for o in grid]
        else:
            raise ParameterError(f"unknown grid axis '{axis}'")

        rows = []
        for sigma, omega in points:
            v_minus = twin_difference_variance(ratio, eta_twin, omega).value_snu
            try:
                v_plus = twin_sum_variance(ratio, eta_twin, omega, sigma).value_snu
                v_single = single_beam_variance(ratio, eta_single, omega, sigma).value_snu
            except DivergenceError:
                v_plus = v_single = math.inf
            rows.append((
                sigma, omega,
                v_minus, to_db(v_minus),
                v_plus, _db_or_pole(v_plus),
                v_single, _db_or_pole(v_single),
            ))

        if points:
            twin_limit, single_limit = critical_coupling_limits(eta_twin, eta_single, points[0][1])
            self.logger.info(
                f"At critical coupling: difference {twin_limit.value_db:.3f} dB, "
                f"single-beam asymptote {single_limit.value_db:.3f} dB"
            )
        return [(self.settings.output_file, self.settings.fmt, Table(VARIANCE_COLUMNS, rows))]

    def cmd_sweep(self) -> List[Output]:
        """Pump-detuning sweep across the configured channels."""
        beam = Beam(self.options.get("mode") or "twin")
        cavity = cavity_from_parameters(self.params)
        chain = chain_from_parameters(self.params, beam)
        sweep_cfg = sweep_config_from_parameters(
            self.params,
            beam,
            with_channels=not self.options.get("no_channels", False),
            fluctuations=bool(self.options.get("fluctuations", False)),
        )
        trace = detuning_sweep(cavity, chain, sweep_cfg, seed=self.settings.seed, logger=self.logger)

        if sweep_cfg.channels:
            central = min(sweep_cfg.channels, key=lambda c: abs(c.center))
            kind = NoiseKind.DIFFERENCE if beam is Beam.TWIN else NoiseKind.SINGLE_BEAM
            minimum = channel_minimum(trace, central, kind)
            try:
                corrected = correct_electronic_noise(minimum, chain.electronic_floor)
                self.logger.info(
                    f"Central channel {kind.value} minimum: {to_db(minimum):.3f} dB measured, "
                    f"{to_db(corrected):.3f} dB after electronic-noise correction"
                )
            except CorrectionError as e:
                self.logger.warning(f"Central channel minimum cannot be corrected: {e}")
        return [(self.settings.output_file, self.settings.fmt, sweep_table(trace))]

    def cmd_simulate(self) -> List[Output]:
        """Monte-Carlo detector traces at the configured operating point."""
        beam = Beam(self._option("beam", "simulate", "beam"))
        duration = float(self._option("duration", "simulate", "duration_s"))
        sample_rate = mhz_to_hz(float(self._option("sample_rate", "simulate", "sample_rate_MHz")))
        transmission = self.options.get("transmission")
        transmission = 1.0 if transmission is None else float(transmission)

        cavity = cavity_from_parameters(self.params)
        chain = chain_from_parameters(self.params, beam)
        op = operating_point_from_parameters(self.params, cavity)
        pair = simulate_photocurrents(
            cavity, op, chain, duration, sample_rate, self.settings.seed,
            beam=beam,
            transmission=transmission,
            workers=self.options.get("workers") or DEFAULT_WORKERS,
            logger=self.logger,
        )
        self.logger.info(
            f"Simulated {pair.n_samples} samples per detector at sigma = {op.sigma:.4g} ({beam.value} beam)"
        )

        try:
            readings = analyze_pair(pair, chain)
        except ParameterError as e:
            self.logger.warning(f"No zero-span summary: {e}")
        else:
            for mode, reading in readings.items():
                self.logger.info(
                    f"Zero span {mode.value}: {reading.mean_snu:.4f} +/- {reading.standard_error:.4f} SNU"
                )
        return [(self.settings.output_file, self.settings.fmt, photocurrent_table(pair))]

    def cmd_fit(self) -> List[Output]:
        """Fit single-beam noise data; writes the result and the fitted curve."""
        data_file = self.options.get("data")
        if not data_file or not Path(data_file).exists():
            raise ParameterError(f"data file not found: {data_file}")
        data = read_fit_data(data_file)

        cavity = cavity_from_parameters(self.params)
        omega = normalized_sideband(mhz_to_hz(self.params["nu_det_MHz"]), cavity)
        result = fit_single_beam_noise(data, omega, logger=self.logger)

        p_max = max(point.power for point in data)
        powers, curve = fitted_curve(result, p_max)
        curve_uw = [w_to_uw(p) for p in powers]
        self.logger.info(
            f"Fit: P_th = {w_to_uw(result.p_th_hat):.4g} +/- {w_to_uw(result.p_th_sigma):.2g} uW, "
            f"asymptote = {to_db(result.asymptote_hat):.3f} dB, rms = {result.residual_rms:.4g} SNU"
        )

        document = {
            "metadata": {**self._metadata(), "data_file": str(data_file)},
            "result": result.to_dict(),
            "p_th_uW": w_to_uw(result.p_th_hat),
            "asymptote_db": to_db(result.asymptote_hat),
            "curve": {"power_uW": curve_uw, "variance_snu": curve.tolist()},
            "input": {
                "power_uW": [w_to_uw(p.power) for p in data],
                "variance_snu": [p.variance for p in data],
                "weight": [p.weight for p in data],
            },
        }
        out = self.settings.output_file
        curve_path = out.with_name(f"{out.stem}.curve.csv")
        curve_table = Table(CURVE_COLUMNS, list(zip(curve_uw, curve.tolist())))
        return [(out, "json", document), (curve_path, "csv", curve_table)]

    def cmd_relax(self) -> List[Output]:
        """Relaxation-oscillation frequency over a sigma grid."""
        gamma_p = mhz_to_hz(self.params["gamma_p_MHz"])
        gamma = mhz_to_hz(self.params["gamma_MHz"])
        low = float(self._option("sigma_min", "relax", "sigma_min"))
        high = float(self._option("sigma_max", "relax", "sigma_max"))
        count = int(self._option("count", "relax", "count"))
        if count < 0:
            raise ParameterError(f"grid count must be nonnegative, got {count}")
        if count and min(low, high) < 0:
            raise ParameterError("the sigma grid must be nonnegative")

        rows = []
        for sigma in np.linspace(low, high, count):
            info = relaxation_frequency(float(sigma), gamma_p, gamma)
            nu_mhz = None if info.nu_n is None else info.nu_n * gamma / 1e6
            rows.append((info.sigma, info.nu_n, nu_mhz, 1.0 if info.in_band else 0.0))

        reference = relaxation_frequency(0.0, gamma_p, gamma)
        window = reference.in_band_window
        self.logger.info(f"Relaxation oscillations in band for sigma in [{window[0]:.4f}, {window[1]:.4f}]")
        thresholds = self.params.get("threshold_uW_options") or [w_to_uw(threshold_from_parameters(self.params))]
        bands = {}
        for p_th_uw in thresholds:
            p_low, p_high = relaxation_pump_band(gamma_p, gamma, uw_to_w(p_th_uw))
            bands[f"{p_th_uw:g}"] = [w_to_uw(p_low), w_to_uw(p_high)]
            self.logger.info(
                f"  P_th = {p_th_uw:g} uW: pump {w_to_uw(p_low):.4g} to {w_to_uw(p_high):.4g} uW"
            )
        self.extra_metadata = {
            "sigma_threshold": reference.sigma_threshold,
            "relaxation_window": list(window),
            "pump_bands_uW": bands,
        }
        return [(self.settings.output_file, self.settings.fmt, Table(RELAX_COLUMNS, rows))]
