"""Run settings resolved from command-line arguments."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

from .constants import DEFAULT_SEED, OUTPUT_FORMATS
from .errors import ParameterError


@dataclass
class RunSettings:
    """Container for the parameters of one command execution.

    Attributes:
        command: Subcommand name.
        output_file: Where the result is written.
        fmt: Output format, "csv" or "json".
        seed: Seed for every random stream of the run.
        params_file: Optional parameter file given with --params.
        verbose: Whether to show detailed processing logs.
        options: Command-specific options (grid, beam, durations, data file).
        overrides: Parameter overrides from flags; None means not given.
    """
    command: str
    output_file: Path
    fmt: str = "csv"
    seed: int = DEFAULT_SEED
    params_file: Optional[Path] = None
    verbose: bool = False
    options: Dict[str, Any] = field(default_factory=dict)
    overrides: Dict[str, Optional[float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.fmt not in OUTPUT_FORMATS:
            raise ParameterError(f"unknown output format '{self.fmt}'")
        if self.seed < 0:
            raise ParameterError(f"seed must be nonnegative, got {self.seed}")
        if self.params_file is not None and not Path(self.params_file).exists():
            raise ParameterError(f"parameter file not found: {self.params_file}")

    @classmethod
    def from_arguments(cls, args: Any) -> "RunSettings":
        """Factory to create settings from parsed CLI arguments.

        Args:
            args: Parsed CLI arguments from argparse.

        Returns:
            RunSettings instance with all parameters resolved.
        """
        common = {"command", "params", "out", "format", "seed", "verbose"}
        override_dests = {
            "pump_uw", "threshold_uw", "gamma_mhz", "gamma_p_mhz",
            "coupling_ratio", "eta", "nu_det_mhz", "sigma",
        }
        values = vars(args)
        options = {k: v for k, v in values.items() if k not in common | override_dests}
        overrides = {k: values.get(k) for k in override_dests}

        fmt = args.format
        if args.command == "fit":
            fmt = "json"
        out = args.out or f"{args.command}.{fmt}"

        return cls(
            command=args.command,
            output_file=Path(out),
            fmt=fmt,
            seed=DEFAULT_SEED if args.seed is None else args.seed,
            params_file=Path(args.params) if args.params else None,
            verbose=args.verbose,
            options=options,
            overrides=overrides,
        )
