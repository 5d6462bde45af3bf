"""Command line interface for wgmsqueeze."""

import argparse
from typing import List, Optional

from .constants import DEFAULT_SEED, OUTPUT_FORMATS, PRESET_NAME


def _common_parser() -> argparse.ArgumentParser:
    """Flags shared by every subcommand."""
    parent = argparse.ArgumentParser(add_help=False)

    io_group = parent.add_argument_group("Input/Output Options")
    io_group.add_argument(
        "--params", type=str, default=None,
        help=f"JSON parameter file merged over the {PRESET_NAME} preset"
    )
    io_group.add_argument("-o", "--out", type=str, default=None, help="Output file (default: <command>.<format>)")
    io_group.add_argument("--format", choices=OUTPUT_FORMATS, default="csv", help="Output format")
    io_group.add_argument(
        "--seed", type=int, default=None,
        help=f"Seed for all random streams (default: {DEFAULT_SEED})"
    )
    io_group.add_argument("-v", "--verbose", action="store_true", help="Show detailed processing logs")

    model_group = parent.add_argument_group("Parameter Overrides")
    model_group.add_argument("--pump-uW", dest="pump_uw", type=float, help="Pump power (uW)")
    model_group.add_argument("--threshold-uW", dest="threshold_uw", type=float, help="Threshold power (uW)")
    model_group.add_argument("--gamma-MHz", dest="gamma_mhz", type=float, help="Parametric linewidth (MHz)")
    model_group.add_argument("--gamma-p-MHz", dest="gamma_p_mhz", type=float, help="Pump linewidth (MHz)")
    model_group.add_argument("--coupling-ratio", type=float, help="Coupling ratio gamma0/gamma")
    model_group.add_argument("--eta", type=float, help="Detection efficiency (both beam configurations)")
    model_group.add_argument("--nu-det-MHz", dest="nu_det_mhz", type=float, help="Measurement sideband (MHz)")
    model_group.add_argument("--sigma", type=float, help="Pump parameter (overrides the pump power)")
    return parent


def get_parser() -> argparse.ArgumentParser:
    """Create and return the ArgumentParser with all subcommands.

    Returns:
        Configured ArgumentParser object.
    """
    parser = argparse.ArgumentParser(
        prog="wgmsqueeze",
        description="wgmsqueeze: intensity-noise models, simulation and fits for triply resonant OPOs.",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    common = _common_parser()
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")

    variance = subparsers.add_parser(
        "variance", parents=[common], help="Analytic variances on a sigma or Omega grid"
    )
    variance.add_argument("--axis", choices=("sigma", "omega"), default=None, help="Grid variable")
    variance.add_argument("--min", dest="grid_min", type=float, default=None, help="First grid value")
    variance.add_argument("--max", dest="grid_max", type=float, default=None, help="Last grid value")
    variance.add_argument("--count", type=int, default=None, help="Number of grid points (0 = header only)")

    sweep = subparsers.add_parser("sweep", parents=[common], help="Pump-detuning sweep trace")
    sweep.add_argument("--mode", choices=("twin", "single"), default="twin", help="Twin-beam or single-beam")
    sweep.add_argument("--no-channels", action="store_true", help="Sweep without any PDC channel")
    sweep.add_argument(
        "--fluctuations", action="store_true",
        help="Add seeded estimator noise to the readings"
    )

    simulate = subparsers.add_parser("simulate", parents=[common], help="Monte-Carlo detector traces")
    simulate.add_argument("--beam", choices=("twin", "single"), default=None, help="Detector configuration")
    simulate.add_argument("--duration-s", "--duration", dest="duration", type=float, default=None,
                          help="Record length (s)")
    simulate.add_argument("--sample-rate-MHz", "--sample-rate", dest="sample_rate", type=float, default=None,
                          help="Sample rate (MHz)")
    simulate.add_argument("--transmission", type=float, default=None, help="Extra passive transmission")
    simulate.add_argument("--workers", type=int, default=None, help="Threads generating the traces")

    fit = subparsers.add_parser("fit", parents=[common], help="Fit single-beam noise data (JSON output)")
    fit.add_argument("data", type=str, help="CSV with columns power_uW, variance_snu[, weight]")

    relax = subparsers.add_parser("relax", parents=[common], help="Relaxation-oscillation frequency")
    relax.add_argument("--sigma-min", type=float, default=None, help="First sigma")
    relax.add_argument("--sigma-max", type=float, default=None, help="Last sigma")
    relax.add_argument("--count", type=int, default=None, help="Number of grid points")

    return parser


def parse_arguments(args_list: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments.

    Args:
        args_list: Optional list of arguments to parse. If None, uses sys.argv[1:].

    Returns:
        The parsed argparse Namespace.
    """
    return get_parser().parse_args(args_list)
