"""Main entry point for wgmsqueeze."""

import sys
from typing import List, Optional

from .cli import parse_arguments
from .config import apply_overrides, load_parameters
from .core import RunSettings
from .engine import CommandEngine
from .errors import FitConvergenceError, WgmSqueezeError
from .utils import setup_logger


def main(args_list: Optional[List[str]] = None) -> int:
    """Primary application entry point.

    Parse arguments, resolve parameters (preset < --params file < flags) and
    run the selected command.

    Args:
        args_list: Optional list of command-line arguments. If None, uses sys.argv[1:].

    Returns:
        Process exit code: 0 on success, 1 on model, data or fit errors.
        Argument errors exit with code 2 from argparse.
    """
    args = parse_arguments(args_list)
    logger = setup_logger("wgmsqueeze", verbose=args.verbose)

    try:
        settings = RunSettings.from_arguments(args)
        params = load_parameters(settings.params_file, logger=logger)
        params = apply_overrides(params, settings.overrides)
        return CommandEngine(params, settings, logger=logger).run()
    except FitConvergenceError as e:
        logger.error(f"Fit did not converge: {e}")
        best = e.best_iterate
        if best is not None:
            logger.error(
                f"Best iterate: P_th = {best.p_th_hat:.6g} W, asymptote = {best.asymptote_hat:.6g} SNU, "
                f"rms = {best.residual_rms:.4g} after {best.iterations} iterations"
            )
        return 1
    except WgmSqueezeError as e:
        logger.error(str(e))
        return 1
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
