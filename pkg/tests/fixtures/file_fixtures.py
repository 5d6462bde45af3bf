"""File system fixtures: parameter files, fit data and run settings."""

import json
from pathlib import Path
from typing import Any, Dict, Optional

import pytest

from wgmsqueeze.core import RunSettings
from wgmsqueeze.fitting import synthetic_single_beam_data
from wgmsqueeze.utils import w_to_uw


def write_fit_csv(path: Path, points, with_weight: bool = False, weight: float = 1.0) -> Path:
    """Write FitPoints as a power_uW,variance_snu[,weight] CSV."""
    header = "power_uW,variance_snu" + (",weight" if with_weight else "")
    lines = [header]
    for p in points:
        row = f"{w_to_uw(p.power)!r},{p.variance!r}"
        if with_weight:
            row += f",{weight!r}"
        lines.append(row)
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def params_file(tmp_path) -> Path:
    """Partial parameter file overriding the coupling ratio and the detection floor."""
    path = tmp_path / "params.json"
    path.write_text(json.dumps({
        "coupling_ratio": 0.5,
        "eta_twin": 1.0,
        "detection": {"electronic_floor": 0.0},
    }, indent=2))
    return path


@pytest.fixture
def fit_data_file(tmp_path) -> Path:
    """Synthetic single-beam data at P_th = 12.3 uW with small noise."""
    points = synthetic_single_beam_data(12.3e-6, 0.22 * 0.73, 0.6, noise_sd=0.003, seed=11)
    return write_fit_csv(tmp_path / "single_beam.csv", points)


@pytest.fixture
def settings_factory(tmp_path):
    """Build RunSettings writing into tmp_path."""

    def _make(command: str, fmt: str = "csv", options: Optional[Dict[str, Any]] = None,
              overrides: Optional[Dict[str, Any]] = None, **kwargs) -> RunSettings:
        out = kwargs.pop("output_file", tmp_path / f"{command}.{fmt}")
        return RunSettings(
            command=command,
            output_file=Path(out),
            fmt=fmt,
            options=options or {},
            overrides=overrides or {},
            **kwargs,
        )

    return _make
