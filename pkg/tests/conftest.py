"""Shared pytest fixtures for wgmsqueeze tests."""

from fixtures.file_fixtures import (  # noqa: F401
    fit_data_file,
    params_file,
    settings_factory,
)
from fixtures.model_fixtures import (  # noqa: F401
    critical_cavity,
    ideal_chain,
    noisy_chain,
    op_factory,
    measured_cavity,
)
from fixtures.output_checker import table_roundtrip  # noqa: F401
