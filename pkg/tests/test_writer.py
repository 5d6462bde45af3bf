"""Tests for the table writer and the data parsers."""

import io
import json
import math

import numpy as np
import pytest

from wgmsqueeze.constants import BELOW_THRESHOLD_TOKEN, POLE_TOKEN
from wgmsqueeze.detection import PhotocurrentPair
from wgmsqueeze.errors import DataParseError, ParameterError
from wgmsqueeze.fitting import FitPoint
from wgmsqueeze.sweep import CSV_COLUMNS, SweepConfig, detuning_sweep
from wgmsqueeze.writer import (
    ResultWriter,
    Table,
    format_value,
    parse_value,
    read_fit_data,
    read_json_table,
    photocurrent_table,
    read_table,
    sweep_from_table,
    sweep_table,
)

from fixtures.file_fixtures import write_fit_csv
from fixtures.output_checker import OutputChecker


class TestCells:
    """Test rendering and parsing of single cells."""

    def test_tokens(self):
        """Test the pole and below-threshold tokens."""
        assert format_value(math.inf) == POLE_TOKEN
        assert format_value(None) == BELOW_THRESHOLD_TOKEN
        assert parse_value(POLE_TOKEN, 2, "v") == math.inf
        assert parse_value(BELOW_THRESHOLD_TOKEN, 2, "v") is None

    def test_nine_significant_digits(self):
        """Test the number format."""
        assert format_value(0.85926470588) == "0.859264706"
        assert format_value(2.0) == "2"

    def test_nan_rejected(self):
        """Test that NaN is never written."""
        with pytest.raises(ParameterError):
            format_value(math.nan)

    def test_bad_cell(self):
        """Test that an unparseable cell names its line and column."""
        with pytest.raises(DataParseError) as excinfo:
            parse_value("abc", 7, "sigma")
        assert excinfo.value.line == 7
        assert excinfo.value.column == "sigma"
        assert "line 7, column sigma" in str(excinfo.value)


class TestCsvTables:
    """Test CSV output and parsing."""

    def test_structure(self):
        """Test header and row layout."""
        table = Table(("sigma", "nu_n"), [(1.0, None), (3.0, 1.2921987)])
        content = OutputChecker.render(table)
        OutputChecker.validate_csv_structure(content, ("sigma", "nu_n"))
        assert content.splitlines()[1] == f"1,{BELOW_THRESHOLD_TOKEN}"

    def test_roundtrip(self, table_roundtrip):
        """Test that writing a parsed table reproduces the same bytes."""
        table = Table(("a", "b", "c"), [(1.0 / 3.0, math.inf, None), (-2.5e-7, 1.0, 4.0)])
        parsed = table_roundtrip(table)
        assert parsed.column("b") == [math.inf, 1.0]

    def test_header_only(self):
        """Test that an empty table has a header and no rows."""
        stream = io.StringIO()
        writer = ResultWriter(stream, "csv")
        writer.write_table(Table(("sigma", "omega")))
        assert stream.getvalue() == "sigma,omega\n"
        assert writer.rows_written == 0
        assert len(read_table(io.StringIO(stream.getvalue()))) == 0

    def test_row_length_checked(self):
        """Test that a row with the wrong cell count is rejected."""
        with pytest.raises(ParameterError):
            Table(("a", "b"), [(1.0,)])

    def test_unknown_format(self):
        """Test that unknown formats are rejected."""
        with pytest.raises(ParameterError):
            ResultWriter(io.StringIO(), "xml")

    def test_parse_error_location(self):
        """Test the line and column of a malformed cell."""
        content = "sigma,nu_n\n1.0,0.5\n2.0,oops\n"
        with pytest.raises(DataParseError) as excinfo:
            read_table(io.StringIO(content))
        assert excinfo.value.line == 3
        assert excinfo.value.column == "nu_n"

    def test_short_row(self):
        """Test that a short row is reported at its line."""
        with pytest.raises(DataParseError) as excinfo:
            read_table(io.StringIO("a,b\n1,2\n3\n"))
        assert excinfo.value.line == 3

    def test_empty_file(self):
        """Test that an empty file has no header."""
        with pytest.raises(DataParseError, match="header"):
            read_table(io.StringIO(""))


class TestJsonTables:
    """Test JSON output."""

    def test_json_columns(self):
        """Test that columns become arrays next to the metadata."""
        stream = io.StringIO()
        writer = ResultWriter(stream, "json")
        writer.write_table(Table(("sigma", "v"), [(1.0, math.inf), (2.0, 0.5)]), metadata={"seed": 3})
        document = json.loads(stream.getvalue())
        assert document["metadata"] == {"seed": 3}
        assert document["columns"]["v"] == [POLE_TOKEN, 0.5]
        assert writer.rows_written == 2

    def test_json_roundtrip(self):
        """Test that read_json_table restores values and metadata."""
        stream = io.StringIO()
        table = Table(("sigma", "nu_n"), [(1.0, None), (3.0, 1.0 / 7.0)])
        ResultWriter(stream, "json").write_table(table, metadata={"command": "relax"})
        parsed, metadata = read_json_table(io.StringIO(stream.getvalue()))
        assert parsed.rows == table.rows
        assert metadata["command"] == "relax"

    def test_numpy_values_serialized(self):
        """Test that numpy scalars and arrays are written as plain JSON."""
        stream = io.StringIO()
        ResultWriter(stream, "json").write_document({"x": np.float64(0.5), "y": np.arange(3)})
        assert json.loads(stream.getvalue()) == {"x": 0.5, "y": [0, 1, 2]}

    def test_nan_document_rejected(self):
        """Test that NaN never reaches a JSON document."""
        with pytest.raises(ParameterError):
            ResultWriter(io.StringIO(), "json").write_document({"x": math.nan})

    def test_missing_columns(self):
        """Test that a JSON file without columns is rejected."""
        with pytest.raises(DataParseError):
            read_json_table(io.StringIO('{"metadata": {}}'))


class TestFitData:
    """Test reading measured single-beam data."""

    def test_read_converts_units(self, fit_data_file):
        """Test that powers are converted from uW to W."""
        points = read_fit_data(fit_data_file)
        assert len(points) == 20
        assert points[0].power == pytest.approx(15e-6)
        assert all(p.weight == 1.0 for p in points)

    def test_weight_column(self, tmp_path):
        """Test the optional weight column."""
        path = write_fit_csv(tmp_path / "w.csv", [FitPoint(1e-5, 1.1), FitPoint(1e-4, 0.9)], True, 2.0)
        points = read_fit_data(path)
        assert [p.weight for p in points] == [2.0, 2.0]

    def test_missing_column(self, tmp_path):
        """Test that variance_snu is required."""
        path = tmp_path / "bad.csv"
        path.write_text("power_uW,variance\n10,1.0\n")
        with pytest.raises(DataParseError, match="variance_snu"):
            read_fit_data(path)

    def test_nonpositive_power(self, tmp_path):
        """Test that a zero pump power is reported at its line."""
        path = tmp_path / "bad.csv"
        path.write_text("power_uW,variance_snu\n10,1.0\n0,0.9\n")
        with pytest.raises(DataParseError) as excinfo:
            read_fit_data(path)
        assert excinfo.value.line == 3
        assert excinfo.value.column == "power_uW"

    def test_malformed_row(self, tmp_path):
        """Test that a non-numeric variance is reported."""
        path = tmp_path / "bad.csv"
        path.write_text("power_uW,variance_snu\n10,1.0\n20,high\n")
        with pytest.raises(DataParseError, match="line 3, column variance_snu"):
            read_fit_data(path)


class TestSweepTables:
    """Test sweep traces as tables."""

    def test_sweep_roundtrip(self, measured_cavity, noisy_chain):
        """Test that a written sweep parses back to the same trace."""
        trace = detuning_sweep(measured_cavity, noisy_chain, SweepConfig(points=50, fluctuations=True), seed=1)
        table = sweep_table(trace)
        assert table.columns == CSV_COLUMNS
        parsed = read_table(io.StringIO(OutputChecker.render(table)))
        rebuilt = sweep_from_table(parsed)
        assert np.allclose(rebuilt.noise_diff, trace.noise_diff, rtol=1e-8)
        assert np.allclose(rebuilt.detuning, trace.detuning, rtol=1e-8)

    def test_sweep_json_roundtrip(self, measured_cavity, noisy_chain):
        """Test that a JSON sweep keeps full precision."""
        trace = detuning_sweep(measured_cavity, noisy_chain, SweepConfig(points=50, fluctuations=True), seed=1)
        stream = io.StringIO()
        ResultWriter(stream, "json").write_table(sweep_table(trace), metadata={"command": "sweep"})
        stream.seek(0)
        parsed, metadata = read_json_table(stream)
        rebuilt = sweep_from_table(parsed)
        assert metadata["command"] == "sweep"
        for name in CSV_COLUMNS:
            assert np.allclose(rebuilt.column(name), trace.column(name), rtol=1e-12, atol=0), name

    def test_photocurrent_json_columns(self):
        """Test that JSON photocurrent columns match the detector arrays."""
        rng = np.random.default_rng(6)
        pair = PhotocurrentPair(1e6, 0.001, 6, rng.standard_normal(1000), rng.standard_normal(1000))
        stream = io.StringIO()
        ResultWriter(stream, "json").write_table(photocurrent_table(pair))
        stream.seek(0)
        parsed, _ = read_json_table(stream)
        assert parsed.columns == ("time", "signal", "idler")
        assert np.allclose(parsed.column("time"), pair.times, rtol=1e-12, atol=0)
        assert np.allclose(parsed.column("signal"), pair.signal_trace, rtol=1e-12, atol=0)
        assert np.allclose(parsed.column("idler"), pair.idler_trace, rtol=1e-12, atol=0)

    def test_missing_sweep_column(self):
        """Test that a table without the sum column cannot become a trace."""
        table = Table(("detuning", "snl"), [(0.0, 1.0)])
        with pytest.raises(DataParseError):
            sweep_from_table(table)
