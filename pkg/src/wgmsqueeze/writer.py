"""Output writer and parsers for wgmsqueeze tables (CSV and JSON)."""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, TextIO, Tuple, Union

import numpy as np

from .constants import BELOW_THRESHOLD_TOKEN, NUMBER_FORMAT, OUTPUT_FORMATS, POLE_TOKEN
from .detection import PhotocurrentPair
from .errors import DataParseError, ParameterError
from .fitting import FitPoint
from .sweep import CSV_COLUMNS, SweepTrace
from .utils import uw_to_w

Cell = Optional[float]

FIT_DATA_COLUMNS = ("power_uW", "variance_snu")
FIT_WEIGHT_COLUMN = "weight"


@dataclass
class Table:
    """Column names and rows of numeric cells.

    A cell is a float, ``inf`` for a divergent value, or None for a row below
    the relaxation threshold.
    """
    columns: Tuple[str, ...]
    rows: List[Tuple[Cell, ...]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.columns = tuple(self.columns)
        for index, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ParameterError(f"row {index} has {len(row)} cells for {len(self.columns)} columns")

    @classmethod
    def from_columns(cls, columns: Dict[str, Iterable[Cell]]) -> "Table":
        """Build a table from equal-length column sequences."""
        names = tuple(columns)
        values = [list(columns[name]) for name in names]
        return cls(names, [tuple(row) for row in zip(*values)])

    def column(self, name: str) -> List[Cell]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


def format_value(value: Cell) -> str:
    """Render one cell: 9 significant digits, or the pole/below-threshold tokens."""
    if value is None:
        return BELOW_THRESHOLD_TOKEN
    if math.isinf(value):
        return POLE_TOKEN
    if math.isnan(value):
        raise ParameterError("NaN cannot be written")
    return NUMBER_FORMAT.format(value)


def parse_value(text: str, line: int, column: Union[str, int]) -> Cell:
    """Parse one cell written by format_value.

    Raises:
        DataParseError: If the text is neither a number nor a known token.
    """
    text = text.strip()
    if text == POLE_TOKEN:
        return math.inf
    if text == BELOW_THRESHOLD_TOKEN:
        return None
    try:
        value = float(text)
    except ValueError:
        raise DataParseError(f"cannot parse {text!r} as a number", line, column) from None
    if not math.isfinite(value):
        raise DataParseError(f"non-finite value {text!r}", line, column)
    return value


def _json_cell(value: Cell) -> Union[float, str]:
    if value is None or math.isinf(value):
        return format_value(value)
    return float(value)


def _from_json_cell(value: Any, line: int, column: str) -> Cell:
    if isinstance(value, str):
        return parse_value(value, line, column)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise DataParseError(f"unexpected value {value!r}", line, column)


class ResultWriter:
    """Write command results as CSV or JSON to a text stream."""

    def __init__(self, stream: TextIO, fmt: str = "csv"):
        """Initialize the writer.

        Args:
            stream: The file-like object to write to.
            fmt: Output format, "csv" or "json".
        """
        if fmt not in OUTPUT_FORMATS:
            raise ParameterError(f"unknown output format '{fmt}'")
        self.stream = stream
        self.fmt = fmt
        self.rows_written = 0

    def write_table(self, table: Table, metadata: Optional[Dict[str, Any]] = None) -> None:
        """Write a table; JSON output stores columns as arrays next to the metadata."""
        if self.fmt == "csv":
            writer = csv.writer(self.stream, lineterminator="\n")
            writer.writerow(table.columns)
            for row in table.rows:
                writer.writerow([format_value(v) for v in row])
        else:
            document = {
                "metadata": metadata or {},
                "columns": {
                    name: [_json_cell(row[i]) for row in table.rows]
                    for i, name in enumerate(table.columns)
                },
            }
            self.write_document(document)
            return
        self.rows_written += len(table)

    def write_document(self, document: Dict[str, Any]) -> None:
        """Write a JSON document; floats keep full precision."""
        json.dump(_sanitize(document), self.stream, indent=2, allow_nan=False)
        self.stream.write("\n")
        columns = document.get("columns")
        if isinstance(columns, dict) and columns:
            self.rows_written += len(next(iter(columns.values())))


def _sanitize(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_sanitize(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        if math.isnan(value):
            raise ParameterError("NaN cannot be written")
        return POLE_TOKEN
    return value


def read_table(source: Union[str, Path, TextIO]) -> Table:
    """Parse a CSV table written by ResultWriter.

    Raises:
        DataParseError: Naming the 1-based line and the column that failed.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as f:
            return read_table(f)

    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise DataParseError("empty file, expected a header row", 1, 1) from None
    columns = tuple(name.strip() for name in header)
    if not columns or any(not name for name in columns):
        raise DataParseError("header has an empty column name", 1, 1)

    rows: List[Tuple[Cell, ...]] = []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(columns):
            column = columns[-1] if len(row) < len(columns) else len(row)
            raise DataParseError(f"expected {len(columns)} cells, got {len(row)}", line, column)
        rows.append(tuple(parse_value(cell, line, name) for cell, name in zip(row, columns)))
    return Table(columns, rows)


def read_json_table(source: Union[str, Path, TextIO]) -> Tuple[Table, Dict[str, Any]]:
    """Parse a JSON table written by ResultWriter.

    Returns:
        (table, metadata).
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as f:
            return read_json_table(f)
    try:
        document = json.load(source)
    except json.JSONDecodeError as e:
        raise DataParseError(e.msg, e.lineno, e.colno) from None
    columns = document.get("columns") if isinstance(document, dict) else None
    if not isinstance(columns, dict):
        raise DataParseError("missing 'columns' object", 1, "columns")
    parsed = {
        name: [_from_json_cell(v, index + 1, name) for index, v in enumerate(values)]
        for name, values in columns.items()
    }
    return Table.from_columns(parsed), document.get("metadata", {})


def read_fit_data(source: Union[str, Path, TextIO]) -> List[FitPoint]:
    """Read measured single-beam data: power_uW, variance_snu and optional weight.

    Raises:
        DataParseError: For a missing column or an invalid value.
    """
    table = read_table(source)
    for name in FIT_DATA_COLUMNS:
        if name not in table.columns:
            raise DataParseError(f"missing required column '{name}'", 1, name)
    has_weight = FIT_WEIGHT_COLUMN in table.columns

    points = []
    for index, row in enumerate(table.rows):
        line = index + 2
        cells = dict(zip(table.columns, row))
        for name in FIT_DATA_COLUMNS + ((FIT_WEIGHT_COLUMN,) if has_weight else ()):
            value = cells[name]
            if value is None or math.isinf(value):
                raise DataParseError("value must be a finite number", line, name)
        power = cells["power_uW"]
        weight = cells[FIT_WEIGHT_COLUMN] if has_weight else 1.0
        if not power > 0:
            raise DataParseError("pump power must be positive", line, "power_uW")
        if not weight > 0:
            raise DataParseError("weight must be positive", line, FIT_WEIGHT_COLUMN)
        points.append(FitPoint(uw_to_w(power), cells["variance_snu"], weight))
    return points


def sweep_table(trace: SweepTrace) -> Table:
    """Sweep trace as a table in the fixed column order."""
    return Table.from_columns({name: trace.column(name).tolist() for name in CSV_COLUMNS})


def sweep_from_table(table: Table) -> SweepTrace:
    """Rebuild a SweepTrace from a parsed sweep table."""
    missing = [name for name in CSV_COLUMNS if name not in table.columns]
    if missing:
        raise DataParseError(f"missing column '{missing[0]}'", 1, missing[0])
    arrays = {name: np.array(table.column(name), dtype=float) for name in CSV_COLUMNS}
    return SweepTrace(**arrays)


def photocurrent_table(pair: PhotocurrentPair) -> Table:
    """Detector traces as (time, signal, idler) columns."""
    return Table.from_columns({
        "time": pair.times.tolist(),
        "signal": pair.signal_trace.tolist(),
        "idler": pair.idler_trace.tolist(),
    })

