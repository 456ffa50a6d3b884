"""
Series Store
============
Purpose: Load, validate and hold multivariate time-series tables
Features:
- RFC-4180 CSV input with a mandatory header row
- Non-numeric columns (dates, labels) are dropped and reported
- Missing or non-finite cells in numeric columns are hard errors
- Exact, case-sensitive column selection preserving request order
"""

import csv
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from models.errors import (
    DuplicateColumn,
    EmptyTable,
    ParseError,
    RaggedRows,
    SeriesFileNotFound,
    UnknownColumn,
)
from models.models import LoadReport, SeriesTable

logger = logging.getLogger(__name__)


def _read_records(path: Path) -> Tuple[List[str], List[List[str]], List[int]]:
    """Header, data records and the 1-based file line each record starts on.

    Blank lines are skipped but still counted, so reported lines match the file.
    """
    records: List[List[str]] = []
    lines: List[int] = []
    try:
        with path.open(newline="", encoding="utf-8-sig") as handle:
            reader = csv.reader(handle)
            end = 0
            for record in reader:
                start, end = end + 1, reader.line_num
                if not record or (len(record) == 1 and not record[0].strip()):
                    continue
                records.append(record)
                lines.append(start)
    except FileNotFoundError:
        raise SeriesFileNotFound(str(path)) from None
    except csv.Error as exc:
        raise RaggedRows(None) from exc
    if not records:
        raise EmptyTable(str(path), "file has no header row")

    header = [cell.strip() for cell in records[0]]
    for record, line in zip(records[1:], lines[1:]):
        if len(record) != len(header):
            raise RaggedRows(line, len(header), len(record))
    return header, records[1:], lines[1:]


def load_csv_with_report(path: Union[str, Path]) -> Tuple[SeriesTable, LoadReport]:
    """Load a CSV file into a SeriesTable and describe what was kept."""
    path = Path(path)
    header, records, lines = _read_records(path)
    if not records:
        raise EmptyTable(str(path), "no data rows after the header")
    body = pd.DataFrame(records, dtype=str)

    names: List[str] = []
    columns: List[np.ndarray] = []
    dropped: List[str] = []
    for position, name in enumerate(header):
        cells = body.iloc[:, position].str.strip()
        values = pd.to_numeric(cells, errors="coerce").to_numpy(dtype=np.float64)
        finite = np.isfinite(values)
        if not finite.any():
            dropped.append(name)
            continue
        if not finite.all():
            bad = int(np.flatnonzero(~finite)[0])
            raise ParseError(lines[bad], name, str(body.iloc[bad, position]))
        names.append(name)
        columns.append(values)

    if not names:
        raise EmptyTable(str(path), "no numeric columns")

    table = SeriesTable(names=tuple(names), columns=tuple(columns))
    report = LoadReport(source=str(path), n_rows=table.n_obs, numeric_columns=names, dropped_columns=dropped)
    for name in dropped:
        logger.warning("%s: dropped non-numeric column %r", path, name)
    logger.info("%s: loaded %d rows x %d numeric columns", path, table.n_obs, len(names))
    return table, report


def load_csv(path: Union[str, Path]) -> SeriesTable:
    table, _ = load_csv_with_report(path)
    return table


def select_columns(table: SeriesTable, names: Optional[Sequence[str]]) -> SeriesTable:
    """Sub-table in request order; an empty request returns the table unchanged."""
    if not names:
        return table
    seen = set()
    for name in names:
        if name not in table.names:
            raise UnknownColumn(name, list(table.names))
        if name in seen:
            raise DuplicateColumn(name)
        seen.add(name)
    return SeriesTable(names=tuple(names), columns=tuple(table.column(name) for name in names))
