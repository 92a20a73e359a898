"""Dataset ingestion and result serialization."""

import logging
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from ..models import DataError, DataMatrix, IngestSpec, RankedFeature, ResultDocument

logger = logging.getLogger(__name__)


def _resolve_columns(frame: pd.DataFrame, column_filter: Optional[List[str]]) -> List[str]:
    columns = [str(c) for c in frame.columns]
    if not column_filter:
        return columns

    resolved = []
    for entry in column_filter:
        entry = str(entry)
        if entry in columns:
            resolved.append(entry)
        elif entry.isdigit() and int(entry) < len(columns):
            resolved.append(columns[int(entry)])
        else:
            raise DataError(f"unknown column {entry!r}; available: {', '.join(columns)}")
    if len(set(resolved)) != len(resolved):
        raise DataError("column filter selects the same column twice")
    return resolved


def ingest_csv(spec: IngestSpec) -> DataMatrix:
    """Read a delimited text file of numeric cells into a DataMatrix.

    Every cell must parse as a finite number; the first offending cell is
    reported with its row and column.

    Args:
        spec: File location and parsing options

    Returns:
        DataMatrix with column names from the header (or indices)
    """
    path = Path(spec.path)
    if not path.is_file():
        raise DataError(f"Input file not found: {spec.path}")

    try:
        frame = pd.read_csv(
            path,
            sep=spec.delimiter,
            header=0 if spec.has_header else None,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
        )
    except pd.errors.EmptyDataError:
        raise DataError(f"{spec.path} contains no data")
    except pd.errors.ParserError as e:
        raise DataError(f"Cannot parse {spec.path}: {e}") from e

    frame.columns = [str(c) for c in frame.columns]
    columns = _resolve_columns(frame, spec.column_filter)
    if not columns:
        raise DataError(f"{spec.path} has no feature columns")
    frame = frame[columns]

    cells = frame.apply(lambda column: column.str.strip())
    # to_numeric only locates bad cells; its fast parser is not correctly rounded.
    numeric = cells.apply(lambda column: pd.to_numeric(column, errors="coerce"))
    bad = ~np.isfinite(numeric.to_numpy(dtype=np.float64))
    if bad.any():
        row, col = (int(i) for i in np.argwhere(bad)[0])
        line = row + (2 if spec.has_header else 1)
        raw = frame.iat[row, col]
        what = "missing value" if raw.strip() == "" else f"non-numeric or non-finite value {raw!r}"
        raise DataError(
            f"{spec.path}: {what} at row {row + 1} (line {line}), column {columns[col]!r}"
        )

    values = cells.to_numpy(dtype=object).astype(np.float64)
    matrix = DataMatrix(values, tuple(columns))
    logger.info("Loaded %s: n=%d rows, d=%d features", spec.path, matrix.n, matrix.d)
    return matrix


def write_matrix_csv(matrix: DataMatrix, file_path: str, delimiter: str = ",") -> None:
    """Write a matrix with a header row; floats are written round-trip exact."""
    frame = pd.DataFrame(np.asarray(matrix.values), columns=list(matrix.names))
    frame.to_csv(file_path, sep=delimiter, index=False)


def ranking_frame(rows: List[RankedFeature]) -> pd.DataFrame:
    """Flat table of ranked features with only the score columns that are set."""
    records = []
    for row in rows:
        record = {"rank": row.rank, "index": row.index, "name": row.name}
        record.update(row.score_fields())
        records.append(record)
    return pd.DataFrame.from_records(records, columns=_frame_columns(records))


def _frame_columns(records: List[dict]) -> List[str]:
    columns: List[str] = []
    for record in records:
        for key in record:
            if key not in columns:
                columns.append(key)
    return columns or ["rank", "index", "name"]


def write_scores_csv(document: ResultDocument, file_path: str,
                     selected_only: bool = False) -> None:
    """Write (rank, index, name, score fields...) for spreadsheet use."""
    rows = document.ranking
    if selected_only:
        chosen = set(document.selected)
        rows = [row for row in rows if row.index in chosen]
    ranking_frame(rows).to_csv(file_path, index=False)


def render_document(document: ResultDocument, fmt: str = "json", indent: int = 2) -> str:
    """Serialize a document as json or yaml."""
    if fmt == "json":
        return document.to_json(indent=indent)
    if fmt == "yaml":
        return document.to_yaml()
    raise ValueError(f"Unknown output format: {fmt}")
