"""Dataset ingestion and result persistence."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DatasetParseError, InvalidInputError
from .filters import Dataset


def format_value(v) -> str:
    """Shortest round-trip text for floats, plain ``str`` otherwise."""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def load_dataset(path) -> Dataset:
    """Read a CSV whose first column is the response and the rest are features.

    Lines starting with ``#`` are ignored.  The first remaining line is the
    header.  Errors report 1-based file line numbers and column numbers.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetParseError(f"{path}: no such file")
    header = None
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if raw.startswith("#") or not raw.strip():
                continue
            fields = next(csv.reader([raw]))
            if header is None:
                header = [f.strip() for f in fields]
                if len(header) < 2:
                    raise DatasetParseError(
                        f"{path}: header needs a response and at least one feature", row=lineno
                    )
                continue
            if len(fields) != len(header):
                raise DatasetParseError(
                    f"{path}: row {lineno} has {len(fields)} cells, expected {len(header)}",
                    row=lineno,
                )
            values = []
            for col, cell in enumerate(fields, start=1):
                try:
                    v = float(cell)
                except ValueError:
                    raise DatasetParseError(
                        f"{path}: row {lineno}, column {col}: non-numeric cell {cell!r}",
                        row=lineno,
                        column=col,
                    ) from None
                if not math.isfinite(v):
                    raise DatasetParseError(
                        f"{path}: row {lineno}, column {col}: non-finite value {cell!r}",
                        row=lineno,
                        column=col,
                    )
                values.append(v)
            rows.append(values)
    if header is None or not rows:
        raise DatasetParseError(f"{path}: empty dataset")
    arr = np.array(rows, dtype=np.float64)
    try:
        return Dataset(arr[:, 1:], arr[:, 0], feature_names=header[1:], response_name=header[0])
    except InvalidInputError as exc:
        raise DatasetParseError(f"{path}: {exc}") from exc


def provenance_lines(command: str, config: dict) -> list[str]:
    return [f"ckfscreen {command}", "config " + json.dumps(config, sort_keys=True, default=str)]


def write_rows_csv(path, columns: Sequence[str], rows: Iterable[Sequence], provenance=()) -> None:
    with open(path, "w", newline="") as fh:
        for line in provenance:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_value(v) for v in row])


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
