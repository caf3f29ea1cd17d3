"""Tabular ingestion: CSV loading, label parsing, column statistics, synthetic data."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DataError,
    EmptyAfterFilter,
    EmptyDataset,
    InvalidLabel,
    IoError,
    MissingCell,
    MissingLabelColumn,
    NonNumericCell,
    UnknownColumn,
)
from .rng import SplitMix64

_TRUE = {"1", "true", "yes"}
_FALSE = {"0", "false", "no"}
_WORDS = {"true", "false", "yes", "no"}
_MISSING = {"", "na", "nan", "null"}


@dataclass(frozen=True)
class Dataset:
    values: np.ndarray  # (rows, cols) float64, rows = customers
    labels: np.ndarray  # (rows,) int64 in {0, 1}
    column_names: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if values.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {values.shape}")
        if labels.shape != (values.shape[0],):
            raise ValueError(f"labels shape {labels.shape} does not match {values.shape[0]} rows")
        if len(self.column_names) != values.shape[1]:
            raise ValueError("column_names length does not match column count")
        if not np.all((labels == 0) | (labels == 1)):
            raise ValueError("labels must be 0 or 1")
        if not np.all(np.isfinite(values)):
            raise ValueError("values contain NaN or infinite entries")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def row_count(self) -> int:
        return self.values.shape[0]

    @property
    def col_count(self) -> int:
        return self.values.shape[1]

    def subset(self, rows: Sequence[int]) -> "Dataset":
        idx = np.asarray(rows, dtype=np.int64)
        return Dataset(self.values[idx], self.labels[idx], self.column_names)


@dataclass(frozen=True)
class ColumnStats:
    min: np.ndarray
    max: np.ndarray
    mean: np.ndarray
    global_min: float
    global_max: float


def parse_label(text: str, row: int) -> int:
    """Map boolean-like label text to 0/1.

    Accepts 0/1 (also as floats such as "1.0"), true/false and yes/no in any
    case, each optionally followed by one trailing period ("True.").
    """
    token = text.strip().lower()
    if token.endswith(".") and token[:-1] in _WORDS:
        token = token[:-1]
    if token in _TRUE:
        return 1
    if token in _FALSE:
        return 0
    try:
        number = float(token)
    except ValueError:
        raise InvalidLabel(row, text) from None
    if number in (0.0, 1.0):
        return int(number)
    raise InvalidLabel(row, text)


def _parse_number(text: str) -> float | None:
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _find_column(header: list[str], name: str) -> int | None:
    if name in header:
        return header.index(name)
    lowered = [h.strip().lower() for h in header]
    key = name.strip().lower()
    return lowered.index(key) if key in lowered else None


def load_csv(
    path: str | Path,
    label_column: str = "churn",
    drop_columns: Iterable[str] = (),
    impute_mean: bool = False,
) -> Dataset:
    """Load a headed CSV, keeping only numeric attribute columns.

    A column counts as numeric when its first non-missing cell parses as a
    finite number; any later unparseable cell in such a column raises
    :class:`NonNumericCell`.  Other columns are skipped.  Missing cells raise
    :class:`MissingCell` unless ``impute_mean`` is set, in which case they
    take the column mean.  Row numbers in errors are 1-based data rows.
    """
    try:
        with open(path, newline="", encoding="utf-8-sig") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise EmptyDataset(f"{path} has no header")
    header, body = [h.strip() for h in rows[0]], rows[1:]

    label_idx = _find_column(header, label_column)
    if label_idx is None:
        raise MissingLabelColumn(f"label column {label_column!r} not in header {header}")
    dropped = {label_idx}
    for name in drop_columns:
        idx = _find_column(header, name)
        if idx is None:
            raise UnknownColumn(f"drop column {name!r} not in header")
        dropped.add(idx)
    if not body:
        raise EmptyDataset(f"{path} has a header but no data rows")

    width = len(header)
    for i, r in enumerate(body, start=1):
        if len(r) != width:
            raise DataError(f"row {i} has {len(r)} fields, header has {width}")

    keep = []
    for j in range(width):
        if j in dropped:
            continue
        first = next((r[j].strip() for r in body if r[j].strip().lower() not in _MISSING), None)
        if first is not None and _parse_number(first) is not None:
            keep.append(j)
    if not keep:
        raise EmptyAfterFilter(f"no numeric columns remain in {path}")

    values = np.empty((len(body), len(keep)))
    missing = np.zeros(values.shape, dtype=bool)
    for i, r in enumerate(body):
        for k, j in enumerate(keep):
            cell = r[j].strip()
            if cell.lower() in _MISSING:
                if not impute_mean:
                    raise MissingCell(i + 1, header[j])
                missing[i, k] = True
                values[i, k] = 0.0
                continue
            number = _parse_number(cell)
            if number is None:
                raise NonNumericCell(i + 1, header[j], cell)
            values[i, k] = number
    if missing.any():
        for k in np.flatnonzero(missing.any(axis=0)):
            present = ~missing[:, k]
            if not present.any():
                raise MissingCell(1, header[keep[k]])
            values[missing[:, k], k] = values[present, k].mean()

    labels = np.array([parse_label(r[label_idx], i) for i, r in enumerate(body, start=1)])
    return Dataset(values, labels, tuple(header[j] for j in keep))


def write_csv(d: Dataset, path: str | Path, label_column: str = "churn") -> None:
    """Write values with ``repr`` precision so a reload is exact."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([*d.column_names, label_column])
            for row, label in zip(d.values.tolist(), d.labels.tolist()):
                w.writerow([*(repr(v) for v in row), label])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_values_csv(values: np.ndarray, column_names: Sequence[str], path: str | Path) -> None:
    """Unlabelled variant of :func:`write_csv` for reconstructed matrices."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(column_names)
            w.writerows([repr(v) for v in row] for row in np.asarray(values).tolist())
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def compute_stats(d: Dataset) -> ColumnStats:
    if d.row_count == 0 or d.col_count == 0:
        raise EmptyDataset("cannot compute statistics of an empty dataset")
    lo = d.values.min(axis=0)
    hi = d.values.max(axis=0)
    # summation rounding can push a constant column's mean off by an ulp
    mean = np.clip(d.values.mean(axis=0), lo, hi)
    return ColumnStats(lo, hi, mean, float(lo.min()), float(hi.max()))


def synth_churn(rows: int, cols: int, seed: int, separation: float) -> Dataset:
    """Two unit-variance Gaussian clusters, class 1 shifted by ``separation``
    in every coordinate.  Labels alternate 0, 1, 0, ... so classes are balanced.
    """
    if rows < 2 or cols < 1:
        raise ValueError("synth_churn needs rows >= 2 and cols >= 1")
    if separation < 0:
        raise ValueError("separation must be >= 0")
    gen = SplitMix64.for_stream(seed, "synth")
    labels = np.arange(rows) % 2
    values = gen.normal(rows * cols).reshape(rows, cols) + separation * labels[:, None]
    names = tuple(f"x{j}" for j in range(cols))
    return Dataset(values, labels, names)
