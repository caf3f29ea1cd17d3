"""Invertible min-max pixel normalization.

A value ``x`` in ``[x_min, x_max]`` maps onto ``[a, b]`` by

    x' = a + (x - x_min) * (b - a) / (x_max - x_min)

and back by the inverse affine map.  With the default ``[0, 255]`` target the
normalized matrix can be quantized to 8-bit pixels.  The continuous matrix is
lossless given the sidecar constants; the quantized image loses at most half
a quantization step, ``(x_max - x_min) / 510`` per entry.

Degenerate spans (``x_max == x_min``) map to ``a`` and decode to ``x_min``;
the affected columns are listed in ``NormParams.degenerate_columns``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .errors import EmptyDataset, IntervalMismatch, IoError, ShapeMismatch
from .imageio import GrayImage


class Mode(str, Enum):
    GLOBAL = "global"
    PER_COLUMN = "per-column"


@dataclass(frozen=True)
class NormParams:
    x_min: float
    x_max: float
    a: float = 0.0
    b: float = 255.0
    mode: Mode = Mode.GLOBAL
    per_column_bounds: tuple[tuple[float, float], ...] | None = None
    rows: int = 0
    cols: int = 0
    degenerate_columns: tuple[int, ...] = ()
    column_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not self.x_min <= self.x_max:
            raise ValueError(f"x_min {self.x_min} > x_max {self.x_max}")
        if not self.a < self.b:
            raise ValueError(f"target interval requires a < b, got [{self.a}, {self.b}]")
        if self.mode is Mode.GLOBAL and self.per_column_bounds is not None:
            raise ValueError("global mode takes no per-column bounds")
        if self.mode is Mode.PER_COLUMN:
            bounds = self.per_column_bounds
            if bounds is None or len(bounds) != self.cols:
                raise ValueError("per-column mode needs one (min, max) pair per column")
            if any(not lo <= hi for lo, hi in bounds):
                raise ValueError("per-column bounds must satisfy min <= max")
            object.__setattr__(self, "per_column_bounds", tuple((float(lo), float(hi)) for lo, hi in bounds))

    def bounds(self) -> tuple[np.ndarray | float, np.ndarray | float]:
        """Lower and upper bounds, broadcastable against a (rows, cols) matrix."""
        if self.mode is Mode.GLOBAL:
            return self.x_min, self.x_max
        arr = np.asarray(self.per_column_bounds, dtype=np.float64)
        return arr[:, 0], arr[:, 1]

    def to_dict(self) -> dict:
        return {
            "x_min": self.x_min,
            "x_max": self.x_max,
            "a": self.a,
            "b": self.b,
            "mode": self.mode.value,
            "per_column_bounds": None if self.per_column_bounds is None else [list(p) for p in self.per_column_bounds],
            "rows": self.rows,
            "cols": self.cols,
            "degenerate_columns": list(self.degenerate_columns),
            "orientation": "rows=customers,cols=attributes",
            "column_names": list(self.column_names),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NormParams":
        bounds = data.get("per_column_bounds")
        return cls(
            x_min=float(data["x_min"]),
            x_max=float(data["x_max"]),
            a=float(data.get("a", 0.0)),
            b=float(data.get("b", 255.0)),
            mode=Mode(data.get("mode", "global")),
            per_column_bounds=None if bounds is None else tuple(tuple(p) for p in bounds),
            rows=int(data.get("rows", 0)),
            cols=int(data.get("cols", 0)),
            degenerate_columns=tuple(data.get("degenerate_columns", ())),
            column_names=tuple(data.get("column_names", ())),
        )


@dataclass(frozen=True)
class NormMatrix:
    values: np.ndarray
    params: NormParams

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def fit_params(values: np.ndarray, mode: Mode | str = Mode.GLOBAL, a: float = 0.0, b: float = 255.0,
               column_names=()) -> NormParams:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.size == 0:
        raise EmptyDataset("cannot normalize an empty matrix")
    mode = Mode(mode)
    rows, cols = values.shape
    col_lo, col_hi = values.min(axis=0), values.max(axis=0)
    x_min, x_max = float(col_lo.min()), float(col_hi.max())
    if mode is Mode.GLOBAL:
        degenerate = tuple(range(cols)) if x_min == x_max else ()
        bounds = None
    else:
        degenerate = tuple(int(j) for j in np.flatnonzero(col_lo == col_hi))
        bounds = tuple(zip(col_lo.tolist(), col_hi.tolist()))
    return NormParams(x_min, x_max, float(a), float(b), mode, bounds, rows, cols, degenerate,
                      tuple(column_names))


def apply_params(values: np.ndarray, params: NormParams, out: np.ndarray | None = None) -> np.ndarray:
    """Elementwise forward map; each entry depends only on itself and its
    column bounds, so any row partition of the work gives identical bits."""
    values = np.asarray(values, dtype=np.float64)
    if out is None:
        out = np.empty_like(values)
    lo, hi = params.bounds()
    span = np.subtract(hi, lo)
    degenerate = span == 0
    safe_span = np.where(degenerate, 1.0, span)
    np.subtract(values, lo, out=out)
    np.divide(out, safe_span, out=out)
    if np.ndim(degenerate) == 0:
        if degenerate:
            out[...] = 0.0
    elif degenerate.any():
        out[:, degenerate] = 0.0
    np.multiply(out, params.b - params.a, out=out)
    np.add(out, params.a, out=out)
    return out


def normalize(d: Dataset | np.ndarray, mode: Mode | str = Mode.GLOBAL, a: float = 0.0,
              b: float = 255.0) -> NormMatrix:
    if isinstance(d, Dataset):
        values, names = d.values, d.column_names
    else:
        values, names = np.asarray(d, dtype=np.float64), ()
    params = fit_params(values, mode, a, b, names)
    return NormMatrix(apply_params(values, params), params)


def _invert(scaled: np.ndarray, params: NormParams) -> np.ndarray:
    lo, hi = params.bounds()
    t = (np.asarray(scaled, dtype=np.float64) - params.a) / (params.b - params.a)
    # two-sided lerp hits both endpoints exactly
    x = (1.0 - t) * lo + t * hi
    if params.degenerate_columns:
        cols = list(params.degenerate_columns)
        x[:, cols] = np.broadcast_to(lo, x.shape)[:, cols]
    return x


def denormalize(n: NormMatrix) -> np.ndarray:
    return _invert(n.values, n.params)


def quantize(n: NormMatrix) -> GrayImage:
    """Round half away from zero, clamp to [0, 255], store as uint8."""
    if (n.params.a, n.params.b) != (0.0, 255.0):
        raise IntervalMismatch(f"quantization needs a=0, b=255, got a={n.params.a}, b={n.params.b}")
    v = n.values
    whole = np.trunc(v)
    frac = v - whole  # exact for doubles
    rounded = whole + np.sign(v) * (np.abs(frac) >= 0.5)
    pixels = np.clip(rounded, 0, 255).astype(np.uint8)
    return GrayImage.from_array(pixels)


def dequantize(img: GrayImage, params: NormParams) -> np.ndarray:
    if (params.a, params.b) != (0.0, 255.0):
        raise IntervalMismatch(f"dequantization needs a=0, b=255, got a={params.a}, b={params.b}")
    if params.cols and img.width != params.cols:
        raise ShapeMismatch(f"image width {img.width} does not match {params.cols} columns")
    return _invert(img.as_array().astype(np.float64), params)


def write_sidecar(params: NormParams, path: str | Path) -> None:
    try:
        Path(path).write_text(json.dumps(params.to_dict(), indent=2) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_sidecar(path: str | Path) -> NormParams:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return NormParams.from_dict(data)
