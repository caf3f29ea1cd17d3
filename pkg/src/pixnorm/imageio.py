"""Binary PGM (P5) encode/decode and surface-grid export."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadMagic, IoError, TruncatedPixelData, UnsupportedMaxval


@dataclass(frozen=True)
class GrayImage:
    """8-bit grayscale image; ``height`` rows (customers) by ``width`` columns (attributes)."""

    width: int
    height: int
    pixels: np.ndarray  # flat, row-major, uint8

    def __post_init__(self):
        pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8).reshape(-1)
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")
        if pixels.size != self.width * self.height:
            raise ValueError(f"pixel buffer has {pixels.size} values, expected {self.width * self.height}")
        object.__setattr__(self, "pixels", pixels)

    @classmethod
    def from_array(cls, array: np.ndarray) -> "GrayImage":
        array = np.asarray(array)
        return cls(array.shape[1], array.shape[0], array.reshape(-1))

    def as_array(self) -> np.ndarray:
        return self.pixels.reshape(self.height, self.width)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and np.array_equal(
            self.pixels, other.pixels
        )


def encode_pgm(img: GrayImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def write_pgm(img: GrayImage, path: str | Path) -> None:
    try:
        Path(path).write_bytes(encode_pgm(img))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Pull ``count`` whitespace-separated header tokens, skipping # comments.

    Returns the tokens and the offset just past the single whitespace byte
    that terminates the last one.
    """
    tokens: list[bytes] = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise TruncatedPixelData("header ended early")
        if data[pos : pos + 1] == b"#":
            end = data.find(b"\n", pos)
            pos = n if end < 0 else end + 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    if pos >= n or not data[pos : pos + 1].isspace():
        raise TruncatedPixelData("missing whitespace after maxval")
    return tokens, pos + 1


def decode_pgm(data: bytes) -> GrayImage:
    if data[:2] != b"P5":
        raise BadMagic(f"expected P5 magic, got {data[:2]!r}")
    tokens, offset = _header_tokens(data[2:], 3)
    offset += 2
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise BadMagic(f"malformed header tokens {tokens}") from None
    if maxval != 255:
        raise UnsupportedMaxval(f"only maxval 255 is supported, got {maxval}")
    size = width * height
    body = data[offset : offset + size]
    if len(body) < size:
        raise TruncatedPixelData(f"expected {size} pixel bytes, found {len(body)}")
    return GrayImage(width, height, np.frombuffer(body, dtype=np.uint8).copy())


def read_pgm(path: str | Path) -> GrayImage:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return decode_pgm(data)


@dataclass(frozen=True)
class SurfaceGrid:
    z: np.ndarray  # (rows, cols) intensities
    x: np.ndarray  # column indices
    y: np.ndarray  # row indices

    def triples(self):
        """(x, y, z) per cell, row-major."""
        for i in range(self.z.shape[0]):
            for j in range(self.z.shape[1]):
                yield int(self.x[j]), int(self.y[i]), self.z[i, j].item()


def surface_grid(source) -> SurfaceGrid:
    """Intensity surface of a GrayImage or NormMatrix, no resampling."""
    if isinstance(source, GrayImage):
        z = source.as_array().copy()
    else:
        z = np.array(source.values, copy=True)
    if z.size == 0:
        raise ValueError("surface_grid needs a non-empty input")
    return SurfaceGrid(z, np.arange(z.shape[1]), np.arange(z.shape[0]))


def write_surface_csv(grid: SurfaceGrid, path: str | Path) -> None:
    lines = ["x,y,z"]
    lines.extend(f"{x},{y},{z!r}" for x, y, z in grid.triples())
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_surface_matrix(grid: SurfaceGrid, path: str | Path) -> None:
    """gnuplot ``matrix`` layout: one line per row, space-separated z values."""
    rows = (" ".join(repr(v) for v in row) for row in grid.z.tolist())
    try:
        Path(path).write_text("\n".join(rows) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
