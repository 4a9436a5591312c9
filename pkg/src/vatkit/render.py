"""Grayscale rendering of reordered dissimilarity matrices as binary PGM (P5)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ParseError, VatkitError


def intensities(values) -> np.ndarray:
    """Min-max scale to 0..255, half-up rounding; a constant matrix is all black."""
    v = np.asarray(values, dtype=np.float64)
    lo, hi = float(v.min()), float(v.max())
    if hi <= lo:
        return np.zeros(v.shape, dtype=np.uint8)
    return np.floor(255.0 * (v - lo) / (hi - lo) + 0.5).astype(np.uint8)


def encode_pgm(pixels: np.ndarray) -> bytes:
    h, w = pixels.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(pixels, dtype=np.uint8).tobytes()


def render_rdi(M, path, scale_factor: int = 1) -> np.ndarray:
    """Write the matrix as a P5 image; returns the (scaled) pixel grid.

    ``M`` may be a ReorderedMatrix or a plain square array. Each entry becomes
    a ``scale_factor`` x ``scale_factor`` block of pixels.
    """
    values = getattr(M, "values", M)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] < 1 or values.shape[0] != values.shape[1]:
        raise VatkitError(f"expected a non-empty square matrix, got shape {values.shape}")
    scale_factor = int(scale_factor)
    if scale_factor < 1:
        raise VatkitError("scale_factor must be >= 1")
    pixels = intensities(values)
    if scale_factor > 1:
        pixels = np.repeat(np.repeat(pixels, scale_factor, axis=0), scale_factor, axis=1)
    try:
        Path(path).write_bytes(encode_pgm(pixels))
    except OSError as exc:
        raise VatkitError(f"cannot write image {path}: {exc}") from exc
    return pixels


def read_pgm(path) -> np.ndarray:
    blob = Path(path).read_bytes()
    fields = []
    pos = 0
    while len(fields) < 4:
        while pos < len(blob) and blob[pos:pos + 1].isspace():
            pos += 1
        if blob[pos:pos + 1] == b"#":
            while pos < len(blob) and blob[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParseError("truncated PGM header", path)
        fields.append(blob[start:pos])
    if fields[0] != b"P5":
        raise ParseError(f"not a binary graymap (magic {fields[0]!r})", path)
    w, h, maxval = (int(f) for f in fields[1:])
    if maxval != 255:
        raise ParseError(f"unsupported maxval {maxval}", path)
    raster = blob[pos + 1:]
    if len(raster) != w * h:
        raise ParseError(f"raster has {len(raster)} bytes, expected {w * h}", path)
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w)
