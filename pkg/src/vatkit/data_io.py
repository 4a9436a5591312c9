"""Embedding/label file IO and synthetic Gaussian-mixture data.

Two matrix formats are supported:

``csv``
    comma-separated floats, one object per row. A first row containing any
    non-numeric token is treated as a header and skipped.
``dvm``
    little-endian binary: the 8-byte magic ``b"DVMATRX1"``, row and column
    counts as uint64, then row-major float64 values.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ParseError, VatkitError
from .rng import SplitMix64

DVM_MAGIC = b"DVMATRX1"
_HEADER = struct.Struct("<8sQQ")


@dataclass(frozen=True)
class EmbeddingSet:
    data: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise VatkitError(f"embedding matrix must be N x p with N, p >= 1, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            r, c = np.argwhere(~np.isfinite(data))[0]
            raise VatkitError(f"non-finite entry at row {r}, column {c}")
        object.__setattr__(self, "data", data)
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (data.shape[0],):
                raise VatkitError(f"{labels.shape[0] if labels.ndim else 0} labels for {data.shape[0]} objects")
            object.__setattr__(self, "labels", relabel(labels))

    @property
    def n_objects(self) -> int:
        return self.data.shape[0]

    @property
    def dims(self) -> int:
        return self.data.shape[1]

    def subset(self, indices) -> "EmbeddingSet":
        indices = np.asarray(indices, dtype=np.int64)
        labels = None if self.labels is None else self.labels[indices]
        return EmbeddingSet(self.data[indices], labels)


def relabel(labels) -> np.ndarray:
    """Map arbitrary integer labels onto 0..k-1, preserving equality and order."""
    labels = np.asarray(labels)
    if labels.size and not np.issubdtype(labels.dtype, np.integer):
        raise VatkitError("labels must be integers")
    _, inverse = np.unique(labels, return_inverse=True)
    return inverse.astype(np.int64).reshape(labels.shape)


def _infer_format(path: Path, fmt: Optional[str]) -> str:
    if fmt:
        fmt = fmt.lower()
        if fmt not in ("csv", "dvm"):
            raise VatkitError(f"unknown matrix format '{fmt}'")
        return fmt
    return "dvm" if path.suffix.lower() == ".dvm" else "csv"


def _is_float(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return "_" not in token


def parse_csv(text: str, path=None) -> np.ndarray:
    lines = text.splitlines()
    rows = []
    width = None
    header_checked = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = [t.strip() for t in line.split(",")]
        if not header_checked:
            header_checked = True
            if any(not _is_float(t) for t in tokens):
                continue
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise ParseError(f"expected {width} values, found {len(tokens)}", path, lineno)
        row = []
        for col, tok in enumerate(tokens, start=1):
            if not _is_float(tok):
                raise ParseError(f"non-numeric token {tok!r}", path, lineno, col)
            value = float(tok)
            if not math.isfinite(value):
                raise ParseError(f"non-finite value {tok!r}", path, lineno, col)
            row.append(value)
        rows.append(row)
    if not rows:
        raise ParseError("no data rows", path)
    return np.array(rows, dtype=np.float64)


def read_dvm(path) -> np.ndarray:
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise ParseError("file too short for dvm header", path)
    magic, rows, cols = _HEADER.unpack_from(blob)
    if magic != DVM_MAGIC:
        raise ParseError(f"bad magic {magic!r}", path)
    expected = _HEADER.size + 8 * rows * cols
    if len(blob) != expected:
        raise ParseError(f"expected {expected} bytes for {rows}x{cols}, found {len(blob)}", path)
    values = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).astype(np.float64)
    return values.reshape(rows, cols)


def write_dvm(path, matrix) -> None:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise VatkitError("dvm stores 2-D matrices only")
    rows, cols = matrix.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(DVM_MAGIC, rows, cols))
        fh.write(np.ascontiguousarray(matrix, dtype="<f8").tobytes())


def write_csv(path, matrix) -> None:
    matrix = np.asarray(matrix, dtype=np.float64)
    with open(path, "w", newline="\n") as fh:
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def load_embeddings(path, format: Optional[str] = None, labels_path=None) -> EmbeddingSet:
    path = Path(path)
    fmt = _infer_format(path, format)
    if fmt == "dvm":
        data = read_dvm(path)
        if data.size == 0:
            raise ParseError("empty matrix", path)
        bad = np.argwhere(~np.isfinite(data))
        if len(bad):
            r, c = bad[0]
            raise ParseError("non-finite value", path, int(r) + 1, int(c) + 1)
    else:
        data = parse_csv(path.read_text(encoding="utf-8"), path)
    labels = load_labels(labels_path) if labels_path is not None else None
    return EmbeddingSet(data, labels)


def save_embeddings(path, data, format: Optional[str] = None) -> None:
    if isinstance(data, EmbeddingSet):
        data = data.data
    path = Path(path)
    if _infer_format(path, format) == "dvm":
        write_dvm(path, data)
    else:
        write_csv(path, data)


def parse_label_tokens(text: str, path=None) -> np.ndarray:
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        token = raw.strip()
        if not token:
            continue
        try:
            values.append(int(token))
        except ValueError:
            raise ParseError(f"non-integer label {token!r}", path, lineno) from None
    if not values:
        raise ParseError("no labels", path)
    return np.array(values, dtype=np.int64)


def load_labels(path) -> np.ndarray:
    path = Path(path)
    return relabel(parse_label_tokens(path.read_text(encoding="utf-8"), path))


def load_indices(path) -> np.ndarray:
    """Read an index list (label-file layout) without relabeling."""
    path = Path(path)
    return parse_label_tokens(path.read_text(encoding="utf-8"), path)


def save_labels(path, labels) -> None:
    with open(path, "w", newline="\n") as fh:
        for v in np.asarray(labels, dtype=np.int64):
            fh.write(f"{int(v)}\n")


@dataclass(frozen=True)
class MixtureSpec:
    k: int
    dims: int
    n_per: int
    separation: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.dims < 1 or self.n_per < 1:
            raise VatkitError("mixture needs k, dims, n_per >= 1")
        if not self.separation > 0:
            raise VatkitError("separation must be positive")


def mixture_centers(spec: MixtureSpec) -> np.ndarray:
    # center c sits on axis (c mod dims), pushed out one more step per wrap
    centers = np.zeros((spec.k, spec.dims))
    for c in range(spec.k):
        centers[c, c % spec.dims] = spec.separation * (1 + c // spec.dims)
    return centers


def generate_gaussian_mixture(spec: MixtureSpec) -> EmbeddingSet:
    """Unit-variance isotropic Gaussian blobs, ``n_per`` rows per component.

    Rows are grouped by component; noise is drawn row-major from one
    :class:`~vatkit.rng.SplitMix64` stream seeded with ``spec.seed``.
    """
    labels = np.repeat(np.arange(spec.k, dtype=np.int64), spec.n_per)
    noise = SplitMix64(spec.seed).normal(labels.size * spec.dims).reshape(labels.size, spec.dims)
    return EmbeddingSet(mixture_centers(spec)[labels] + noise, labels)
