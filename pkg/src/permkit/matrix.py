"""Square matrix container, accumulation modes and the plain-text matrix format.

The file format is whitespace separated::

    # optional comment lines
    real 2 2
    1 2
    3 4

For ``complex`` matrices each row holds ``2 * cols`` numbers, read as
consecutive ``re im`` pairs.
"""
from __future__ import annotations

import enum
import os

import numpy as np

from .errors import DimensionError, MatrixFormatError

__all__ = ["AccumulationMode", "Matrix", "as_matrix", "all_ones", "read_matrix", "write_matrix"]


class AccumulationMode(str, enum.Enum):
    """How the long signed sums of the permanent algorithms are accumulated.

    ``plain`` is ordinary double precision, ``compensated`` carries a running
    error term next to the sum, and ``extended`` keeps the accumulator as an
    unevaluated double-double pair. Products are always formed in double.
    """

    PLAIN = "plain"
    COMPENSATED = "compensated"
    EXTENDED = "extended"

    @classmethod
    def coerce(cls, mode) -> "AccumulationMode":
        if isinstance(mode, cls):
            return mode
        try:
            return cls(str(mode).lower())
        except ValueError:
            raise ValueError(
                f"unknown accumulation mode {mode!r}; expected one of "
                f"{[m.value for m in cls]}"
            ) from None

    @property
    def code(self) -> int:
        # integer tag understood by the compiled kernels
        return {"plain": 0, "compensated": 1, "extended": 2}[self.value]


class Matrix:
    """Immutable square matrix of finite real or complex doubles.

    Real matrices are kept as ``float64`` and complex ones as ``complex128``;
    every algorithm in the package accepts both through the same entry point.

    Parameters
    ----------
    values : array_like
        Square 2-D array of numbers.
    kind : {"real", "complex"}, optional
        Force the storage kind. Inferred from ``values`` when omitted.
    """

    __slots__ = ("_values", "_kind")

    def __init__(self, values, kind=None):
        arr = np.array(values)
        if kind is None:
            kind = "complex" if np.iscomplexobj(arr) else "real"
        if kind not in ("real", "complex"):
            raise ValueError(f"kind must be 'real' or 'complex', got {kind!r}")
        if kind == "real" and np.iscomplexobj(arr):
            if np.any(arr.imag != 0):
                raise ValueError("complex entries in a matrix declared real")
            arr = arr.real
        arr = np.ascontiguousarray(arr, dtype=np.float64 if kind == "real" else np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise DimensionError("matrix order must be at least 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("matrix contains NaN or infinite entries")
        arr.setflags(write=False)
        self._values = arr
        self._kind = kind

    @property
    def values(self) -> np.ndarray:
        """Read-only ``(n, n)`` ndarray holding the entries."""
        return self._values

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def n(self) -> int:
        return self._values.shape[0]

    @property
    def is_complex(self) -> bool:
        return self._kind == "complex"

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._values
        return self._values.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._kind == other._kind and np.array_equal(self._values, other._values)

    def __repr__(self):
        return f"Matrix(kind={self._kind!r}, n={self.n})"


def as_matrix(A) -> Matrix:
    """Return ``A`` unchanged if it is a :class:`Matrix`, else wrap it."""
    if isinstance(A, Matrix):
        return A
    return Matrix(A)


def all_ones(n: int) -> Matrix:
    """The all-ones matrix of order ``n`` (its permanent is ``n!``)."""
    if n < 1:
        raise ValueError(f"order must be at least 1, got {n}")
    return Matrix(np.ones((n, n)))


def _data_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def parse_matrix(text: str) -> Matrix:
    """Parse the text matrix format (see module docstring)."""
    lines = list(_data_lines(text))
    if not lines:
        raise MatrixFormatError("empty matrix file")
    lineno, header = lines[0]
    if len(header) != 3 or header[0] not in ("real", "complex"):
        raise MatrixFormatError(f"line {lineno}: expected '<real|complex> <rows> <cols>'")
    kind = header[0]
    try:
        rows, cols = int(header[1]), int(header[2])
    except ValueError:
        raise MatrixFormatError(f"line {lineno}: rows and cols must be integers") from None
    if rows < 1 or cols < 1:
        raise MatrixFormatError(f"line {lineno}: dimensions must be positive")
    if rows != cols:
        raise DimensionError(f"matrix must be square, header declares {rows}x{cols}")

    body = lines[1:]
    if len(body) != rows:
        raise MatrixFormatError(f"expected {rows} data rows, found {len(body)}")
    width = cols if kind == "real" else 2 * cols
    data = np.empty((rows, width), dtype=np.float64)
    for r, (lineno, fields) in enumerate(body):
        if len(fields) != width:
            raise MatrixFormatError(f"line {lineno}: expected {width} numbers, found {len(fields)}")
        try:
            data[r] = [float(f) for f in fields]
        except ValueError:
            raise MatrixFormatError(f"line {lineno}: malformed number") from None
    if not np.all(np.isfinite(data)):
        raise MatrixFormatError("matrix contains NaN or infinite entries")
    if kind == "complex":
        return Matrix(data[:, 0::2] + 1j * data[:, 1::2], kind="complex")
    return Matrix(data, kind="real")


def read_matrix(path) -> Matrix:
    """Read a matrix file."""
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def format_matrix(A) -> str:
    A = as_matrix(A)
    out = [f"{A.kind} {A.n} {A.n}"]
    for row in A.values:
        if A.is_complex:
            fields = []
            for z in row:
                fields += [repr(float(z.real)), repr(float(z.imag))]
        else:
            fields = [repr(float(v)) for v in row]
        out.append(" ".join(fields))
    return "\n".join(out) + "\n"


def write_matrix(A, path: str | os.PathLike) -> None:
    """Write ``A`` so that :func:`read_matrix` reproduces it bit for bit."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(A))
