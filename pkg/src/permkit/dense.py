"""Permanents of general dense matrices.

The main entry point is :func:`permanent`, a Gray-code ordered Ryser sum over
subsets of the first ``n - 1`` columns. The ``2**(n-1)`` terms are split into
contiguous rank ranges, one per worker, and the partial sums are combined
serially in worker order so the result does not depend on thread timing.
"""
from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import OrderTooLargeError
from .matrix import AccumulationMode, Matrix, as_matrix

__all__ = [
    "PartitionRange",
    "PermanentResult",
    "naive_permanent",
    "distribute",
    "gray_unrank",
    "next_gray",
    "subpermanent",
    "permanent",
    "permanents",
    "kahan_sum",
    "MAX_ORDER",
]

#: Largest order accepted by the rank-based algorithms (ranks are 64-bit words).
MAX_ORDER = 64
NAIVE_MAX_ORDER = 10


class PartitionRange(NamedTuple):
    """Contiguous block ``[start, start + length)`` of Gray-code ranks."""

    start: int
    length: int


@dataclass(frozen=True)
class PermanentResult:
    value: complex | float
    terms_evaluated: int
    mode: AccumulationMode
    algorithm: str
    wall_seconds: float

    @property
    def real(self) -> float:
        return float(np.real(self.value))

    @property
    def imag(self) -> float:
        return float(np.imag(self.value))


def _check_order(n, limit=MAX_ORDER):
    if n > limit:
        raise OrderTooLargeError(f"order {n} exceeds the supported maximum {limit}")


def _scalar(A: Matrix, re: float, im: float):
    return complex(re, im) if A.is_complex else float(re)


def naive_permanent(A) -> complex | float:
    """Permanent as the sum over all ``n!`` permutation products.

    Only meant as a reference for small matrices; orders above 10 are refused.
    """
    A = as_matrix(A)
    n = A.n
    _check_order(n, NAIVE_MAX_ORDER)
    a = A.values
    if n == 1:
        return _scalar(A, a[0, 0].real, a[0, 0].imag)
    re_parts, im_parts = [], []
    rows = np.arange(1, n)
    for first in range(n):
        rest = [c for c in range(n) if c != first]
        perms = np.array(list(itertools.permutations(rest)), dtype=np.intp)
        prods = a[0, first] * np.prod(a[rows, perms], axis=1)
        re_parts.append(np.real(prods))
        im_parts.append(np.imag(prods))
    re = math.fsum(np.concatenate(re_parts))
    im = math.fsum(np.concatenate(im_parts))
    return _scalar(A, re, im)


def distribute(total: int, m: int, i: int) -> PartitionRange:
    """Block ``i`` of ``m`` near-equal contiguous blocks covering ``range(total)``."""
    if total < 0 or m < 1:
        raise ValueError(f"need total >= 0 and m >= 1, got total={total}, m={m}")
    if not 0 <= i < m:
        raise IndexError(f"worker index {i} out of range for {m} workers")
    q, r = divmod(total, m)
    return PartitionRange(i * q + min(i, r), q + (1 if i < r else 0))


def gray_unrank(r: int) -> int:
    """The ``r``-th reflected binary Gray code, as an integer bitmask."""
    if r < 0:
        raise ValueError("rank must be non-negative")
    return r ^ (r >> 1)


def next_gray(t: int, x: int) -> tuple[int, int, int]:
    """Advance a Gray code by one step.

    ``t`` is the parity ``(-1)**rank`` of the current code ``x``. Returns the
    toggled parity, the 0-based position of the flipped bit and the new code.
    """
    t = -t
    j = 0
    if t == 1:
        while not (x >> j) & 1:
            j += 1
        j += 1
    return t, j, x ^ (1 << j)


def _resolve_workers(workers):
    if workers is None:
        return os.cpu_count() or 1
    workers = int(workers)
    if workers < 1:
        raise ValueError("workers must be at least 1")
    return workers


def _partial(a, rng: PartitionRange, mode: AccumulationMode, is_complex: bool):
    return _kernels.ryser_range(
        a, np.uint64(rng.start), np.uint64(rng.length), mode.code, is_complex
    )


def _collapse(part, mode):
    s_re, c_re, s_im, c_im = part
    if mode is AccumulationMode.PLAIN:
        return s_re, s_im
    return s_re + c_re, s_im + c_im


def subpermanent(A, m: int, k: int, mode="compensated") -> complex | float:
    """Partial Ryser sum of worker ``k`` out of ``m`` (before the final ``2*(-1)**n`` factor)."""
    A = as_matrix(A)
    _check_order(A.n)
    mode = AccumulationMode.coerce(mode)
    rng = distribute(1 << (A.n - 1), m, k)
    re, im = _collapse(_partial(A.values, rng, mode, A.is_complex), mode)
    return _scalar(A, re, im)


def _combine(parts, mode):
    """Ordered serial combination of per-worker partial sums."""
    if mode is AccumulationMode.PLAIN:
        re = 0.0
        im = 0.0
        for s_re, _, s_im, _ in parts:
            re += s_re
            im += s_im
        return re, im
    if mode is AccumulationMode.COMPENSATED:
        re = kahan_sum([p[0] + p[1] for p in parts])
        im = kahan_sum([p[2] + p[3] for p in parts])
        return re, im
    re = _dd_total([(p[0], p[1]) for p in parts])
    im = _dd_total([(p[2], p[3]) for p in parts])
    return re, im


def _dd_total(pairs):
    hi, lo = 0.0, 0.0
    for h, l in pairs:
        for v in (h, l):
            s = hi + v
            bb = s - hi
            e = (hi - (s - bb)) + (v - bb) + lo
            hi = s + e
            lo = e - (hi - s)
    return hi + lo


def permanent(A, workers: int | None = None, mode="compensated") -> PermanentResult:
    """Permanent of a square matrix of order at most 64.

    Parameters
    ----------
    A : Matrix or array_like
        Real or complex square matrix.
    workers : int, optional
        Number of rank partitions (and threads, capped at the CPU count).
        Defaults to the available hardware parallelism.
    mode : AccumulationMode or str
        ``"compensated"`` (default), ``"extended"`` or ``"plain"``.

    Returns
    -------
    PermanentResult
        ``value`` is a ``float`` for real matrices and ``complex`` otherwise.
    """
    A = as_matrix(A)
    n = A.n
    _check_order(n)
    mode = AccumulationMode.coerce(mode)
    m = _resolve_workers(workers)
    total = 1 << (n - 1)
    ranges = [distribute(total, m, k) for k in range(m)]

    t0 = time.perf_counter()
    a = A.values
    threads = min(m, os.cpu_count() or 1)
    if threads == 1:
        parts = [_partial(a, r, mode, A.is_complex) for r in ranges]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda r: _partial(a, r, mode, A.is_complex), ranges))
    re, im = _combine(parts, mode)
    sign = 2.0 if n % 2 == 0 else -2.0
    elapsed = time.perf_counter() - t0
    return PermanentResult(_scalar(A, sign * re, sign * im), total, mode, "ryser", elapsed)


def permanents(stack, mode="compensated") -> np.ndarray:
    """Permanents of a ``(count, n, n)`` stack, one serial Ryser sum per matrix.

    Returns a complex array for complex input and a float array otherwise.
    """
    stack = np.asarray(stack)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ValueError(f"expected a (count, n, n) stack, got shape {stack.shape}")
    n = stack.shape[1]
    if n < 1:
        raise ValueError("matrix order must be at least 1")
    _check_order(n)
    mode = AccumulationMode.coerce(mode)
    is_complex = np.iscomplexobj(stack)
    stack = np.ascontiguousarray(stack, dtype=np.complex128 if is_complex else np.float64)
    out = _kernels.ryser_batch(stack, mode.code, is_complex)
    return out if is_complex else out.real.copy()


def kahan_sum(terms: Sequence) -> complex | float:
    """Compensated sum of an ordered sequence, real and imaginary parts separately.

    Uses the Kahan-Babuska form of the compensation, which also recovers the
    small addend in cancellations like ``1e16 + 1 - 1e16``.
    """
    arr = np.asarray(terms)
    if arr.size == 0:
        return 0.0
    if np.iscomplexobj(arr):
        re = _kernels.neumaier_sum(np.ascontiguousarray(arr.real, dtype=np.float64).ravel())
        im = _kernels.neumaier_sum(np.ascontiguousarray(arr.imag, dtype=np.float64).ravel())
        return complex(re, im)
    return float(_kernels.neumaier_sum(np.ascontiguousarray(arr, dtype=np.float64).ravel()))
