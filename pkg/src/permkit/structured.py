"""Permanent algorithms that exploit matrix structure.

* repeated columns: Ryser's sum over column multiplicity vectors with
  binomial weights, ``prod(m_j + 1)`` terms instead of ``2**n``;
* sparse matrices: Ryser's sum restricted to column sets that meet a greedy
  family of disjoint row supports (every set giving a non-zero product does);
* band matrices: a transfer polynomial in multilinear formal variables,
  linear in ``n`` for a fixed bandwidth.

:func:`compute_permanent` dispatches between these and the dense algorithm.
"""
from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import _kernels
from .dense import (
    MAX_ORDER,
    PermanentResult,
    _check_order,
    _combine,
    _resolve_workers,
    _scalar,
    distribute,
    naive_permanent,
    permanent,
)
from .errors import BandwidthError, InvalidPartitionError, PermkitError
from .matrix import AccumulationMode, Matrix, as_matrix
from .rng import RngStream, as_generator

__all__ = [
    "ColumnMultiplicity",
    "GreedyPartition",
    "BandPoly",
    "ZeroLineError",
    "column_multiplicities",
    "repeated_columns_permanent",
    "greedy_partition",
    "sparse_permanent",
    "has_zero_line",
    "enumerated_column_sets",
    "band_width",
    "band_steps",
    "band_permanent",
    "select_algorithm",
    "compute_permanent",
    "ALGORITHMS",
]

ALGORITHMS = ("auto", "ryser", "repeated", "sparse", "band", "naive")


class ZeroLineError(PermkitError, ValueError):
    """The matrix has an all-zero row or column, so its permanent is 0."""


def _run_blocks(fn, blocks, workers):
    threads = min(len(blocks), os.cpu_count() or 1, workers)
    if threads <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, blocks))


def _finish(is_complex, parts, mode, n, terms, algorithm, t0):
    re, im = _combine(parts, mode)
    sign = -1.0 if n % 2 else 1.0
    value = complex(sign * re, sign * im) if is_complex else sign * re
    return PermanentResult(value, terms, mode, algorithm, time.perf_counter() - t0)


# -- repeated columns ---------------------------------------------------------


@dataclass(frozen=True)
class ColumnMultiplicity:
    """Distinct columns (as the columns of an ``(n, R)`` array) and their counts."""

    distinct_columns: np.ndarray
    counts: tuple

    @property
    def n(self) -> int:
        return self.distinct_columns.shape[0]

    @property
    def R(self) -> int:
        return len(self.counts)

    @property
    def term_count(self) -> int:
        return math.prod(m + 1 for m in self.counts)


def column_multiplicities(A) -> ColumnMultiplicity:
    """Group exactly equal columns, in order of first appearance."""
    A = as_matrix(A)
    a = A.values
    index = {}
    order = []
    counts = []
    for j in range(A.n):
        key = a[:, j].tobytes()
        if key not in index:
            index[key] = len(order)
            order.append(j)
            counts.append(0)
        counts[index[key]] += 1
    cols = np.ascontiguousarray(a[:, order])
    cols.setflags(write=False)
    return ColumnMultiplicity(cols, tuple(counts))


def repeated_columns_permanent(cm, mode="compensated", workers: int | None = 1) -> PermanentResult:
    """Permanent from column multiplicities (accepts a matrix as well).

    The sum runs over all vectors ``0 <= f_j <= m_j`` with weight
    ``prod(binom(m_j, f_j))``; its term count is ``prod(m_j + 1)``.
    """
    if not isinstance(cm, ColumnMultiplicity):
        cm = column_multiplicities(cm)
    n = cm.n
    _check_order(n)
    if sum(cm.counts) != n:
        raise ValueError("column counts do not add up to the matrix order")
    mode = AccumulationMode.coerce(mode)
    workers = _resolve_workers(workers)
    t0 = time.perf_counter()

    # largest multiplicity first: it is split across workers and moves fastest
    order = sorted(range(cm.R), key=lambda j: -cm.counts[j])
    cols = np.ascontiguousarray(cm.distinct_columns[:, order])
    mult = np.array([cm.counts[j] for j in order], dtype=np.int64)
    binom = np.zeros((cm.R, int(mult.max()) + 1))
    for r, m in enumerate(mult):
        for f in range(m + 1):
            binom[r, f] = float(math.comb(int(m), f))
    is_complex = np.iscomplexobj(cols)
    # centre every row sum: the full signed sum is unchanged by a constant
    # shift and the centred terms are far smaller, so less cancellation
    shift = -0.5 * (cols @ mult.astype(np.float64))

    total0 = int(mult[0]) + 1
    blocks = [distribute(total0, workers, k) for k in range(min(workers, total0))]

    def run(b):
        return _kernels.repeated_block(
            cols, shift, mult, binom, b.start, b.start + b.length - 1, mode.code, is_complex
        )

    parts = _run_blocks(run, blocks, workers)
    return _finish(is_complex, parts, mode, n, cm.term_count, "repeated", t0)


# -- sparse -------------------------------------------------------------------


@dataclass(frozen=True)
class GreedyPartition:
    """Disjoint row supports ``restricting_sets`` plus the leftover columns ``remainder``."""

    restricting_sets: tuple
    remainder: tuple

    @property
    def enumeration_count(self) -> int:
        """Number of column sets the sparse sum visits."""
        return (1 << len(self.remainder)) * math.prod(
            (1 << len(s)) - 1 for s in self.restricting_sets
        )


def enumerated_column_sets(partition: GreedyPartition) -> Iterator[int]:
    """Column sets visited by the sparse sum, as bitmasks (bit ``j`` is column ``j``).

    Every set has a non-empty intersection with each restricting set and an
    arbitrary intersection with the remainder.
    """
    def subsets(cols, nonempty):
        for r in range(1 if nonempty else 0, 1 << len(cols)):
            yield sum(1 << c for q, c in enumerate(cols) if r >> q & 1)

    choices = [subsets(s, True) for s in partition.restricting_sets]
    choices.append(subsets(partition.remainder, False))
    for parts in itertools.product(*choices):
        yield sum(parts)


def has_zero_line(A) -> bool:
    """True if some row or column of ``A`` is entirely zero."""
    nz = as_matrix(A).values != 0
    return bool((~nz.any(axis=1)).any() or (~nz.any(axis=0)).any())


def _greedy_once(support, degree, gen):
    n = support.shape[0]
    alive = np.ones(n, dtype=bool)
    sets = []
    while alive.any():
        cand = np.flatnonzero(alive)
        dmin = degree[cand].min()
        ties = cand[degree[cand] == dmin]
        k = ties[gen.integers(len(ties))] if len(ties) > 1 else ties[0]
        nk = support[k]
        sets.append(tuple(int(j) for j in np.flatnonzero(nk)))
        alive[k] = False
        # drop every remaining row whose support meets N_k
        alive &= ~(support[:, nk].any(axis=1))
    used = np.zeros(n, dtype=bool)
    for s in sets:
        used[list(s)] = True
    return GreedyPartition(tuple(sets), tuple(int(j) for j in np.flatnonzero(~used)))


def greedy_partition(A, trials: int = 8, rng=None) -> GreedyPartition:
    """Randomised greedy family of disjoint row supports.

    Rows are taken in order of increasing out-degree (ties broken at random);
    each chosen row's support becomes a restricting set and every row whose
    support meets it is discarded. Of ``trials`` runs the partition with the
    smallest :attr:`GreedyPartition.enumeration_count` is returned.

    Raises
    ------
    ZeroLineError
        If ``A`` has an all-zero row or column.
    """
    A = as_matrix(A)
    if has_zero_line(A):
        raise ZeroLineError("matrix has an all-zero row or column")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    gen = as_generator(RngStream(0) if rng is None else rng)
    support = A.values != 0
    degree = support.sum(axis=1)
    best = None
    for _ in range(trials):
        cand = _greedy_once(support, degree, gen)
        if best is None or cand.enumeration_count < best.enumeration_count:
            best = cand
    return best


def _validate_partition(A: Matrix, part: GreedyPartition):
    n = A.n
    seen = []
    for s in part.restricting_sets:
        if not s:
            raise InvalidPartitionError("restricting sets must be non-empty")
        seen.extend(s)
    seen.extend(part.remainder)
    if sorted(seen) != list(range(n)):
        raise InvalidPartitionError("sets do not partition the column indices")
    supports = {tuple(np.flatnonzero(row)) for row in (A.values != 0)}
    for s in part.restricting_sets:
        if tuple(sorted(s)) not in supports:
            raise InvalidPartitionError(f"set {s} is not the support of any row")


def _sparse_shift(A: Matrix, part: GreedyPartition) -> np.ndarray:
    """Row offsets that keep every skipped column set at a zero product.

    A set outside the enumeration misses some restricting set ``S``. One row
    supported inside each ``S`` stays unshifted, so such a set still meets a
    zero row sum. Every other row starts at minus half its row sum, which
    centres its factor and reduces cancellation without changing the full
    signed sum.
    """
    support = A.values != 0
    shift = -0.5 * A.values.sum(axis=1)
    for s in part.restricting_sets:
        outside = np.ones(A.n, dtype=bool)
        outside[list(s)] = False
        inside = np.flatnonzero(~support[:, outside].any(axis=1))
        shift[inside[0]] = 0
    return np.ascontiguousarray(shift)


def sparse_permanent(
    A, partition: GreedyPartition | None = None, mode="compensated", workers: int | None = 1,
    trials: int = 8, rng=None,
) -> PermanentResult:
    """Ryser sum over column sets meeting every restricting set of ``partition``.

    A matrix with an all-zero row or column returns exactly 0 without
    enumerating anything. When ``partition`` is omitted it is built with
    :func:`greedy_partition` using ``trials`` and ``rng``.
    """
    A = as_matrix(A)
    n = A.n
    _check_order(n)
    mode = AccumulationMode.coerce(mode)
    workers = _resolve_workers(workers)
    t0 = time.perf_counter()
    if has_zero_line(A):
        return PermanentResult(_scalar(A, 0.0, 0.0), 0, mode, "sparse", time.perf_counter() - t0)
    if partition is None:
        partition = greedy_partition(A, trials=trials, rng=rng)
    else:
        _validate_partition(A, partition)

    fixed = [s[0] for s in partition.restricting_sets if len(s) == 1]
    digits = [(list(s), (1 << len(s)) - 1) for s in partition.restricting_sets if len(s) > 1]
    if partition.remainder:
        digits.append((list(partition.remainder), -((1 << len(partition.remainder)) - 1)))
    digits.sort(key=lambda d: -abs(d[1]))

    dig_cols = np.array([c for cols, _ in digits for c in cols], dtype=np.int64)
    dig_off = np.zeros(len(digits) + 1, dtype=np.int64)
    dig_off[1:] = np.cumsum([len(cols) for cols, _ in digits])
    dig_hi = np.array([h for _, h in digits], dtype=np.int64)
    fixed_cols = np.array(fixed, dtype=np.int64)

    if digits:
        h0 = dig_hi[0]
        lo0, hi0 = (0, -h0) if h0 < 0 else (1, h0)
        span = hi0 - lo0 + 1
        blocks = [distribute(span, workers, k) for k in range(min(workers, span))]
        blocks = [(lo0 + b.start, lo0 + b.start + b.length - 1) for b in blocks]
    else:
        blocks = [(0, 0)]

    a = A.values
    shift = _sparse_shift(A, partition)

    def run(b):
        return _kernels.sparse_block(
            a, shift, fixed_cols, dig_cols, dig_off, dig_hi, b[0], b[1], mode.code, A.is_complex
        )

    parts = _run_blocks(run, blocks, workers)
    return _finish(A.is_complex, parts, mode, n, partition.enumeration_count, "sparse", t0)


# -- band ---------------------------------------------------------------------


def band_width(A) -> int:
    """Smallest ``k`` with every entry ``|i - j| > k`` exactly zero."""
    A = as_matrix(A)
    i, j = np.nonzero(A.values)
    return int(np.abs(i - j).max()) if i.size else 0


@dataclass
class BandPoly:
    """Multilinear polynomial over a sliding window of live variables.

    Bit ``q`` of a coefficient index stands for the variable with index
    ``window_offset + q``.
    """

    window_offset: int
    coeffs: np.ndarray

    @property
    def live_variables(self) -> int:
        return int(self.coeffs.size).bit_length() - 1


def _times_variable(coeffs, bit, weight, out):
    # out += weight * x_bit * coeffs, dropping monomials that already hold x_bit
    size = coeffs.size
    src = coeffs.reshape(size >> (bit + 1), 2, 1 << bit)
    dst = out.reshape(size >> (bit + 1), 2, 1 << bit)
    dst[:, 1, :] += weight * src[:, 0, :]


def band_steps(A, k: int | None = None) -> Iterator[BandPoly]:
    """Yield the transfer polynomial after each row has been multiplied in.

    Row ``i`` contributes the linear form ``sum_j a[i, j] x_j`` over the band.
    Squares vanish, and once no later row can touch ``x_{i-k-1}`` that
    variable is set to 1, folding its coefficient slice onto the other one.
    """
    A = as_matrix(A)
    n = A.n
    bw = band_width(A)
    if k is None:
        k = bw
    if k < 0:
        raise ValueError("bandwidth must be non-negative")
    if bw > k:
        raise BandwidthError(f"matrix has bandwidth {bw} > {k}")
    k = min(k, n - 1)
    width = min(2 * k + 2, n)
    a = A.values
    coeffs = np.zeros(1 << width, dtype=a.dtype)
    coeffs[0] = 1
    base = 0
    for i in range(n):
        new = np.zeros_like(coeffs)
        for j in range(max(0, i - k), min(n - 1, i + k) + 1):
            if a[i, j] != 0:
                _times_variable(coeffs, j - base, a[i, j], new)
        coeffs = new
        if i - k - 1 >= 0:
            half = coeffs.reshape(-1, 2)
            folded = half[:, 0] + half[:, 1]
            coeffs = np.concatenate([folded, np.zeros_like(folded)])
            base += 1
        yield BandPoly(base, coeffs)


def band_permanent(A, k: int | None = None) -> PermanentResult:
    """Permanent of a band matrix in ``O(n k 4**k)`` time.

    ``k`` defaults to :func:`band_width` of ``A``. ``terms_evaluated`` counts
    coefficient slots processed, ``n * 2**window``.
    """
    A = as_matrix(A)
    t0 = time.perf_counter()
    poly = None
    for poly in band_steps(A, k):
        pass
    total = poly.coeffs.sum()
    terms = A.n * poly.coeffs.size
    return PermanentResult(
        _scalar(A, total.real, total.imag), terms, AccumulationMode.PLAIN, "band",
        time.perf_counter() - t0,
    )


# -- dispatch -----------------------------------------------------------------


def select_algorithm(A) -> str:
    """Pick the cheapest applicable algorithm for ``A``."""
    A = as_matrix(A)
    n = A.n
    if band_width(A) <= math.ceil(math.log2(n)):
        return "band"
    if n <= MAX_ORDER:
        if column_multiplicities(A).R <= n / 4:
            return "repeated"
        if np.count_nonzero(A.values) <= 0.05 * n * n:
            return "sparse"
    return "ryser"


def compute_permanent(A, algorithm: str = "auto", mode="compensated", workers: int | None = None,
                      rng=None) -> PermanentResult:
    """Permanent of ``A`` with the named algorithm (see :data:`ALGORITHMS`)."""
    A = as_matrix(A)
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    if algorithm == "auto":
        algorithm = select_algorithm(A)
    if algorithm == "ryser":
        return permanent(A, workers=workers, mode=mode)
    if algorithm == "repeated":
        return repeated_columns_permanent(A, mode=mode, workers=workers)
    if algorithm == "sparse":
        return sparse_permanent(A, mode=mode, workers=workers, rng=rng)
    if algorithm == "band":
        return band_permanent(A)
    t0 = time.perf_counter()
    value = naive_permanent(A)
    return PermanentResult(
        value, math.factorial(A.n), AccumulationMode.PLAIN, "naive", time.perf_counter() - t0
    )
