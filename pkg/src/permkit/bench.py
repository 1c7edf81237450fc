"""Timing harness for the permanent algorithms.

All timings are single-call wall times; each size is run ``repeats`` times
after one untimed warm-up call (which also triggers JIT compilation) and the
median is reported.
"""
from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

import numpy as np

from .dense import permanent
from .rng import RngStream
from .structured import band_permanent, sparse_permanent

__all__ = [
    "BenchRow",
    "median_time",
    "dense_test_matrix",
    "band_test_matrix",
    "sparse_test_matrix",
    "bench_dense",
    "bench_band",
    "bench_sparse",
    "doubling_slope",
]


@dataclass(frozen=True)
class BenchRow:
    algorithm: str
    n: int
    median_seconds: float
    repeats: int
    parameter: float | None = None


def median_time(fn, repeats: int = 3) -> float:
    fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def dense_test_matrix(n: int, seed: int = 0) -> np.ndarray:
    """Real Gaussian ``n x n`` matrix."""
    return RngStream(seed, n).generator().standard_normal((n, n))


def band_test_matrix(n: int, k: int, seed: int = 0) -> np.ndarray:
    """Real Gaussian matrix zeroed outside the band ``|i - j| <= k``."""
    a = dense_test_matrix(n, seed)
    i, j = np.indices((n, n))
    a[np.abs(i - j) > k] = 0.0
    return a


def sparse_test_matrix(n: int, p: float, seed: int = 0) -> np.ndarray:
    """Identity plus off-diagonal ones with probability ``p``."""
    gen = RngStream(seed, n).generator()
    a = (gen.random((n, n)) < p).astype(float)
    np.fill_diagonal(a, 1.0)
    return a


def bench_dense(ns, repeats: int = 3, mode="compensated", workers: int = 1, seed: int = 0):
    rows = []
    for n in ns:
        a = dense_test_matrix(n, seed)
        t = median_time(lambda: permanent(a, workers=workers, mode=mode), repeats)
        rows.append(BenchRow("ryser", n, t, repeats))
    return rows


def bench_band(ns, k: int, repeats: int = 3, seed: int = 0):
    rows = []
    for n in ns:
        a = band_test_matrix(n, k, seed)
        t = median_time(lambda: band_permanent(a, k), repeats)
        rows.append(BenchRow("band", n, t, repeats, k))
    return rows


def bench_sparse(ns, p: float, repeats: int = 3, mode="compensated", seed: int = 0):
    rows = []
    for n in ns:
        a = sparse_test_matrix(n, p, seed)
        t = median_time(lambda: sparse_permanent(a, mode=mode, workers=1, rng=seed), repeats)
        rows.append(BenchRow("sparse", n, t, repeats, p))
    return rows


def doubling_slope(rows) -> float:
    """Least-squares slope of ``log2(median time)`` against ``n``."""
    n = np.array([r.n for r in rows], dtype=float)
    t = np.log2([r.median_seconds for r in rows])
    return float(np.polyfit(n, t, 1)[0])
