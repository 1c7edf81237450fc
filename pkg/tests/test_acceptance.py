"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL criterion N`` line; the lines are
repeated in the pytest terminal summary. Run directly with
``python tests/test_acceptance.py`` for just the twelve lines.
"""
import math
import time

import numpy as np

from permkit import (
    EnsembleSpec,
    RngStream,
    all_ones,
    band_permanent,
    draw_sample_set,
    empirical_distribution,
    greedy_partition,
    haar_unitary,
    kahan_sum,
    moment,
    naive_permanent,
    permanent,
    repeated_columns_permanent,
    sparse_permanent,
)
from permkit.bench import bench_band, bench_dense, bench_sparse, doubling_slope
from permkit.stats import ks_statistic, ks_test, ks_threshold
from permkit.structured import enumerated_column_sets
from conftest import rel_err, report


def test_criterion_01_ones_exactness():
    worst_20 = max(rel_err(permanent(all_ones(n)).value, math.factorial(n)) for n in range(1, 21))
    worst_30 = max(rel_err(permanent(all_ones(n)).value, math.factorial(n)) for n in range(21, 31))
    t0 = time.perf_counter()
    permanent(all_ones(24), workers=1)
    t24 = time.perf_counter() - t0
    ok = worst_20 <= 1e-9 and worst_30 <= 1e-8 and t24 <= 60
    report(1, ok, f"J_n rel err n<=20 {worst_20:.2e}, 21..30 {worst_30:.2e}; n=24 serial {t24:.2f} s")


def _oracle_err(got, want):
    # +-1 matrices can have permanent exactly 0; then the error is absolute
    return abs(complex(got)) if want == 0 else rel_err(got, want)


def test_criterion_02_oracle_equivalence():
    g = np.random.default_rng(2)
    worst = {}
    for kind in ("real gaussian", "complex gaussian", "+-1"):
        errs = []
        for _ in range(200):
            n = int(g.integers(1, 9))
            if kind == "real gaussian":
                a = g.normal(size=(n, n))
            elif kind == "complex gaussian":
                a = g.normal(size=(n, n)) + 1j * g.normal(size=(n, n))
            else:
                a = g.choice([-1.0, 1.0], size=(n, n))
            errs.append(_oracle_err(permanent(a).value, naive_permanent(a)))
        worst[kind] = max(errs)
    ok = max(worst.values()) <= 1e-10
    report(2, ok, "worst error vs permutation sum: "
           + ", ".join(f"{k} {v:.2e}" for k, v in worst.items()))


def test_criterion_03_partition_invariance():
    g = np.random.default_rng(3)
    worst = 0.0
    identical = True
    for _ in range(5):
        a = g.normal(size=(14, 14)) + 1j * g.normal(size=(14, 14))
        ref = permanent(a, workers=1).value
        for w in (1, 2, 3, 7, 16):
            first = permanent(a, workers=w).value
            worst = max(worst, rel_err(first, ref))
            identical &= all(permanent(a, workers=w).value == first for _ in range(2))
    ok = worst <= 1e-12 and identical
    report(3, ok, f"n=14 workers 1,2,3,7,16 max rel diff {worst:.2e}; reruns bit-identical: {identical}")


def _structured_corpus(g):
    corpus = []
    for i in range(100):
        n = int(g.integers(4, 15))
        if i % 3 == 0:
            # repeated columns
            r = int(g.integers(1, max(2, n // 3) + 1))
            cols = g.normal(size=(n, r)) + 1j * g.normal(size=(n, r))
            a = cols[:, g.integers(0, r, size=n)]
        elif i % 3 == 1:
            # unit diagonal with off-diagonal density p <= 5%
            p = [0.005, 0.01, 0.02, 0.05][i % 4]
            a = np.eye(n) + (g.random((n, n)) < p) * g.normal(size=(n, n))
            np.fill_diagonal(a, 1.0 + g.random(n))
        else:
            k = 1 + (i // 3) % 5
            a = g.normal(size=(n, n))
            ii, jj = np.indices((n, n))
            a[np.abs(ii - jj) > k] = 0
        corpus.append(a)
    return corpus


def test_criterion_04_structured_equivalence():
    corpus = _structured_corpus(np.random.default_rng(4))
    worst = {"repeated": 0.0, "sparse": 0.0, "band": 0.0}
    for a in corpus:
        ref = permanent(a, workers=1).value
        worst["repeated"] = max(worst["repeated"], rel_err(repeated_columns_permanent(a).value, ref))
        worst["sparse"] = max(worst["sparse"], rel_err(sparse_permanent(a).value, ref))
        worst["band"] = max(worst["band"], rel_err(band_permanent(a).value, ref))
    ok = max(worst.values()) <= 1e-10
    report(4, ok, "100 matrices, worst rel err vs dense: "
           + ", ".join(f"{k} {v:.2e}" for k, v in worst.items()))


def test_criterion_05_compensation_sentinel():
    got = kahan_sum([1e16, 1.0, -1e16])
    report(5, got == 1.0, f"kahan_sum([1e16, 1, -1e16]) = {got!r}")


def test_criterion_06_timing_shape():
    slope = doubling_slope(bench_dense(range(16, 27), repeats=3))
    band = bench_band([200, 400], 2, repeats=5)
    ratio = band[1].median_seconds / band[0].median_seconds
    sparse = bench_sparse([24], 0.01, repeats=3)[0].median_seconds
    dense = bench_dense([24], repeats=3)[0].median_seconds
    ok = 0.9 <= slope <= 1.1 and ratio <= 3 and sparse < dense
    report(6, ok, f"dense slope {slope:.3f}; band t(400)/t(200) {ratio:.2f}; "
           f"sparse n=24 {sparse:.4f} s vs dense {dense:.4f} s")


def _within(est, target, k=5):
    return abs(est.value - target) <= k * est.bootstrap_err


def test_criterion_07_gaussian_moments():
    s = draw_sample_set(EnsembleSpec("gaussian", 6, seed=7), 10**4)
    m2, m4 = moment(s, 2, rng=70), moment(s, 4, rng=71)
    ok = _within(m2, 1.0) and _within(m4, 7.0)
    report(7, ok, f"<X^2> = {m2.value:.4f} +- {m2.bootstrap_err:.4f}, "
           f"<X^4> = {m4.value:.3f} +- {m4.bootstrap_err:.3f}")


def test_criterion_08_anticoncentration_shape():
    s = draw_sample_set(EnsembleSpec("gaussian", 10, seed=8), 10**5)
    d = empirical_distribution(s, per_decade=16)
    sel = (d.grid >= 0.05) & (d.grid <= 0.2)
    ratio = float(np.mean(d.F[sel] / d.grid[sel] ** 2))
    ok = abs(ratio - 4.8) <= 0.25 * 4.8
    report(8, ok, f"mean F(x)/x^2 on {int(sel.sum())} grid points in [0.05, 0.2] = {ratio:.3f} (target 4.8)")


def test_criterion_09_circular_second_moment():
    s = draw_sample_set(EnsembleSpec("circular", 6, seed=9), 10**4)
    m2 = moment(s, 2, rng=90)
    report(9, _within(m2, 1.0), f"<X^2> = {m2.value:.4f} +- {m2.bootstrap_err:.4f}")


def test_criterion_10_ks_machinery():
    thr = ks_threshold(0.05, 10**5, 10**5)
    d_hand = ks_statistic([1, 3], [2, 4])
    kept = 0
    for r in range(100):
        a = draw_sample_set(EnsembleSpec("gaussian", 6, seed=1000 + 2 * r), 10**4)
        b = draw_sample_set(EnsembleSpec("gaussian", 6, seed=1001 + 2 * r), 10**4)
        kept += not ks_test(a, b, alpha=0.05).reject
    ok = abs(thr - 0.00607) <= 1e-5 and d_hand == 0.5 and kept >= 90
    report(10, ok, f"threshold {thr:.6f}; D({{1,3}},{{2,4}}) = {d_hand}; non-rejections {kept}/100")


def test_criterion_11_haar_unitarity():
    worst = 0.0
    for n in (5, 20, 40):
        for s in range(100):
            u = np.asarray(haar_unitary(n, RngStream(s, n)))
            worst = max(worst, float(np.max(np.abs(u @ u.conj().T - np.eye(n)))))
    report(11, worst <= 1e-12, f"max |U U^H - I| over 300 draws = {worst:.2e}")


def _three_sparse(n, g, p=0.05):
    # unit diagonal plus Bernoulli(p) off-diagonal ones, at most 3 per row and column
    a = np.eye(n)
    for i, j in zip(*np.nonzero(g.random((n, n)) < p)):
        if i != j and (a[i] != 0).sum() < 3 and (a[:, j] != 0).sum() < 3:
            a[i, j] = 1.0
    return a


def _dominating(a):
    n = a.shape[0]
    rows = [sum(1 << j for j in np.flatnonzero(r)) for r in (a != 0)]
    return {s for s in range(1 << n) if all(s & r for r in rows)}


def test_criterion_12_sparse_soundness():
    g = np.random.default_rng(12)
    superset = True
    below = True
    worst_ratio = 0.0
    for s in range(50):
        n = int(g.integers(6, 13))
        a = _three_sparse(n, g)
        part = greedy_partition(a, rng=s)
        superset &= _dominating(a) <= set(enumerated_column_sets(part))
        terms = sparse_permanent(a, partition=part).terms_evaluated
        below &= terms < 2 ** (n - 1)
        worst_ratio = max(worst_ratio, terms / 2 ** (n - 1))
    report(12, superset and below,
           f"50 matrices: superset {superset}; max terms / 2^(n-1) = {worst_ratio:.3f}")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
