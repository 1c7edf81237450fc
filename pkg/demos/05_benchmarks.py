"""Timing shape of the algorithms.

The dense sum doubles per unit of n, band matrices grow linearly, and sparse
matrices stay far below the dense cost.
"""
from permkit.bench import bench_band, bench_dense, bench_sparse, doubling_slope

dense = bench_dense(range(16, 25), repeats=3)
for r in dense:
    print(f"dense  n={r.n:2d}  {r.median_seconds:.5f} s")
print(f"log2(time) slope per unit n: {doubling_slope(dense):.3f}")

band = bench_band([100, 200, 400, 800], 2, repeats=5)
for r in band:
    print(f"band k=2 n={r.n:3d}  {r.median_seconds:.5f} s")

for p in (0.005, 0.01, 0.02, 0.05):
    r = bench_sparse([24], p, repeats=3)[0]
    print(f"sparse n=24 p={p:<5}  {r.median_seconds:.5f} s   (dense {dense[-1].median_seconds:.5f} s)")
