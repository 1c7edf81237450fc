"""Statistics of normalised permanents X = |per(A)| / sqrt(n!).

A scaled-down version of the gaussian study: moments with bootstrap errors,
the small-x shape of the distribution, a KS comparison of two ensembles and a
1/n extrapolation of the mean.
"""
import numpy as np

import permkit as pk
from permkit.stats import ks_test

s = pk.draw_sample_set(pk.EnsembleSpec("gaussian", 6, seed=1), 10_000)
for k in (1, 2, 3, 4):
    m = pk.moment(s, k, rng=k)
    print(f"<X^{k}> = {m.value:.4f} +- {m.bootstrap_err:.4f}")
print("expected <X^2> = 1 and <X^4> = n + 1 = 7")

# F(x) ~ (6 - 12/n) x^2 for small x
s10 = pk.draw_sample_set(pk.EnsembleSpec("gaussian", 10, seed=2), 100_000)
d = pk.empirical_distribution(s10)
sel = (d.grid >= 0.05) & (d.grid <= 0.2)
print(f"\nn=10: mean F(x)/x^2 on [0.05, 0.2] = {np.mean(d.F[sel] / d.grid[sel] ** 2):.2f} (leading term 4.8)")
for x, F, e in list(zip(d.grid, d.F, d.F_err))[::8]:
    print(f"   F({x:.3g}) = {F:.5f} +- {e:.5f}")

# gaussian and unitary-minor samples at the same n
g8 = pk.draw_sample_set(pk.EnsembleSpec("gaussian", 8, seed=5), 5000)
u8 = pk.draw_sample_set(pk.EnsembleSpec("unitary-minor", 8, 2.0, seed=6), 5000)
r = ks_test(g8, u8)
print(f"\nKS gaussian vs unitary minor (a=2): D = {r.D:.4f}, threshold {r.threshold:.4f}, reject {r.reject}")

# mean of X against 1/n; the larger study finds a limit near 0.684
ns = np.arange(6, 15)
sets = [pk.draw_sample_set(pk.EnsembleSpec("gaussian", int(n), seed=100 + int(n)), 20_000) for n in ns]
out = pk.analyze(sets, resamples=100, orders=(1,), fit_degree=1)
c0, c1 = out["fits"]["moment_1"]["coefficients"]
e0 = out["fits"]["moment_1"]["deletion_errors"][0]
print(f"\n<X> fit over n = 6..14: {c0:.3f} (+- {e0:.3f}) + {c1:.2f}/n")
