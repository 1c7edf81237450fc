"""Dense permanents with the Gray-code Ryser sum.

Walks through the basic API: exact values on the all-ones matrix, the three
accumulation modes, and how the work splits across workers without changing
the answer.
"""
import math

import numpy as np

import permkit as pk

# per(J_n) = n! is the standard sanity check
for n in (5, 10, 20):
    r = pk.permanent(pk.all_ones(n))
    print(f"per(J_{n}) = {r.value:.17g}   n! = {math.factorial(n)}   terms = {r.terms_evaluated}")

# a small matrix against the n! permutation sum
rng = np.random.default_rng(1)
a = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
print("\nRyser  :", pk.permanent(a).value)
print("naive  :", pk.naive_permanent(a))

# precision of the accumulation modes on J_28 (value 28! ~ 3e29)
print("\nrelative error on J_28")
for mode in ("plain", "compensated", "extended"):
    v = pk.permanent(pk.all_ones(28), mode=mode).value
    print(f"  {mode:12s} {abs(v - math.factorial(28)) / math.factorial(28):.2e}")

# plain double addition forgets the 1; the compensated sum keeps it
print("\nsum(1e16, 1, -1e16):  plain", 1e16 + 1.0 - 1e16, "  kahan_sum", pk.kahan_sum([1e16, 1.0, -1e16]))

# the 2**(n-1) Gray ranks split into contiguous blocks, one per worker
n = 14
a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
print(f"\nrank blocks for 3 workers: {[tuple(pk.distribute(2 ** (n - 1), 3, k)) for k in range(3)]}")
for w in (1, 2, 3, 7, 16):
    print(f"  workers={w:2d}  per = {pk.permanent(a, workers=w).value:.15e}")

# the pieces can be summed by hand; the final factor is 2 (-1)^n
parts = [pk.subpermanent(a, 4, k) for k in range(4)]
print("  from subpermanents:", 2 * (-1) ** n * sum(parts))
