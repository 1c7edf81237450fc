"""Compiled inner loops.

Everything here is ``nogil`` so that worker threads really run side by side.
None of the kernels use ``fastmath``: the compensated accumulators depend on
IEEE evaluation order and must not be reassociated.
"""
import numpy as np
from numba import njit

PLAIN, COMPENSATED, EXTENDED = 0, 1, 2

_ONE = np.uint64(1)
_ZERO = np.uint64(0)


@njit(inline="always")
def _acc(s, c, v, mode):
    if mode == PLAIN:
        return s + v, c
    if mode == COMPENSATED:
        # Kahan-Babuska (Neumaier) step
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        return t, c
    # double-double accumulator: two_sum then fast_two_sum renormalisation
    t = s + v
    bb = t - s
    e = (s - (t - bb)) + (v - bb)
    e += c
    hi = t + e
    lo = e - (hi - t)
    return hi, lo


@njit(inline="always")
def _prod(w):
    # four independent partial products to shorten the dependency chain
    n = w.shape[0]
    p0 = w[0]
    p1 = w[0] * 0 + 1
    p2 = p1
    p3 = p1
    i = 1
    while i + 3 < n:
        p1 *= w[i]
        p2 *= w[i + 1]
        p3 *= w[i + 2]
        p0 *= w[i + 3]
        i += 4
    while i < n:
        p0 *= w[i]
        i += 1
    return (p0 * p1) * (p2 * p3)


@njit(nogil=True, cache=True)
def neumaier_sum(x):
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        s, c = _acc(s, c, x[i], COMPENSATED)
    return s + c


@njit(nogil=True, cache=True)
def ryser_range(a, start, length, mode, is_complex):
    """Partial half-range Ryser sum over Gray ranks ``[start, start + length)``.

    Returns ``(s_re, c_re, s_im, c_im)``; ``s + c`` is the partial sum (for
    the extended mode ``(s, c)`` is the double-double pair).
    """
    n = a.shape[0]
    w = np.empty(n, dtype=a.dtype)
    for i in range(n):
        tot = a[i, 0] * 0
        for j in range(n):
            tot += a[i, j]
        w[i] = a[i, n - 1] - 0.5 * tot
    x = start ^ (start >> _ONE)
    for j in range(n - 1):
        if (x >> np.uint64(j)) & _ONE:
            for i in range(n):
                w[i] += a[i, j]
    t = 1 if (start & _ONE) == _ZERO else -1

    s_re = 0.0
    c_re = 0.0
    s_im = 0.0
    c_im = 0.0
    step = _ZERO
    while step < length:
        p = _prod(w)
        # nextset: toggle parity, pick the bit to flip
        t = -t
        j = _ZERO
        if t == 1:
            while ((x >> j) & _ONE) == _ZERO:
                j += _ONE
            j += _ONE
        x ^= _ONE << j
        v = t * p
        if is_complex:
            s_re, c_re = _acc(s_re, c_re, v.real, mode)
            s_im, c_im = _acc(s_im, c_im, v.imag, mode)
        else:
            s_re, c_re = _acc(s_re, c_re, v.real, mode)
        z = 2.0 * np.float64((x >> j) & _ONE) - 1.0
        jj = np.int64(j)
        if jj < n:
            for i in range(n):
                w[i] += z * a[i, jj]
        step += _ONE
    return s_re, c_re, s_im, c_im


@njit(nogil=True, cache=True)
def ryser_batch(stack, mode, is_complex):
    """Full permanents of a stack of equally sized matrices, single worker each."""
    count = stack.shape[0]
    n = stack.shape[1]
    out = np.empty(count, dtype=np.complex128)
    total = _ONE << np.uint64(n - 1)
    sign = 2.0 if n % 2 == 0 else -2.0
    for k in range(count):
        s_re, c_re, s_im, c_im = ryser_range(stack[k], _ZERO, total, mode, is_complex)
        out[k] = sign * complex(s_re + c_re, s_im + c_im)
    return out


@njit(inline="always")
def _ctz(r):
    j = 0
    while (r & 1) == 0:
        r >>= 1
        j += 1
    return j


@njit(nogil=True, cache=True)
def sparse_block(a, shift, fixed_cols, dig_cols, dig_off, dig_hi, v0, v1, mode, is_complex):
    """Signed Ryser sum over column sets built from restricting digits.

    Digit ``d`` owns columns ``dig_cols[dig_off[d]:dig_off[d+1]]`` and walks a
    binary Gray sequence over ranks ``lo..|dig_hi[d]|``; consecutive ranks
    differ in exactly one column. Restricting sets start at rank 1 (non-empty
    subsets only); free columns carry a negative ``dig_hi`` and start at 0.
    ``fixed_cols`` are always in the set. Digit 0 is restricted to ranks
    ``v0..v1`` so callers can split the work into blocks; all digits then
    follow a reflected mixed-radix Gray code with digit 0 moving fastest.
    Row sums start from ``shift``.
    """
    n = a.shape[0]
    D = dig_hi.shape[0]
    inJ = np.zeros(n, dtype=np.bool_)
    size = 0
    for q in range(fixed_cols.shape[0]):
        inJ[fixed_cols[q]] = True
        size += 1
    lo = np.empty(D, dtype=np.int64)
    hi = np.empty(D, dtype=np.int64)
    val = np.empty(D, dtype=np.int64)
    for d in range(D):
        h = dig_hi[d]
        # negative hi marks a free (may-be-empty) digit
        if h < 0:
            lo[d] = 0
            hi[d] = -h
        else:
            lo[d] = 1
            hi[d] = h
        val[d] = lo[d]
    if D > 0:
        lo[0] = v0
        hi[0] = v1
        val[0] = v0
    for d in range(D):
        g = val[d] ^ (val[d] >> 1)
        b = 0
        while g:
            if g & 1:
                inJ[dig_cols[dig_off[d] + b]] = True
                size += 1
            g >>= 1
            b += 1

    w = shift.copy()
    for j in range(n):
        if inJ[j]:
            for i in range(n):
                w[i] += a[i, j]
    direc = np.ones(D, dtype=np.int64)

    s_re = 0.0
    c_re = 0.0
    s_im = 0.0
    c_im = 0.0
    while True:
        p = _prod(w)
        if size % 2 == 1:
            p = -p
        if is_complex:
            s_re, c_re = _acc(s_re, c_re, p.real, mode)
            s_im, c_im = _acc(s_im, c_im, p.imag, mode)
        else:
            s_re, c_re = _acc(s_re, c_re, p.real, mode)
        d = 0
        while d < D:
            nv = val[d] + direc[d]
            if nv >= lo[d] and nv <= hi[d]:
                break
            direc[d] = -direc[d]
            d += 1
        if d >= D:
            break
        if direc[d] > 0:
            bit = _ctz(val[d] + 1)
        else:
            bit = _ctz(val[d])
        val[d] += direc[d]
        col = dig_cols[dig_off[d] + bit]
        if inJ[col]:
            inJ[col] = False
            size -= 1
            for i in range(n):
                w[i] -= a[i, col]
        else:
            inJ[col] = True
            size += 1
            for i in range(n):
                w[i] += a[i, col]
    return s_re, c_re, s_im, c_im


@njit(nogil=True, cache=True)
def repeated_block(cols, shift, mult, binom, v0, v1, mode, is_complex):
    """Weighted Ryser sum over multiplicity vectors with ``v0 <= f[0] <= v1``.

    ``cols`` is ``(n, R)`` holding the distinct columns, ``binom[j, f]`` the
    binomial weights. The digits walk a reflected mixed-radix Gray code
    so each step moves one ``f_j`` by one and costs ``O(n + R)``. Row sums
    start from ``shift``.
    """
    n = cols.shape[0]
    R = cols.shape[1]
    f = np.zeros(R, dtype=np.int64)
    f[0] = v0
    lo = np.zeros(R, dtype=np.int64)
    hi = mult.copy()
    lo[0] = v0
    hi[0] = v1
    w = shift.copy()
    for i in range(n):
        w[i] += v0 * cols[i, 0]
    fsum = v0
    direc = np.ones(R, dtype=np.int64)

    s_re = 0.0
    c_re = 0.0
    s_im = 0.0
    c_im = 0.0
    while True:
        weight = 1.0
        for j in range(R):
            weight *= binom[j, f[j]]
        p = _prod(w) * weight
        if fsum % 2 == 1:
            p = -p
        if is_complex:
            s_re, c_re = _acc(s_re, c_re, p.real, mode)
            s_im, c_im = _acc(s_im, c_im, p.imag, mode)
        else:
            s_re, c_re = _acc(s_re, c_re, p.real, mode)
        d = 0
        while d < R:
            nv = f[d] + direc[d]
            if nv >= lo[d] and nv <= hi[d]:
                break
            direc[d] = -direc[d]
            d += 1
        if d >= R:
            break
        step = direc[d]
        f[d] += step
        fsum += step
        for i in range(n):
            w[i] += step * cols[i, d]
    return s_re, c_re, s_im, c_im
