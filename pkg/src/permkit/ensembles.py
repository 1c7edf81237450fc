"""Random matrix ensembles.

Four kinds are provided:

============== ===============================================================
gaussian       i.i.d. complex Gaussian entries, mean 0 and ``E|z|^2 = 1``
circular       i.i.d. entries ``exp(i theta)`` with theta uniform on [0, 2 pi)
bernoulli      i.i.d. real entries +1 or -1 with probability 1/2 each
unitary_minor  ``sqrt(m)`` times the top-left ``n x n`` block of a Haar
               unitary of order ``m = round(n**a)``
============== ===============================================================

Sample ``index`` of an :class:`EnsembleSpec` is a pure function of
``(seed, index)``: every sample owns a fixed slice of one Philox stream, so
samples can be generated in any order or in parallel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrix import Matrix
from .rng import RngStream, as_generator

__all__ = [
    "KINDS",
    "EnsembleSpec",
    "box_muller",
    "gaussian_complex",
    "householder_qr",
    "haar_unitary",
    "minor_order",
    "scaled_minor",
    "sample_matrix",
    "sample_matrices",
]

KINDS = ("gaussian", "circular", "bernoulli", "unitary_minor")


def minor_order(n: int, a: float) -> int:
    """``n**a`` rounded to the nearest integer, halves away from zero."""
    return int(math.floor(n**a + 0.5))


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    n: int
    exponent_a: float | None = None
    seed: int = 0

    def __post_init__(self):
        kind = self.kind.replace("-", "_")
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise ValueError(f"unknown ensemble {self.kind!r}; expected one of {KINDS}")
        if self.n < 1:
            raise ValueError("order n must be at least 1")
        if kind == "unitary_minor":
            if self.exponent_a is None:
                raise ValueError("unitary_minor needs an exponent")
            if self.exponent_a < 1:
                raise ValueError("exponent must be at least 1")
            if minor_order(self.n, self.exponent_a) < self.n:
                raise ValueError("round(n**a) is smaller than n")
        elif self.exponent_a is not None:
            raise ValueError("an exponent only applies to the unitary_minor ensemble")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def m(self) -> int | None:
        """Order of the parent unitary (``unitary_minor`` only)."""
        if self.kind != "unitary_minor":
            return None
        return minor_order(self.n, self.exponent_a)

    @property
    def is_complex(self) -> bool:
        return self.kind != "bernoulli"

    @property
    def draws_per_sample(self) -> int:
        """Uniform draws reserved per sample, padded to whole Philox blocks."""
        n = self.n
        used = {
            "gaussian": 2 * n * n,
            "circular": n * n,
            "bernoulli": n * n,
            "unitary_minor": 2 * n * (self.m or 0),
        }[self.kind]
        return -(-used // 4) * 4


def box_muller(u1, u2):
    """Two independent standard normals from uniforms ``u1`` in (0, 1] and ``u2``."""
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    return r * np.cos(theta), r * np.sin(theta)


def _complex_from_uniforms(u):
    # consecutive (u1, u2) pairs; 1 - u maps [0, 1) onto (0, 1]
    g1, g2 = box_muller(1.0 - u[..., 0::2], u[..., 1::2])
    return (g1 + 1j * g2) / np.sqrt(2.0)


def gaussian_complex(rng, size=None):
    """Complex Gaussian numbers ``(g1 + i g2) / sqrt(2)`` via Box-Muller.

    Parameters
    ----------
    rng : Generator, RngStream or int
    size : int or tuple, optional
        Output shape; a scalar ``complex`` is returned when omitted.
    """
    gen = as_generator(rng)
    shape = () if size is None else np.atleast_1d(size).astype(int)
    count = int(np.prod(shape))
    z = _complex_from_uniforms(gen.random(2 * count)).reshape(tuple(shape))
    return complex(z) if size is None else z


def householder_qr(a):
    """Reduced QR factorisation of an ``m x n`` matrix (``m >= n``) by Householder reflections.

    Returns ``Q`` with orthonormal columns (``m x n``) and upper triangular
    ``R`` (``n x n``) such that ``a = Q @ R``.
    """
    r = np.array(a, dtype=np.complex128)
    m, n = r.shape
    if m < n:
        raise ValueError("householder_qr needs at least as many rows as columns")
    vs = []
    for k in range(n):
        x = r[k:, k]
        normx = np.linalg.norm(x)
        if normx == 0.0:
            vs.append(None)
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * normx
        v /= np.linalg.norm(v)
        r[k:, k:] -= 2.0 * np.outer(v, v.conj() @ r[k:, k:])
        vs.append(v)
    q = np.eye(m, n, dtype=np.complex128)
    for k in range(n - 1, -1, -1):
        v = vs[k]
        if v is not None:
            q[k:, :] -= 2.0 * np.outer(v, v.conj() @ q[k:, :])
    return q, np.triu(r[:n, :n])


def _haar_columns(g, qr=householder_qr):
    # Q Lambda with Lambda = diag(r_jj / |r_jj|)
    q, r = qr(g)
    d = np.diag(r)
    if np.any(d == 0):
        return None
    return q * (d / np.abs(d))


def haar_unitary(n: int, rng, qr=householder_qr) -> Matrix:
    """Haar-distributed unitary of order ``n`` from a phase-corrected QR of a Ginibre matrix.

    ``qr`` may be swapped for another factorisation (e.g. ``numpy.linalg.qr``);
    the phase correction makes the result independent of its sign convention.
    """
    if n < 1:
        raise ValueError("order must be at least 1")
    gen = as_generator(rng)
    while True:
        u = _haar_columns(gaussian_complex(gen, (n, n)), qr)
        if u is not None:
            return Matrix(u, kind="complex")


def _minor_from_ginibre(g, n, m):
    # the first n columns of Q Lambda depend only on the first n Ginibre columns
    u = _haar_columns(g)
    if u is None:
        return None
    return np.sqrt(m) * u[:n, :n]


def scaled_minor(n: int, a: float, rng) -> Matrix:
    """``sqrt(m)`` times the top-left ``n x n`` block of a Haar unitary, ``m = round(n**a)``."""
    m = minor_order(n, a)
    if m < n:
        raise ValueError(f"round(n**a) = {m} is smaller than n = {n}")
    gen = as_generator(rng)
    while True:
        s = _minor_from_ginibre(gaussian_complex(gen, (m, n)), n, m)
        if s is not None:
            return Matrix(s, kind="complex")


def _from_uniforms(spec, u, start=0):
    """Matrices of ``spec`` from a ``(count, used)`` block of uniforms."""
    n = spec.n
    count = u.shape[0]
    if spec.kind == "gaussian":
        return _complex_from_uniforms(u[:, : 2 * n * n]).reshape(count, n, n)
    if spec.kind == "circular":
        return np.exp(2j * np.pi * u[:, : n * n]).reshape(count, n, n)
    if spec.kind == "bernoulli":
        return np.where(u[:, : n * n] < 0.5, 1.0, -1.0).reshape(count, n, n)
    m = spec.m
    out = np.empty((count, n, n), dtype=np.complex128)
    for k in range(count):
        g = _complex_from_uniforms(u[k, : 2 * m * n]).reshape(m, n)
        s = _minor_from_ginibre(g, n, m)
        if s is None:
            # probability zero; redraw from a stream owned by this sample
            s = np.asarray(scaled_minor(n, spec.exponent_a, RngStream(spec.seed, 1 + start + k)))
        out[k] = s
    return out


def sample_matrices(spec: EnsembleSpec, start: int, count: int) -> np.ndarray:
    """Samples ``start .. start + count - 1`` of ``spec`` as a ``(count, n, n)`` array."""
    if start < 0 or count < 0:
        raise ValueError("start and count must be non-negative")
    per = spec.draws_per_sample
    gen = RngStream(spec.seed).generator(offset=start * per)
    u = gen.random(count * per).reshape(count, per)
    return _from_uniforms(spec, u, start)


def sample_matrix(spec: EnsembleSpec, index: int) -> Matrix:
    """Sample number ``index`` of the ensemble."""
    return Matrix(sample_matrices(spec, index, 1)[0], kind="complex" if spec.is_complex else "real")
