"""Statistics of normalised permanents ``X = |per(A)| / sqrt(n!)``.

Sample sets are stored as text: one ``# key=value ...`` header line followed
by one value per line at 17 significant digits::

    # ensemble=gaussian n=6 a=none seed=7 count=3
    0.41253...
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .dense import permanents
from .ensembles import EnsembleSpec, sample_matrices
from .errors import OrderTooLargeError, SampleFormatError
from .rng import RngStream

__all__ = [
    "SampleSet",
    "EmpiricalDistribution",
    "MomentEstimate",
    "KsResult",
    "FitResult",
    "normalized_samples",
    "draw_sample_set",
    "moment",
    "empirical_distribution",
    "density_of_squares",
    "ks_statistic",
    "ks_threshold",
    "ks_test",
    "fit_polynomial",
    "analyze",
    "write_samples",
    "read_samples",
    "format_samples",
    "parse_samples",
]

FACTORIAL_MAX_ORDER = 170


@dataclass(frozen=True)
class SampleSet:
    """Normalised permanent samples, optionally tagged with the ensemble they came from."""

    values: np.ndarray
    spec: EnsembleSpec | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("sample values must be one-dimensional")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("sample values must be finite and non-negative")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def count(self) -> int:
        return self.values.size

    def squared(self) -> "SampleSet":
        """The sample set of ``X**2``."""
        return SampleSet(self.values**2, self.spec)


@dataclass(frozen=True)
class MomentEstimate:
    order: int
    value: float
    bootstrap_err: float


@dataclass(frozen=True)
class EmpiricalDistribution:
    grid: np.ndarray
    F: np.ndarray
    F_err: np.ndarray
    f: np.ndarray
    f_err: np.ndarray
    count: int


@dataclass(frozen=True)
class KsResult:
    D: float
    threshold: float
    alpha: float
    reject: bool


@dataclass(frozen=True)
class FitResult:
    """Polynomial coefficients ``c_0 .. c_p`` (increasing powers)."""

    coefficients: np.ndarray
    deletion_errors: np.ndarray
    residual: float = field(default=0.0)

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coefficients)


def _values(s):
    if isinstance(s, SampleSet):
        return s.values
    return np.asarray(s, dtype=np.float64).ravel()


def normalized_samples(perms, n: int, spec: EnsembleSpec | None = None) -> SampleSet:
    """``|p| / sqrt(n!)`` for every permanent ``p``, with ``n!`` taken in log space."""
    if n > FACTORIAL_MAX_ORDER:
        raise OrderTooLargeError(f"n! is not representable for n = {n}")
    scale = math.exp(-0.5 * math.lgamma(n + 1))
    return SampleSet(np.abs(np.asarray(perms)) * scale, spec)


def draw_sample_set(spec: EnsembleSpec, count: int, start: int = 0, chunk: int = 4096,
                    mode="compensated") -> SampleSet:
    """Sample ``count`` matrices from ``spec`` and return their normalised permanents."""
    out = np.empty(count)
    for lo in range(0, count, chunk):
        c = min(chunk, count - lo)
        stack = sample_matrices(spec, start + lo, c)
        out[lo:lo + c] = np.abs(permanents(stack, mode=mode))
    return normalized_samples(out, spec.n, spec)


def _resample_generators(rng, resamples):
    if isinstance(rng, np.random.Generator):
        return [rng] * resamples
    base = rng if isinstance(rng, RngStream) else RngStream(0 if rng is None else int(rng))
    return [base.substream(base.stream + 1 + r).generator() for r in range(resamples)]


def moment(s, k: int, resamples: int = 200, rng=None) -> MomentEstimate:
    """Sample mean of ``X**k`` with a bootstrap standard error.

    Each resample draws ``m`` values with replacement from its own stream
    (derived from ``rng``), so the error estimate is reproducible.
    """
    x = _values(s)
    if x.size == 0:
        raise ValueError("empty sample set")
    if k < 1:
        raise ValueError("moment order must be at least 1")
    if resamples < 100:
        raise ValueError("use at least 100 bootstrap resamples")
    xk = x**k
    boot = np.empty(resamples)
    for r, gen in enumerate(_resample_generators(rng, resamples)):
        boot[r] = xk[gen.integers(0, xk.size, xk.size)].mean()
    return MomentEstimate(k, float(xk.mean()), float(boot.std(ddof=1)))


def _geometric_grid(lo, hi, per_decade):
    j_lo = math.floor(per_decade * math.log10(lo) + 1e-9)
    j_hi = math.ceil(per_decade * math.log10(hi) - 1e-9)
    if j_hi <= j_lo:
        j_hi = j_lo + 1
    return 10.0 ** (np.arange(j_lo, j_hi + 1) / per_decade)


def empirical_distribution(s, per_decade: int = 16) -> EmpiricalDistribution:
    """CDF and density on a geometric grid anchored at powers of ten.

    Grid points are ``10**(j / per_decade)`` from just below the smallest
    positive sample to just above the largest sample. ``F_err`` is the
    binomial error ``sqrt(F (1 - F) / m)``; the density is a central
    difference quotient (one-sided at the two ends) with errors propagated
    from ``F_err`` as if independent.
    """
    if per_decade < 4:
        raise ValueError("per_decade must be at least 4")
    x = np.sort(_values(s))
    m = x.size
    if m == 0:
        raise ValueError("empty sample set")
    if np.any(x < 0):
        raise ValueError("samples must be non-negative")
    pos = x[x > 0]
    if pos.size == 0:
        raise ValueError("all samples are zero")
    grid = _geometric_grid(pos[0], x[-1], per_decade)
    F = np.searchsorted(x, grid, side="right") / m
    F_err = np.sqrt(F * (1.0 - F) / m)

    f = np.empty_like(F)
    f_err = np.empty_like(F)
    f[1:-1] = (F[2:] - F[:-2]) / (grid[2:] - grid[:-2])
    f_err[1:-1] = np.hypot(F_err[2:], F_err[:-2]) / (grid[2:] - grid[:-2])
    for i, (a, b) in ((0, (0, 1)), (-1, (-2, -1))):
        dx = grid[b] - grid[a]
        f[i] = (F[b] - F[a]) / dx
        f_err[i] = math.hypot(F_err[a], F_err[b]) / dx
    return EmpiricalDistribution(grid, F, F_err, f, f_err, m)


def density_of_squares(dist: EmpiricalDistribution):
    """Grid and density of ``X**2`` implied by the density of ``X``.

    Uses ``F_2(y) = F(sqrt(y))``, hence ``f_2(y) = f(sqrt(y)) / (2 sqrt(y))``.
    Returns ``(y, f2, f2_err)``.
    """
    y = dist.grid**2
    return y, dist.f / (2.0 * dist.grid), dist.f_err / (2.0 * dist.grid)


def ks_statistic(s1, s2) -> float:
    """Exact two-sample Kolmogorov-Smirnov distance ``sup |F1 - F2|``."""
    x1 = np.sort(_values(s1))
    x2 = np.sort(_values(s2))
    if x1.size == 0 or x2.size == 0:
        raise ValueError("both sample sets must be non-empty")
    pts = np.concatenate([x1, x2])
    d = 0.0
    for side in ("right", "left"):
        F1 = np.searchsorted(x1, pts, side=side) / x1.size
        F2 = np.searchsorted(x2, pts, side=side) / x2.size
        d = max(d, float(np.max(np.abs(F1 - F2))))
    return d


def ks_threshold(alpha: float, m1: int, m2: int) -> float:
    """Asymptotic two-sample rejection threshold ``c(alpha) sqrt((m1 + m2) / (m1 m2))``."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if m1 < 1 or m2 < 1:
        raise ValueError("sample sizes must be positive")
    return math.sqrt(-math.log(alpha / 2) / 2) * math.sqrt((m1 + m2) / (m1 * m2))


def ks_test(s1, s2, alpha: float = 0.05) -> KsResult:
    D = ks_statistic(s1, s2)
    thr = ks_threshold(alpha, _values(s1).size, _values(s2).size)
    return KsResult(D, thr, alpha, D > thr)


def _lstsq(x, y, degree):
    V = np.vander(x, degree + 1, increasing=True)
    coef, _, rank, _ = np.linalg.lstsq(V, y, rcond=None)
    if rank < degree + 1:
        raise np.linalg.LinAlgError("degenerate abscissae: polynomial fit is rank deficient")
    return coef, float(np.sum((V @ coef - y) ** 2))


def fit_polynomial(x, y, degree: int, deletions: bool = True) -> FitResult:
    """Least-squares polynomial fit with leave-one-out coefficient spreads.

    ``deletion_errors[i]`` is the largest change of coefficient ``i`` when a
    single point is removed from the fit.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D arrays of equal length")
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if x.size < degree + 2:
        raise ValueError(f"need at least {degree + 2} points for a degree-{degree} fit")
    coef, resid = _lstsq(x, y, degree)
    spread = np.zeros_like(coef)
    if deletions:
        keep = np.ones(x.size, dtype=bool)
        for i in range(x.size):
            keep[i] = False
            c_i, _ = _lstsq(x[keep], y[keep], degree)
            spread = np.maximum(spread, np.abs(c_i - coef))
            keep[i] = True
    return FitResult(coef, spread, resid)


def _jsonable(a):
    return [None if not np.isfinite(v) else float(v) for v in np.asarray(a, dtype=float)]


def analyze(sets, per_decade: int = 16, resamples: int = 200, rng=0, orders=(1, 2, 3, 4),
            fit_degree: int | None = None) -> dict:
    """Moments, empirical distribution and (optionally) finite-size fits.

    ``sets`` is one :class:`SampleSet` or a sequence of them. Moments and the
    distribution are reported for the first set; when ``fit_degree`` is given
    and the sets carry distinct orders ``n``, every moment is fitted as a
    polynomial in ``1/n``.
    """
    if isinstance(sets, SampleSet):
        sets = [sets]
    sets = list(sets)
    per_set = []
    for s in sets:
        moms = [moment(s, k, resamples=resamples, rng=rng) for k in orders]
        per_set.append({
            "n": s.spec.n if s.spec else None,
            "count": s.count,
            "moments": [
                {"order": mo.order, "value": mo.value, "bootstrap_err": mo.bootstrap_err}
                for mo in moms
            ],
        })
    first = sets[0]
    out = {"count": first.count, "moments": per_set[0]["moments"]}
    if np.any(first.values > 0):
        dist = empirical_distribution(first, per_decade)
        out.update(grid=_jsonable(dist.grid), F=_jsonable(dist.F), F_err=_jsonable(dist.F_err),
                   f=_jsonable(dist.f), f_err=_jsonable(dist.f_err))
    else:
        out.update(grid=[], F=[], F_err=[], f=[], f_err=[])

    fits = {}
    if fit_degree is not None:
        ns = [p["n"] for p in per_set]
        if None in ns:
            raise ValueError("finite-size fits need sample sets tagged with their order n")
        inv_n = 1.0 / np.array(ns, dtype=float)
        for idx, k in enumerate(orders):
            y = [p["moments"][idx]["value"] for p in per_set]
            fr = fit_polynomial(inv_n, y, fit_degree)
            fits[f"moment_{k}"] = {
                "abscissa": "1/n",
                "coefficients": _jsonable(fr.coefficients),
                "deletion_errors": _jsonable(fr.deletion_errors),
            }
    out["fits"] = fits
    if len(sets) > 1:
        out["sets"] = per_set
    return out


# -- serialisation ------------------------------------------------------------


def format_samples(s: SampleSet) -> str:
    spec = s.spec
    if spec is None:
        head = f"# ensemble=none n=none a=none seed=none count={s.count}"
    else:
        a = "none" if spec.exponent_a is None else repr(float(spec.exponent_a))
        head = f"# ensemble={spec.kind} n={spec.n} a={a} seed={spec.seed} count={s.count}"
        if spec.m is not None:
            head += f" m={spec.m}"
    lines = [head] + [f"{v:.17g}" for v in s.values]
    return "\n".join(lines) + "\n"


def write_samples(s: SampleSet, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_samples(s))


def parse_samples(text: str) -> SampleSet:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise SampleFormatError("sample file must start with a '# key=value' header")
    meta = {}
    for tok in lines[0][1:].split():
        if "=" not in tok:
            raise SampleFormatError(f"malformed header field {tok!r}")
        key, val = tok.split("=", 1)
        meta[key] = val
    for key in ("ensemble", "n", "a", "seed", "count"):
        if key not in meta:
            raise SampleFormatError(f"header is missing {key!r}")
    try:
        values = np.array([float(v) for v in lines[1:] if v.strip()], dtype=np.float64)
        count = int(meta["count"])
    except ValueError:
        raise SampleFormatError("malformed number in sample file") from None
    if values.size != count:
        raise SampleFormatError(f"header declares {count} values, found {values.size}")
    spec = None
    if meta["ensemble"] != "none":
        try:
            a = None if meta["a"] == "none" else float(meta["a"])
            spec = EnsembleSpec(meta["ensemble"], int(meta["n"]), a, int(meta["seed"]))
        except ValueError as exc:
            raise SampleFormatError(f"invalid ensemble header: {exc}") from None
    try:
        return SampleSet(values, spec)
    except ValueError as exc:
        raise SampleFormatError(str(exc)) from None


def read_samples(path) -> SampleSet:
    with open(path, encoding="utf-8") as fh:
        return parse_samples(fh.read())
