import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permkit import EnsembleSpec, SampleFormatError, SampleSet, analyze, draw_sample_set, fit_polynomial
from permkit import empirical_distribution, ks_test, moment, read_samples, write_samples
from permkit.stats import (
    density_of_squares,
    format_samples,
    ks_statistic,
    ks_threshold,
    normalized_samples,
    parse_samples,
)


def ks_brute(x1, x2):
    # evaluate both step functions at every sample and every gap midpoint
    pts = np.unique(np.concatenate([x1, x2]))
    probe = np.concatenate([pts, (pts[1:] + pts[:-1]) / 2, [pts[0] - 1]])
    F1 = np.array([np.mean(x1 <= t) for t in probe])
    F2 = np.array([np.mean(x2 <= t) for t in probe])
    return float(np.max(np.abs(F1 - F2)))


def test_sampleset_validation():
    with pytest.raises(ValueError):
        SampleSet([-1.0])
    with pytest.raises(ValueError):
        SampleSet([[1.0]])
    s = SampleSet([1.0, 2.0])
    assert s.count == 2 and np.array_equal(s.squared().values, [1.0, 4.0])


def test_normalized_samples():
    s = normalized_samples([-6.0, 6.0], 3)
    assert np.allclose(s.values, 6 / math.sqrt(6))


def test_constant_moments_have_zero_error():
    s = SampleSet(np.full(500, 1.5))
    for k in range(1, 5):
        m = moment(s, k, rng=1)
        assert m.value == pytest.approx(1.5**k) and m.bootstrap_err == 0.0


def test_moment_bootstrap_reproducible_and_sensible():
    g = np.random.default_rng(0)
    s = SampleSet(g.exponential(size=2000))
    a, b = moment(s, 1, rng=5), moment(s, 1, rng=5)
    assert a == b
    # standard error of an exponential mean is about 1 / sqrt(m)
    assert a.bootstrap_err == pytest.approx(1 / math.sqrt(2000), rel=0.2)
    with pytest.raises(ValueError):
        moment(s, 1, resamples=50)


def test_empirical_distribution_grid_and_values():
    s = SampleSet([0.1, 0.2, 0.3, 1.0])
    d = empirical_distribution(s, per_decade=4)
    assert d.grid[0] <= 0.1 and d.grid[-1] >= 1.0
    js = np.log10(d.grid) * 4
    assert np.allclose(js, np.round(js))
    assert np.all(np.diff(d.F) >= 0) and d.F[-1] == 1.0
    assert np.allclose(d.F_err, np.sqrt(d.F * (1 - d.F) / 4))


def test_uniform_density_recovered():
    g = np.random.default_rng(1)
    d = empirical_distribution(SampleSet(g.uniform(0.01, 1, 20000)), 32)
    inside = (d.grid > 0.05) & (d.grid < 0.9)
    assert np.all(np.abs(d.f[inside] - 1 / 0.99) <= 5 * d.f_err[inside])
    y, f2, _ = density_of_squares(d)
    assert np.allclose(y, d.grid**2)


def test_ks_hand_cases():
    assert ks_statistic([1, 3], [2, 4]) == 0.5
    assert ks_statistic([1, 2], [1, 2]) == 0.0
    assert ks_statistic([1], [2]) == 1.0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=15),
       st.lists(st.integers(0, 6), min_size=1, max_size=15))
def test_ks_matches_brute_force(a, b):
    a, b = np.array(a, float), np.array(b, float)
    assert ks_statistic(a, b) == pytest.approx(ks_brute(a, b), abs=1e-15)


def test_ks_threshold_values():
    assert ks_threshold(0.05, 10**5, 10**5) == pytest.approx(0.00607, abs=1e-5)
    assert ks_threshold(0.05, 100, 100) == pytest.approx(1.3581 * math.sqrt(0.02), rel=1e-3)
    with pytest.raises(ValueError):
        ks_threshold(1.5, 1, 1)


def test_ks_test_self():
    s = SampleSet(np.random.default_rng(3).random(100))
    r = ks_test(s, s)
    assert r.D == 0 and not r.reject


def test_fit_polynomial_exact():
    x = np.linspace(0, 1, 6)
    fr = fit_polynomial(x, 2 - 3 * x + 0.5 * x**2, 2)
    assert np.allclose(fr.coefficients, [2, -3, 0.5])
    assert np.all(fr.deletion_errors < 1e-10)
    assert fr(2.0) == pytest.approx(2 - 6 + 2)


def test_fit_polynomial_errors():
    with pytest.raises(ValueError):
        fit_polynomial([1, 2], [1, 2], 1)
    with pytest.raises(np.linalg.LinAlgError):
        fit_polynomial([1, 1, 1, 1], [1, 2, 3, 4], 1)


def test_samples_roundtrip(tmp_path):
    spec = EnsembleSpec("unitary-minor", 3, 2.0, seed=9)
    s = draw_sample_set(spec, 50)
    p = tmp_path / "s.txt"
    write_samples(s, p)
    back = read_samples(p)
    assert np.array_equal(back.values, s.values) and back.spec == spec
    assert format_samples(s).splitlines()[0] == "# ensemble=unitary_minor n=3 a=2.0 seed=9 count=50 m=9"


@pytest.mark.parametrize("text", [
    "", "1.0\n", "# ensemble=gaussian n=3 a=none seed=1 count=2\n1.0\n",
    "# ensemble=gaussian n=3 seed=1 count=1\n1.0\n",
    "# ensemble=gaussian n=3 a=none seed=1 count=1\nabc\n",
    "# ensemble=gaussian n=3 a=none seed=1 count=1\n-1\n",
    "# ensemble=gaussian n=3 a=2 seed=1 count=1\n1\n",
])
def test_parse_samples_errors(text):
    with pytest.raises(SampleFormatError):
        parse_samples(text)


def test_draw_sample_set_chunking_invariant():
    spec = EnsembleSpec("gaussian", 4, seed=3)
    a = draw_sample_set(spec, 100, chunk=7)
    b = draw_sample_set(spec, 100)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(draw_sample_set(spec, 10, start=90).values, b.values[90:])


def test_analyze_output_and_fits():
    sets = [draw_sample_set(EnsembleSpec("gaussian", n, seed=1), 400) for n in (3, 4, 5, 6)]
    out = analyze(sets, resamples=100, fit_degree=1)
    assert [m["order"] for m in out["moments"]] == [1, 2, 3, 4]
    assert len(out["grid"]) == len(out["F"]) == len(out["f_err"])
    assert set(out["fits"]) == {"moment_1", "moment_2", "moment_3", "moment_4"}
    assert len(out["sets"]) == 4
    single = analyze(sets[0], resamples=100)
    assert single["fits"] == {} and "sets" not in single


def test_gaussian_mean_modulus_trend():
    # the mean of X drifts towards about 0.68 as n grows; small orders sit above it
    means = [moment(draw_sample_set(EnsembleSpec("gaussian", n, seed=2), 3000), 1, rng=0).value
             for n in (2, 4, 6)]
    assert means[0] > means[2] > 0.6
