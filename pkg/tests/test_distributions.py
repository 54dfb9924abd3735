from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from lcbound import distributions as D

E = math.e
SQ3 = math.sqrt(3)


@pytest.fixture(scope="module")
def lib():
    return {d.tag: d for d in D.library()}


def test_family_catalogue_and_errors():
    assert set(D.FAMILIES) == {"gaussian", "exponential", "laplace", "logistic",
                               "uniform", "triangular", "gamma", "beta"}
    with pytest.raises(ValueError):
        D.make_family("gamma", k=0.5)
    with pytest.raises(ValueError):
        D.make_family("beta", alpha=0.5, beta=2.0)
    with pytest.raises(ValueError):
        D.make_family("cauchy")


def test_exponential_is_already_standard():
    e = D.make_family("exponential")
    assert e.mean == 0 and e.variance == 1 and e.support == (-1.0, math.inf)
    s = D.standardize(e)
    assert s.mu == 0 and s.sigma == 1
    assert s.pdf(0.0) == pytest.approx(math.exp(-1), abs=1e-15)


def test_standardize_examples():
    g = D.standardize(D.make_family("gaussian", mu=5.0, sigma=2.0))
    for x in (-2.0, 0.0, 0.7):
        assert g.pdf(x) == pytest.approx(math.exp(-x * x / 2) / math.sqrt(2 * math.pi), rel=1e-14)
    u = D.member("uniform")
    lo, hi = u.support
    assert lo == pytest.approx(-SQ3) and hi == pytest.approx(SQ3)
    assert u.pdf(0.0) == pytest.approx(1 / (2 * SQ3))


def test_prob_in_examples(lib):
    assert D.prob_in(lib["gaussian"], 1.0) == pytest.approx(0.5 * math.erf(1 / math.sqrt(2)), abs=1e-15)
    assert D.prob_in(lib["exponential"], 1.0) == pytest.approx(math.exp(-1) * (1 - math.exp(-1)), abs=1e-12)
    for d in lib.values():
        assert D.prob_in(d, 1e-12) < 1e-11
    with pytest.raises(ValueError):
        D.prob_in(lib["gaussian"], 0.0)


def test_density_at_zero_examples(lib):
    assert D.density_at_zero(lib["exponential"]) == pytest.approx(1 / E)
    assert D.density_at_zero(lib["gaussian"]) == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert D.density_at_zero(lib["uniform"]) == pytest.approx(1 / (2 * SQ3))


def test_mean_abs_examples(lib):
    assert D.mean_abs(lib["gaussian"]) == pytest.approx(math.sqrt(2 / math.pi), abs=1e-9)
    assert D.mean_abs(lib["exponential"]) == pytest.approx(2 / E, abs=1e-9)
    assert D.mean_abs(lib["uniform"]) == pytest.approx(SQ3 / 2, abs=1e-9)


def test_keilson_examples():
    k = D.keilson_check(D.make_family("exponential", loc=0.0))
    assert k.lhs == pytest.approx(2, abs=1e-9) and k.rhs == pytest.approx(2, abs=1e-9) and k.passed
    k = D.keilson_check(D.make_family("uniform"))
    assert k.lhs == pytest.approx(0.5) and k.rhs == pytest.approx(1 / 3) and k.passed
    half_normal = D.tail_variables(D.member("gaussian"))[0]
    k = D.keilson_check(half_normal)
    assert k.lhs == pytest.approx(4 / math.pi, abs=1e-9) and k.rhs == pytest.approx(1, abs=1e-9)
    with pytest.raises(ValueError):
        D.keilson_check(D.make_family("gaussian"))


def test_median_by_bisection(lib):
    assert D.median(lib["exponential"]) == pytest.approx(math.log(2) - 1, abs=1e-12)
    assert D.median(lib["gaussian"]) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("tag", D.FAMILIES)
def test_quadrature_audit(tag, lib):
    d = lib[tag]
    mass, mean, second = d.quadrature_moments()
    assert mass == pytest.approx(1, abs=1e-9)
    assert mean == pytest.approx(0, abs=1e-9)
    assert second == pytest.approx(1, abs=1e-9)
    assert D.log_concavity_violations(d) == []


@pytest.mark.parametrize("tag", D.FAMILIES)
def test_cdf_derivative_matches_pdf(tag, lib):
    d = lib[tag]
    lo, hi = d.support
    xs = np.linspace(max(lo, -4.0) + 1e-3, min(hi, 4.0) - 1e-3, 60)
    kinks = d.kinks
    h = 1e-6
    for x in xs:
        if any(abs(x - k) < 1e-4 for k in kinks):
            continue
        numeric = (d.cdf(x + h) - d.cdf(x - h)) / (2 * h)
        assert numeric == pytest.approx(d.pdf(x), abs=1e-6)


@pytest.mark.parametrize("tag", D.FAMILIES)
def test_cdf_agrees_with_independent_quadrature(tag, lib):
    d = lib[tag]
    lo = max(d.support[0], -40.0)
    for x in (-0.5, 0.0, 0.3, 1.7):
        if x <= d.support[0]:
            continue
        pts = [k for k in d.kinks if lo < k < x] or None
        val, _ = integrate.quad(d.pdf, lo, x, points=pts, epsabs=1e-13, limit=200)
        assert d.cdf(x) == pytest.approx(val, abs=1e-10)


def test_cdfs_agree_with_scipy_stats():
    g = D.make_family("gamma", k=3.5, theta=0.7)
    b = D.make_family("beta", alpha=2.5, beta=1.5)
    lg = D.make_family("logistic", mu=0.3, scale=1.2)
    for x in (0.1, 0.5, 0.9, 2.0):
        assert g.cdf(x) == pytest.approx(stats.gamma(3.5, scale=0.7).cdf(x), abs=1e-13)
        assert b.cdf(min(x, 1.0)) == pytest.approx(stats.beta(2.5, 1.5).cdf(min(x, 1.0)), abs=1e-13)
        assert lg.cdf(x) == pytest.approx(stats.logistic(0.3, 1.2).cdf(x), abs=1e-13)


def test_library_audit_has_no_violations():
    results, observations = D.audit_library()
    for r in results:
        assert r.passed, (r.tag, r.violations)
        for row in r.rows:
            assert row.margin == row.lhs - row.rhs and row.margin > 0
        assert r.scalars["f0"] >= D.BOBKOV_LEDOUX_FLOOR
        assert r.scalars["mean_abs"] >= 0.5
    by_tag = {r.tag: r for r in results}
    assert by_tag["exponential"].scalars["bkp_f0"] == pytest.approx(1.0)
    # the shifted exponential is not the library minimum of f(0): the uniform law is lower
    f0_obs = next(o for o in observations if o.quantity == "f(0)")
    assert f0_obs.counterexample and f0_obs.library_argmin == "uniform"


def test_monotone_side_comparisons_recorded(lib):
    r = D.check_bound(lib["exponential"], [0.5, 6.0])
    assert all(row.p1_side == "right" for row in r.rows)
    r = D.check_bound(lib["gaussian"], [1.0])
    assert r.rows[0].p1_side == "right"
    skewed = D.check_bound(D.standardize(D.make_family("beta", alpha=5.0, beta=2.0)), [1.0])
    row = skewed.rows[0]
    assert row.p1_side == "left" and row.p1_lhs >= row.p1


def test_csv_rows(lib):
    r = D.check_bound(lib["gaussian"], [1.0])
    (row,) = list(r.csv_rows())
    assert row[0] == "gaussian" and float(row[4]) == pytest.approx(0.3413447 - 0.0026761, abs=1e-6)


@settings(max_examples=15, deadline=None)
@given(st.floats(1.0, 12.0), st.floats(0.2, 5.0))
def test_gamma_family_satisfies_bound(k, theta):
    r = D.check_bound(D.standardize(D.make_family("gamma", k=k, theta=theta)), [0.1, 1.0, 4.0])
    assert r.passed, r.violations


@settings(max_examples=15, deadline=None)
@given(st.floats(1.0, 9.0), st.floats(1.0, 9.0))
def test_beta_family_satisfies_bound(a, b):
    r = D.check_bound(D.standardize(D.make_family("beta", alpha=a, beta=b)), [0.1, 1.0, 4.0])
    assert r.passed, r.violations
