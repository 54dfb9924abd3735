from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from lcbound import conjecture as C


def quad_objective(d: C.ConcaveLogDensity, delta: float) -> float:
    """Independent evaluation: plain adaptive quadrature of exp(interp(phi))."""
    f = lambda x: math.exp(np.interp(x, d.knots, d.phi))  # noqa: E731
    lo, hi = float(d.knots[0]), float(d.knots[-1])
    pts = list(d.knots[1:-1])
    kw = {"points": pts, "limit": 4 * len(pts) + 50, "epsabs": 1e-12, "epsrel": 1e-11}
    m0 = integrate.quad(f, lo, hi, **kw)[0]
    m1 = integrate.quad(lambda x: x * f(x), lo, hi, **kw)[0]
    m2 = integrate.quad(lambda x: x * x * f(x), lo, hi, **kw)[0]
    mu = m1 / m0
    sigma = math.sqrt(m2 / m0 - mu * mu)
    b = min(mu + sigma * delta, hi)
    inner = [p for p in pts if mu < p < b]
    return integrate.quad(f, mu, b, points=inner or None, limit=200, epsabs=1e-14)[0] / m0


# --- closed-form cells --------------------------------------------------------------


@given(st.floats(-60.0, 60.0))
def test_anchored_moments_match_quadrature(y):
    K = C.anchored_moments(np.array([y]))
    for k in range(4):
        val = integrate.quad(lambda t: t**k * math.exp(y * t - max(y, 0.0)), 0, 1, epsabs=1e-15)[0]
        assert K[k][0] == pytest.approx(val, rel=1e-10, abs=1e-15)


def test_density_moments_examples():
    flat = C.ConcaveLogDensity(np.array([0.0, 1.0]), np.array([0.0, 0.0]))
    assert C.density_moments(flat) == pytest.approx((1.0, 0.5, 1 / 3), abs=1e-15)
    expo = C.ConcaveLogDensity.from_function(0.0, 20.0, 200, lambda x: -x)
    m = C.density_moments(expo)
    t = math.exp(-20)
    assert m == pytest.approx((1 - t, 1 - 21 * t, 2 - 442 * t), abs=1e-13)
    shifted = C.ConcaveLogDensity(expo.knots, expo.phi + 0.7)
    assert C.density_moments(shifted) == pytest.approx(tuple(math.exp(0.7) * v for v in m), rel=1e-13)


def test_objective_examples():
    cfg = C.ExplorerConfig(n=128)
    knots = np.linspace(-10, 10, 129)
    expo = C.ConcaveLogDensity(knots, C.phi_from_params(C.exponential_start(cfg), cfg.width))
    assert abs(C.objective(expo, 1.0) - C.conjectured_value(1.0)) < 1e-3
    flat = C.ConcaveLogDensity(knots, np.zeros(129))
    assert C.objective(flat, 1.0) == pytest.approx(1 / (2 * math.sqrt(3)), abs=1e-12)
    assert C.objective(flat, 1e-12) < 1e-11
    with pytest.raises(ValueError):
        C.objective(flat, 0.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.1, 6.0))
def test_objective_matches_independent_quadrature(seed, delta):
    cfg = C.ExplorerConfig(n=16)
    theta = C.random_start(cfg, np.random.default_rng(seed))
    d = C.ConcaveLogDensity(np.linspace(-10, 10, 17), C.phi_from_params(theta, cfg.width))
    assert C.objective(d, delta) == pytest.approx(quad_objective(d, delta), abs=1e-9)


def test_gradient_agrees_with_central_differences():
    cfg = C.ExplorerConfig()
    knots = np.linspace(-cfg.a, cfg.b, cfg.n + 1)
    rng = np.random.default_rng(2024)
    for _ in range(20):
        theta = C.random_start(cfg, rng)
        f, g, _ = C.objective_and_grad(knots, C.phi_from_params(theta, cfg.width), 1.0)
        g = C.grad_to_params(g, cfg.width)
        v = rng.normal(size=theta.size)
        h = 1e-6
        fp = C.objective_and_grad(knots, C.phi_from_params(theta + h * v, cfg.width), 1.0)[0]
        fm = C.objective_and_grad(knots, C.phi_from_params(theta - h * v, cfg.width), 1.0)[0]
        fd = (fp - fm) / (2 * h)
        assert g @ v == pytest.approx(fd, rel=1e-4, abs=1e-8)


@given(st.floats(-5, 5), st.lists(st.floats(0, 3), min_size=15, max_size=15))
def test_decrement_parameters_are_always_concave(s1, dec):
    theta = np.array([s1, *dec])
    phi = C.phi_from_params(theta, 20 / 16)
    d = C.ConcaveLogDensity(np.linspace(-10, 10, 17), phi)
    assert d.is_concave(tol=1e-9)
    np.testing.assert_allclose(C.params_from_phi(phi, 20 / 16), theta, atol=1e-9)


def test_standardized_moments_are_zero_and_one():
    cfg = C.ExplorerConfig(n=16)
    theta = C.random_start(cfg, np.random.default_rng(5))
    d = C.ConcaveLogDensity(np.linspace(-10, 10, 17), C.phi_from_params(theta, cfg.width))
    mu, sigma = C.standardization(d)
    std = C.ConcaveLogDensity((d.knots - mu) / sigma, d.phi + math.log(sigma))
    m0, m1, m2 = C.density_moments(std)
    assert m1 / m0 == pytest.approx(0, abs=1e-9)
    assert m2 / m0 == pytest.approx(1, abs=1e-9)


# --- configuration -------------------------------------------------------------------


@pytest.mark.parametrize("kw", [{"n": 4}, {"a": 5.0}, {"b": 3.0}, {"delta": 0.0}, {"restarts": 0}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        C.ExplorerConfig(**kw)


# --- explorer ----------------------------------------------------------------------


@pytest.fixture(scope="module")
def small_run():
    return C.minimize(C.ExplorerConfig(delta=1.0, n=16, restarts=3, seed=1, maxiter=150))


def test_floor_and_upper_anchor(small_run):
    cfg = small_run.config
    knots = np.linspace(-cfg.a, cfg.b, cfg.n + 1)
    expo = C.ConcaveLogDensity(knots, C.phi_from_params(C.exponential_start(cfg), cfg.width))
    assert small_run.floor <= small_run.best <= C.objective(expo, 1.0)
    assert small_run.density.is_concave(tol=1e-9 * np.abs(small_run.density.phi).max())
    assert C.objective(small_run.density, 1.0) == pytest.approx(small_run.best, abs=1e-12)


def test_accepted_steps_never_increase(small_run):
    trace = small_run.traces[0]
    assert trace.start == "exponential"
    assert all(b <= a + 1e-15 for a, b in zip(trace.history, trace.history[1:]))


def test_determinism(small_run):
    again = C.minimize(small_run.config)
    assert again.best == small_run.best
    np.testing.assert_array_equal(again.density.phi, small_run.density.phi)


def test_floor_at_quarter():
    res = C.minimize(C.ExplorerConfig(delta=0.25, n=16, restarts=2, seed=3, maxiter=100))
    assert res.best >= 0.25 / (72 * (1 + 4.19 * 0.25))


def test_compare_classifications(small_run):
    import dataclasses

    exact = dataclasses.replace(small_run, best=small_run.conjectured)
    cmp = C.compare_to_conjecture(exact)
    assert cmp.gap == 0 and cmp.classification == C.CONSISTENT
    at_floor = dataclasses.replace(small_run, best=small_run.floor)
    cmp = C.compare_to_conjecture(at_floor)
    assert cmp.counterexample and cmp.gap < -0.2
    assert cmp.density["knots"][0] == -small_run.config.a


def test_truncated_exponential_beats_the_conjectured_value():
    """e^-x on [0, L], standardized, has P(0 < X < 1) below e^-1 (1 - e^-1) for L near 5.

    Computed here with scipy quadrature only, as an independent confirmation of
    what the explorer reports.
    """
    L = 5.0
    f = lambda x: math.exp(-x) if 0 <= x <= L else 0.0  # noqa: E731
    m0 = integrate.quad(f, 0, L)[0]
    mu = integrate.quad(lambda x: x * f(x), 0, L)[0] / m0
    var = integrate.quad(lambda x: x * x * f(x), 0, L)[0] / m0 - mu * mu
    p = integrate.quad(f, mu, mu + math.sqrt(var))[0] / m0
    assert p < C.conjectured_value(1.0) - C.COUNTEREXAMPLE_TOL
    assert p > C.floor_value(1.0)


def test_csv_row(small_run):
    row = C.csv_row(small_run)
    assert [float(v) for v in row] == [1.0, small_run.best, small_run.conjectured, small_run.floor]


def test_desk_scale_run_finds_confirmed_counterexample_candidate(capsys, tmp_path):
    from lcbound import cli

    out = tmp_path / "run.json"
    code = cli.main(["conjecture", "--delta", "1", "--knots", "64", "--restarts", "8", "--seed", "42",
                     "--out", str(out)])
    capsys.readouterr()
    data = json.loads(out.read_text())
    dens = C.ConcaveLogDensity(np.array(data["result"]["density"]["knots"]),
                               np.array(data["result"]["density"]["phi"]))
    independent = quad_objective(dens, 1.0)
    assert independent == pytest.approx(data["result"]["best"], abs=1e-9)
    assert independent < C.conjectured_value(1.0) - C.COUNTEREXAMPLE_TOL
    assert code == 3 and data["comparison"]["classification"] == C.COUNTEREXAMPLE
