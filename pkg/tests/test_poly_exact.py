from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from lcbound import reference_polys as ref
from lcbound.poly_exact import (
    BiPoly,
    Interval,
    Poly,
    Sign,
    as_fraction,
    bipoly_partial,
    count_roots,
    discriminant,
    isolate_roots,
    poly_derivative,
    poly_eval,
    resultant,
    sign_on_interval,
    squarefree_part,
    sturm_sequence,
)

X = sp.Symbol("x")
U, H = sp.symbols("u h")


def to_sympy(p: Poly, sym=X):
    return sp.Poly(list(reversed([sp.Rational(c.numerator, c.denominator) for c in p.coeffs])) or [0], sym)


def bi_to_sympy(p: BiPoly):
    return sp.Integer(0) + sum(sp.Rational(c.numerator, c.denominator) * U**i * H**j for (i, j), c in p.terms.items())


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
small_polys = st.lists(rationals, min_size=1, max_size=6).map(lambda cs: Poly(cs, "x"))


# --- construction and arithmetic -------------------------------------------------


def test_as_fraction_refuses_floats():
    assert as_fraction("0.25") == Fraction(1, 4)
    assert as_fraction("16/3") == Fraction(16, 3)
    with pytest.raises(TypeError):
        as_fraction(0.25)


def test_poly_normalises_trailing_zeros():
    p = Poly([1, 2, 0, 0])
    assert p.degree == 1 and p.lc == 2
    assert Poly([0, 0]).degree == -1 and Poly([0]).is_zero()


@given(small_polys, small_polys, rationals)
def test_arithmetic_round_trips(p, q, x):
    assert (p + q) - q == p
    assert poly_eval(p * q, x) == poly_eval(p, x) * poly_eval(q, x)


@given(small_polys, small_polys)
def test_division_identity(p, q):
    if q.is_zero():
        return
    quo, rem = p.divmod(q)
    assert quo * q + rem == p
    assert rem.degree < q.degree


def test_poly_eval_examples():
    assert poly_eval(Poly([-2, 0, 1]), 0) == -2
    assert poly_eval(Poly([]), 7) == 0
    d3_at_u0 = ref.D3.specialize("u", 0)
    assert d3_at_u0 == Poly([600, 2414], "d")
    assert poly_eval(d3_at_u0, 1) == 3014


def test_derivative_examples():
    assert poly_derivative(Poly([-2, 0, 1])) == Poly([0, 2])
    assert poly_derivative(Poly([5])).is_zero()
    dr1 = poly_derivative(ref.R1)
    assert dr1.degree == 6 and dr1.lc == -7 * 383951907


@given(small_polys)
def test_derivative_matches_sympy(p):
    expected = sp.diff(to_sympy(p).as_expr(), X)
    assert sp.expand(to_sympy(poly_derivative(p)).as_expr() - expected) == 0


# --- bivariate ----------------------------------------------------------------------


def test_bipoly_partial_examples():
    u, h = BiPoly.var("u"), BiPoly.var("h")
    assert bipoly_partial(u * h, "u") == h
    assert bipoly_partial(ref.D2, "u") == ref.D21
    assert bipoly_partial(ref.D2, "h") == ref.D22
    assert ref.D21(u=0, h=0) == -3432448
    assert ref.D22(u=0, h=0) == -3202048
    with pytest.raises(ValueError):
        bipoly_partial(u * h, "z")


def test_bipoly_partials_match_sympy():
    d2 = bi_to_sympy(ref.D2)
    assert sp.expand(sp.diff(d2, U) - bi_to_sympy(ref.D21)) == 0
    assert sp.expand(sp.diff(d2, H) - bi_to_sympy(ref.D22)) == 0


bipoly_terms = st.dictionaries(
    st.tuples(st.integers(0, 2), st.integers(0, 2)), st.integers(-9, 9), min_size=1, max_size=5)


@given(bipoly_terms, st.fractions(-5, 5, max_denominator=7), st.fractions(-5, 5, max_denominator=7))
def test_bipoly_evaluation_matches_sympy(terms, uu, hh):
    p = BiPoly(terms)
    expected = bi_to_sympy(p).subs({U: sp.Rational(uu.numerator, uu.denominator),
                                    H: sp.Rational(hh.numerator, hh.denominator)})
    assert p(u=uu, h=hh) == Fraction(int(sp.fraction(expected)[0]), int(sp.fraction(expected)[1]))


# --- Sturm and root counting ---------------------------------------------------------


def test_sturm_chain_of_x2_minus_2():
    seq = sturm_sequence(Poly([-2, 0, 1]))
    assert seq[0] == Poly([-2, 0, 1])
    assert seq[1].degree == 1 and seq[1](1) / seq[1].lc == 1
    assert seq[2].degree == 0 and seq[2].lc > 0
    assert count_roots(Poly([1, 0, 1]), Interval(-float("inf"), float("inf"))) == 0


def test_count_roots_examples():
    assert count_roots(Poly([-2, 0, 1]), Interval.open(1, 2)) == 1
    assert count_roots(ref.R1, Interval(Fraction(16, 3), float("inf"), lo_open=True)) == 3
    assert count_roots(ref.R2, Interval.open(0, Fraction(1, 4))) == 1


def test_count_roots_endpoint_roots_follow_openness():
    p = Poly([-1, 0, 1])
    assert count_roots(p, Interval.closed(1, 2)) == 1
    assert count_roots(p, Interval.open(1, 2)) == 0
    assert count_roots(p, Interval.closed(-1, 1)) == 2
    assert count_roots(p * p, Interval.closed(-1, 1)) == 2


distinct_roots = st.lists(st.fractions(-8, 8, max_denominator=5), min_size=1, max_size=5, unique=True)


@given(distinct_roots, st.fractions(-9, 9, max_denominator=3), st.fractions(0, 9, max_denominator=3))
def test_count_roots_against_known_roots(roots, a, w):
    p = Poly([1])
    for r in roots:
        p = p * Poly([-r, 1])
    p = p * Poly([1, 0, 1])
    b = a + w
    if a == b:
        return
    expected = sum(1 for r in roots if a < r < b)
    assert count_roots(p, Interval.open(a, b)) == expected
    assert count_roots(p, Interval.closed(a, b)) == sum(1 for r in roots if a <= r <= b)


@settings(max_examples=40, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(st.integers(-30, 30), min_size=2, max_size=7))
def test_count_roots_matches_sympy(coeffs):
    p = Poly(coeffs)
    if p.degree < 1:
        return
    a, b = Fraction(-7, 3), Fraction(11, 5)
    if p(a) == 0 or p(b) == 0:
        return
    assert count_roots(p, Interval.open(a, b)) == to_sympy(p).count_roots(sp.Rational(-7, 3), sp.Rational(11, 5))


def test_count_roots_dominates_dense_grid_scan():
    rng = random.Random(3)
    xs = np.linspace(-3.0, 3.0, 10**6)
    for _ in range(4):
        roots = sorted(Fraction(rng.randint(-280, 280), 100) for _ in range(4))
        p = Poly([1, 0, 3])
        for r in roots:
            p = p * Poly([-r, 1])
        vals = np.polyval([float(c) for c in reversed(p.coeffs)], xs)
        changes = int(np.count_nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0))
        exact = count_roots(p, Interval.open(-3, 3))
        assert exact >= changes
        assert exact == len(set(roots))


# --- isolation -----------------------------------------------------------------------


def test_isolate_sqrt2():
    (iv,) = isolate_roots(Poly([-2, 0, 1]), Interval.open(0, 2), Fraction(1, 1000))
    assert iv.width <= Fraction(1, 1000)
    assert iv.contains(Fraction(141421, 100000))


def test_isolate_reference_roots():
    ivs = isolate_roots(ref.R1, Interval(Fraction(16, 3), 10**6, lo_open=True, hi_open=True), Fraction(1, 10**4))
    for iv, quoted in zip(ivs, (255.934, 341.325, 341.342)):
        assert abs(float(iv.midpoint) - quoted) < 5e-4
    (iv,) = isolate_roots(ref.R2, Interval.open(0, Fraction(1, 4)), Fraction(1, 10**7))
    assert abs(float(iv.midpoint) - 0.218271) < 1e-6


def test_isolated_roots_match_sympy_numeric_roots():
    real = sorted(float(r) for r in sp.Poly(to_sympy(ref.R1).as_expr(), X).nroots(n=30) if r.is_real)
    above = [r for r in real if r > 16 / 3]
    ivs = isolate_roots(ref.R1, Interval(Fraction(16, 3), float("inf"), lo_open=True), Fraction(1, 10**9))
    assert len(ivs) == len(above) == 3
    for iv, r in zip(ivs, above):
        assert float(iv.lo) <= r <= float(iv.hi)


@settings(max_examples=30, suppress_health_check=[HealthCheck.too_slow])
@given(distinct_roots)
def test_isolating_intervals_are_disjoint_and_exact(roots):
    p = Poly([1])
    for r in roots:
        p = p * Poly([-r, 1]) ** 2
    ivs = isolate_roots(p, Interval.open(-10, 10), Fraction(1, 64))
    assert len(ivs) == len(roots)
    for a, b in zip(ivs, ivs[1:]):
        assert a.hi <= b.lo
    for iv in ivs:
        assert iv.width <= Fraction(1, 64)
        assert count_roots(squarefree_part(p), iv) == 1


# --- sign certificates -----------------------------------------------------------------


def test_sign_examples():
    assert sign_on_interval(Poly([0, 0, 1]), Interval.open(-1, 1)) is Sign.NONNEGATIVE
    assert sign_on_interval(ref.D1_DISC_QUARTIC, Interval.open(0, Fraction(24, 100))) is Sign.NONPOSITIVE
    assert sign_on_interval(Poly([6, -47, 96]), Interval.open(-10**6, 10**6)) is Sign.NONNEGATIVE
    assert sign_on_interval(Poly([0, 1]), Interval.open(-1, 1)) is Sign.MIXED


@settings(max_examples=40)
@given(small_polys, st.fractions(-5, 5, max_denominator=4), st.fractions(1, 5, max_denominator=4))
def test_sign_classification_agrees_with_sampling(p, a, w):
    if p.is_zero():
        return
    iv = Interval.open(a, a + w)
    s = sign_on_interval(p, iv)
    samples = [p(a + w * k / 50) for k in range(1, 50)]
    if s is Sign.NONNEGATIVE:
        assert all(v >= 0 for v in samples)
    elif s is Sign.NONPOSITIVE:
        assert all(v <= 0 for v in samples)


# --- resultants and discriminants -------------------------------------------------------


def test_univariate_resultant_of_linear_factors():
    a, b = Fraction(3), Fraction(-5, 2)
    r = resultant(Poly([-a, 1]), Poly([-b, 1]))
    assert abs(r) == abs(a - b)


@settings(max_examples=25, deadline=None)
@given(bipoly_terms, bipoly_terms)
def test_bivariate_resultant_matches_sympy(t1, t2):
    p, q = BiPoly(t1), BiPoly(t2)
    if p.degree("u") < 1 or q.degree("u") < 1:
        return
    ours = resultant(p, q, eliminate="u")
    theirs = sp.resultant(bi_to_sympy(p), bi_to_sympy(q), U)
    assert sp.expand(to_sympy(ours, H).as_expr() - theirs) == 0


def test_resultant_specialisation_commutes():
    rng = random.Random(11)
    r1 = resultant(ref.D21, ref.D22, eliminate="u")
    checked = 0
    while checked < 20:
        hv = Fraction(rng.randint(-400, 400), rng.randint(1, 9))
        pu, qu = ref.D21.specialize("h", hv), ref.D22.specialize("h", hv)
        if pu.degree != ref.D21.degree("u") or qu.degree != ref.D22.degree("u"):
            continue
        assert r1(hv) == resultant(pu, qu)
        checked += 1


def test_reference_resultants_up_to_scalar():
    r1 = resultant(ref.D21, ref.D22, eliminate="u")
    r2 = resultant(ref.D21, ref.D22, eliminate="h")
    assert r1 == ref.R1 * 15084
    assert r2 == ref.R2 * 95551488
    assert ref.R1.lc == -383951907
    assert ref.R2.coeff(0) == -5192266514139579318272


def test_reference_resultant_scalars_agree_with_sympy():
    res_u = sp.Poly(sp.resultant(bi_to_sympy(ref.D21), bi_to_sympy(ref.D22), U), H)
    assert sp.expand(res_u.as_expr() - 15084 * to_sympy(ref.R1, H).as_expr()) == 0


def test_discriminant_examples():
    assert discriminant(Poly([1, -2, 1])) == 0
    assert discriminant(Poly([1, 0, 1])) == -4
    with pytest.raises(ValueError):
        discriminant(Poly([1, 1]))
    with pytest.raises(ValueError):
        resultant(Poly([]), Poly([1, 1]))


@given(rationals, rationals, rationals)
def test_quadratic_discriminant_formula(c, b, a):
    if a == 0:
        return
    assert discriminant(Poly([c, b, a])) == b * b - 4 * a * c


@given(st.lists(st.integers(-9, 9), min_size=4, max_size=5))
def test_discriminant_matches_sympy(coeffs):
    p = Poly(coeffs)
    if p.degree < 2:
        return
    assert discriminant(p) == Fraction(str(sp.discriminant(to_sympy(p).as_expr(), X)))


def test_discriminant_of_d1_in_h():
    disc = discriminant(ref.D1, var="h")
    assert disc == ref.D1_DISC
    expected = sp.discriminant(bi_to_sympy(ref.D1), H)
    assert sp.expand(to_sympy(disc, U).as_expr() - expected) == 0


# --- intervals -----------------------------------------------------------------------


def test_interval_invariants():
    with pytest.raises(ValueError):
        Interval(2, 1)
    with pytest.raises(ValueError):
        Interval(1, 1, lo_open=True)
    iv = Interval.point(3)
    assert iv.is_point and iv.contains(3)
    assert not Interval.open(0, 1).contains(0)


@given(st.fractions(-3, 3, max_denominator=5), st.fractions(0, 2, max_denominator=5),
       st.fractions(0, 1))
def test_interval_polynomial_enclosure(lo, w, t):
    p = ref.D1_DISC_QUARTIC
    iv = Interval.closed(lo, lo + w)
    enclosure = p(iv)
    assert enclosure.contains(p(lo + w * t))
