"""Machine-checked certificates for every step of the lower-bound proof.

Each ``certify_*`` function returns a :class:`Certificate` made of steps;
every step records the claim it checks and the exact witnesses that make the
claim reproducible.  Inputs that a certificate compares against (reference
polynomials, the constant ``c``, the kernel) are keyword arguments, so a
mutated input can be fed in to confirm the certificate is not vacuous.

Failures never raise: an unexpected exception inside a certificate becomes
a failed step carrying the error message.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import bounds
from . import reference_polys as ref
from .poly_exact import (
    INF,
    BiPoly,
    Interval,
    Poly,
    RatFunc,
    Sign,
    bipoly_range,
    count_roots,
    discriminant,
    grid_points,
    is_positive_on,
    isolate_roots,
    resultant,
    sign_on_interval,
)

QUARTER = bounds.QUARTER
ORDER = ("lemma-ab", "d1", "d2", "d3", "d4", "ratio", "theorem")


@dataclass
class Step:
    description: str
    claim: str
    passed: bool
    witnesses: dict[str, Any] = field(default_factory=dict)


@dataclass
class Certificate:
    name: str
    steps: list[Step] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def status(self) -> str:
        return "pass" if self.steps and all(s.passed for s in self.steps) else "fail"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def failed_steps(self) -> list[Step]:
        return [s for s in self.steps if not s.passed]

    def to_dict(self, timings: bool = False) -> dict:
        d = {
            "name": self.name,
            "status": self.status,
            "steps": [
                {"description": s.description, "claim": s.claim,
                 "passed": s.passed, "witnesses": s.witnesses}
                for s in self.steps
            ],
        }
        if timings:
            d["elapsed_seconds"] = round(self.elapsed, 6)
        return d


class _Builder:
    def __init__(self, name: str):
        self.cert = Certificate(name)
        self._t0 = time.perf_counter()

    def step(self, description: str, claim: str, passed: bool, **witnesses) -> bool:
        self.cert.steps.append(Step(description, claim, bool(passed), witnesses))
        return bool(passed)

    def error(self, exc: BaseException) -> None:
        self.step("unexpected error", "certificate ran to completion", False,
                  error=f"{type(exc).__name__}: {exc}")

    def finish(self) -> Certificate:
        self.cert.elapsed = time.perf_counter() - self._t0
        return self.cert


def _guarded(fn):
    """Turn exceptions raised inside a certificate body into a failing step."""

    def wrapper(*args, **kwargs):
        b = _Builder(fn.__name__)
        try:
            fn(b, *args, **kwargs)
        except Exception as exc:  # noqa: BLE001 - reported, not swallowed
            b.error(exc)
        return b.finish()

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    wrapper.__wrapped__ = fn
    return wrapper


def _cleared(expr: RatFunc, poly: BiPoly) -> bool:
    return expr.equals(poly)


def _symbols(vars=("u", "h")):
    return RatFunc.var(vars[0], vars), RatFunc.var(vars[1], vars)


# ---------------------------------------------------------------------------
# the four gap expressions, transcribed independently of the bounds module
# ---------------------------------------------------------------------------


def _p_expr(delta, c):
    return delta / (72 * (1 + c * delta))


def gap_d1(u, h, c):
    return u / 72 + Fraction(1, 72) * (1 - 4 * u) ** 3 * h - _p_expr(u + h, c)


def gap_d2(u, h, c):
    return u / 72 + Fraction(128, 27) / h * (QUARTER - u - Fraction(8, 9) / h) - _p_expr(u + h, c)


def gap_d3(u, h, c):
    return u / 72 + Fraction(1, 12) * (1 - 4 * u) ** 2 - _p_expr(u + h, c)


def gap_d4(u, h, c):
    return u / 72 - _p_expr(u + h, c)


GAPS: dict[int, Callable] = {1: gap_d1, 2: gap_d2, 3: gap_d3, 4: gap_d4}


def _clearing_factor(delta, c):
    """72 (100 + 419 delta) written through c: 7200 (1 + c delta)."""
    return 7200 * (1 + c * delta)


# ---------------------------------------------------------------------------
# kernel inequality min(delta, x) >= a(delta, b) (x^2/2 - b x^3/3)
# ---------------------------------------------------------------------------


def _audit_axis(lo, hi, n):
    return grid_points(lo, hi, n)


@_guarded
def certify_lemma_ab(b: _Builder, kernel: Callable = bounds.r_kernel,
                     a: Callable = bounds.a_factor, seed: int = 20240501,
                     samples: int = 200, grid: int = 22) -> None:
    """Kernel inequality, its maxima, equality cases and an exact audit grid."""
    b.cert.name = "lemma-ab"
    B, T = _symbols(("b", "t"))

    # x = t/b turns the b-family into one univariate polynomial in t
    g = (T / B) ** 2 / 2 - B * (T / B) ** 3 / 3
    G = BiPoly({(0, 2): Fraction(1, 2), (0, 3): Fraction(-1, 3)}, ("b", "t"))
    G_t = G.to_poly()
    dG = G_t.derivative()
    ok = (g * B * B).equals(G)
    ok &= sign_on_interval(dG, Interval(0, 1)) is Sign.NONNEGATIVE
    ok &= sign_on_interval(dG, Interval(1, INF, False, True)) is Sign.NONPOSITIVE
    ok &= G_t(1) == Fraction(1, 6)
    b.step("maximum of x^2/2 - b x^3/3 over x >= 0",
           "b^2 g(t/b) = t^2/2 - t^3/3, increasing on [0,1], decreasing on [1,inf), max 1/(6 b^2) at x = 1/b",
           ok, scaled_poly=G_t, derivative=dG, value_at_1=G_t(1))

    Hq = (g / (T / B)) * B
    H = BiPoly({(0, 1): Fraction(1, 2), (0, 2): Fraction(-1, 3)}, ("b", "t"))
    H_t = H.to_poly()
    dH = H_t.derivative()
    three_q = Fraction(3, 4)
    ok = Hq.equals(H)
    ok &= sign_on_interval(dH, Interval(0, three_q)) is Sign.NONNEGATIVE
    ok &= sign_on_interval(dH, Interval(three_q, INF, False, True)) is Sign.NONPOSITIVE
    ok &= H_t(three_q) == Fraction(3, 16)
    b.step("maximum of (x^2/2 - b x^3/3)/x over x > 0",
           "b g(t/b)/(t/b) = t/2 - t^2/3, max 3/(16 b) at x = 3/(4b)",
           ok, scaled_poly=H_t, derivative=dH, value_at_3_4=H_t(three_q))

    deltas = _audit_axis(Fraction(10, grid), 10, grid)
    bs = _audit_axis(0, 10, grid)
    xs = _audit_axis(0, 10, grid)

    bad = None
    for d in deltas:
        for bb in bs:
            av = a(d, bb)
            if av > 6 * bb * bb * d or av > 16 * bb / 3:
                bad = (d, bb, av)
                break
        if bad:
            break
    b.step("factor is dominated by both branches",
           "a(delta,b) <= 6 b^2 delta (so r <= delta) and a(delta,b) <= 16b/3 (so r <= x)",
           bad is None, grid_points=len(deltas) * len(bs),
           **({"counterexample": {"delta": bad[0], "b": bad[1], "a": bad[2]}} if bad else {}))

    rng = random.Random(seed)
    bad = None
    for _ in range(samples):
        d = Fraction(rng.randint(1, 1000), rng.randint(1, 100))
        thr = Fraction(8, 9) / d
        bb = thr * Fraction(rng.randint(1, 1000), 1000)
        if kernel(d, bb, 1 / bb) != d:
            bad = {"case": "b<=8/(9delta), x=1/b", "delta": d, "b": bb, "r": kernel(d, bb, 1 / bb)}
            break
        bb = thr * (1 + Fraction(rng.randint(0, 1000), 100))
        x = 3 / (4 * bb)
        if kernel(d, bb, x) != x:
            bad = {"case": "b>=8/(9delta), x=3/(4b)", "delta": d, "b": bb, "r": kernel(d, bb, x)}
            break
    b.step("equality cases make the factor optimal",
           "r(1/b) = delta when b <= 8/(9 delta); r(3/(4b)) = 3/(4b) when b >= 8/(9 delta)",
           bad is None, seed=seed, samples=samples, **({"counterexample": bad} if bad else {}))

    bad = None
    count = 0
    for d in deltas:
        for bb in bs:
            for x in xs:
                count += 1
                r = kernel(d, bb, x)
                if r > min(d, x):
                    bad = {"delta": d, "b": bb, "x": x, "r": r, "min": min(d, x)}
                    break
            if bad:
                break
        if bad:
            break
    b.step("exact audit grid", "r_{delta,b}(x) <= min(delta, x)", bad is None,
           grid_points=count, **({"counterexample": bad} if bad else {}))

    zero_ok = all(kernel(d, 0, x) == 0 for d in deltas[::4] for x in xs[::4])
    b.step("case b = 0", "r_{delta,0} is identically 0", zero_ok)


# ---------------------------------------------------------------------------
# first branch: D1 quadratic in h
# ---------------------------------------------------------------------------


@_guarded
def certify_lemma1_d1(b: _Builder, d1: BiPoly = ref.D1, disc: Poly = ref.D1_DISC,
                      quartic: Poly = ref.D1_DISC_QUARTIC,
                      quadratic: Poly = ref.D1_DISC_QUADRATIC,
                      cubic: Poly = ref.D1_VERTEX_CUBIC,
                      cutoff: Fraction = ref.D1_DISC_CUTOFF, c: Fraction = bounds.C) -> None:
    """D1(h) >= 0 for every h when 0 < u < 1/4."""
    b.cert.name = "d1"
    U, H = _symbols()
    unit = Interval.open(0, QUARTER)

    rebuilt = _clearing_factor(U + H, c) * gap_d1(U, H, c)
    b.step("reconstruction", "72 (100 + 419 (h+u)) d1 equals the reference D1", _cleared(rebuilt, d1),
           reference=d1)

    coeffs = d1.coefficients_in("h")
    coeffs += [Poly((), "u")] * (3 - len(coeffs))
    C0, Bc, A = coeffs[0], coeffs[1], coeffs[2]
    lc_expected = 419 * (1 - 4 * Poly.x("u")) ** 3
    b.step("strict convexity in h", "lc_h(D1) = 419 (1-4u)^3 > 0 on (0, 1/4)",
           d1.degree("h") == 2 and A == lc_expected and is_positive_on(A, unit), leading=A)

    recomputed = discriminant(d1, "h")
    b.step("discriminant", "disc_h(D1) = 16 u^2 (16u^2-12u+3)(quartic) exactly",
           recomputed == disc, recomputed=recomputed)

    low = Interval(0, cutoff, True, False)
    q_sign = sign_on_interval(quartic, low)
    quad_pos = is_positive_on(quadratic, Interval(-INF, INF))
    disc_sign = sign_on_interval(disc, low)
    product_ok = disc == Poly([0, 0, 16], "u") * quadratic * quartic
    b.step("discriminant sign for u <= 24/100",
           "quartic <= 0 on (0, 24/100], 16u^2-12u+3 > 0 on R, hence disc_h(D1) <= 0",
           product_ok and q_sign is Sign.NONPOSITIVE and quad_pos and disc_sign is Sign.NONPOSITIVE,
           quartic_sign=q_sign.value, disc_sign=disc_sign.value, cutoff=cutoff)

    # vertex of the parabola in h
    vertex = -RatFunc(BiPoly.from_poly(Bc)) / (2 * RatFunc(BiPoly.from_poly(A)))
    printed_vertex = U * RatFunc(BiPoly.from_poly(cubic)) / (419 * (1 - 4 * U) ** 3)
    upper = Interval(cutoff, QUARTER)
    c_sign = sign_on_interval(cubic, upper)
    b.step("vertex for u >= 24/100",
           "vertex = u (13408u^3-6856u^2+114u+181) / (419 (1-4u)^3) <= 0 on [24/100, 1/4)",
           vertex.equals(printed_vertex) and c_sign is Sign.NONPOSITIVE,
           cubic=cubic, cubic_sign=c_sign.value)

    b.step("value at h = 0", "D1(u, 0) = 419 u^2 >= 0, so D1 increases from a nonnegative value",
           C0 == Poly([0, 0, 419], "u"), constant_term=C0)

    at_u0 = d1.specialize("u", 0)
    b.step("edge u = 0", "D1(0, h) = 419 h^2 >= 0", at_u0 == Poly([0, 0, 419], "h"), value=at_u0)


# ---------------------------------------------------------------------------
# second branch: D2 cubic in h, two-variable critical-point analysis
# ---------------------------------------------------------------------------


def _within_quoted(iv: Interval, quoted: str) -> bool:
    """Every point of ``iv`` rounds to the quoted decimal."""
    q = Fraction(quoted)
    digits = len(quoted.split(".")[1]) if "." in quoted else 0
    half = Fraction(1, 2 * 10**digits)
    return q - half < iv.lo and iv.hi < q + half


@_guarded
def certify_lemma2_d2(b: _Builder, d2: BiPoly = ref.D2, d21: BiPoly = ref.D21,
                      d22: BiPoly = ref.D22, r1: Poly = ref.R1, r2: Poly = ref.R2,
                      c: Fraction = bounds.C) -> None:
    """D2 >= 0 on {0 < u < 1/4, r2(u) <= h <= r1(u)}."""
    b.cert.name = "d2"
    U, H = _symbols()
    unit = Interval.open(0, QUARTER)

    # (a) the scalar s in s h^2 (100 + 419 delta) d2 = D2
    base = H * H * (100 * (1 + c * (U + H))) * gap_d2(U, H, c)
    num, den = base.num, base.den
    target = d2 * den
    key = next(iter(sorted(num.terms)), None)
    s = target.terms.get(key, Fraction(0)) / num.terms[key] if key is not None else None
    b.step("defining scalar", "s h^2 (100 + 419 (h+u)) d2 = D2 for a unique rational s",
           s is not None and s != 0 and (num * s) == target, s=s)

    # (b) partial derivatives
    b.step("partial in u", "d/du D2 equals the reference D21", d2.partial("u") == d21)
    b.step("partial in h", "d/dh D2 equals the reference D22", d2.partial("h") == d22)

    # (c) resultants up to one rational factor each
    res_u = resultant(d21, d22, eliminate="u")
    res_h = resultant(d21, d22, eliminate="h")
    lam1 = res_u.lc / r1.lc if not r1.is_zero() else None
    lam2 = res_h.lc / r2.lc if not r2.is_zero() else None
    b.step("resultant eliminating u", "res_u(D21, D22) = lambda1 * R1",
           lam1 is not None and res_u == r1 * lam1, lambda1=lam1, degree=res_u.degree)
    b.step("resultant eliminating h", "res_h(D21, D22) = lambda2 * R2",
           lam2 is not None and res_h == r2 * lam2, lambda2=lam2, degree=res_h.degree)

    # (d), (e) root counts and isolation
    above = Interval.open(bounds.LOW_BREAK, INF)
    n1 = count_roots(r1, above)
    h_roots = isolate_roots(r1, above, Fraction(1, 10**9))
    quoted_ok = n1 == len(ref.R1_ROOTS_QUOTED) == len(h_roots) and all(
        _within_quoted(iv, q) for iv, q in zip(h_roots, ref.R1_ROOTS_QUOTED))
    b.step("roots of R1 above 16/3", "exactly 3, matching 255.934, 341.325, 341.342 to 3 decimals",
           quoted_ok, count=n1, intervals=h_roots,
           decimals=[f"{float(iv.midpoint):.6f}" for iv in h_roots])

    n2 = count_roots(r2, unit)
    u_roots = isolate_roots(r2, unit, Fraction(1, 10**12))
    ok2 = n2 == 1 == len(u_roots) and _within_quoted(u_roots[0], ref.R2_ROOT_QUOTED)
    b.step("roots of R2 in (0, 1/4)", "exactly 1, matching 0.218271 to 6 decimals", ok2,
           count=n2, intervals=u_roots, decimals=[f"{float(iv.midpoint):.9f}" for iv in u_roots])

    # (f) D2 at every pairing of candidate critical coordinates
    lows = []
    for ui in u_roots:
        for hj in h_roots:
            enc = bipoly_range(d2, u=ui, h=hj)
            lows.append({"u": ui, "h": hj, "lower_bound": math.floor(enc.lo)})
    floor_ok = bool(lows) and all(w["lower_bound"] > ref.CRITICAL_VALUE_FLOOR for w in lows)
    b.step("critical values", "D2 > 3e9 on every box (u_i, h_j) from the isolated roots",
           floor_ok, pairs=len(lows), boxes=lows)

    # r2(u) > 16/3 on (0, 1/4): r2 - 16/3 = (64/3) u / (1 - 4u)
    gap = bounds.threshold_r2(U) - bounds.LOW_BREAK
    b.step("domain lies above 16/3", "r2(u) - 16/3 = (64/3) u/(1-4u) > 0 on (0, 1/4)",
           gap.equals(Fraction(64, 3) * U / (1 - 4 * U)))

    # (g) boundary u = 0
    at0 = d2.specialize("u", 0)
    edge = Interval(bounds.LOW_BREAK, bounds.HIGH_BREAK)
    b.step("boundary u = 0", "D2(0,h) = 4(-675h^3+241344h^2-800512h-204800) > 0 on [16/3, 64/9]",
           at0 == ref.D2_AT_U0 and is_positive_on(at0, edge), value=at0)

    # (h) boundaries h = r1(u), h = r2(u)
    one_m_4u = Poly([1, -4], "u")
    for label, top, factor, quartic in (
        ("r1", Fraction(64, 9), ref.D2_AT_R1_FACTOR, ref.D2_AT_R1_QUARTIC),
        ("r2", Fraction(16, 3), ref.D2_AT_R2_FACTOR, ref.D2_AT_R2_QUARTIC),
    ):
        cols = d2.coefficients_in("h")
        deg = len(cols) - 1
        cleared = Poly((), "u")
        for j, cj in enumerate(cols):
            cleared = cleared + cj * (top**j) * one_m_4u ** (deg - j)
        q_sign = sign_on_interval(quartic, unit)
        b.step(f"boundary h = {label}(u)",
               f"(1-4u)^3 D2(u, {label}(u)) = {factor} * quartic with quartic <= 0 on (0, 1/4)",
               deg == 3 and cleared == quartic * factor and factor < 0 and q_sign is Sign.NONPOSITIVE,
               factor=factor, quartic=quartic, quartic_sign=q_sign.value)

    # (i) leading behaviour as u -> 1/4
    lead = d2.coefficients_in("h")[-1]
    at_quarter = lead(QUARTER)
    b.step("limit u -> 1/4", "h^3 coefficient 27 (419 u - 100) is positive at u = 1/4",
           d2.degree("h") == 3 and at_quarter > 0, value=at_quarter)


# ---------------------------------------------------------------------------
# third branch: D3 linear in delta
# ---------------------------------------------------------------------------


@_guarded
def certify_lemma3_d3(b: _Builder, d3: BiPoly = ref.D3, c: Fraction = bounds.C) -> None:
    """D3 >= 0 for every delta > 0 and every real u."""
    b.cert.name = "d3"
    U, D = _symbols(ref.UD)
    rebuilt = _clearing_factor(D, c) * gap_d3(U, D - U, c)
    b.step("reconstruction", "72 (100 + 419 delta) d3 equals the reference D3",
           _cleared(rebuilt, d3), reference=d3)

    cols = d3.coefficients_in("d")
    ok_shape = len(cols) == 2
    intercept, slope = cols if ok_shape else (None, None)
    b.step("linear in delta", "D3 = slope(u) delta + intercept(u)", ok_shape,
           slope=slope, intercept=intercept)
    if not ok_shape:
        return
    real_line = Interval(-INF, INF)
    for label, poly in (("slope", slope), ("intercept", intercept)):
        if poly.degree != 2:
            b.step(f"{label} positive", "quadratic in u", False, poly=poly)
            continue
        disc = discriminant(poly)
        b.step(f"{label} positive for all real u",
               "negative discriminant and positive leading coefficient (confirmed by Sturm count)",
               disc < 0 and poly.lc > 0 and is_positive_on(poly, real_line),
               discriminant=disc, leading=poly.lc)
    b.step("sample value", "D3 at u = 0, delta = 1", d3(u=0, d=1) > 0, value=d3(u=0, d=1))


# ---------------------------------------------------------------------------
# fourth branch: u >= 1/4
# ---------------------------------------------------------------------------


@_guarded
def certify_lemma4_d4(b: _Builder, c: Fraction = bounds.C) -> None:
    """u/72 - p(delta) >= 0 whenever u >= 1/4, because c >= 4."""
    b.cert.name = "d4"
    c = Fraction(c)
    b.step("positive constant", "c > 0", c > 0, c=c)
    U, D = _symbols(ref.UD)
    # 1/(72c) - delta/(72(1+c delta)) = 1/(72 c (1 + c delta))
    diff = 1 / (72 * c) - _p_expr(D, c)
    b.step("p(delta) below its limit", "1/(72c) - p(delta) = 1/(72 c (1 + c delta)) > 0 for delta > 0",
           c > 0 and diff.equals(1 / (72 * c * (1 + c * D))))
    floor = Fraction(1, 288) - 1 / (72 * c)
    b.step("final comparison", "1/288 - 1/(72c) >= 0, i.e. c >= 4", floor >= 0,
           u_floor=Fraction(1, 288), p_limit=1 / (72 * c), margin=floor)
    samples = [(Fraction(1, 4), Fraction(1, 2)), (Fraction(1, 4), Fraction(100)), (Fraction(3), Fraction(7))]
    same = all(bounds.p_u_bound(bounds.ShiftPair.from_delta(u, d)) == u / 72 for u, d in samples)
    b.step("bounds module agrees", "p_u = u/72 on the u >= 1/4 branch", same)


# ---------------------------------------------------------------------------
# ratio p1/p >= 1
# ---------------------------------------------------------------------------


@_guarded
def certify_ratio(b: _Builder, c: Fraction = bounds.C, scale: Fraction = ref.RATIO_D2_SCALE,
                  quadratic: Poly | None = None) -> None:
    """p1(delta) >= p(delta) for every delta > 0."""
    b.cert.name = "ratio"
    c = Fraction(c)
    if quadratic is None:
        quadratic = ref.ratio_concavity_quadratic(c)
    _, D = _symbols(ref.UD)
    mid = bounds.ratio_r1_branch(2, D, c)
    second = mid.partial("d").partial("d")
    target = scale * RatFunc(BiPoly.from_poly(quadratic, ref.UD)) / D**5
    b.step("second derivative", "d^2/ddelta^2 of the middle branch = 512 q(delta) / (9 delta^5)",
           second.equals(target), quadratic=quadratic)

    window = Interval(bounds.LOW_BREAK, bounds.HIGH_BREAK)
    q_sign = sign_on_interval(quadratic, window)
    ints = quadratic.primitive_integer_coeffs()
    b.step("concavity on [16/3, 64/9]", "q(delta) <= 0, so the middle branch is concave",
           q_sign is Sign.NONPOSITIVE, integer_coeffs_low_to_high=ints, sign=q_sign.value)

    lo, hi = bounds.LOW_BREAK, bounds.HIGH_BREAK
    at_lo = bounds.ratio_r1_branch(2, lo, c)
    at_hi = bounds.ratio_r1_branch(2, hi, c)
    agree = at_lo == bounds.ratio_r1_branch(1, lo, c) and at_hi == bounds.ratio_r1_branch(3, hi, c)
    b.step("endpoints", "middle branch >= 1 at 16/3 and 64/9, agreeing with the outer branches",
           at_lo >= 1 and at_hi >= 1 and agree, at_16_3=at_lo, at_64_9=at_hi)

    b.step("outer branches", "1 + c delta >= 1 and 6 (c + 1/delta) >= 6c >= 1 for delta > 0",
           c >= 0 and 6 * c >= 1, six_c=6 * c)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


@_guarded
def certify_theorem_assembly(b: _Builder, c: Fraction = bounds.C,
                             gaps: dict[int, Callable] | None = None,
                             prior: Sequence[Certificate] | None = None) -> None:
    """Glue: shifted bound minus p(delta) equals the gap of each branch, plus the reductions."""
    b.cert.name = "theorem"
    gaps = GAPS if gaps is None else gaps
    c = Fraction(c)
    U, H = _symbols()
    for k in (1, 2, 3, 4):
        lhs = U / 72 + bounds.p1_shifted_branch(k, U, H) - bounds.p_bound_formula(U + H, c)
        b.step(f"branch {k} identity", f"p_u(delta) - p(delta) equals d{k} on branch {k}",
               lhs.equals(gaps[k](U, H, c)))

    b2u, b1u, bu = bounds.b2_shift(U), bounds.b1_shift(U), bounds.b_shift(H)
    ok = bounds.q2(U, H, b2u).equals(bounds.p1_shifted_branch(1, U, H))
    ok &= bounds.q1(U, bu).equals(bounds.q2(U, H, bu))
    ok &= bounds.q2(U, H, bu).equals(bounds.p1_shifted_branch(2, U, H))
    ok &= bounds.q1(U, b1u).equals(bounds.p1_shifted_branch(3, U, H))
    b.step("branch values", "q2(b_{2;u}), q1(b_u) = q2(b_u), q1(b_{1;u}) are the closed-form branches", ok)

    # where each maximiser is admissible
    t1 = (b1u - bu).equals((1 - 4 * U) / (8 * H) * (H - bounds.threshold_r1(U)))
    t2 = (b2u - bu).equals((1 - 4 * U) / (6 * H) * (H - bounds.threshold_r2(U)))
    order = (bounds.threshold_r1(U) - bounds.threshold_r2(U)).equals(Fraction(16, 9) / (1 - 4 * U))
    b.step("branch thresholds",
           "b_{1;u} >= b_u iff h >= r1(u); b_{2;u} >= b_u iff h >= r2(u); r1 - r2 = (16/9)/(1-4u) > 0",
           t1 and t2 and order)

    _, D = _symbols(ref.UD)
    cleared = (D / 72 - _p_expr(D, c)) * 72 * (1 + c * D)
    b.step("case u >= delta", "(delta/72 - p(delta)) 72 (1 + c delta) = c delta^2 >= 0",
           cleared.equals(c * D * D) and c >= 0)

    b.step("reflection and density floor", "p1(delta)/delta = 1/72 on (0, 16/3], so f(0) >= 1/72",
           (bounds.p1_branch(1, D) / D).equals(Fraction(1, 72)))

    rng = random.Random(7)
    bad = None
    for _ in range(300):
        d = Fraction(rng.randint(1, 2000), 100)
        u = d * Fraction(rng.randint(1, 999), 1000)
        pu = bounds.p_u_bound(bounds.ShiftPair.from_delta(u, d))
        if pu < bounds.p_bound(d, c):
            bad = {"u": u, "delta": d, "p_u": pu}
            break
    b.step("sampled floor", "p_u(delta) >= p(delta) on 300 seeded rational pairs", bad is None,
           **({"counterexample": bad} if bad else {}))

    if prior is not None:
        missing = [n for n in ORDER[:-1] if n not in {p.name for p in prior}]
        failing = [p.name for p in prior if not p.passed]
        b.step("lemma certificates", "every lemma certificate passes",
               not missing and not failing, missing=missing, failing=failing)


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def run_all(select: Sequence[str] | None = None, c: Fraction = bounds.C) -> list[Certificate]:
    """Run the selected certificates (default: all seven) in dependency order."""
    chosen = list(ORDER) if select is None else [n for n in ORDER if n in set(select)]
    unknown = set(select or ()) - set(ORDER)
    if unknown:
        raise ValueError(f"unknown certificate(s): {sorted(unknown)}")
    c = Fraction(c)
    runners = {
        "lemma-ab": lambda: certify_lemma_ab(),
        "d1": lambda: certify_lemma1_d1(c=c),
        "d2": lambda: certify_lemma2_d2(c=c),
        "d3": lambda: certify_lemma3_d3(c=c),
        "d4": lambda: certify_lemma4_d4(c=c),
        "ratio": lambda: certify_ratio(c=c),
    }
    out: list[Certificate] = []
    for name in chosen:
        if name == "theorem":
            prior = [_run_missing(n, out, runners) for n in ORDER[:-1]]
            out.append(certify_theorem_assembly(c=c, prior=prior))
        else:
            out.append(runners[name]())
    return out


def _run_missing(name: str, done: list[Certificate], runners: dict) -> Certificate:
    for cert in done:
        if cert.name == name:
            return cert
    return runners[name]()


# ---------------------------------------------------------------------------
# single-coefficient mutations: each must turn its certificate red
# ---------------------------------------------------------------------------


def _mutated_gaps() -> dict[int, Callable]:
    def gap(u, h, c):
        return u / 71 + Fraction(1, 72) * (1 - 4 * u) ** 3 * h - _p_expr(u + h, c)

    return {**GAPS, 1: gap}


_U, _H = BiPoly.var("u", ref.UH), BiPoly.var("h", ref.UH)
_Uu, _Dd = BiPoly.var("u", ref.UD), BiPoly.var("d", ref.UD)

MUTATIONS: dict[str, tuple[str, Callable[[], Certificate]]] = {
    "lemma-ab": ("kernel doubled",
                 lambda: certify_lemma_ab(kernel=lambda d, b_, x: 2 * bounds.r_kernel(d, b_, x))),
    "d1": ("constant-in-h term 419 u^2 -> 420 u^2",
           lambda: certify_lemma1_d1(d1=ref.D1 + _U**2)),
    "d2": ("D21 constant -3432448 -> -3432449",
           lambda: certify_lemma2_d2(d21=ref.D21 - 1)),
    "d3": ("intercept constant 600 -> -600 (the 6 in 100(96u^2 - 47u + 6) flipped)",
           lambda: certify_lemma3_d3(d3=ref.D3 - 1200)),
    "d4": ("c = 419/100 -> 39/10",
           lambda: certify_lemma4_d4(c=Fraction(39, 10))),
    "ratio": ("concavity quadratic constant -64 -> -63",
              lambda: certify_ratio(quadratic=ref.ratio_concavity_quadratic(bounds.C) + 1)),
    "theorem": ("branch-1 gap u/72 -> u/71",
                lambda: certify_theorem_assembly(gaps=_mutated_gaps())),
}


def run_mutation(name: str) -> Certificate:
    """Run ``name`` with its documented one-coefficient mutation applied."""
    try:
        _label, fn = MUTATIONS[name]
    except KeyError:
        raise ValueError(f"no mutation for {name!r}") from None
    return fn()
