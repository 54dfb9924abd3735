"""Closed-form bounds, evaluated in exact rational arithmetic.

All public functions take exact rationals (``int``, ``Fraction`` or a
decimal/ratio string) and return ``Fraction``.  The ``*_branch`` helpers are
written with plain arithmetic operators only, so they also accept the
symbolic :class:`~lcbound.poly_exact.RatFunc` values the certificates feed
through them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .poly_exact import as_fraction

C = Fraction(419, 100)
QUARTER = Fraction(1, 4)
LOW_BREAK = Fraction(16, 3)
HIGH_BREAK = Fraction(64, 9)


def _positive(x, name: str) -> Fraction:
    x = as_fraction(x)
    if x <= 0:
        raise ValueError(f"{name} must be > 0, got {x}")
    return x


def _nonneg(x, name: str) -> Fraction:
    x = as_fraction(x)
    if x < 0:
        raise ValueError(f"{name} must be >= 0, got {x}")
    return x


@dataclass(frozen=True)
class ShiftPair:
    """Peak location ``u`` and remaining width ``h = delta - u``."""

    u: Fraction
    h: Fraction

    def __post_init__(self):
        object.__setattr__(self, "u", _nonneg(self.u, "u"))
        object.__setattr__(self, "h", _positive(self.h, "h"))

    @classmethod
    def from_delta(cls, u, delta) -> "ShiftPair":
        u, delta = as_fraction(u), as_fraction(delta)
        return cls(u, delta - u)

    @property
    def delta(self) -> Fraction:
        return self.u + self.h


# ---------------------------------------------------------------------------
# the main bound and the kernel inequality
# ---------------------------------------------------------------------------


def p_bound(delta, c=C) -> Fraction:
    """delta / (72 (1 + c delta))."""
    delta = _positive(delta, "delta")
    return p_bound_formula(delta, as_fraction(c))


def p_bound_formula(delta, c=C):
    return delta / (72 * (1 + c * delta))


def a_threshold(delta) -> Fraction:
    """``b`` at which the two branches of :func:`a_factor` meet."""
    return Fraction(8, 9) / _positive(delta, "delta")


def a_factor(delta, b) -> Fraction:
    """min(16b/3, 6 b^2 delta); the 16b/3 branch is taken iff b >= 8/(9 delta)."""
    delta = _positive(delta, "delta")
    b = _nonneg(b, "b")
    if b >= a_threshold(delta):
        return 16 * b / 3
    return 6 * b * b * delta


def r_kernel(delta, b, x) -> Fraction:
    """a(delta, b) (x^2/2 - b x^3/3), a lower bound for min(delta, x) on x >= 0."""
    x = _nonneg(x, "x")
    b = _nonneg(b, "b")
    return a_factor(delta, b) * (x * x / 2 - b * x**3 / 3)


def p2(delta, b) -> Fraction:
    return a_factor(delta, b) * (QUARTER - as_fraction(b))


# ---------------------------------------------------------------------------
# monotone-density bound and its maximiser
# ---------------------------------------------------------------------------


def p1_branch(k: int, delta):
    if k == 1:
        return delta / 72
    if k == 2:
        return 32 * (9 * delta - 32) / (243 * delta * delta)
    if k == 3:
        return Fraction(1, 12) + 0 * delta
    raise ValueError(f"p1 has branches 1..3, not {k}")


def p1_branch_index(delta) -> int:
    delta = _positive(delta, "delta")
    if delta <= LOW_BREAK:
        return 1
    if delta <= HIGH_BREAK:
        return 2
    return 3


def p1(delta) -> Fraction:
    """Three-branch bound for densities that are nonincreasing on [0, inf)."""
    delta = _positive(delta, "delta")
    return p1_branch(p1_branch_index(delta), delta)


def b_star_branch(k: int, delta):
    if k == 1:
        return Fraction(1, 6) + 0 * delta
    if k == 2:
        return 8 / (9 * delta)
    if k == 3:
        return Fraction(1, 8) + 0 * delta
    raise ValueError(f"b_star has branches 1..3, not {k}")


def b_star(delta) -> Fraction:
    delta = _positive(delta, "delta")
    return b_star_branch(p1_branch_index(delta), delta)


def ratio_r1_branch(k: int, delta, c=C):
    if k == 1:
        return 1 + c * delta
    if k == 2:
        return 256 * (9 * delta - 32) * (1 + c * delta) / (27 * delta**3)
    if k == 3:
        return 6 * (c + 1 / delta)
    raise ValueError(f"ratio_r1 has branches 1..3, not {k}")


def ratio_r1(delta, c=C) -> Fraction:
    """p1(delta) / p(delta), by the branch-wise closed forms."""
    delta = _positive(delta, "delta")
    return ratio_r1_branch(p1_branch_index(delta), delta, as_fraction(c))


# ---------------------------------------------------------------------------
# shifted family (density increasing on [0, u], decreasing afterwards)
# ---------------------------------------------------------------------------


def threshold_r1(u):
    return Fraction(64, 9) / (1 - 4 * u)


def threshold_r2(u):
    return Fraction(16, 3) / (1 - 4 * u)


def b_shift(h):
    return Fraction(8, 9) / h


def b1_shift(u):
    return (QUARTER - u) / 2


def b2_shift(u):
    return 2 * (QUARTER - u) / 3


def q1(u, b):
    return Fraction(16, 3) * b * (QUARTER - u - b)


def q2(u, h, b):
    return 6 * b * b * (QUARTER - u - b) * h


def p2_shifted(shift: ShiftPair, b) -> Fraction:
    """a(h, b) (1/4 - u - b)."""
    b = _nonneg(b, "b")
    return a_factor(shift.h, b) * (QUARTER - shift.u - b)


def p1_shifted_branch(k: int, u, h):
    if k == 1:
        return (1 - 4 * u) ** 3 * h / 72
    if k == 2:
        return Fraction(128, 27) / h * (QUARTER - u - Fraction(8, 9) / h)
    if k == 3:
        return (1 - 4 * u) ** 2 / 12
    if k == 4:
        return Fraction(0) + 0 * u
    raise ValueError(f"p1_shifted has branches 1..4, not {k}")


def p1_shifted_branch_index(shift: ShiftPair) -> int:
    u, h = shift.u, shift.h
    if u >= QUARTER:
        return 4
    if h <= threshold_r2(u):
        return 1
    if h <= threshold_r1(u):
        return 2
    return 3


def p1_shifted_argmax(shift: ShiftPair):
    """Maximiser in b of p2_shifted for the active branch (None when u >= 1/4)."""
    k = p1_shifted_branch_index(shift)
    return {1: b2_shift(shift.u), 2: b_shift(shift.h), 3: b1_shift(shift.u), 4: None}[k]


def p1_shifted(shift: ShiftPair) -> Fraction:
    """max over b >= 0 of p2_shifted, in closed form."""
    return p1_shifted_branch(p1_shifted_branch_index(shift), shift.u, shift.h)


def p_u_bound(shift: ShiftPair) -> Fraction:
    """u/72 + p1_shifted: lower bound when the density peaks at u in (0, delta)."""
    if shift.u <= 0:
        raise ValueError("p_u_bound needs 0 < u < delta")
    return shift.u / 72 + p1_shifted(shift)


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


@dataclass
class BoundReport:
    delta: Fraction
    values: dict[str, Fraction] = field(default_factory=dict)
    branches: dict[str, str] = field(default_factory=dict)
    final: Fraction = Fraction(0)


_P1_TAGS = {1: "delta<=16/3", 2: "16/3<=delta<=64/9", 3: "delta>=64/9"}
_SHIFT_TAGS = {1: "h<=r2(u)", 2: "r2(u)<=h<=r1(u)", 3: "h>=r1(u)", 4: "u>=1/4"}


def bound_report(delta, u=None, b=None, c=C) -> BoundReport:
    """Every intermediate quantity for one delta (optionally one u and one b)."""
    delta = _positive(delta, "delta")
    rep = BoundReport(delta=delta)
    v = rep.values
    v["p"] = p_bound(delta, c)
    v["p1"] = p1(delta)
    v["b_star"] = b_star(delta)
    v["ratio_r1"] = ratio_r1(delta, c)
    rep.branches["p1"] = _P1_TAGS[p1_branch_index(delta)]
    if b is not None:
        b = _nonneg(b, "b")
        v["a"] = a_factor(delta, b)
        v["p2"] = p2(delta, b)
        rep.branches["a"] = "16b/3" if b >= a_threshold(delta) else "6b^2*delta"
    rep.final = v["p"]
    if u is not None:
        u = as_fraction(u)
        if not 0 < u < delta:
            raise ValueError("u must satisfy 0 < u < delta")
        shift = ShiftPair.from_delta(u, delta)
        k = p1_shifted_branch_index(shift)
        rep.branches["p1_shifted"] = _SHIFT_TAGS[k]
        if u < QUARTER:
            v["threshold_r1"] = threshold_r1(u)
            v["threshold_r2"] = threshold_r2(u)
            v["b_argmax"] = p1_shifted_argmax(shift)
        v["p1_shifted"] = p1_shifted(shift)
        v["p_u"] = p_u_bound(shift)
        if b is not None:
            v["p2_shifted"] = p2_shifted(shift, b)
    return rep
