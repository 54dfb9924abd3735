"""Exact polynomial arithmetic over the rationals.

Univariate (:class:`Poly`) and bivariate (:class:`BiPoly`) polynomials with
:class:`fractions.Fraction` coefficients, rational functions in two variables
(:class:`RatFunc`), rational-endpoint intervals, Sturm sequences, Sylvester
resultants, discriminants and certified real-root isolation.

Nothing in this module touches floating point except the ``float()``
conveniences used for display.  Infinite interval endpoints are written as
``math.inf``/``-math.inf``; every finite endpoint is a ``Fraction``.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from itertools import product
from numbers import Rational
from typing import Callable, Iterable, Sequence

INF = math.inf


def as_fraction(x) -> Fraction:
    """Coerce an int, Fraction or decimal/ratio string to a Fraction.

    Floats are rejected: a float would smuggle rounding into a certificate.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# Univariate polynomials
# ---------------------------------------------------------------------------


class Poly:
    """Dense univariate polynomial; ``coeffs[i]`` multiplies ``var**i``."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable = (), var: str = "x"):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self.var = var

    # construction -----------------------------------------------------
    @classmethod
    def x(cls, var: str = "x") -> "Poly":
        return cls([0, 1], var)

    @classmethod
    def const(cls, c, var: str = "x") -> "Poly":
        return cls([c], var)

    # basic properties ---------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __repr__(self) -> str:
        if self.is_zero():
            return f"Poly(0, {self.var!r})"
        return f"Poly({[str(c) for c in self.coeffs]}, {self.var!r})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else (self.var if i == 1 else f"{self.var}^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' + mono if mono else ''}"
            terms.append(("-" if c < 0 else "+", body))
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return head + "".join(f" {s} {b}" for s, b in terms[1:])

    def __eq__(self, other) -> bool:
        if _is_scalar(other):
            other = Poly.const(other, self.var)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if _is_scalar(other):
            return Poly.const(other, self.var)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coeff(i) + other.coeff(i) for i in range(n)], self.var)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if _is_scalar(other):
            c = Fraction(other)
            return Poly([c * a for a in self.coeffs], self.var)
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Poly((), self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out, self.var)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        out = Poly.const(1, self.var)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, x):
        """Horner evaluation; ``x`` may be any ring element (Fraction, Interval...)."""
        if self.is_zero():
            return Fraction(0) if _is_scalar(x) else x * 0
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly((), self.var), self
        q = [Fraction(0)] * (dq + 1)
        lc = other.lc
        for k in range(dq, -1, -1):
            t = rem[k + other.degree] / lc
            q[k] = t
            if t:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= t * b
        return Poly(q, self.var), Poly(rem[: other.degree], self.var)

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def exact_div(self, other) -> "Poly":
        """Division that must leave no remainder."""
        if _is_scalar(other):
            return self / other
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    # calculus and normalisation -------------------------------------------
    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:], self.var)

    def monic(self) -> "Poly":
        return self / self.lc if not self.is_zero() else self

    def scaled_positive(self) -> "Poly":
        """Divide by ``|lc|``: keeps every sign, tames coefficient growth."""
        return self / abs(self.lc) if not self.is_zero() else self

    def compose(self, inner: "Poly") -> "Poly":
        acc = Poly((), inner.var)
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def primitive_integer_coeffs(self) -> list[int]:
        """Integer coefficient vector proportional (positive factor) to ``self``."""
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        return [v // g for v in ints] if g else ints


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero if both inputs vanish)."""
    while not b.is_zero():
        a, b = b, (a % b).scaled_positive()
    return a.monic()


def poly_eval(p: Poly, x) -> Fraction:
    return p(as_fraction(x))


def poly_derivative(p: Poly) -> Poly:
    return p.derivative()


def squarefree_part(p: Poly) -> Poly:
    """``p / gcd(p, p')`` made monic; same distinct roots, all simple."""
    if p.is_zero():
        raise ValueError("zero polynomial has no squarefree part")
    if p.degree <= 0:
        return Poly.const(1, p.var)
    return p.exact_div(poly_gcd(p, p.derivative())).monic()


def squarefree_decomposition(p: Poly) -> list[Poly]:
    """Monic ``[a1, a2, ...]`` with ``p = lc * prod(a_k**k)``, the a_k squarefree and coprime."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    # g[k] collects the roots of multiplicity > k, each with multiplicity reduced by k
    g = [p.monic()]
    while g[-1].degree > 0:
        g.append(poly_gcd(g[-1], g[-1].derivative()))
    # q[k] = g[k-1]/g[k] has every root of multiplicity >= k exactly once
    q = [g[k - 1].exact_div(g[k]) for k in range(1, len(g))]
    q.append(Poly.const(1, p.var))
    return [q[k].exact_div(q[k + 1]).monic() for k in range(len(q) - 1)]


def odd_multiplicity_part(p: Poly) -> Poly:
    """Product of the squarefree factors of odd multiplicity: the sign-change roots."""
    out = Poly.const(1, p.var)
    for k, a in enumerate(squarefree_decomposition(p), start=1):
        if k % 2:
            out = out * a
    return out


def deflate(p: Poly, root) -> tuple[Poly, int]:
    """Strip every factor ``(x - root)``; returns the cofactor and the multiplicity."""
    r = as_fraction(root)
    lin = Poly([-r, 1], p.var)
    m = 0
    while not p.is_zero() and p(r) == 0:
        p = p.exact_div(lin)
        m += 1
    return p, m


def cauchy_bound(p: Poly) -> Fraction:
    """Every real root of ``p`` lies strictly inside ``(-B, B)``."""
    if p.degree < 1:
        return Fraction(1)
    return 1 + max(abs(c / p.lc) for c in p.coeffs[:-1])


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------


class Interval:
    """Interval with Fraction (or infinite) endpoints and per-endpoint openness.

    Arithmetic (``+ - *``, integer powers) treats both operands as closed
    and returns the closed hull of the exact image; it is used for rigorous
    range enclosures of polynomials over boxes.
    """

    __slots__ = ("lo", "hi", "lo_open", "hi_open")

    def __init__(self, lo, hi, lo_open: bool = False, hi_open: bool = False):
        lo = lo if isinstance(lo, float) and math.isinf(lo) else as_fraction(lo)
        hi = hi if isinstance(hi, float) and math.isinf(hi) else as_fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval: lo={lo} > hi={hi}")
        if lo == hi and (lo_open or hi_open):
            raise ValueError("a degenerate interval must be closed")
        # infinite ends are always open
        self.lo, self.hi = lo, hi
        self.lo_open = bool(lo_open) or lo == -INF
        self.hi_open = bool(hi_open) or hi == INF

    @classmethod
    def open(cls, lo, hi) -> "Interval":
        return cls(lo, hi, True, True)

    @classmethod
    def closed(cls, lo, hi) -> "Interval":
        return cls(lo, hi)

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x)

    @classmethod
    def around(cls, x, radius) -> "Interval":
        x, radius = as_fraction(x), as_fraction(radius)
        return cls(x - radius, x + radius)

    def __repr__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo}, {self.hi}{right}"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Interval):
            return NotImplemented
        return (self.lo, self.hi, self.lo_open, self.hi_open) == (
            other.lo, other.hi, other.lo_open, other.hi_open)

    def __hash__(self) -> int:
        return hash((self.lo, self.hi, self.lo_open, self.hi_open))

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def is_bounded(self) -> bool:
        return not (math.isinf(self.lo) or math.isinf(self.hi))

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        if not self.is_bounded:
            raise ValueError("unbounded interval has no midpoint")
        return (self.lo + self.hi) / 2

    def interior(self) -> "Interval":
        return self if self.is_point else Interval.open(self.lo, self.hi)

    def contains(self, x) -> bool:
        above = x > self.lo or (x == self.lo and not self.lo_open)
        below = x < self.hi or (x == self.hi and not self.hi_open)
        return above and below

    # closed-hull arithmetic ---------------------------------------------
    @staticmethod
    def _wrap(x) -> "Interval":
        return x if isinstance(x, Interval) else Interval.point(x)

    def __add__(self, other):
        o = self._wrap(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        o = self._wrap(other)
        ps = [a * b for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        return Interval(min(ps), max(ps))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k == 0:
            return Interval.point(1)
        if k % 2 or self.lo >= 0:
            return Interval(min(self.lo**k, self.hi**k), max(self.lo**k, self.hi**k))
        if self.hi <= 0:
            return Interval(self.hi**k, self.lo**k)
        return Interval(0, max(self.lo**k, self.hi**k))


# ---------------------------------------------------------------------------
# Sturm sequences, root counting and isolation
# ---------------------------------------------------------------------------


def sturm_sequence(p: Poly) -> list[Poly]:
    """Canonical Sturm chain ``p, p', -rem, ...``.

    Remainders are divided by ``|lc|``; positive scaling does not change
    sign-variation counts and keeps the coefficients small.
    """
    if p.is_zero():
        raise ValueError("Sturm sequence of the zero polynomial")
    seq = [p]
    d = p.derivative()
    if d.is_zero():
        return seq
    seq.append(d)
    while True:
        r = -(seq[-2] % seq[-1])
        if r.is_zero():
            return seq
        seq.append(r.scaled_positive())


def _sign_at(p: Poly, x) -> int:
    if isinstance(x, float) and math.isinf(x):
        s = _sign(p.lc)
        return s if (x > 0 or p.degree % 2 == 0) else -s
    return _sign(p(x))


def sign_variations(seq: Sequence[Poly], x) -> int:
    signs = [s for s in (_sign_at(q, x) for q in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: Poly, iv: Interval) -> int:
    """Exact number of distinct real roots of ``p`` in ``iv``.

    Rational endpoints that are roots are deflated away exactly (the root
    is counted iff that endpoint is closed), so the Sturm count is always
    taken between non-roots.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial vanishes everywhere")
    if iv.is_point:
        return int(p(iv.lo) == 0)
    q, extra = p, 0
    for end, is_open in ((iv.lo, iv.lo_open), (iv.hi, iv.hi_open)):
        if isinstance(end, float):
            continue
        q, m = deflate(q, end)
        if m and not is_open:
            extra += 1
    if q.degree < 1:
        return extra
    seq = sturm_sequence(q)
    return sign_variations(seq, iv.lo) - sign_variations(seq, iv.hi) + extra


def _finite_hull(p: Poly, iv: Interval) -> tuple[Fraction, Fraction]:
    b = cauchy_bound(p)
    lo = -b if iv.lo == -INF else iv.lo
    hi = b if iv.hi == INF else iv.hi
    if iv.lo == -INF:
        lo = min(lo, hi - 1)
    if iv.hi == INF:
        hi = max(hi, lo + 1)
    return lo, hi


def isolate_roots(p: Poly, iv: Interval, width) -> list[Interval]:
    """Disjoint increasing isolating intervals, one per distinct root of ``p`` in ``iv``.

    Works on the squarefree part and refines by exact bisection until every
    interval has width at most ``width``.  A bisection point that happens to
    be a root is returned as a closed point interval.
    """
    width = as_fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    q = squarefree_part(p)
    if q.degree < 1:
        return []
    if iv.is_point:
        return [iv] if q(iv.lo) == 0 else []
    lo, hi = _finite_hull(q, iv)
    out: list[Interval] = []
    if not iv.lo_open and q(lo) == 0:
        out.append(Interval.point(lo))

    def rec(a: Fraction, b: Fraction, n: int) -> None:
        if n == 0:
            return
        if n == 1 and b - a <= width:
            out.append(Interval.open(a, b))
            return
        m = (a + b) / 2
        left = count_roots(q, Interval.open(a, m))
        if left:
            rec(a, m, left)
        if q(m) == 0:
            out.append(Interval.point(m))
            left += 1
        if n - left:
            rec(m, b, n - left)

    rec(lo, hi, count_roots(q, Interval.open(lo, hi)))
    if not iv.hi_open and q(hi) == 0:
        out.append(Interval.point(hi))
    return out


class Sign(str, enum.Enum):
    NONNEGATIVE = "nonnegative"
    NONPOSITIVE = "nonpositive"
    MIXED = "mixed"


def _interior_samples(iv: Interval) -> Iterable[Fraction]:
    if iv.is_bounded:
        w = iv.hi - iv.lo
        k = 1
        while True:
            yield iv.lo + w * Fraction(k, k + 1)
            k += 1
    elif iv.lo == -INF and iv.hi == INF:
        k = 0
        while True:
            yield Fraction(k)
            k += 1
    elif iv.lo == -INF:
        k = 1
        while True:
            yield iv.hi - k
            k += 1
    else:
        k = 1
        while True:
            yield iv.lo + k
            k += 1


def sign_on_interval(p: Poly, iv: Interval) -> Sign:
    """Certified weak sign of ``p`` over ``iv``.

    ``p`` can only change sign at a root of odd multiplicity; if none lies
    in the interior, one exact evaluation at a non-root interior point
    fixes the sign everywhere on ``iv`` (closed endpoints by continuity).
    """
    if p.is_zero():
        raise ValueError("sign of the zero polynomial is not classified")
    if iv.is_point:
        s = _sign(p(iv.lo))
        if s == 0:
            return Sign.NONNEGATIVE
        return Sign.NONNEGATIVE if s > 0 else Sign.NONPOSITIVE
    odd = odd_multiplicity_part(p)
    if odd.degree >= 1 and count_roots(odd, iv.interior()) > 0:
        return Sign.MIXED
    for x in _interior_samples(iv):
        v = p(x)
        if v:
            return Sign.NONNEGATIVE if v > 0 else Sign.NONPOSITIVE
    raise AssertionError("unreachable")


def is_positive_on(p: Poly, iv: Interval) -> bool:
    """Strict positivity: weakly nonnegative and root-free on ``iv``."""
    return (not p.is_zero()) and sign_on_interval(p, iv) is Sign.NONNEGATIVE and count_roots(p, iv) == 0


def is_negative_on(p: Poly, iv: Interval) -> bool:
    return is_positive_on(-p, iv)


# ---------------------------------------------------------------------------
# Bivariate polynomials
# ---------------------------------------------------------------------------


class BiPoly:
    """Polynomial in two named variables, stored as ``{(i, j): coeff}``.

    ``(i, j)`` are the exponents of ``vars[0]`` and ``vars[1]``; zero
    coefficients are never stored.
    """

    __slots__ = ("terms", "vars")

    def __init__(self, terms: dict | None = None, vars: tuple[str, str] = ("u", "h")):
        if len(vars) != 2 or vars[0] == vars[1]:
            raise ValueError("BiPoly needs two distinct variable names")
        self.vars = tuple(vars)
        self.terms: dict[tuple[int, int], Fraction] = {}
        for k, c in (terms or {}).items():
            c = as_fraction(c)
            if c:
                self.terms[(int(k[0]), int(k[1]))] = c

    @classmethod
    def var(cls, name: str, vars: tuple[str, str] = ("u", "h")) -> "BiPoly":
        if name not in vars:
            raise ValueError(f"unknown variable {name!r}; have {vars}")
        return cls({(1, 0) if name == vars[0] else (0, 1): 1}, vars)

    @classmethod
    def const(cls, c, vars: tuple[str, str] = ("u", "h")) -> "BiPoly":
        return cls({(0, 0): c}, vars)

    @classmethod
    def from_poly(cls, p: Poly, vars: tuple[str, str] = ("u", "h")) -> "BiPoly":
        if p.var not in vars:
            raise ValueError(f"variable {p.var!r} not in {vars}")
        idx = vars.index(p.var)
        return cls({((i, 0) if idx == 0 else (0, i)): c for i, c in enumerate(p.coeffs)}, vars)

    def _index(self, name: str) -> int:
        if name not in self.vars:
            raise ValueError(f"unknown variable {name!r}; have {self.vars}")
        return self.vars.index(name)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self, name: str) -> int:
        k = self._index(name)
        return max((e[k] for e in self.terms), default=-1)

    def __repr__(self) -> str:
        items = ", ".join(f"{k}: {v}" for k, v in sorted(self.terms.items()))
        return f"BiPoly({{{items}}}, {self.vars})"

    def __eq__(self, other) -> bool:
        if _is_scalar(other):
            other = BiPoly.const(other, self.vars)
        if isinstance(other, Poly):
            other = BiPoly.from_poly(other, self.vars)
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.vars, frozenset(self.terms.items())))

    def _coerce(self, other):
        if isinstance(other, BiPoly):
            if other.vars != self.vars:
                raise ValueError(f"variable mismatch {self.vars} vs {other.vars}")
            return other
        if _is_scalar(other):
            return BiPoly.const(other, self.vars)
        if isinstance(other, Poly):
            return BiPoly.from_poly(other, self.vars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return BiPoly(out, self.vars)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({k: -c for k, c in self.terms.items()}, self.vars)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, RatFunc):
            return NotImplemented
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, Fraction(0)) + a * b
        return BiPoly(out, self.vars)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (1 / Fraction(other))
        if isinstance(other, (BiPoly, RatFunc)):
            return RatFunc(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if _is_scalar(other):
            return RatFunc(BiPoly.const(other, self.vars), self)
        return NotImplemented

    def __pow__(self, k: int):
        out = BiPoly.const(1, self.vars)
        for _ in range(k):
            out = out * self
        return out

    def partial(self, name: str) -> "BiPoly":
        """Exact partial derivative with respect to ``name``."""
        k = self._index(name)
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = (e[0] - 1, e[1]) if k == 0 else (e[0], e[1] - 1)
                out[ne] = c * e[k]
        return BiPoly(out, self.vars)

    def __call__(self, **values):
        """Evaluate at ``u=..., h=...`` (any ring elements: Fractions, Intervals)."""
        if set(values) != set(self.vars):
            raise ValueError(f"need values for exactly {self.vars}")
        x, y = values[self.vars[0]], values[self.vars[1]]
        acc = Fraction(0)
        for (i, j), c in sorted(self.terms.items()):
            acc = acc + c * (x**i) * (y**j)
        return acc

    def coefficients_in(self, name: str) -> list[Poly]:
        """View as a polynomial in ``name``: ``[c0, c1, ...]`` with Poly coefficients in the other variable."""
        k = self._index(name)
        other = self.vars[1 - k]
        deg = self.degree(name)
        buckets: list[dict[int, Fraction]] = [dict() for _ in range(deg + 1)]
        for e, c in self.terms.items():
            buckets[e[k]][e[1 - k]] = c
        return [Poly([b.get(i, 0) for i in range(max(b, default=-1) + 1)], other) for b in buckets]

    def specialize(self, name: str, value) -> Poly:
        """Substitute ``name = value`` (exact rational) and return a Poly in the other variable."""
        value = as_fraction(value)
        out = Poly((), self.vars[1 - self._index(name)])
        for i, c in enumerate(self.coefficients_in(name)):
            out = out + c * (value**i)
        return out

    def substitute_poly(self, name: str, p: Poly) -> Poly:
        """Substitute a univariate polynomial in the *other* variable for ``name``."""
        k = self._index(name)
        other = self.vars[1 - k]
        if p.var != other:
            raise ValueError(f"substituted polynomial must be in {other!r}")
        out = Poly((), other)
        for i, c in enumerate(self.coefficients_in(name)):
            out = out + c * p**i
        return out

    def to_poly(self) -> Poly:
        """Convert to a Poly when only one variable actually occurs."""
        used = [v for v in self.vars if self.degree(v) > 0]
        if len(used) > 1:
            raise ValueError("polynomial depends on both variables")
        keep = used[0] if used else self.vars[0]
        return self.specialize(self.vars[1 - self._index(keep)], 0)


def bipoly_partial(p: BiPoly, which: str) -> BiPoly:
    return p.partial(which)


def bipoly_range(p: BiPoly, **boxes: Interval) -> Interval:
    """Rigorous enclosure of ``p`` over a box by term-wise interval evaluation."""
    return p(**{k: Interval._wrap(v) for k, v in boxes.items()})


# ---------------------------------------------------------------------------
# Rational functions (for symbolic identity checks)
# ---------------------------------------------------------------------------


class RatFunc:
    """Quotient ``num/den`` of two BiPolys; no cancellation is attempted.

    Used to push the closed-form bound formulas through symbolically and
    compare them with polynomial targets by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: BiPoly, den: BiPoly | None = None):
        self.num = num
        self.den = den if den is not None else BiPoly.const(1, num.vars)
        if self.den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")

    @classmethod
    def var(cls, name: str, vars: tuple[str, str] = ("u", "h")) -> "RatFunc":
        return cls(BiPoly.var(name, vars))

    @property
    def vars(self) -> tuple[str, str]:
        return self.num.vars

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (BiPoly, Poly)) or _is_scalar(other):
            return RatFunc(self.num._coerce(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.den == self.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        return RatFunc(self.num**k, self.den**k)

    def partial(self, name: str) -> "RatFunc":
        return RatFunc(
            self.num.partial(name) * self.den - self.num * self.den.partial(name),
            self.den * self.den,
        )

    def __call__(self, **values):
        return self.num(**values) / self.den(**values)

    def equals(self, other) -> bool:
        """Exact identity test by cross-multiplication."""
        o = self._coerce(other)
        return (self.num * o.den - o.num * self.den).is_zero()

    def times_poly(self, p: BiPoly) -> "RatFunc":
        return self * p


# ---------------------------------------------------------------------------
# Determinants, resultants, discriminants
# ---------------------------------------------------------------------------


def _bareiss_det(matrix: list[list], zero, one, exact_div: Callable):
    """Fraction-free determinant over an integral domain (Bareiss elimination)."""
    m = [row[:] for row in matrix]
    n = len(m)
    if n == 0:
        return one
    sign = 1
    prev = one
    for k in range(n - 1):
        if _is_zero(m[k][k]):
            for r in range(k + 1, n):
                if not _is_zero(m[r][k]):
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return zero
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = exact_div(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, Poly) else x == 0


def sylvester_matrix(f: Sequence, g: Sequence, zero) -> list[list]:
    """Sylvester matrix from coefficient lists ordered high degree first.

    Rows: ``deg g`` shifted copies of ``f`` followed by ``deg f`` copies of ``g``.
    """
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([zero] * i + list(f) + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + list(g) + [zero] * (size - n - 1 - i))
    return rows


def _resultant_univariate(p: Poly, q: Poly) -> Fraction:
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant with the zero polynomial")
    if p.degree == 0 and q.degree == 0:
        return Fraction(1)
    mat = sylvester_matrix(p.coeffs[::-1], q.coeffs[::-1], Fraction(0))
    return _bareiss_det(mat, Fraction(0), Fraction(1), lambda a, b: a / b)


def resultant(p, q, eliminate: str | None = None):
    """Sylvester resultant.

    Two Polys give a Fraction.  Two BiPolys give a Poly in the variable
    that is *not* ``eliminate``; the determinant is taken with Bareiss
    elimination over the polynomial ring, so it is exact.
    """
    if isinstance(p, Poly) and isinstance(q, Poly):
        return _resultant_univariate(p, q)
    if not (isinstance(p, BiPoly) and isinstance(q, BiPoly)):
        raise TypeError("resultant needs two Polys or two BiPolys")
    if p.vars != q.vars:
        raise ValueError("resultant operands must share their variables")
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant with the zero polynomial")
    if eliminate is None:
        raise ValueError("name the variable to eliminate")
    pc = p.coefficients_in(eliminate)
    qc = q.coefficients_in(eliminate)
    if len(pc) < 2 or len(qc) < 2:
        raise ValueError("both operands need positive degree in the eliminated variable")
    other = p.vars[1 - p._index(eliminate)]
    zero, one = Poly((), other), Poly.const(1, other)
    mat = sylvester_matrix(pc[::-1], qc[::-1], zero)
    return _bareiss_det(mat, zero, one, lambda a, b: a.exact_div(b))


def discriminant(p, var: str | None = None):
    """``(-1)^(n(n-1)/2) * res(p, p') / lc(p)``.

    For a Poly returns a Fraction; for a BiPoly viewed as a polynomial in
    ``var`` returns a Poly in the other variable.
    """
    if isinstance(p, Poly):
        n = p.degree
        if n < 2:
            raise ValueError("discriminant needs degree >= 2")
        r = _resultant_univariate(p, p.derivative())
        s = -1 if (n * (n - 1) // 2) % 2 else 1
        return s * r / p.lc
    if isinstance(p, BiPoly):
        if var is None:
            raise ValueError("name the polynomial variable of the BiPoly")
        n = p.degree(var)
        if n < 2:
            raise ValueError("discriminant needs degree >= 2")
        r = resultant(p, p.partial(var), eliminate=var)
        s = -1 if (n * (n - 1) // 2) % 2 else 1
        return (r * s).exact_div(p.coefficients_in(var)[-1])
    raise TypeError("discriminant of a Poly or BiPoly")


def grid_points(lo, hi, n: int) -> list[Fraction]:
    """``n`` evenly spaced exact rationals from ``lo`` to ``hi`` inclusive."""
    lo, hi = as_fraction(lo), as_fraction(hi)
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * Fraction(k, n - 1) for k in range(n)]


def box_grid(*axes: Sequence[Fraction]):
    return product(*axes)
