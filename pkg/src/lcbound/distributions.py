"""Library of log-concave laws, standardized to mean 0 and variance 1.

Double precision is used throughout: these are empirical sanity layers for
the exact certificates.  CDFs are closed form where the family has one
(error function, regularized incomplete gamma/beta); everything else goes
through adaptive Gauss-Kronrod quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from . import bounds

FAMILIES = ("gaussian", "exponential", "laplace", "logistic", "uniform", "triangular", "gamma", "beta")
DEFAULT_DELTAS = (0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0)

DENSITY_FLOOR = 1 / 72
BOBKOV_LEDOUX_FLOOR = 1 / (math.e * math.sqrt(3))
MEAN_ABS_FLOOR = 0.5
KEILSON_TOL = 1e-9
QUAD_EPS = 1e-13


def _quad(fn: Callable[[float], float], lo: float, hi: float, points=None) -> float:
    if lo >= hi:
        return 0.0
    kw = {"epsabs": QUAD_EPS, "epsrel": 1e-12, "limit": 500}
    if points is not None and math.isfinite(lo) and math.isfinite(hi):
        pts = [p for p in points if lo < p < hi]
        if pts:
            kw["points"] = pts
    elif points is not None:
        # QUADPACK refuses break points on infinite ranges; split by hand
        pts = sorted(p for p in points if lo < p < hi)
        if pts:
            edges = [lo, *pts, hi]
            return sum(_quad(fn, a, b) for a, b in zip(edges, edges[1:]))
    val, _err = integrate.quad(fn, lo, hi, **kw)
    return val


@dataclass(frozen=True)
class LogConcaveDist:
    """A log-concave law with density, cdf and its first two moments."""

    tag: str
    params: dict
    pdf: Callable[[float], float]
    logpdf: Callable[[float], float]
    cdf: Callable[[float], float] | None
    mean: float
    variance: float
    support: tuple[float, float]
    mode: tuple[float, float]
    kinks: tuple[float, ...] = ()

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def prob(self, a: float, b: float) -> float:
        if self.cdf is not None:
            return self.cdf(b) - self.cdf(a)
        lo, hi = max(a, self.support[0]), min(b, self.support[1])
        return _quad(self.pdf, lo, hi, self.kinks)

    def expect(self, fn: Callable[[float], float], split: Sequence[float] = ()) -> float:
        lo, hi = self.support
        return _quad(lambda x: fn(x) * self.pdf(x), lo, hi, tuple(self.kinks) + tuple(split))


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def _gaussian(mu: float = 0.0, sigma: float = 1.0) -> LogConcaveDist:
    _check(sigma > 0, "gaussian needs sigma > 0")
    c = -math.log(sigma * math.sqrt(2 * math.pi))

    def logpdf(x):
        z = (x - mu) / sigma
        return c - z * z / 2

    return LogConcaveDist(
        "gaussian", {"mu": mu, "sigma": sigma},
        pdf=lambda x: math.exp(logpdf(x)), logpdf=logpdf,
        cdf=lambda x: 0.5 * math.erfc(-(x - mu) / (sigma * math.sqrt(2))),
        mean=mu, variance=sigma**2, support=(-math.inf, math.inf), mode=(mu, mu))


def _exponential(rate: float = 1.0, loc: float = -1.0) -> LogConcaveDist:
    _check(rate > 0, "exponential needs rate > 0")

    def logpdf(x):
        return math.log(rate) - rate * (x - loc) if x >= loc else -math.inf

    return LogConcaveDist(
        "exponential", {"rate": rate, "loc": loc},
        pdf=lambda x: rate * math.exp(-rate * (x - loc)) if x >= loc else 0.0,
        logpdf=logpdf,
        cdf=lambda x: -math.expm1(-rate * (x - loc)) if x > loc else 0.0,
        mean=loc + 1 / rate, variance=1 / rate**2, support=(loc, math.inf), mode=(loc, loc))


def _laplace(mu: float = 0.0, scale: float = 1.0) -> LogConcaveDist:
    _check(scale > 0, "laplace needs scale > 0")

    def cdf(x):
        z = (x - mu) / scale
        return 0.5 * math.exp(z) if z < 0 else 1 - 0.5 * math.exp(-z)

    return LogConcaveDist(
        "laplace", {"mu": mu, "scale": scale},
        pdf=lambda x: math.exp(-abs(x - mu) / scale) / (2 * scale),
        logpdf=lambda x: -abs(x - mu) / scale - math.log(2 * scale),
        cdf=cdf, mean=mu, variance=2 * scale**2, support=(-math.inf, math.inf),
        mode=(mu, mu), kinks=(mu,))


def _logistic(mu: float = 0.0, scale: float = 1.0) -> LogConcaveDist:
    _check(scale > 0, "logistic needs scale > 0")

    def logpdf(x):
        z = -abs((x - mu) / scale)
        return z - 2 * math.log1p(math.exp(z)) - math.log(scale)

    return LogConcaveDist(
        "logistic", {"mu": mu, "scale": scale},
        pdf=lambda x: math.exp(logpdf(x)), logpdf=logpdf,
        cdf=lambda x: float(special.expit((x - mu) / scale)),
        mean=mu, variance=(scale * math.pi) ** 2 / 3, support=(-math.inf, math.inf), mode=(mu, mu))


def _uniform(a: float = 0.0, b: float = 1.0) -> LogConcaveDist:
    _check(b > a, "uniform needs a < b")
    w = b - a
    return LogConcaveDist(
        "uniform", {"a": a, "b": b},
        pdf=lambda x: 1 / w if a <= x <= b else 0.0,
        logpdf=lambda x: -math.log(w) if a <= x <= b else -math.inf,
        cdf=lambda x: min(max((x - a) / w, 0.0), 1.0),
        mean=(a + b) / 2, variance=w * w / 12, support=(a, b), mode=(a, b))


def _triangular(a: float = 0.0, m: float = 0.25, b: float = 1.0) -> LogConcaveDist:
    _check(a <= m <= b and a < b, "triangular needs a <= m <= b, a < b")

    def pdf(x):
        if x < a or x > b:
            return 0.0
        if x < m:
            return 2 * (x - a) / ((b - a) * (m - a))
        if x > m:
            return 2 * (b - x) / ((b - a) * (b - m))
        return 2 / (b - a)

    def cdf(x):
        if x <= a:
            return 0.0
        if x >= b:
            return 1.0
        if x <= m:
            return (x - a) ** 2 / ((b - a) * (m - a))
        return 1 - (b - x) ** 2 / ((b - a) * (b - m))

    def logpdf(x):
        v = pdf(x)
        return math.log(v) if v > 0 else -math.inf

    var = (a * a + b * b + m * m - a * b - a * m - b * m) / 18
    return LogConcaveDist(
        "triangular", {"a": a, "m": m, "b": b}, pdf=pdf, logpdf=logpdf, cdf=cdf,
        mean=(a + b + m) / 3, variance=var, support=(a, b), mode=(m, m), kinks=(m,))


def _gamma(k: float = 2.0, theta: float = 1.0) -> LogConcaveDist:
    _check(k >= 1, f"gamma shape {k} < 1 is not log-concave")
    _check(theta > 0, "gamma needs theta > 0")
    lg = math.lgamma(k) + k * math.log(theta)

    def logpdf(x):
        if x < 0:
            return -math.inf
        if x == 0:
            return -lg if k == 1 else -math.inf
        return (k - 1) * math.log(x) - x / theta - lg

    def pdf(x):
        v = logpdf(x)
        return math.exp(v) if v > -math.inf else 0.0

    return LogConcaveDist(
        "gamma", {"k": k, "theta": theta}, pdf=pdf, logpdf=logpdf,
        cdf=lambda x: float(special.gammainc(k, x / theta)) if x > 0 else 0.0,
        mean=k * theta, variance=k * theta**2, support=(0.0, math.inf),
        mode=((k - 1) * theta, (k - 1) * theta))


def _beta(alpha: float = 2.0, beta: float = 3.0) -> LogConcaveDist:
    _check(alpha >= 1 and beta >= 1, f"beta({alpha}, {beta}) is not log-concave; need both >= 1")
    lb = special.betaln(alpha, beta)

    def logpdf(x):
        if x < 0 or x > 1:
            return -math.inf
        if (x == 0 and alpha > 1) or (x == 1 and beta > 1):
            return -math.inf
        t1 = (alpha - 1) * math.log(x) if alpha != 1 else 0.0
        t2 = (beta - 1) * math.log1p(-x) if beta != 1 else 0.0
        return t1 + t2 - lb

    def pdf(x):
        v = logpdf(x)
        return math.exp(v) if v > -math.inf else 0.0

    s = alpha + beta
    if s > 2:
        mode = (alpha - 1) / (s - 2)
        modes = (mode, mode)
    else:
        modes = (0.0, 1.0)
    return LogConcaveDist(
        "beta", {"alpha": alpha, "beta": beta}, pdf=pdf, logpdf=logpdf,
        cdf=lambda x: float(special.betainc(alpha, beta, min(max(x, 0.0), 1.0))),
        mean=alpha / s, variance=alpha * beta / (s * s * (s + 1)), support=(0.0, 1.0), mode=modes)


_BUILDERS = {
    "gaussian": _gaussian,
    "exponential": _exponential,
    "laplace": _laplace,
    "logistic": _logistic,
    "uniform": _uniform,
    "triangular": _triangular,
    "gamma": _gamma,
    "beta": _beta,
}


def make_family(tag: str, **params) -> LogConcaveDist:
    """Build a library member; parameters outside the log-concave range raise ValueError.

    The default exponential is already the shifted ``Y - 1`` with ``Y`` standard
    exponential, i.e. a member of the standardized class.
    """
    try:
        builder = _BUILDERS[tag]
    except KeyError:
        raise ValueError(f"unknown family {tag!r}; choose from {', '.join(FAMILIES)}") from None
    return builder(**params)


# ---------------------------------------------------------------------------
# standardization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StandardizedDist:
    """Affine image ``(X - mu)/sigma`` of a library member."""

    base: LogConcaveDist
    mu: float
    sigma: float

    @property
    def tag(self) -> str:
        return self.base.tag

    def to_base(self, x: float) -> float:
        return self.mu + self.sigma * x

    def pdf(self, x: float) -> float:
        return self.sigma * self.base.pdf(self.to_base(x))

    def logpdf(self, x: float) -> float:
        return math.log(self.sigma) + self.base.logpdf(self.to_base(x))

    def cdf(self, x: float) -> float:
        if self.base.cdf is None:
            return self.base.prob(-math.inf, self.to_base(x))
        return self.base.cdf(self.to_base(x))

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = self.base.support
        return ((lo - self.mu) / self.sigma, (hi - self.mu) / self.sigma)

    @property
    def mode(self) -> tuple[float, float]:
        return tuple((m - self.mu) / self.sigma for m in self.base.mode)

    @property
    def kinks(self) -> tuple[float, ...]:
        return tuple((k - self.mu) / self.sigma for k in self.base.kinks)

    def expect(self, fn: Callable[[float], float], split: Sequence[float] = ()) -> float:
        lo, hi = self.support
        return _quad(lambda x: fn(x) * self.pdf(x), lo, hi, self.kinks + tuple(split))

    def quadrature_moments(self) -> tuple[float, float, float]:
        """(mass, mean, second moment) by quadrature; used to audit the closed forms."""
        return (self.expect(lambda x: 1.0), self.expect(lambda x: x), self.expect(lambda x: x * x))


def standardize(d: LogConcaveDist) -> StandardizedDist:
    _check(d.variance > 0, "variance must be positive")
    return StandardizedDist(d, d.mean, d.std)


def library() -> list[StandardizedDist]:
    """All eight families at their default parameters, standardized."""
    return [standardize(make_family(t)) for t in FAMILIES]


def member(tag: str) -> StandardizedDist:
    return standardize(make_family(tag))


# ---------------------------------------------------------------------------
# evaluations
# ---------------------------------------------------------------------------


def prob_in(d: StandardizedDist, delta: float) -> float:
    """P(0 < X < delta)."""
    if delta <= 0:
        raise ValueError("delta must be > 0")
    if d.base.cdf is not None:
        return d.cdf(delta) - d.cdf(0.0)
    lo, hi = d.support
    return _quad(d.pdf, max(lo, 0.0), min(hi, delta), d.kinks)


def prob_left(d: StandardizedDist, delta: float) -> float:
    """P(-delta < X < 0), the reflected quantity."""
    return d.cdf(0.0) - d.cdf(-delta)


def density_at_zero(d: StandardizedDist) -> float:
    return d.pdf(0.0)


def mean_abs(d: StandardizedDist) -> float:
    return d.expect(abs, split=(0.0,))


def median(d, tol: float = 1e-12) -> float:
    """Bisection on the cdf."""
    lo, hi = d.support
    lo = -1.0 if not math.isfinite(lo) else lo
    hi = 1.0 if not math.isfinite(hi) else hi
    while d.cdf(lo) > 0.5:
        lo = 2 * lo - 1
    while d.cdf(hi) < 0.5:
        hi = 2 * hi + 1
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if d.cdf(mid) < 0.5:
            lo = mid
        else:
            hi = mid
        if mid in (lo, hi) and hi - lo <= 2 * math.ulp(mid):
            break
    return (lo + hi) / 2


def tail_variables(d: StandardizedDist) -> tuple[LogConcaveDist, LogConcaveDist]:
    """Laws of +(X - m) given X > m and of -(X - m) given X < m, with m the median."""
    m = median(d)
    lo, hi = d.support

    def make(sign: int, width: float, tag: str) -> LogConcaveDist:
        def pdf(z):
            return 2 * d.pdf(m + sign * z) if 0 <= z <= width else 0.0

        def cdf(z):
            if z <= 0:
                return 0.0
            z = min(z, width)
            return 2 * (d.cdf(m + z) - 0.5) if sign > 0 else 2 * (0.5 - d.cdf(m - z))

        def logpdf(z):
            v = pdf(z)
            return math.log(v) if v > 0 else -math.inf

        kinks = tuple(sign * (k - m) for k in d.kinks if 0 < sign * (k - m) < width)
        proto = LogConcaveDist(tag, {"base": d.tag, "median": m}, pdf, logpdf, cdf,
                               0.0, 1.0, (0.0, width), (0.0, 0.0), kinks)
        ez = proto.expect(lambda z: z)
        ez2 = proto.expect(lambda z: z * z)
        return LogConcaveDist(tag, proto.params, pdf, logpdf, cdf, ez, ez2 - ez * ez,
                              (0.0, width), (0.0, 0.0), kinks)

    return make(+1, hi - m, f"{d.tag}:Z+"), make(-1, m - lo, f"{d.tag}:Z-")


@dataclass
class KeilsonResult:
    tag: str
    lhs: float
    rhs: float
    passed: bool


def keilson_check(d: LogConcaveDist) -> KeilsonResult:
    """2 (EZ)^2 >= E Z^2 for a log-concave law on [0, inf)."""
    if d.support[0] < 0:
        raise ValueError(f"{d.tag}: support must be nonnegative")
    ez = d.expect(lambda z: z)
    ez2 = d.expect(lambda z: z * z)
    lhs, rhs = 2 * ez * ez, ez2
    return KeilsonResult(d.tag, lhs, rhs, lhs >= rhs - KEILSON_TOL)


def bkp_density_at_origin(d: LogConcaveDist) -> float | None:
    """f(0) after shifting the lower support end to 0 and rescaling to mean 1.

    None for laws unbounded below.
    """
    lo = d.support[0]
    if not math.isfinite(lo):
        return None
    scale = d.mean - lo
    return scale * d.pdf(lo)


def log_concavity_violations(d, n: int = 1000, tol: float = 1e-12, span: float = 40.0) -> list[float]:
    """Grid midpoints y with 2 log f(y) < log f(y-s) + log f(y+s) - tol."""
    lo, hi = d.support
    lo = max(lo, -span)
    hi = min(hi, span)
    xs = np.linspace(lo, hi, n)
    ls = np.array([d.logpdf(float(x)) for x in xs])
    bad = []
    for i in range(1, n - 1):
        a, m, b = ls[i - 1], ls[i], ls[i + 1]
        if not (np.isfinite(a) and np.isfinite(m) and np.isfinite(b)):
            continue
        if 2 * m < a + b - tol:
            bad.append(float(xs[i]))
    return bad


# ---------------------------------------------------------------------------
# bound check
# ---------------------------------------------------------------------------


def conjectured_value(delta: float) -> float:
    return math.exp(-1) * -math.expm1(-delta)


@dataclass
class CheckRow:
    delta: float
    lhs: float
    rhs: float
    margin: float
    p1: float
    p1_side: str | None
    p1_lhs: float | None


@dataclass
class CheckResult:
    tag: str
    rows: list[CheckRow] = field(default_factory=list)
    scalars: dict[str, float | None] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def csv_rows(self):
        for r in self.rows:
            yield [self.tag, repr(r.delta), repr(r.lhs), repr(r.rhs), repr(r.margin)]


CSV_HEADER = ("family", "delta", "P", "p_delta", "margin")


def check_bound(d: StandardizedDist, deltas: Sequence[float] = DEFAULT_DELTAS) -> CheckResult:
    """Compare P(0 < X < delta) with the proven floor, plus the scalar inequalities.

    Violations are collected, not raised.
    """
    res = CheckResult(d.tag)
    lo_mode, hi_mode = d.mode
    decreasing_right = lo_mode <= 0
    increasing_left = hi_mode >= 0
    for delta in deltas:
        lhs = prob_in(d, delta)
        rhs = float(bounds.p_bound(_exact(delta)))
        p1v = float(bounds.p1(_exact(delta)))
        side, p1_lhs = None, None
        if decreasing_right:
            side, p1_lhs = "right", lhs
        elif increasing_left:
            side, p1_lhs = "left", prob_left(d, delta)
        row = CheckRow(delta, lhs, rhs, lhs - rhs, p1v, side, p1_lhs)
        res.rows.append(row)
        if not lhs >= rhs:
            res.violations.append(f"P(0<X<{delta}) = {lhs!r} < p = {rhs!r}")
        if p1_lhs is not None and not p1_lhs >= p1v:
            res.violations.append(f"monotone-side bound failed at delta={delta}: {p1_lhs!r} < {p1v!r}")
    f0 = density_at_zero(d)
    ea = mean_abs(d)
    res.scalars.update(f0=f0, mean_abs=ea, median=median(d), bkp_f0=bkp_density_at_origin(d.base))
    if not f0 >= DENSITY_FLOOR:
        res.violations.append(f"f(0) = {f0!r} < 1/72")
    if not f0 >= BOBKOV_LEDOUX_FLOOR:
        res.violations.append(f"f(0) = {f0!r} < 1/(e sqrt 3)")
    if not ea >= MEAN_ABS_FLOOR:
        res.violations.append(f"E|X| = {ea!r} < 1/2")
    bkp = res.scalars["bkp_f0"]
    if bkp is not None and not bkp <= 1 + 1e-12:
        res.violations.append(f"mean-1 rescaled f(0+) = {bkp!r} > 1")
    for z in tail_variables(d):
        k = keilson_check(z)
        res.scalars[f"keilson_{z.tag.split(':')[1]}"] = k.lhs - k.rhs
        if not k.passed:
            res.violations.append(f"{z.tag}: 2(EZ)^2 = {k.lhs!r} < EZ^2 = {k.rhs!r}")
    return res


def _exact(delta: float):
    from fractions import Fraction

    return Fraction(repr(float(delta)))


@dataclass
class ConjectureObservation:
    quantity: str
    delta: float | None
    extremal_value: float
    library_min: float
    library_argmin: str

    @property
    def counterexample(self) -> bool:
        return self.library_min < self.extremal_value - 1e-12


def conjecture_observations(results: Sequence[CheckResult]) -> list[ConjectureObservation]:
    """Does the shifted exponential attain the library minimum of f(0) and of P(0<X<delta)?"""
    out = []
    by_tag = {r.tag: r for r in results}
    if "exponential" not in by_tag:
        return out
    f0s = {t: r.scalars["f0"] for t, r in by_tag.items()}
    arg = min(f0s, key=f0s.get)
    out.append(ConjectureObservation("f(0)", None, f0s["exponential"], f0s[arg], arg))
    for i, row in enumerate(by_tag["exponential"].rows):
        vals = {t: r.rows[i].lhs for t, r in by_tag.items()}
        arg = min(vals, key=vals.get)
        out.append(ConjectureObservation("P(0<X<delta)", row.delta, row.lhs, vals[arg], arg))
    return out


def audit_library(deltas: Sequence[float] = DEFAULT_DELTAS, tags: Sequence[str] = FAMILIES):
    results = [check_bound(member(t), deltas) for t in tags]
    return results, conjecture_observations(results)
