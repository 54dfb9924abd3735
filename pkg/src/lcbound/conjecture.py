"""Numerical search for the log-concave law minimizing P(0 < X < delta).

The search space is exp(phi) with phi piecewise linear and concave on a
uniform grid over [-A, B].  Concavity is built into the parameters: the
first slope ``s1`` is free and every later slope is ``s1`` minus a running
sum of nonnegative decrements, so L-BFGS-B with simple bounds walks only
over feasible densities.  Each candidate is standardized implicitly from
its own moments, which removes the mean/variance constraints.

All cell integrals are closed form.  On a cell the density is e^(a + y t),
t in [0, 1], and everything reduces to J_k(y) = int_0^1 t^k e^(y t) dt,
evaluated with the exponent anchored at the larger end so nothing
overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import bounds

COUNTEREXAMPLE_TOL = 1e-3
SERIES_CUTOFF = 1.0
_SERIES_TERMS = 30
_KMAX = 3


class ExplorerError(RuntimeError):
    """Every restart failed, or a result fell below the proven floor."""


def conjectured_value(delta: float) -> float:
    """e^-1 (1 - e^-delta), the value attained by the shifted exponential."""
    return math.exp(-1) * -math.expm1(-delta)


def floor_value(delta: float) -> float:
    return float(bounds.p_bound(_as_exact(delta)))


def _as_exact(x: float):
    from fractions import Fraction

    return Fraction(repr(float(x)))


# ---------------------------------------------------------------------------
# J_k(y) and the anchored cell integrals
# ---------------------------------------------------------------------------


def j_moments(y: np.ndarray, kmax: int = _KMAX) -> np.ndarray:
    """J_0..J_kmax at every y <= 0, shape (kmax + 1, len(y))."""
    y = np.asarray(y, dtype=float)
    out = np.empty((kmax + 1,) + y.shape)
    small = np.abs(y) <= SERIES_CUTOFF
    if small.any():
        ys = y[small]
        terms = np.ones_like(ys)
        acc = np.zeros((kmax + 1,) + ys.shape)
        for m in range(_SERIES_TERMS):
            if m:
                terms = terms * ys / m
            for k in range(kmax + 1):
                acc[k] += terms / (k + m + 1)
        out[:, small] = acc
    big = ~small
    if big.any():
        yb = y[big]
        ey = np.exp(yb)
        prev = np.expm1(yb) / yb
        out[0, big] = prev
        for k in range(1, kmax + 1):
            prev = (ey - k * prev) / yb
            out[k, big] = prev
    return out


def anchored_moments(y: np.ndarray, kmax: int = _KMAX) -> np.ndarray:
    """K_k(y) = int_0^1 t^k e^(y t - max(y, 0)) dt for any real y."""
    y = np.asarray(y, dtype=float)
    out = np.empty((kmax + 1,) + y.shape)
    neg = y <= 0
    if neg.any():
        out[:, neg] = j_moments(y[neg], kmax)
    pos = ~neg
    if pos.any():
        # t = 1 - s turns the integrand into (1 - s)^k e^(-y s)
        jr = j_moments(-y[pos], kmax)
        for k in range(kmax + 1):
            acc = np.zeros_like(jr[0])
            for r in range(k + 1):
                acc += math.comb(k, r) * (-1) ** r * jr[r]
            out[k, pos] = acc
    return out


def _cell_integrals(x0, length, phi0, phi1, kmax_x: int = 2, with_hat: bool = True):
    """int x^k t^m e^phi over cells; returns G[k][m] arrays (m in {0, 1}).

    Cells start at ``x0`` with width ``length``; phi runs linearly from
    ``phi0`` to ``phi1`` and t is the local coordinate in [0, 1].
    """
    x0 = np.asarray(x0, dtype=float)
    length = np.asarray(length, dtype=float)
    y = phi1 - phi0
    scale = length * np.exp(np.maximum(phi0, phi1))
    K = anchored_moments(y, kmax_x + 1)
    ms = (0, 1) if with_hat else (0,)
    G = [[None, None] for _ in range(kmax_x + 1)]
    for k in range(kmax_x + 1):
        for m in ms:
            acc = np.zeros_like(x0)
            for r in range(k + 1):
                acc += math.comb(k, r) * x0 ** (k - r) * length**r * K[r + m]
            G[k][m] = scale * acc
    return G


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConcaveLogDensity:
    """exp(phi) on [knots[0], knots[-1]] with phi linear between knots."""

    knots: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float)
        p = np.asarray(self.phi, dtype=float)
        if k.ndim != 1 or k.shape != p.shape or len(k) < 2:
            raise ValueError("knots and phi must be 1-d arrays of equal length >= 2")
        if np.any(np.diff(k) <= 0):
            raise ValueError("knots must be strictly increasing")
        object.__setattr__(self, "knots", k)
        object.__setattr__(self, "phi", p)

    @classmethod
    def uniform_grid(cls, a: float, b: float, phi) -> "ConcaveLogDensity":
        phi = np.asarray(phi, dtype=float)
        return cls(np.linspace(-a, b, len(phi)), phi)

    @classmethod
    def from_function(cls, a: float, b: float, n: int, fn) -> "ConcaveLogDensity":
        knots = np.linspace(-a, b, n + 1)
        return cls(knots, np.array([fn(x) for x in knots], dtype=float))

    @property
    def n(self) -> int:
        return len(self.knots) - 1

    def second_differences(self) -> np.ndarray:
        """Slope decrements; all <= 0 means concave (also for uneven grids)."""
        s = np.diff(self.phi) / np.diff(self.knots)
        return np.diff(s)

    def is_concave(self, tol: float = 0.0) -> bool:
        return bool(np.all(self.second_differences() <= tol))

    def log_density(self, x: float) -> float:
        if x < self.knots[0] or x > self.knots[-1]:
            return -math.inf
        return float(np.interp(x, self.knots, self.phi))

    def to_dict(self) -> dict:
        return {"knots": self.knots.tolist(), "phi": self.phi.tolist()}


def density_moments(d: ConcaveLogDensity) -> tuple[float, float, float]:
    """Unnormalized (mass, first moment, second moment) of exp(phi)."""
    G = _cell_integrals(d.knots[:-1], np.diff(d.knots), d.phi[:-1], d.phi[1:], with_hat=False)
    return float(G[0][0].sum()), float(G[1][0].sum()), float(G[2][0].sum())


def unnormalized_cdf(d: ConcaveLogDensity, z: float) -> float:
    return _cdf_and_grad(d.knots, d.phi, z)[0]


def _cdf_and_grad(knots, phi, z):
    """F(z) = int_{x_0}^z exp(phi), its density value and d F / d phi."""
    n = len(knots) - 1
    grad = np.zeros(n + 1)
    if z <= knots[0]:
        return 0.0, 0.0, grad
    widths = np.diff(knots)
    if z >= knots[-1]:
        G = _cell_integrals(knots[:-1], widths, phi[:-1], phi[1:], kmax_x=0)
        grad[:-1] += G[0][0] - G[0][1]
        grad[1:] += G[0][1]
        return float(G[0][0].sum()), 0.0, grad
    c = int(np.searchsorted(knots, z, side="right") - 1)
    c = min(c, n - 1)
    if c > 0:
        G = _cell_integrals(knots[:c], widths[:c], phi[:c], phi[1 : c + 1], kmax_x=0)
        full = float(G[0][0].sum())
        grad[:c] += G[0][0] - G[0][1]
        grad[1 : c + 1] += G[0][1]
    else:
        full = 0.0
    tau = (z - knots[c]) / widths[c]
    phi_z = phi[c] + tau * (phi[c + 1] - phi[c])
    Gp = _cell_integrals(np.array([knots[c]]), np.array([z - knots[c]]),
                         np.array([phi[c]]), np.array([phi_z]), kmax_x=0)
    p0, p1 = float(Gp[0][0][0]), float(Gp[0][1][0])
    grad[c] += p0 - tau * p1
    grad[c + 1] += tau * p1
    return full + p0, math.exp(phi_z), grad


def objective_and_grad(knots: np.ndarray, phi: np.ndarray, delta: float):
    """P(0 < X_std < delta) for the standardized law of exp(phi), and its phi-gradient."""
    phi = phi - phi.max()
    widths = np.diff(knots)
    G = _cell_integrals(knots[:-1], widths, phi[:-1], phi[1:])
    M = np.array([G[k][0].sum() for k in range(3)])
    dM = np.zeros((3, len(phi)))
    for k in range(3):
        dM[k, :-1] += G[k][0] - G[k][1]
        dM[k, 1:] += G[k][1]
    m0, m1, m2 = M
    mu = m1 / m0
    var = m2 / m0 - mu * mu
    if not var > 0:
        raise ValueError("degenerate density: zero variance")
    sigma = math.sqrt(var)
    z1, z2 = mu, mu + sigma * delta
    F1, f1, g1 = _cdf_and_grad(knots, phi, z1)
    F2, f2, g2 = _cdf_and_grad(knots, phi, z2)
    P = (F2 - F1) / m0
    dmu = (dM[1] - mu * dM[0]) / m0
    dvar = (dM[2] - (m2 / m0) * dM[0]) / m0 - 2 * mu * dmu
    dsigma = dvar / (2 * sigma)
    grad = (g2 - g1 + f2 * (dmu + delta * dsigma) - f1 * dmu) / m0 - P * dM[0] / m0
    return P, grad, (mu, sigma)


def objective(d: ConcaveLogDensity, delta: float) -> float:
    """P(0 < X < delta) after standardizing exp(phi) to mean 0 and variance 1."""
    if delta <= 0:
        raise ValueError("delta must be > 0")
    return objective_and_grad(d.knots, d.phi, delta)[0]


def standardization(d: ConcaveLogDensity) -> tuple[float, float]:
    m0, m1, m2 = density_moments(d)
    mu = m1 / m0
    return mu, math.sqrt(m2 / m0 - mu * mu)


# ---------------------------------------------------------------------------
# slope-decrement parameters
# ---------------------------------------------------------------------------


def phi_from_params(theta: np.ndarray, width: float) -> np.ndarray:
    """theta = (s1, d_2..d_n) -> phi_0..phi_n with phi_0 = 0."""
    slopes = theta[0] - np.concatenate(([0.0], np.cumsum(theta[1:])))
    return np.concatenate(([0.0], np.cumsum(slopes * width)))


def params_from_phi(phi: np.ndarray, width: float) -> np.ndarray:
    slopes = np.diff(phi) / width
    return np.concatenate(([slopes[0]], -np.diff(slopes)))


def grad_to_params(g_phi: np.ndarray, width: float) -> np.ndarray:
    # phi_i = w * sum_{j<=i} s_j, so dP/ds_j = w * sum_{i>=j} g_i
    g_s = width * np.cumsum(g_phi[1:][::-1])[::-1]
    g_d = -np.cumsum(g_s[::-1])[::-1][1:]
    return np.concatenate(([g_s.sum()], g_d))


# ---------------------------------------------------------------------------
# explorer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExplorerConfig:
    delta: float = 1.0
    n: int = 64
    a: float = 10.0
    b: float = 10.0
    restarts: int = 8
    seed: int = 42
    maxiter: int = 400
    ftol: float = 1e-15
    gtol: float = 1e-12
    slope_bound: float = 50.0
    decrement_bound: float = 200.0

    def __post_init__(self):
        if not (isinstance(self.delta, (int, float)) and self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError("delta must be a positive finite number")
        if self.n < 8:
            raise ValueError(f"knot count must be >= 8, got {self.n}")
        if self.a < 6 or self.b < 6:
            raise ValueError("support half-extents A and B must be >= 6")
        if self.restarts < 1:
            raise ValueError("need at least one restart")
        if self.maxiter < 1:
            raise ValueError("maxiter must be >= 1")

    @property
    def width(self) -> float:
        return (self.a + self.b) / self.n

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class RestartTrace:
    index: int
    start: str
    initial: float
    final: float
    iterations: int
    converged: bool
    message: str
    history: list[float] = field(default_factory=list)


@dataclass
class ExplorerResult:
    config: ExplorerConfig
    best: float
    density: ConcaveLogDensity
    mu: float
    sigma: float
    best_restart: int
    traces: list[RestartTrace]
    floor: float
    conjectured: float

    @property
    def gap(self) -> float:
        return self.best - self.conjectured

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "best": self.best,
            "density": self.density.to_dict(),
            "mu": self.mu,
            "sigma": self.sigma,
            "best_restart": self.best_restart,
            "traces": [t.__dict__ for t in self.traces],
            "floor": self.floor,
            "conjectured": self.conjectured,
            "gap": self.gap,
        }


def exponential_start(cfg: ExplorerConfig) -> np.ndarray:
    return np.concatenate(([-1.0], np.zeros(cfg.n - 1)))


def gaussian_start(cfg: ExplorerConfig) -> np.ndarray:
    # phi = -x^2/2 on the grid: slopes drop by the cell width each step
    x0 = -cfg.a
    w = cfg.width
    s1 = -(x0 + w / 2)
    return np.concatenate(([s1], np.full(cfg.n - 1, w)))


def random_start(cfg: ExplorerConfig, rng: np.random.Generator) -> np.ndarray:
    s1 = rng.uniform(0.0, 3.0)
    dec = rng.exponential(1.0, cfg.n - 1) * rng.uniform(0.0, 4.0) / cfg.n
    return np.concatenate(([s1], dec))


def _bounds(cfg: ExplorerConfig):
    return [(-cfg.slope_bound, cfg.slope_bound)] + [(0.0, cfg.decrement_bound)] * (cfg.n - 1)


def _run_restart(cfg: ExplorerConfig, knots, theta0, index: int, label: str):
    w = cfg.width
    best = {"f": math.inf, "theta": None}

    def fun(theta):
        phi = phi_from_params(theta, w)
        try:
            f, g, _ = objective_and_grad(knots, phi, cfg.delta)
        except (ValueError, FloatingPointError, ZeroDivisionError):
            return math.inf, np.zeros_like(theta)
        if not math.isfinite(f):
            return math.inf, np.zeros_like(theta)
        if f < best["f"]:
            best["f"], best["theta"] = f, theta.copy()
        return f, grad_to_params(g, w)

    f0, _ = fun(theta0)
    history = [f0]

    def callback(xk):
        history.append(float(fun(xk)[0]))

    with np.errstate(all="ignore"):
        res = optimize.minimize(
            fun, theta0, jac=True, method="L-BFGS-B", bounds=_bounds(cfg), callback=callback,
            options={"maxiter": cfg.maxiter, "ftol": cfg.ftol, "gtol": cfg.gtol},
        )
    ok = best["theta"] is not None and math.isfinite(best["f"])
    trace = RestartTrace(index, label, float(f0), float(best["f"]), int(res.nit), ok,
                         str(res.message), history)
    return trace, best["theta"]


def minimize(cfg: ExplorerConfig) -> ExplorerResult:
    """Multi-restart L-BFGS-B over the concave cone; best value wins, lowest index on ties."""
    knots = np.linspace(-cfg.a, cfg.b, cfg.n + 1)
    rng = np.random.default_rng(cfg.seed)
    starts = []
    for i in range(cfg.restarts):
        if i == 0:
            starts.append(("exponential", exponential_start(cfg)))
        elif i == 1:
            starts.append(("gaussian", gaussian_start(cfg)))
        else:
            starts.append(("random", random_start(cfg, rng)))
    traces, best_theta, best_f, best_i = [], None, math.inf, -1
    for i, (label, theta0) in enumerate(starts):
        trace, theta = _run_restart(cfg, knots, theta0, i, label)
        traces.append(trace)
        if trace.converged and trace.final < best_f:
            best_f, best_theta, best_i = trace.final, theta, i
    if best_theta is None:
        raise ExplorerError("all restarts failed: " + "; ".join(t.message for t in traces))
    phi = phi_from_params(best_theta, cfg.width)
    phi = phi - phi.max()
    dens = ConcaveLogDensity(knots, phi)
    mu, sigma = standardization(dens)
    floor = floor_value(cfg.delta)
    if best_f < floor:
        raise ExplorerError(
            f"objective {best_f!r} fell below the proven floor {floor!r}; numerical fault")
    return ExplorerResult(cfg, best_f, dens, mu, sigma, best_i, traces, floor,
                          conjectured_value(cfg.delta))


# ---------------------------------------------------------------------------
# comparison
# ---------------------------------------------------------------------------

CONSISTENT = "consistent"
COUNTEREXAMPLE = "counterexample candidate"


@dataclass
class Comparison:
    delta: float
    best: float
    conjectured: float
    floor: float
    gap: float
    classification: str
    tolerance: float
    density: dict | None = None

    @property
    def counterexample(self) -> bool:
        return self.classification == COUNTEREXAMPLE


def compare_to_conjecture(res: ExplorerResult, tol: float = COUNTEREXAMPLE_TOL) -> Comparison:
    gap = res.best - res.conjectured
    cls = CONSISTENT if gap >= -tol else COUNTEREXAMPLE
    dump = dict(res.density.to_dict(), mu=res.mu, sigma=res.sigma)
    return Comparison(res.config.delta, res.best, res.conjectured, res.floor, gap, cls, tol, dump)


CSV_HEADER = ("delta", "best", "conjectured", "p_delta")


def csv_row(res: ExplorerResult) -> list[str]:
    return [repr(res.config.delta), repr(res.best), repr(res.conjectured), repr(res.floor)]
