"""Sufficient conditions for extinction and propagation of plateau data.

Both criteria are sums of Poisson-weighted tail masses, i.e. tails of the
series kernel psi(T, .). Numerical truncation is always charged against the
verdict, so "satisfied" means satisfied after the worst-case error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate, optimize
from scipy.stats import poisson

from .convops import Grid, GridField, grid_tail, lower_tail_bound, psi, upper_tail_bound
from .errors import BadLevels, InvalidNonlinearity, ValidationError
from .kernels import Kernel

# ---------------------------------------------------------------------------
# nonlinearities


@dataclass(frozen=True, eq=False)
class Nonlinearity:
    """Reaction term f on [0, 1].

    ``cubic``: r u (u - theta)(1 - u), bistable for theta < 1/2.
    ``ignition``: r (u - theta)(1 - u) on (theta, 1], zero below theta.
    ``custom``: piecewise-linear table (u, f) over [0, 1].
    """

    kind: str = "cubic"
    theta: float = 0.3
    r: float = 1.0
    table_u: tuple = ()
    table_f: tuple = ()

    def __post_init__(self):
        if self.kind not in ("cubic", "ignition", "custom"):
            raise ValidationError(f"unknown nonlinearity {self.kind!r}")
        if not 0 < self.theta < 1:
            raise InvalidNonlinearity("theta must lie in (0, 1)")
        if not self.r > 0:
            raise InvalidNonlinearity("r must be positive")
        if self.kind == "cubic" and self.theta >= 0.5:
            raise InvalidNonlinearity("cubic f needs theta < 1/2 for a positive integral")
        if self.kind == "custom":
            u = np.asarray(self.table_u, dtype=float)
            fv = np.asarray(self.table_f, dtype=float)
            if u.size < 3 or u.shape != fv.shape or u[0] != 0 or u[-1] != 1 or np.any(np.diff(u) <= 0):
                raise InvalidNonlinearity("custom tables need increasing u from 0 to 1")
            object.__setattr__(self, "table_u", tuple(u))
            object.__setattr__(self, "table_f", tuple(fv))
            self._check_shape()

    def _check_shape(self):
        th = self.theta
        if abs(self(0.0)) > 1e-12 or abs(self(th)) > 1e-12 or abs(self(1.0)) > 1e-12:
            raise InvalidNonlinearity("f must vanish at 0, theta and 1")
        u = np.linspace(0, 1, 4001)
        fu = self(u)
        above = (u > th) & (u < 1)
        if np.any(fu[above] <= 0):
            raise InvalidNonlinearity("f must be positive on (theta, 1)")
        below = (u > 0) & (u < th)
        if np.any(fu[below] > 0):
            raise InvalidNonlinearity("f must be nonpositive on (0, theta)")
        if integrate.trapezoid(fu, u) <= 0:
            raise InvalidNonlinearity("f must have a positive integral over [0, 1]")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        th, r = self.theta, self.r
        if self.kind == "cubic":
            out = r * u * (u - th) * (1.0 - u)
        elif self.kind == "ignition":
            out = np.where(u > th, r * (u - th) * (1.0 - u), 0.0)
        else:
            out = np.interp(u, self.table_u, self.table_f)
        return out if out.ndim else float(out)

    def derivative(self, u):
        u = np.asarray(u, dtype=float)
        th, r = self.theta, self.r
        if self.kind == "cubic":
            out = r * (-3.0 * u**2 + 2.0 * (1.0 + th) * u - th)
        elif self.kind == "ignition":
            out = np.where(u > th, r * (1.0 + th - 2.0 * u), 0.0)
        else:
            tu, tf = np.asarray(self.table_u), np.asarray(self.table_f)
            slopes = np.diff(tf) / np.diff(tu)
            j = np.clip(np.searchsorted(tu, u, side="right") - 1, 0, slopes.size - 1)
            out = slopes[j]
        return out if out.ndim else float(out)

    @property
    def bistable(self) -> bool:
        return self.kind != "ignition"

    def lipschitz_on(self, lo: float, hi: float) -> float:
        u = np.linspace(lo, hi, 20001)
        if self.kind == "custom":
            tu = np.asarray(self.table_u)
            u = np.concatenate([u, tu[(tu >= lo) & (tu <= hi)]])
        return float(np.max(np.abs(self.derivative(u))))

    @cached_property
    def lipschitz(self) -> float:
        return self.lipschitz_on(0.0, 1.0)

    @cached_property
    def _rates(self):
        return derive_rates(self)

    @property
    def r_plus(self) -> float:
        return self._rates[0]

    @property
    def r_minus(self) -> float:
        return self._rates[1]

    @property
    def delta(self) -> float:
        return self._rates[2]

    def params(self) -> dict:
        d = {"kind": self.kind, "theta": self.theta, "r": self.r}
        if self.kind == "custom":
            d.update(table_u=list(self.table_u), table_f=list(self.table_f))
        return d


def derive_rates(f: Nonlinearity) -> tuple[float, float, float]:
    """(r_plus, r_minus, delta) for the criteria.

    r_minus is the largest r with f(u) >= r (u - theta) on [0, delta]; among
    feasible delta the one maximizing r_minus (delta - theta) is kept, and
    r_minus is capped below 1 as the series window requires.
    """
    th, r = f.theta, f.r
    if f.kind == "cubic":
        # f/(u - theta) = r u (1 - u): peak r/4, and u(1-u) >= theta(1-theta) on [theta, 1-theta]
        r_plus = 0.25 * r
        lower = r_minus = r * th * (1 - th)
        delta = 1.0 - th
    elif f.kind == "ignition":
        r_plus = r * (1.0 - th)
        lower = 0.0
        r_minus, delta = 0.5 * r * (1.0 - th), 0.5 * (1.0 + th)
    else:
        u = np.linspace(0.0, 1.0, 20001)
        fu = f(u)
        up = u[u > th]
        q_up = fu[u > th] / (up - th)
        r_plus = float(q_up.max())
        lo_mask = u < th
        lower = max(float(np.max(fu[lo_mask] / (u[lo_mask] - th))), 0.0)
        running_min = np.minimum.accumulate(q_up)
        score = np.where(running_min >= lower, running_min * (up - th), -np.inf)
        score[-1] = -np.inf  # delta must stay below 1
        j = int(np.argmax(score))
        if not np.isfinite(score[j]) or running_min[j] <= 0:
            raise InvalidNonlinearity("no (r_minus, delta) pair satisfies the lower linear bound")
        r_minus, delta = float(running_min[j]), float(up[j])
    if r_minus >= 1.0:
        # any r in [lower, r_minus] is admissible; the series window needs r < 1
        if lower >= 0.999:
            raise InvalidNonlinearity("r_minus cannot be chosen below 1")
        r_minus = 0.999
    return float(r_plus), float(r_minus), float(delta)


# ---------------------------------------------------------------------------
# reports and settings


@dataclass
class CriterionReport:
    kind: str
    eps: float
    L: float
    witness_T: float
    lhs: float
    rhs: float
    truncation_bound: float
    satisfied: bool
    window: tuple = (1, 1)

    def __post_init__(self):
        if self.truncation_bound < 0:
            raise ValidationError("truncation bound must be nonnegative")

    def to_row(self) -> dict:
        return {"kind": self.kind, "eps": self.eps, "L": self.L, "witness_T": self.witness_T,
                "lhs": self.lhs, "rhs": self.rhs, "truncation_bound": self.truncation_bound,
                "satisfied": self.satisfied, "window_M": self.window[0], "window_N": self.window[1]}


@dataclass(frozen=True)
class CriterionOptions:
    m: float = 0.5
    alpha: float | None = None  # defaults to (delta - theta)/2
    tol: float = 1e-12  # Poisson truncation
    T_min: float = 1e-2
    T_max: float = 1e3
    n_T: int = 40
    wrap_tol: float = 1e-4
    n_cap: int = 2**20

    def alpha_for(self, f: Nonlinearity) -> float:
        a = 0.5 * (f.delta - f.theta) if self.alpha is None else self.alpha
        if not 0 < a < f.delta - f.theta:
            raise BadLevels(f"alpha = {a:g} must lie in (0, delta - theta)")
        return a


def _psi_tail_parts(p: GridField, L):
    omitted = p.info["omitted_bound"]
    escaped = p.info["escaped"]
    return grid_tail(p, L), escaped, omitted


# ---------------------------------------------------------------------------
# extinction


def extinction_lhs(k: Kernel, theta: float, r_plus: float, T: float, L: float, g: Grid,
                   tol: float = 1e-12) -> float:
    """theta e^{-(r+ + 1)T} sum_i T^i/i! R_i(L)."""
    p = psi(k, T, g, tol)
    tail, esc, _ = _psi_tail_parts(p, L)
    return theta * math.exp(-r_plus * T) * (tail + esc)


class ExtinctionEvaluator:
    """Caches psi(T) tails on a log-spaced T grid for repeated L queries."""

    def __init__(self, k: Kernel, f: Nonlinearity, eps: float, g: Grid, opts: CriterionOptions):
        self.k, self.f, self.eps, self.g, self.opts = k, f, eps, g, opts
        th, rp = f.theta, f.r_plus
        hi = min(opts.T_max, math.log(th / eps) / rp) if eps < th else 0.0
        self.T_hi = hi
        self.Ts = np.geomspace(opts.T_min, hi, opts.n_T) if hi > opts.T_min else np.array([])
        self._parts = {}

    def _parts_for(self, T: float):
        if T not in self._parts:
            p = psi(self.k, T, self.g, self.opts.tol, self.opts.wrap_tol)
            self._parts[T] = p
        return self._parts[T]

    def margin(self, T: float, L: float) -> tuple[float, float, float]:
        p = self._parts_for(T)
        tail, esc, omitted = _psi_tail_parts(p, L)
        w = self.f.theta * math.exp(-self.f.r_plus * T)
        lhs = w * (tail + esc)
        trunc = w * (esc + omitted)
        return lhs - trunc - self.eps, lhs, trunc

    def evaluate(self, L: float, refine: bool = True) -> CriterionReport:
        if self.Ts.size == 0:
            return CriterionReport("Extinction", self.eps, L, math.nan, 0.0, self.eps, 0.0, False)
        scores = [self.margin(T, L)[0] for T in self.Ts]
        j = int(np.argmax(scores))
        T_best, best = float(self.Ts[j]), scores[j]
        if refine and 0 < j < len(self.Ts) - 1:
            lo, hi = math.log(self.Ts[j - 1]), math.log(self.Ts[j + 1])
            res = optimize.minimize_scalar(lambda s: -self.margin(math.exp(s), L)[0],
                                           bounds=(lo, hi), method="bounded",
                                           options={"xatol": 1e-3})
            if -res.fun > best:
                T_best, best = math.exp(res.x), -res.fun
        _, lhs, trunc = self.margin(T_best, L)
        N = self._parts_for(T_best).info["N"]
        return CriterionReport("Extinction", self.eps, L, T_best, lhs, self.eps, trunc,
                               bool(best >= 0), (1, N))

    def drop_cache(self):
        self._parts.clear()


def extinction_holds(k: Kernel, f: Nonlinearity, eps: float, L: float, g: Grid,
                     opts: CriterionOptions | None = None) -> CriterionReport:
    """Is there T > 0 with the extinction sum at least eps (after truncation)?"""
    opts = opts or CriterionOptions()
    return ExtinctionEvaluator(k, f, eps, g, opts).evaluate(L)


# ---------------------------------------------------------------------------
# propagation


def propagation_T(eps: float, alpha: float, r_minus: float) -> float:
    """T_eps = ln(2 alpha / eps) / r_minus."""
    if not 0 < eps < 2.0 * alpha:
        raise BadLevels(f"need 0 < eps < 2 alpha, got eps = {eps:g}, alpha = {alpha:g}")
    return math.log(2.0 * alpha / eps) / r_minus


def nonextinction_rhs(k: Kernel, T: float, Leff: float, g: Grid, tol: float = 1e-12) -> tuple[float, float]:
    """(rhs, truncation bound) for e^{-T} sum_i T^i/i! R_i(Leff).

    rhs already includes the escaped mass; the bound is the omitted Poisson tail.
    """
    p = psi(k, T, g, tol)
    tail, esc, omitted = _psi_tail_parts(p, Leff)
    return tail + esc, omitted


class PropagationEvaluator:
    def __init__(self, k: Kernel, f: Nonlinearity, eps: float, g: Grid, opts: CriterionOptions):
        self.k, self.f, self.eps, self.g, self.opts = k, f, eps, g, opts
        self.alpha = opts.alpha_for(f)
        self.T = propagation_T(eps, self.alpha, f.r_minus)
        self.window = series_window(self.T, f.r_minus)[:2]
        self.lhs = eps / (2.0 * (f.theta + eps))
        self._psi = psi(k, self.T, g, opts.tol, opts.wrap_tol)

    def evaluate(self, L: float) -> CriterionReport:
        tail, esc, omitted = _psi_tail_parts(self._psi, (1.0 - self.opts.m) * L)
        rhs = tail + esc
        ok = self.lhs >= rhs + omitted
        return CriterionReport("Propagation", self.eps, L, self.T, self.lhs, rhs, omitted, bool(ok),
                               self.window)


def propagation_holds(k: Kernel, f: Nonlinearity, eps: float, L: float, g: Grid,
                      opts: CriterionOptions | None = None) -> CriterionReport:
    opts = opts or CriterionOptions()
    if not 0 < opts.m < 1:
        raise BadLevels("m must lie in (0, 1)")
    return PropagationEvaluator(k, f, eps, g, opts).evaluate(L)


# ---------------------------------------------------------------------------
# series window


def series_window(t: float, r_minus: float) -> tuple[int, int, float]:
    """(M, N, gamma_minus) with M = floor(gamma t), N = floor(3t) + 1.

    gamma_minus is the largest 2^{-k} with gamma ln(e / gamma) < 1 - r_minus.
    """
    if not 0 < r_minus < 1:
        raise ValidationError("r_minus must lie in (0, 1)")
    gam = 1.0
    while not gam * (1.0 - math.log(gam)) < 1.0 - r_minus:
        gam *= 0.5
    return int(math.floor(gam * t)), int(math.floor(3.0 * t)) + 1, gam


def omitted_window_mass(t: float, M: int, N: int) -> float:
    """e^{-t} (sum_{i=1}^{M} + sum_{i>=N}) t^i / i!."""
    low = float(poisson.cdf(M, t) - poisson.pmf(0, t)) if M >= 1 else 0.0
    high = float(poisson.sf(N - 1, t))
    return low + high


def window_bounds(t: float, M: int, N: int) -> tuple[float, float]:
    """Explicit bounds on the two omitted pieces."""
    return lower_tail_bound(t, M), upper_tail_bound(t, N)


# ---------------------------------------------------------------------------
# grid sizing


def auto_grid(k: Kernel, L_max: float, T_max: float, mass_tol: float = 1e-6,
              n_cap: int = 2**20, dx_max: float | None = None, wrap_tol: float = 1e-4) -> Grid:
    """A grid holding psi(T_max) and tails up to L_max with escaped mass <= mass_tol.

    X is also widened until the mass psi(T_max) would put in the outer 10% of
    the grid stays below wrap_tol / 2.
    """
    s = k.spread()
    dx = dx_max or s / 8.0
    X = max(2.0 * L_max, 16.0 * s)
    if math.isfinite(k.m2):
        X = max(X, 2.0 * L_max + 14.0 * math.sqrt(max(T_max, 1.0) * k.m2))
    Tm = max(T_max, 1.0)
    while (k.tail_mass(X) * Tm > mass_tol or k.tail_mass(X) > 0.01
           or Tm * (k.tail_mass(0.9 * X) - k.tail_mass(X)) > 0.5 * wrap_tol):
        X *= 1.5
    n = 16
    while 2.0 * X / n > dx and n < n_cap:
        n *= 2
    return Grid(X, n)
