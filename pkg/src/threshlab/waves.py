"""Traveling waves J*U - U - cU' + f(U) = 0 and the expanding-front sub-solution.

A front is grown by simulation from a step, its speed read off the front
trajectory, and the recentered shape polished by Newton's method on the
discretized wave equation (U extended by 0 on the left and 1 on the right,
phase fixed by U(0) = 1/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, linalg
from scipy.interpolate import CubicSpline
from scipy.optimize import isotonic_regression

from .convops import Grid, GridField
from .criteria import Nonlinearity
from .errors import ConstructionFailed, InvalidNonlinearity, NoWave, ValidationError
from .kernels import Kernel
from .simulator import EdgeConvolver, SimOptions, SimState, front_position, step


# ---------------------------------------------------------------------------
# discrete wave operator


class _ProfileOperator:
    """Quadrature of J*U on a profile grid with U = 0 (left) and 1 (right) outside."""

    def __init__(self, k: Kernel, g: Grid):
        m, dz = g.n, g.dx
        offs = np.arange(-(2 * m), 2 * m + 1) * dz
        w = np.asarray(k.pdf(offs), dtype=float) * dz
        w *= (1.0 - k.tail_mass(2 * m * dz)) / w.sum()
        center = 2 * m
        self.A = linalg.toeplitz(w[center : center + m], w[center - m + 1 : center + 1][::-1])
        # weight of all offsets reaching beyond the right edge: o < -(m - 1 - i)
        tail = np.cumsum(w)  # tail[j] = sum_{o <= j - center}
        i = np.arange(m)
        idx = center - (m - 1 - i) - 1
        self.right = tail[idx] + 0.5 * k.tail_mass(2 * m * dz)
        self.grid = g

    def conv(self, U):
        return self.A @ U + self.right


def _diff_matrix(m: int, dz: float, order: int = 4):
    """Centered first-derivative matrix plus the ghost contribution of U = 1 on the right."""
    D = np.zeros((m, m))
    ghost = np.zeros(m)
    if order == 2:
        stencil = {-1: -0.5, 1: 0.5}
    else:
        stencil = {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12}
    for i in range(m):
        for o, c in stencil.items():
            j = i + o
            if 0 <= j < m:
                D[i, j] += c / dz
            elif j >= m:
                ghost[i] += c / dz
    return D, ghost


@dataclass(eq=False)
class WaveProfile:
    c: float
    U: GridField
    kernel: Kernel
    f: Nonlinearity
    info: dict = field(default_factory=dict)

    @property
    def z(self) -> np.ndarray:
        return self.U.grid.x

    @property
    def dz(self) -> float:
        return self.U.grid.dx

    def __post_init__(self):
        v = self.U.values
        if np.any(np.diff(v) < -1e-4):
            raise ValidationError("profile must be nondecreasing")
        if v[0] > 0.05 or v[-1] < 0.95:
            raise ValidationError("profile must connect 0 to 1")
        z = self.U.grid.x
        self._spline = CubicSpline(z, v)
        self._dspline = self._spline.derivative()
        self._lo, self._hi = float(v[0]), float(v[-1])

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=float)
        z = self.z
        out = self._spline(np.clip(zeta, z[0], z[-1]))
        out = np.where(zeta < z[0], self._lo, out)
        return np.where(zeta > z[-1], self._hi, out)

    def derivative(self, zeta):
        zeta = np.asarray(zeta, dtype=float)
        z = self.z
        out = self._dspline(np.clip(zeta, z[0], z[-1]))
        return np.where((zeta < z[0]) | (zeta > z[-1]), 0.0, out)

    def inverse(self, level: float) -> float:
        """Smallest z with U(z) >= level (linear interpolation)."""
        v = self.U.values
        j = int(np.argmax(v >= level))
        if v[j] < level:
            return float(self.z[-1])
        if j == 0:
            return float(self.z[0])
        return float(self.z[j - 1] + (level - v[j - 1]) / (v[j] - v[j - 1]) * self.dz)

    def to_rows(self):
        return [{"z": float(a), "U": float(b)} for a, b in zip(self.z, self.U.values)]


@dataclass(frozen=True)
class WaveOptions:
    sim_X: float = 150.0
    sim_n: int = 4096
    profile_Z: float = 30.0
    profile_n: int = 600
    sample_dt: float = 2.0
    newton_tol: float = 1e-11
    max_newton: int = 30


def extract_profile(k: Kernel, f: Nonlinearity, g: Grid | None = None,
                    opts: WaveOptions | None = None) -> WaveProfile:
    """Grow a front from a step, measure its speed, then polish the profile."""
    opts = opts or WaveOptions()
    if not f.bistable:
        raise InvalidNonlinearity("wave extraction needs a bistable nonlinearity")
    if not math.isfinite(k.m1):
        raise ValidationError("wave extraction needs a kernel with a finite first moment")
    g = g or Grid(opts.sim_X, opts.sim_n)
    x = g.x
    u = np.where(x < -0.6 * g.X, 1.0, 0.0)
    u[np.isclose(x, -0.6 * g.X)] = 0.5
    dt = SimOptions().dt_for(f)
    conv = EdgeConvolver(k, g)
    state = SimState(0.0, GridField(g, u), dt)
    every = max(1, int(round(opts.sample_dt / dt)))
    ts, fronts, shapes = [], [], []
    zq = Grid(opts.profile_Z, opts.profile_n).x
    j = 0
    t_cap = 1e4
    while state.t < t_cap:
        if j % every == 0:
            fr = front_position(state.u, 0.5)
            ts.append(state.t)
            fronts.append(fr)
            shapes.append(np.interp(fr - zq, x, state.u.values))
            if fr > 0.6 * g.X:
                break
        state = step(state, conv, f)
        j += 1
    ts, fronts = np.asarray(ts), np.asarray(fronts)
    half = len(ts) // 2
    if len(ts) - half < 5:
        raise NoWave("front did not settle within the simulation horizon")
    coef, cov = np.polyfit(ts[half:], fronts[half:], 1, cov=True)
    c_sim, c_err = float(coef[0]), float(math.sqrt(max(cov[0, 0], 0.0)))
    moved = fronts[-1] - fronts[half]
    if not c_sim > 0 or moved < 5 * g.dx or c_err > 0.1 * abs(c_sim):
        raise NoWave(f"front speed fit failed: c = {c_sim:.4g} +/- {c_err:.2g}")
    U0 = np.mean(shapes[half:], axis=0)
    pg = Grid(opts.profile_Z, opts.profile_n)
    U, c, iters, res = _newton(k, f, pg, U0, c_sim, opts)
    U = isotonic_regression(U).x
    wp = WaveProfile(c, GridField(pg, U), k, f,
                     info={"c_simulated": c_sim, "c_stderr": c_err, "newton_iterations": iters,
                           "newton_residual": res})
    return wp


def _newton(k, f, pg: Grid, U, c, opts: WaveOptions):
    op = _ProfileOperator(k, pg)
    m, dz = pg.n, pg.dx
    D, ghost = _diff_matrix(m, dz, 4)
    mid = pg.origin
    U = np.clip(np.asarray(U, dtype=float), 0.0, 1.0)
    res = math.inf
    for it in range(1, opts.max_newton + 1):
        F = op.conv(U) - U - c * (D @ U + ghost) + f(U)
        F = np.append(F, U[mid] - 0.5)
        res = float(np.max(np.abs(F)))
        if res < opts.newton_tol:
            return U, c, it - 1, res
        Jm = np.zeros((m + 1, m + 1))
        Jm[:m, :m] = op.A - np.eye(m) - c * D + np.diag(f.derivative(U))
        Jm[:m, m] = -(D @ U + ghost)
        Jm[m, mid] = 1.0
        delta = np.linalg.solve(Jm, -F)
        U = U + delta[:m]
        c = c + delta[m]
    if res > 1e-8:
        raise NoWave(f"Newton polish did not converge (residual {res:.3g})")
    return U, c, opts.max_newton, res


def profile_residual(k: Kernel, f: Nonlinearity, w: WaveProfile, c: float | None = None) -> float:
    """sup |J*U - U - cU' + f(U)| over the central 80% (second-order U')."""
    c = w.c if c is None else c
    pg = w.U.grid
    op = _ProfileOperator(k, pg)
    D, ghost = _diff_matrix(pg.n, pg.dx, 2)
    U = w.U.values
    r = op.conv(U) - U - c * (D @ U + ghost) + f(U)
    m = pg.n
    lo, hi = int(0.1 * m), int(0.9 * m)
    return float(np.max(np.abs(r[lo:hi])))


def integrability_margins(w: WaveProfile) -> tuple[float, float]:
    """(int_{z<0} U, int_{z>0} (1 - U)) with exponential tails beyond the grid."""
    z, U, dz = w.z, w.U.values, w.dz
    mid = w.U.grid.origin
    left = integrate.trapezoid(U[: mid + 1], z[: mid + 1])
    right = integrate.trapezoid(1.0 - U[mid:], z[mid:])
    left += _exp_tail(U[:8], dz)
    right += _exp_tail((1.0 - U[-8:])[::-1], dz)
    return float(left), float(right)


def _exp_tail(v, dz) -> float:
    # v decays away from the grid edge; fit v ~ A e^{-lam (distance)} toward the edge
    v = np.asarray(v, dtype=float)
    if np.any(v <= 0):
        return 0.0
    lam = -np.polyfit(np.arange(v.size)[::-1] * dz, np.log(v), 1)[0]
    lam = -lam if lam < 0 else lam
    return float(v[0] / lam) if lam > 0 else 0.0


# ---------------------------------------------------------------------------
# sub-solution


@dataclass(eq=False)
class SubsolutionParams:
    alpha: float
    q0: float
    q1: float
    mu: float
    delta: float
    b: float
    C: float
    vartheta: float
    xi0: float
    s0: float
    eta0: float
    t: np.ndarray
    q: np.ndarray
    q_prime: np.ndarray
    eta: np.ndarray
    eta_prime: np.ndarray
    g: np.ndarray

    def at(self, t):
        """(q, q', xi, xi') at time t by interpolation of the tables."""
        t = np.asarray(t, dtype=float)
        if np.any(t > self.t[-1]):
            raise ValidationError("time beyond the tabulated horizon")
        q = np.interp(t, self.t, self.q)
        qp = np.interp(t, self.t, self.q_prime)
        xi = self.xi0 + np.interp(t, self.t, self.eta)
        xip = np.interp(t, self.t, self.eta_prime)
        return q, qp, xi, xip


def _mu_near_one(f: Nonlinearity, delta: float, q1: float) -> float:
    u = np.linspace(1.0 - delta, 1.0, 81)[:, None]
    s = np.linspace(0.0, q1, 161)[None, 1:]
    phi = (f(u - s) - f(u)) / s
    return float(min(phi.min(), (-f.derivative(u)).min()))


def _mu_near_zero(f: Nonlinearity, delta: float, q1: float) -> float:
    u = np.linspace(-q1, delta, 401)
    return float(-np.max(f.derivative(u)))


def build_subsolution(w: WaveProfile, f: Nonlinearity, alpha: float, q0: float | None = None,
                      q1: float | None = None, t_max: float = 60.0, dt: float = 0.005,
                      n_delta: int = 60) -> SubsolutionParams:
    """Choose (mu, delta, b, s0, xi0) and tabulate q, eta on [0, t_max]."""
    th, c = f.theta, w.c
    if not c > 0:
        raise ConstructionFailed("the construction needs a positive wave speed")
    if not th < alpha <= 1:
        raise ValidationError("alpha must lie in (theta, 1]")
    lo, hi = 1.0 - alpha, 1.0 - th
    q0 = lo + (hi - lo) / 3.0 if q0 is None else q0
    q1 = lo + 2.0 * (hi - lo) / 3.0 if q1 is None else q1
    if not lo < q0 < q1 < hi:
        raise ValidationError("need 1 - alpha < q0 < q1 < 1 - theta")
    uu = np.linspace(0.0, 1.0 - 1e-9, 20001)
    b = float(max(np.max(f(uu) / (1.0 - uu)), 1e-12))
    z, U = w.z, w.U.values
    mid = w.U.grid.origin
    right_int = float(integrate.trapezoid(1.0 - U[mid:], z[mid:]))
    best = None
    reasons = set()
    for delta in np.linspace(0.005, 0.45, n_delta):
        mu = min(_mu_near_one(f, delta, q1), _mu_near_zero(f, delta, q1))
        if not mu > 0:
            reasons.add("mu")
            continue
        za, zb = w.inverse(delta), w.inverse(1.0 - delta)
        zz = np.linspace(za, zb, 400)
        vartheta = float(np.min(w.derivative(zz)))
        if not vartheta > 0:
            reasons.add("vartheta")
            continue
        need = (1.0 + b / mu) * (1.0 - U) + q0 <= q1
        ok = np.nonzero(need & (z >= 0))[0]
        if ok.size == 0:
            reasons.add("s0")
            continue
        s0 = float(z[ok[0]])
        C = f.lipschitz_on(delta - q1, 1.0 - delta)
        eta0 = (C / (c * vartheta)) * right_int + (C + mu) * q0 / (vartheta * mu) \
            + b * (C + mu) / (c * vartheta * mu) * right_int
        score = eta0 + s0
        if best is None or score < best[0]:
            best = (score, delta, mu, vartheta, s0, C, eta0)
    if best is None:
        raise ConstructionFailed(f"no feasible (mu, delta, s0); failing conditions: {sorted(reasons)}")
    _, delta, mu, vartheta, s0, C, eta0 = best
    xi0 = -eta0 - s0
    t = np.arange(0.0, t_max + 0.5 * dt, dt)
    drive = 1.0 - w(c * t + s0)
    # g' = drive - mu g, g(0) = 0, integrated exactly for piecewise-linear drive
    g = np.zeros_like(t)
    e = math.exp(-mu * dt)
    a1 = (1.0 - e) / mu
    a2 = (dt - a1) / (mu * dt)
    for j in range(1, t.size):
        g[j] = e * g[j - 1] + drive[j - 1] * (a1 - a2) + drive[j] * a2
    q = q0 * np.exp(-mu * t) + b * g
    q_prime = -mu * q0 * np.exp(-mu * t) + b * (drive - mu * g)
    eta_prime = (C * drive + (C + mu) * q) / vartheta
    eta = integrate.cumulative_trapezoid(eta_prime, t, initial=0.0)
    return SubsolutionParams(alpha, q0, q1, mu, float(delta), b, C, vartheta, xi0, s0, eta0,
                             t, q, q_prime, eta, eta_prime, g)


def subsolution_field(w: WaveProfile, sp: SubsolutionParams, t: float, x: np.ndarray) -> np.ndarray:
    q, _, xi, _ = sp.at(t)
    zp = x + w.c * t - xi
    zm = -x + w.c * t - xi
    return w(zp) + w(zm) - 1.0 - q


def plateau_half_width(w: WaveProfile, sp: SubsolutionParams) -> float:
    """Smallest L with U(-L - xi0) <= q0, so that u(0) <= alpha 1_(-L, L)."""
    return max(-sp.xi0 - w.inverse(sp.q0), 0.0) + w.dz


def subsolution_residual(k: Kernel, f: Nonlinearity, w: WaveProfile, sp: SubsolutionParams,
                         t: float, xg: Grid, conv: EdgeConvolver | None = None):
    """N u on the grid xg at time t, plus the region masks of the three cases."""
    conv = conv or EdgeConvolver(k, xg)
    x = xg.x
    q, qp, xi, xip = sp.at(t)
    zp = x + w.c * t - xi
    zm = -x + w.c * t - xi
    Up, Um = w(zp), w(zm)
    u = Up + Um - 1.0 - q
    ut = (w.c - xip) * (w.derivative(zp) + w.derivative(zm)) - qp
    N = ut - conv(u) + u - f(u)
    # case split on U_- for x >= 0 and on U_+ for x < 0 (mirror image)
    Ulow = np.where(x >= 0, Um, Up)
    masks = {"near_one": Ulow >= 1.0 - sp.delta, "near_zero": Ulow <= sp.delta}
    masks["middle"] = ~(masks["near_one"] | masks["near_zero"])
    return N, masks


def check_subsolution(k: Kernel, f: Nonlinearity, w: WaveProfile, sp: SubsolutionParams,
                      t_grid, x_grid: Grid) -> float:
    """max of N u over the (t, x) grid; a valid sub-solution gives a value <= 0 up to round-off."""
    conv = EdgeConvolver(k, x_grid)
    worst = -math.inf
    for t in np.asarray(t_grid, dtype=float):
        if t <= 0:
            continue
        N, _ = subsolution_residual(k, f, w, sp, float(t), x_grid, conv)
        worst = max(worst, float(N.max()))
    return worst


def check_grid(w: WaveProfile, sp: SubsolutionParams, t_max: float, dx: float | None = None) -> Grid:
    """A grid wide enough to hold the sub-solution fronts up to t_max."""
    dx = dx or w.dz
    X = -sp.xi0 + w.c * t_max + 2.0 * w.z[-1] + 20.0
    n = 2 * int(math.ceil(X / dx))
    n += n % 2
    return Grid(float(X), max(n, 16))
