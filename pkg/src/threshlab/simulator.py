"""Explicit Euler integration of u_t = J*u - u + f(u) with outcome classification.

Outside the grid the solution is extended by its edge values. For compactly
supported data this is the zero extension, and it keeps constants as exact
fixed points. The step map is order preserving whenever dt (1 + Lip f) <= 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .convops import Grid, GridField, apply_fundamental, circular_convolve, discretize
from .criteria import Nonlinearity
from .errors import CFLViolation, NoCrossing, PlateauTooWide, ValidationError
from .kernels import Kernel

EXTINCTION, PROPAGATION, UNDECIDED = "Extinction", "Propagation", "Undecided"


def initial_plateau(theta: float, eps: float, L: float, g: Grid) -> GridField:
    """(theta + eps) on (-L, L) as cell averages: exact mass (theta + eps) 2L."""
    if L >= 0.8 * g.X:
        raise PlateauTooWide(f"L = {L:g} needs X > {L / 0.8:g}")
    if not L > 0:
        raise ValidationError("L must be positive")
    x, dx = g.x, g.dx
    # overlap of each cell [x - dx/2, x + dx/2] with (-L, L)
    frac = np.clip((np.minimum(x + 0.5 * dx, L) - np.maximum(x - 0.5 * dx, -L)) / dx, 0.0, 1.0)
    return GridField(g, (theta + eps) * frac)


class EdgeConvolver:
    """J * u on the grid with u extended by u[0] on the left and u[-1] on the right."""

    def __init__(self, k: Kernel, g: Grid):
        self.grid = g
        n = g.n
        wide = discretize(k, Grid(2.0 * g.X, 2 * n))
        kv = wide.values * g.dx  # weights per offset, origin at index n
        kv[0] = kv[1] = kv[-1] = 0.0  # keep offsets +-(n-1) symmetric; their mass joins the split below
        self._size = 4 * n
        padded = np.zeros(self._size)
        padded[: 2 * n] = kv
        self._kfft = np.fft.rfft(padded)
        # one-sided weight beyond offset o, with the mass past 2X split evenly
        half = kv[n + 1 :]
        beyond = np.concatenate([np.cumsum(half[::-1])[::-1], [0.0]]) + 0.5 * (1.0 - kv.sum())
        m = np.arange(n)
        self._left = beyond[m]  # offsets > m reach past the left edge
        self._right = beyond[n - 1 - m]

    def __call__(self, u: np.ndarray) -> np.ndarray:
        n = self.grid.n
        full = np.fft.irfft(np.fft.rfft(u, self._size) * self._kfft, self._size)
        return full[n : 2 * n] + u[0] * self._left + u[-1] * self._right


@dataclass
class SimState:
    t: float
    u: GridField
    dt: float
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SimOptions:
    dt: float | None = None  # default 0.5/(1 + Lip f)
    margin_e: float = 0.05
    margin_p: float = 0.05
    W_prop: float | None = None  # default 10 kernel spreads
    sample_dt: float = 1.0
    trailing: float = 0.2
    saturation: float = 0.9

    def dt_for(self, f: Nonlinearity) -> float:
        return self.dt if self.dt is not None else 0.5 / (1.0 + f.lipschitz)


@dataclass
class Outcome:
    verdict: str
    t_decided: float
    evidence: dict = field(default_factory=dict)


@dataclass
class Trajectory:
    t: list = field(default_factory=list)
    sup: list = field(default_factory=list)
    inf: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    front_right: list = field(default_factory=list)
    width: list = field(default_factory=list)

    def rows(self):
        return [dict(t=t, sup=s, inf=i, mass=m, front_right=fr, width=w)
                for t, s, i, m, fr, w in zip(self.t, self.sup, self.inf, self.mass,
                                             self.front_right, self.width)]


def step(s: SimState, conv, f: Nonlinearity) -> SimState:
    """One explicit Euler step; ``conv`` maps u to J*u."""
    if s.dt * (1.0 + f.lipschitz) > 1.0 + 1e-12:
        raise CFLViolation(f"dt = {s.dt:g} breaks dt (1 + Lip) <= 1")
    u = s.u.values
    new = u + s.dt * (conv(u) - u + f(u))
    return SimState(s.t + s.dt, GridField(s.u.grid, new), s.dt, {})


def front_position(u: GridField, level: float) -> float:
    """Largest x with u(x) >= level, linearly interpolated."""
    v = u.values
    idx = np.nonzero(v >= level)[0]
    if idx.size == 0:
        raise NoCrossing(f"field never reaches {level:g}")
    j = idx[-1]
    x = u.grid.x
    if j == v.size - 1:
        return float(x[j])
    # v[j] >= level > v[j+1]
    return float(x[j] + (v[j] - level) / (v[j] - v[j + 1]) * u.grid.dx)


def _width_above(v: np.ndarray, level: float, dx: float) -> float:
    return float(dx * np.count_nonzero(v > level))


def classify(s: SimState, theta: float, margin_e: float, margin_p: float, W_prop: float,
             widths=None) -> Outcome:
    """Finite-time surrogate for extinction / propagation.

    ``widths`` is the history of plateau widths over the trailing window; when
    absent the growth requirement is waived (single-snapshot use).
    """
    v = s.u.values
    sup = float(v.max())
    if sup < theta - margin_e:
        return Outcome(EXTINCTION, s.t, {"sup_at_decision": sup})
    width = _width_above(v, 1.0 - margin_p, s.u.grid.dx)
    if width >= W_prop:
        grew = True
        if widths is not None:
            w = np.asarray(widths, dtype=float)
            grew = w.size >= 2 and bool(np.all(np.diff(w) >= -1e-12)) and w[-1] > w[0]
        if grew:
            return Outcome(PROPAGATION, s.t, {"sup_at_decision": sup, "plateau_width": width})
    return Outcome(UNDECIDED, s.t, {"sup_at_decision": sup, "plateau_width": width})


def default_W_prop(k: Kernel) -> float:
    return 10.0 * k.spread()


def simulate(k: Kernel, f: Nonlinearity, u0: GridField, t_end: float,
             opts: SimOptions | None = None, conv: EdgeConvolver | None = None):
    """Integrate to t_end or until a verdict; returns (Trajectory, Outcome)."""
    opts = opts or SimOptions()
    v0 = u0.values
    if v0.min() < -1e-12 or v0.max() > 1.0 + 1e-12:
        raise ValidationError("initial data must lie in [0, 1]")
    g = u0.grid
    dt = opts.dt_for(f)
    conv = conv or EdgeConvolver(k, g)
    W = opts.W_prop if opts.W_prop is not None else default_W_prop(k)
    # a plateau no wider than the initial support is not evidence of spreading
    W = max(W, g.dx * np.count_nonzero(v0 > 0))
    state = SimState(0.0, u0, dt)
    traj = Trajectory()
    every = max(1, int(round(opts.sample_dt / dt)))
    n_steps = int(math.ceil(t_end / dt))
    speed_pts = []
    for j in range(n_steps + 1):
        if j % every == 0 or j == n_steps:
            v = state.u.values
            try:
                fr = front_position(state.u, 0.5)
            except NoCrossing:
                fr = math.nan
            traj.t.append(state.t)
            traj.sup.append(float(v.max()))
            traj.inf.append(float(v.min()))
            traj.mass.append(float(g.dx * v.sum()))
            traj.front_right.append(fr)
            traj.width.append(_width_above(v, 1.0 - opts.margin_p, g.dx))
            if math.isfinite(fr):
                speed_pts.append((state.t, fr))
            # growth over the trailing fraction of the run so far
            t_cut = (1.0 - opts.trailing) * state.t
            recent = [w for t, w in zip(traj.t, traj.width) if t >= t_cut]
            out = classify(state, f.theta, opts.margin_e, opts.margin_p, W, recent)
            saturated = math.isfinite(fr) and fr >= opts.saturation * g.X
            if saturated and out.verdict != EXTINCTION:
                out = Outcome(PROPAGATION, state.t, {**out.evidence, "domain_saturated": True})
            if out.verdict != UNDECIDED:
                out.evidence["front_speed_estimate"] = _speed(speed_pts)
                return traj, out
        if j == n_steps:
            break
        state = step(state, conv, f)
    out = classify(state, f.theta, opts.margin_e, opts.margin_p, W, [0.0])
    out.evidence["front_speed_estimate"] = _speed(speed_pts)
    return traj, Outcome(UNDECIDED, state.t, out.evidence)


def _speed(pts) -> float:
    if len(pts) < 4:
        return math.nan
    pts = np.asarray(pts[len(pts) // 2 :])
    if len(pts) < 2 or np.ptp(pts[:, 0]) == 0:
        return math.nan
    return float(np.polyfit(pts[:, 0], pts[:, 1], 1)[0])


def linear_tilted_solution(k: Kernel, theta: float, r_minus: float, eps: float, L: float, t: float,
                           g: Grid, tol: float = 1e-12) -> GridField:
    """theta + e^{r t} (v - theta), v the linear nonlocal flow from the plateau."""
    u0 = initial_plateau(theta, eps, L, g)
    if t == 0:
        return u0
    v = apply_fundamental(k, t, u0, tol)
    return GridField(g, theta + math.exp(r_minus * t) * (v.values - theta), info={"t": t})


def euler_linear_tilted(k: Kernel, theta: float, r_minus: float, eps: float, L: float, t: float,
                        g: Grid, dt: float) -> np.ndarray:
    """Explicit Euler for w_t = J*w - w + r (w - theta) on the periodic grid."""
    base = discretize(k, g)
    w = initial_plateau(theta, eps, L, g).values.copy()
    n = int(round(t / dt))
    h = t / n
    for _ in range(n):
        jw = circular_convolve(base, GridField(g, w))
        w = w + h * (jw - w + r_minus * (w - theta))
    return w
