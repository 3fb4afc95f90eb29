"""Threshold brackets by simulation, criterion bounds, sweeps over eps, scaling fits."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .convops import Grid
from .criteria import (CriterionOptions, ExtinctionEvaluator, Nonlinearity, PropagationEvaluator,
                       auto_grid, propagation_T)
from .errors import (BadLevels, CriterionVacuous, InsufficientData, NoPropagationFound,
                     ThreshlabError, ValidationError)
from .kernels import Kernel
from .simulator import (EXTINCTION, PROPAGATION, UNDECIDED, EdgeConvolver, SimOptions,
                        initial_plateau, simulate)

# ---------------------------------------------------------------------------
# records


@dataclass
class ThresholdEstimate:
    eps: float
    L_ext: tuple = (math.nan, math.nan)
    L_prop: tuple = (math.nan, math.nan)
    undecided_gap: float = math.nan
    criterion_L_ext_lower: float = math.nan
    criterion_L_prop_upper: float = math.nan
    n_sims: int = 0
    verdicts: list = field(default_factory=list)
    error: str = ""

    def sandwich_ok(self) -> bool | None:
        """None when some quantity is not finite."""
        vals = [self.criterion_L_ext_lower, self.L_ext[1], self.L_prop[0], self.criterion_L_prop_upper]
        if not all(math.isfinite(v) for v in vals):
            return None
        return self.criterion_L_ext_lower <= self.L_ext[1] and self.L_prop[0] <= self.criterion_L_prop_upper

    def to_row(self) -> dict:
        return {"eps": self.eps, "L_ext_lo": self.L_ext[0], "L_ext_hi": self.L_ext[1],
                "L_prop_lo": self.L_prop[0], "L_prop_hi": self.L_prop[1],
                "undecided_gap": self.undecided_gap,
                "criterion_L_ext_lower": self.criterion_L_ext_lower,
                "criterion_L_prop_upper": self.criterion_L_prop_upper,
                "n_sims": self.n_sims, "error": self.error}


@dataclass(frozen=True)
class BisectOptions:
    tol: float = 0.05  # relative bracket width
    max_sims: int = 40
    L_start: float | None = None  # default: 2 kernel spreads
    dx: float | None = None  # default: spread / 8
    n_cap: int = 2**17
    t_end_factor: float = 50.0
    t_end_cap: float = 1e4


def sim_t_end(f: Nonlinearity, eps: float, opts: BisectOptions, crit: CriterionOptions) -> float:
    alpha = crit.alpha_for(f)
    T = propagation_T(eps, alpha, f.r_minus) if eps < 2 * alpha else 1.0 / f.r_minus
    return min(opts.t_end_cap, opts.t_end_factor * max(T, 1.0 / f.r_minus))


class SimOracle:
    """Simulation verdict for a plateau of half-width L at fixed eps."""

    def __init__(self, k: Kernel, f: Nonlinearity, eps: float, sim_opts: SimOptions,
                 bis: BisectOptions, crit: CriterionOptions):
        self.k, self.f, self.eps, self.sim_opts = k, f, eps, sim_opts
        self.spread = k.spread()
        self.dx = bis.dx or self.spread / 8.0
        self.n_cap = bis.n_cap
        self.t_end = sim_t_end(f, eps, bis, crit)
        self._conv = {}
        self.calls = 0
        self.log = []

    @property
    def L_max(self) -> float:
        return 0.8 * 0.5 * self.n_cap * self.dx * 0.999

    def grid_for(self, L: float) -> Grid:
        need = max(2.5 * L, L + 30.0 * self.spread)
        n = 16
        while 0.5 * n * self.dx < need and n < self.n_cap:
            n *= 2
        return Grid(0.5 * n * self.dx, n)

    def __call__(self, L: float) -> str:
        g = self.grid_for(L)
        if g not in self._conv:
            self._conv = {g: EdgeConvolver(self.k, g)}  # keep one grid's kernel at a time
        u0 = initial_plateau(self.f.theta, self.eps, L, g)
        _, out = simulate(self.k, self.f, u0, self.t_end, self.sim_opts, self._conv[g])
        self.calls += 1
        self.log.append((float(L), out.verdict))
        return out.verdict


def find_thresholds(k: Kernel, f: Nonlinearity, eps: float, sim_opts: SimOptions | None = None,
                    bisect_opts: BisectOptions | None = None,
                    crit_opts: CriterionOptions | None = None) -> ThresholdEstimate:
    """Three-state brackets (extinct below, undecided band, propagating above)."""
    sim_opts = sim_opts or SimOptions()
    bis = bisect_opts or BisectOptions()
    crit = crit_opts or CriterionOptions()
    if not 0 < eps <= 1 - f.theta:
        raise BadLevels("eps must lie in (0, 1 - theta]")
    oracle = SimOracle(k, f, eps, sim_opts, bis, crit)
    ext_lo, ext_hi = 0.0, math.inf  # largest extinct L, smallest non-extinct L
    prop_lo, prop_hi = 0.0, math.inf  # largest non-propagating L, smallest propagating L

    def record(L, v):
        nonlocal ext_lo, ext_hi, prop_lo, prop_hi
        if v == EXTINCTION:
            ext_lo = max(ext_lo, L)
            prop_lo = max(prop_lo, L)
        elif v == PROPAGATION:
            prop_hi = min(prop_hi, L)
            ext_hi = min(ext_hi, L)
        else:
            ext_hi = min(ext_hi, L)
            prop_lo = max(prop_lo, L)

    def budget():
        return oracle.calls < bis.max_sims

    # exponential search for an (extinct, propagating) pair
    L = bis.L_start or 2.0 * oracle.spread
    L_min = 0.5 * oracle.dx
    v = oracle(L)
    record(L, v)
    up = L
    while prop_hi == math.inf and budget():
        up *= 2.0
        if up > oracle.L_max:
            raise NoPropagationFound(f"no propagation up to L = {oracle.L_max:g}")
        record(up, oracle(up))
    down = L
    while ext_lo == 0.0 and budget():
        down *= 0.5
        if down < L_min:
            break
        record(down, oracle(down))

    # bisection, alternating between the two brackets
    def wide(lo, hi):
        return lo > 0 and math.isfinite(hi) and hi / lo - 1.0 > bis.tol

    while budget() and (wide(ext_lo, ext_hi) or wide(prop_lo, prop_hi)):
        if wide(ext_lo, ext_hi):
            mid = math.sqrt(ext_lo * ext_hi)
            record(mid, oracle(mid))
        if budget() and wide(prop_lo, prop_hi):
            mid = math.sqrt(prop_lo * prop_hi)
            record(mid, oracle(mid))

    gap = max(0.0, prop_lo - ext_hi) if math.isfinite(ext_hi) else math.nan
    return ThresholdEstimate(eps, (ext_lo, ext_hi), (prop_lo, prop_hi), gap, n_sims=oracle.calls,
                             verdicts=list(oracle.log))


# ---------------------------------------------------------------------------
# criterion bounds


def _geo_bisect(pred, good: float, bad: float, rtol: float) -> tuple[float, float]:
    """pred(good) is True, pred(bad) is False; shrink geometrically."""
    while abs(bad / good - 1.0) > rtol:
        mid = math.sqrt(good * bad)
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good, bad


def criterion_L_ext_lower(k: Kernel, f: Nonlinearity, eps: float, opts: CriterionOptions | None = None,
                          rtol: float = 1e-3) -> float:
    """Largest L certified extinct by the criterion."""
    opts = opts or CriterionOptions()
    if eps >= f.theta:
        raise CriterionVacuous("the extinction criterion cannot hold for eps >= theta")
    T_hi = min(opts.T_max, math.log(f.theta / eps) / f.r_plus)
    L_guess = 20.0 * k.spread()
    for _ in range(12):
        g = auto_grid(k, L_guess, T_hi, mass_tol=0.05 * eps, n_cap=opts.n_cap, wrap_tol=opts.wrap_tol)
        ev = ExtinctionEvaluator(k, f, eps, g, opts)
        pred = lambda L: ev.evaluate(L, refine=True).satisfied
        L_lo = 0.5 * g.dx
        if not pred(L_lo):
            raise CriterionVacuous("the extinction criterion fails even for the smallest L")
        L = L_lo
        while L * 2.0 <= 0.5 * g.X and pred(L * 2.0):
            L *= 2.0
        if L * 2.0 <= 0.5 * g.X:
            good, _ = _geo_bisect(pred, L, 2.0 * L, rtol)
            return good
        L_guess *= 4.0
    raise CriterionVacuous("the extinction criterion holds beyond the searchable range")


def criterion_L_prop_upper(k: Kernel, f: Nonlinearity, eps: float, opts: CriterionOptions | None = None,
                           rtol: float = 1e-3) -> float:
    """Smallest L certified to propagate by the criterion."""
    opts = opts or CriterionOptions()
    alpha = opts.alpha_for(f)
    T = propagation_T(eps, alpha, f.r_minus)
    L_guess = 20.0 * k.spread()
    lhs = eps / (2.0 * (f.theta + eps))
    for _ in range(14):
        g = auto_grid(k, (1.0 - opts.m) * L_guess, T, mass_tol=0.05 * lhs, n_cap=opts.n_cap,
                      wrap_tol=opts.wrap_tol)
        ev = PropagationEvaluator(k, f, eps, g, opts)
        pred = lambda L: ev.evaluate(L).satisfied
        L_top = 0.5 * g.X / (1.0 - opts.m)
        if pred(L_top):
            L = L_top
            while L > g.dx and pred(0.5 * L):
                L *= 0.5
            if L <= g.dx:
                return L
            good, _ = _geo_bisect(pred, L, 0.5 * L, rtol)
            return good
        L_guess *= 4.0
    raise CriterionVacuous("the propagation criterion fails on the searchable range")


def criterion_bounds(k: Kernel, f: Nonlinearity, eps: float, opts: CriterionOptions | None = None,
                     strict: bool = True) -> tuple[float, float]:
    """(L_ext_lower, L_prop_upper); vacuous sides raise, or give nan when strict is False."""
    out = []
    for fn in (criterion_L_ext_lower, criterion_L_prop_upper):
        try:
            out.append(fn(k, f, eps, opts))
        except (CriterionVacuous, BadLevels):
            if strict:
                raise
            out.append(math.nan)
    return out[0], out[1]


# ---------------------------------------------------------------------------
# sweeps


def _sweep_one(args):
    k, f, eps, sim_opts, bis, crit = args
    try:
        est = find_thresholds(k, f, eps, sim_opts, bis, crit)
    except ThreshlabError as exc:
        est = ThresholdEstimate(eps, error=f"{type(exc).__name__}: {exc}")
    try:
        lo, hi = criterion_bounds(k, f, eps, crit, strict=False)
        est.criterion_L_ext_lower, est.criterion_L_prop_upper = lo, hi
    except ThreshlabError as exc:
        est.error = (est.error + "; " if est.error else "") + f"{type(exc).__name__}: {exc}"
    return est


def sweep(k: Kernel, f: Nonlinearity, eps_list, sim_opts: SimOptions | None = None,
          bisect_opts: BisectOptions | None = None, crit_opts: CriterionOptions | None = None,
          threads: int = 1) -> list[ThresholdEstimate]:
    """find_thresholds and criterion_bounds for each eps, in input order."""
    eps_list = [float(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValidationError("eps_list must be strictly decreasing")
    jobs = [(k, f, e, sim_opts or SimOptions(), bisect_opts or BisectOptions(),
             crit_opts or CriterionOptions()) for e in eps_list]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_sweep_one, jobs))
    return [_sweep_one(j) for j in jobs]


# ---------------------------------------------------------------------------
# scaling fits

MODELS = ("PowerOfInvEps", "Log", "LogPower", "ExpLogPower")


@dataclass
class ScalingFit:
    model: str
    fitted: dict
    r_squared: float

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValidationError(f"unknown model {self.model!r}")


def fit_scaling(eps, L, model: str, p: float = 1.0, gamma: float = 2.0) -> ScalingFit:
    """Least squares in the model's linearizing coordinates.

    PowerOfInvEps: ln L vs ln(1/eps); Log: L vs ln(1/eps);
    LogPower: L vs ln(1/eps)^p; ExpLogPower: ln L vs ln(1/eps)^(1/gamma).
    """
    eps = np.asarray(eps, dtype=float)
    L = np.asarray(L, dtype=float)
    ok = np.isfinite(eps) & np.isfinite(L) & (eps > 0) & (L > 0)
    eps, L = eps[ok], L[ok]
    if eps.size < 4:
        raise InsufficientData("scaling fits need at least 4 finite points")
    s = np.log(1.0 / eps)
    if model == "PowerOfInvEps":
        X, Y = s, np.log(L)
    elif model == "Log":
        X, Y = s, L
    elif model == "LogPower":
        X, Y = s**p, L
    elif model == "ExpLogPower":
        X, Y = s ** (1.0 / gamma), np.log(L)
    else:
        raise ValidationError(f"unknown model {model!r}")
    slope, intercept = np.polyfit(X, Y, 1)
    resid = Y - (slope * X + intercept)
    ss_tot = float(np.sum((Y - Y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    r2 = min(max(r2, 0.0), 1.0)
    if model == "PowerOfInvEps":
        fitted = {"exponent": float(slope), "prefactor": float(math.exp(intercept))}
    elif model == "ExpLogPower":
        fitted = {"slope": float(slope), "intercept": float(intercept), "gamma": gamma}
    else:
        fitted = {"slope": float(slope), "intercept": float(intercept)}
        if model == "LogPower":
            fitted["p"] = p
    return ScalingFit(model, fitted, r2)
