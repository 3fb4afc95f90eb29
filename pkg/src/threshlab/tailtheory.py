"""Bounds and asymptotics for the tails R_i(L) of convolution powers."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from .convops import Grid, conv_power, discretize, grid_tail, tail_mass_i
from .errors import BelowThreshold, NotExpBounded, Underflow, ValidationError, WrongRegime
from .kernels import Kernel, TailClass

BOUND_NAMES = ("Durrett", "Cramer", "Nagaev", "StableAsymptotic", "MikoschRegime")


@dataclass
class TailBoundReport:
    bound_name: str
    i: int
    L: float
    bound_value: float
    empirical_value: float | None = None
    fitted_constants: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.bound_name not in BOUND_NAMES:
            raise ValidationError(f"unknown bound {self.bound_name!r}")
        if not self.bound_value >= 0:
            raise ValidationError("bound value must be nonnegative")

    @property
    def dominates(self) -> bool | None:
        if self.empirical_value is None:
            return None
        return self.bound_value >= self.empirical_value * (1.0 - 1e-6)

    def to_row(self) -> dict:
        row = asdict(self)
        consts = row.pop("fitted_constants")
        row.update({f"const_{k}": v for k, v in sorted(consts.items())})
        return row


def durrett_bound(k: Kernel, i: int, L: float) -> float:
    """(L/2) int_{-2/L}^{2/L} (1 - J^(xi)^i) dxi."""
    if not L > 0:
        raise ValidationError("L must be positive")

    def integrand(xi):
        # 1 - (1 - d)^i without cancellation
        d = float(k.one_minus_fourier(xi))
        if d >= 1.0:
            return 1.0 - (1.0 - d) ** i
        return -math.expm1(i * math.log1p(-d))

    val = integrate.quad(integrand, 0.0, 2.0 / L, epsrel=1e-10, epsabs=0, limit=200)[0]
    return L * val


def stable_asymptotic(k: Kernel, i: int, L: float, C_fitted: float) -> float:
    """i a C / L^beta, the small-beta tail asymptotic."""
    beta, a = k.expansion()
    if beta >= 2.0:
        raise WrongRegime("the stable asymptotic needs beta < 2")
    return i * a * C_fitted / L**beta


def fit_stable_constant(k: Kernel, Ls=(1e3, 2e3, 5e3, 1e4)) -> float:
    """C from L^beta R1(L) / a, averaged over large L."""
    beta, a = k.expansion()
    if beta >= 2.0:
        raise WrongRegime("the stable asymptotic needs beta < 2")
    return float(np.mean([L**beta * k.tail_mass(L) / a for L in Ls]))


def cramer_bound(k: Kernel, i: int, L: float) -> float:
    """e^{-i Lambda*(L)}, an upper bound on R_i(iL)."""
    if not k.exp_bounded:
        raise NotExpBounded(f"{k!r} has no exponential moments")
    return math.exp(-i * k.rate_function(L))


def cramer_empirical_rate(k: Kernel, i: int, L: float, g: Grid) -> float:
    """-(1/i) ln R_i(iL) from the grid."""
    if not k.exp_bounded:
        raise NotExpBounded(f"{k!r} has no exponential moments")
    if L == 0:
        return 0.0
    base = discretize(k, g)
    p = conv_power(base, i) if i > 1 else base
    if i * L > 0.5 * g.X:
        raise ValidationError("iL must not exceed X/2")
    R = grid_tail(p, i * L) + p.mass_loss
    # transform round-off leaves ~eps * max(p) per node across the whole grid
    noise = 10.0 * 2.0 * g.X * np.finfo(float).eps * float(p.values.max())
    floor = max(1e-300, 10.0 * p.mass_loss, noise)
    if R <= floor:
        raise Underflow(f"R_{i}({i * L:g}) = {R:.3g} is below the floor {floor:.3g}")
    return -math.log(R) / i


def nagaev_bound(i: int, L: float, R1_half: float, C_fitted: float) -> float:
    """C [exp(-L^2/(20 i)) + i R1(L/2)]."""
    return C_fitted * (math.exp(-(L**2) / (20.0 * i)) + i * R1_half)


def calibrate_nagaev(k: Kernel, g: Grid, lattice) -> float:
    """Smallest C making the bound dominate the grid tails on a calibration lattice."""
    ratios = []
    for i, L in lattice:
        emp = tail_mass_i(k, i, L, g)
        ratios.append(emp / nagaev_bound(i, L, k.tail_mass(0.5 * L), 1.0))
    return float(max(ratios))


def mikosch_threshold(n: int, tc: TailClass) -> float:
    """Threshold d_n above which R_n(L) ~ n R1(L)."""
    if n < 2:
        raise ValidationError("the threshold sequence starts at n = 2")
    ln = math.log(n)
    if tc.kind == "RV":
        return math.sqrt(n * ln)
    if tc.kind == "LN":
        if tc.gamma <= 2:
            return math.sqrt(n) * ln ** (tc.gamma / 2.0)
        return math.sqrt(n) * ln ** (tc.gamma - 1.0)
    return n ** (1.0 / (2.0 - 2.0 * tc.alpha))


def mikosch_regime_check(k: Kernel, tc: TailClass, i: int, L: float, g: Grid) -> TailBoundReport:
    """Ratio R_i(L) / (i R1(L)), reported as the empirical value."""
    if i == 1:
        return TailBoundReport("MikoschRegime", 1, L, 1.0, 1.0)
    d = mikosch_threshold(i, tc)
    if L < d:
        raise BelowThreshold(f"L = {L:g} is below d_{i} = {d:.4g}")
    ratio = tail_mass_i(k, i, L, g) / (i * k.tail_mass(L))
    return TailBoundReport("MikoschRegime", i, L, 1.0, ratio, {"d_n": d})


def cesaro_diagnostic(k: Kernel, i: int, L: float, g: Grid) -> float:
    """int_0^L u R_i(u) du / (i a); tends to 1 slowly when beta = 2."""
    _, a = k.expansion()
    p = conv_power(discretize(k, g), i) if i > 1 else discretize(k, g)
    us = np.linspace(0.0, L, 401)
    vals = us * (grid_tail(p, us) + p.mass_loss)
    return float(integrate.trapezoid(vals, us) / (i * a))
