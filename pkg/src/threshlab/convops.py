"""Grid-based convolution powers, tail masses R_i(L), and the series kernel psi.

Fields live on a periodic grid of ``n`` nodes covering [-X, X). Convolutions
are circular FFT products; the mass a kernel carries beyond X is recorded as
``mass_loss`` and added back to every tail estimate as a conservative
correction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import ExtentTooSmall, PowerOverflow, ValidationError
from .kernels import Kernel


@dataclass(frozen=True)
class Grid:
    X: float
    n: int

    def __post_init__(self):
        if not self.X > 0:
            raise ValidationError("grid half extent must be positive")
        if self.n < 16 or self.n % 2:
            raise ValidationError("grid size must be even and at least 16")

    @property
    def dx(self) -> float:
        return 2.0 * self.X / self.n

    @property
    def x(self) -> np.ndarray:
        return -self.X + self.dx * np.arange(self.n)

    @property
    def origin(self) -> int:
        return self.n // 2


@dataclass(eq=False)
class GridField:
    grid: Grid
    values: np.ndarray
    density: bool = False
    mass_loss: float = 0.0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise ValidationError("field length must match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("field has non-finite entries")

    @property
    def mass(self) -> float:
        return float(self.grid.dx * self.values.sum())

    def at(self, x):
        """Linear interpolation of the field."""
        return np.interp(x, self.grid.x, self.values)

    def symmetry_error(self) -> float:
        v = self.values
        return float(np.max(np.abs(v[1:] - v[:0:-1])))


# -- spectral helpers --------------------------------------------------------


def _to_spectrum(values: np.ndarray) -> np.ndarray:
    # origin moved to index 0 so even fields have real transforms
    return np.fft.rfft(np.fft.ifftshift(values))


def _from_spectrum(spec: np.ndarray, n: int) -> np.ndarray:
    return np.fft.fftshift(np.fft.irfft(spec, n))


def circular_convolve(a: GridField, b: GridField) -> np.ndarray:
    """Circular convolution (a*b)(x) on the grid, including the dx factor."""
    g = a.grid
    return g.dx * _from_spectrum(_to_spectrum(a.values) * _to_spectrum(b.values), g.n)


def _check_wrap(values: np.ndarray, g: Grid, tol: float):
    edge = max(1, g.n // 20)
    outer = g.dx * (np.abs(values[:edge]).sum() + np.abs(values[-edge:]).sum())
    if outer > tol:
        raise ExtentTooSmall(f"{outer:.3g} mass in the outer 10% of the grid exceeds {tol:g}")


# -- operations --------------------------------------------------------------


def discretize(k: Kernel, g: Grid) -> GridField:
    """Point samples of J, renormalized to the mass 1 - R1(X) held on the grid."""
    deficit = k.tail_mass(g.X)
    if deficit > 0.01:
        raise ExtentTooSmall(f"R1(X) = {deficit:.3g} > 0.01 for X = {g.X:g}")
    v = np.asarray(k.pdf(g.x), dtype=float)
    v[0] = 0.0  # node -X has no mirror image
    v *= (1.0 - deficit) / (g.dx * v.sum())
    return GridField(g, v, density=True, mass_loss=deficit, info={"kernel": k.params()})


def conv_power(base: GridField, i: int, max_power: int = 100_000, wrap_tol: float = 1e-3) -> GridField:
    """i-fold convolution power by binary exponentiation of the transform."""
    if not base.density:
        raise ValidationError("conv_power needs a density field")
    if i < 1 or int(i) != i:
        raise ValidationError("power must be a positive integer")
    if i > max_power:
        raise PowerOverflow(f"power {i} exceeds the window maximum {max_power}")
    if i == 1:
        return base
    g = base.grid
    spec = _to_spectrum(base.values) * g.dx
    out = np.ones_like(spec)
    e = int(i)
    while e:
        if e & 1:
            out = out * spec
        e >>= 1
        if e:
            spec = spec * spec
    vals = np.maximum(_from_spectrum(out, g.n) / g.dx, 0.0)
    base_mass = 1.0 - base.mass_loss
    mass = base_mass**i
    s = g.dx * vals.sum()
    if s > 0:
        vals *= mass / s
    _check_wrap(vals, g, wrap_tol)
    return GridField(g, vals, density=True, mass_loss=1.0 - mass, info={"power": int(i)})


def grid_tail(f: GridField, L) -> np.ndarray | float:
    """Mass of the piecewise-linear interpolant on |x| >= L (no correction added)."""
    g = f.grid
    xs = g.x
    v = f.values
    # cumulative trapezoid integral from -X
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * g.dx)])
    total = g.dx * v.sum()

    def prim(y):
        y = np.clip(y, xs[0], xs[-1])
        j = np.clip(((y - xs[0]) / g.dx).astype(int), 0, g.n - 2)
        s = y - xs[j]
        slope = (v[j + 1] - v[j]) / g.dx
        return cum[j] + v[j] * s + 0.5 * slope * s * s

    L = np.abs(np.asarray(L, dtype=float))
    inside = prim(L) - prim(-L)
    out = np.clip(total - inside, 0.0, None)
    return out if out.ndim else float(out)


@dataclass(eq=False)
class ConvPowerSet:
    """Convolution powers i = 1..i_max of one discretized kernel."""

    kernel: Kernel
    grid: Grid
    i_max: int
    wrap_tol: float = 1e-3
    powers: dict = field(default_factory=dict)

    def __post_init__(self):
        base = discretize(self.kernel, self.grid)
        self.powers[1] = base
        spec = _to_spectrum(base.values) * self.grid.dx
        self._spec1 = spec
        self._base_mass = 1.0 - base.mass_loss

    def get(self, i: int) -> GridField:
        if i > self.i_max:
            raise PowerOverflow(f"power {i} exceeds the window maximum {self.i_max}")
        if i not in self.powers:
            self.powers[i] = conv_power(self.powers[1], i, self.i_max, self.wrap_tol)
        return self.powers[i]

    def mass_loss(self, i: int) -> float:
        return 1.0 - self._base_mass**i

    def tail(self, i: int, L) -> np.ndarray | float:
        return grid_tail(self.get(i), L) + self.mass_loss(i)


def tail_mass_i(k: Kernel, i: int, L: float, g: Grid, wrap_tol: float = 1e-3) -> float:
    """R_i(L) from the grid power, plus the escaped mass 1 - (1 - R1(X))^i."""
    if L > 0.5 * g.X:
        raise ValidationError("tail masses are only trusted for L <= X/2")
    base = discretize(k, g)
    p = conv_power(base, i, wrap_tol=wrap_tol)
    loss = p.mass_loss
    val = min(1.0, grid_tail(p, L) + loss)
    if loss > 0.1 * val:
        raise ExtentTooSmall(f"escaped mass {loss:.3g} dominates R_{i}({L:g}) = {val:.3g}")
    return val


# -- Poisson windows ---------------------------------------------------------


def poisson_log_weights(t: float, i: np.ndarray) -> np.ndarray:
    i = np.asarray(i, dtype=float)
    return -t + i * math.log(t) - gammaln(i + 1.0)


def upper_tail_bound(t: float, N: int) -> float:
    """e^{-t} (et/N)^N N/(N-et): bound on sum_{i>=N} e^{-t} t^i/i!, valid for N > et."""
    if N <= math.e * t:
        return math.inf
    return math.exp(-t + N * (1.0 + math.log(t) - math.log(N))) * N / (N - math.e * t)


def lower_tail_bound(t: float, M: int) -> float:
    """e^{-t} M (et/M)^M: bound on sum_{i<=M} e^{-t} t^i/i! for 1 <= M < t."""
    if M < 1:
        return 0.0
    return M * math.exp(-t + M * (1.0 + math.log(t) - math.log(M)))


def poisson_window(t: float, tol: float) -> int:
    """Smallest N > et whose upper-tail bound is below tol."""
    N = max(1, int(math.floor(math.e * t)) + 1)
    while upper_tail_bound(t, N) > tol:
        N += 1
    return N


def psi(k: Kernel, t: float, g: Grid, tol: float = 1e-10, wrap_tol: float = 1e-3) -> GridField:
    """psi(t,.) = e^{-t} sum_{i=1}^{N-1} t^i/i! J^{*i}, summed in Fourier space."""
    if not t > 0:
        raise ValidationError("t must be positive")
    base = discretize(k, g)
    N = poisson_window(t, tol)
    F = _to_spectrum(base.values) * g.dx
    w = np.exp(poisson_log_weights(t, np.arange(1, N)))
    # Horner: sum_{i=1}^{N-1} w_i F^i
    acc = np.zeros_like(F)
    for wi in w[::-1]:
        acc = (acc + wi) * F
    vals = np.maximum(_from_spectrum(acc, g.n) / g.dx, 0.0)
    bm = 1.0 - base.mass_loss
    i = np.arange(1, N)
    held = float(np.sum(w * bm**i))
    s = g.dx * vals.sum()
    if s > 0:
        vals *= held / s
    _check_wrap(vals, g, wrap_tol)
    omitted = upper_tail_bound(t, N) if N > 1 else 0.0
    loss = float(np.sum(w * (1.0 - bm**i)))
    return GridField(g, vals, density=True, mass_loss=loss + omitted,
                     info={"t": t, "N": N, "omitted_bound": omitted, "escaped": loss})


def psi_tail(p: GridField, L) -> np.ndarray | float:
    """Conservative upper estimate of the mass of psi on |x| >= L."""
    return grid_tail(p, L) + p.mass_loss


def apply_fundamental(k: Kernel, t: float, u0: GridField, tol: float = 1e-10) -> GridField:
    """e^{-t} u0 + psi(t) * u0 on the periodic grid."""
    p = psi(k, t, u0.grid, tol)
    vals = math.exp(-t) * u0.values + circular_convolve(p, u0)
    return GridField(u0.grid, vals, info={"t": t, "psi_window": p.info["N"]})
