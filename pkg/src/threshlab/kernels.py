"""Dispersal kernels: even, unit-mass, nonincreasing densities on the line.

Every kernel exposes its density, Fourier transform, single tail mass
``R1(L) = P(|Y| >= L)``, the low-frequency expansion ``1 - a|xi|^beta``, and
(when exponential moments exist) the log moment generating function and its
Legendre transform.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import ClassVar

import numpy as np
from scipy import integrate, optimize, special

from .errors import FitFailed, NotExpBounded, ValidationError

_QUAD_REL = 1e-12


@dataclass(frozen=True)
class KernelMeta:
    beta: float
    a: float
    m1: float
    m2: float
    exp_bounded: bool


@dataclass(frozen=True)
class TailClass:
    """Tail family of R1: ``RV(alpha)``, ``LN(gamma, lam, rho)`` or ``WE(alpha, lam, rho)``."""

    kind: str
    alpha: float = 0.0
    gamma: float = 0.0
    lam: float = 1.0
    rho: float = 0.0

    def __post_init__(self):
        if self.kind == "RV":
            if not self.alpha > 2:
                raise ValidationError("RV tails need alpha > 2")
        elif self.kind == "LN":
            if not (self.gamma > 1 and self.lam > 0):
                raise ValidationError("LN tails need gamma > 1, lam > 0")
        elif self.kind == "WE":
            if not (0 < self.alpha < 1 and self.lam > 0):
                raise ValidationError("WE tails need 0 < alpha < 1, lam > 0")
        else:
            raise ValidationError(f"unknown tail class {self.kind!r}")


class Kernel:
    """Base class. Subclasses override the closed forms they know."""

    family: ClassVar[str] = "abstract"
    # sup of {lam : Lambda(lam) < inf}; 0 for kernels without exponential moments
    lambda_max: ClassVar[float] = 0.0

    # -- density -----------------------------------------------------------
    def pdf(self, x):
        raise NotImplementedError

    def tail_mass(self, L):
        """R1(L) = integral of J over |x| >= L."""
        L = abs(float(L))
        if L == 0.0:
            return 1.0
        val = 2.0 * integrate.quad(self.pdf, L, np.inf, epsrel=1e-11, epsabs=0, limit=400)[0]
        return min(1.0, val)

    def _breakpoints(self):
        """Places where the density is not smooth (positive x only)."""
        return ()

    @property
    def knee(self) -> float:
        bp = self._breakpoints()
        return bp[0] if bp else 1.0

    # -- Fourier -----------------------------------------------------------
    def fourier(self, xi):
        xi = np.asarray(xi, dtype=float)
        return 1.0 - self.one_minus_fourier(xi)

    def one_minus_fourier(self, xi):
        """``1 - J^(xi)``, evaluated without cancellation at small xi."""
        xi = np.asarray(xi, dtype=float)
        out = np.vectorize(self._one_minus_fourier_scalar, otypes=[float])(np.abs(xi))
        return out if out.ndim else float(out)

    def _one_minus_fourier_scalar(self, xi: float) -> float:
        # 1 - J^ = 4 int_0^inf J(x) sin^2(xi x / 2) dx, split on doubling panels
        if xi == 0.0:
            return 0.0
        far = max(64.0 * self.knee, 60.0 / xi)
        edges = [0.0, *self._breakpoints()]
        b = max(edges[-1], self.knee)
        if b <= 0:
            b = 1.0
        while b < far:
            b *= 2.0
            edges.append(b)
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi <= lo:
                continue
            if xi * (hi - lo) < 40.0:
                f = lambda x: 4.0 * self.pdf(x) * math.sin(0.5 * xi * x) ** 2
                total += integrate.quad(f, lo, hi, epsrel=_QUAD_REL, epsabs=0, limit=200)[0]
            else:
                mass = 0.5 * (self.tail_mass(lo) - self.tail_mass(hi))
                with warnings.catch_warnings():
                    # panels whose cosine part is at roundoff level
                    warnings.simplefilter("ignore", integrate.IntegrationWarning)
                    cos_part = integrate.quad(self.pdf, lo, hi, weight="cos", wvar=xi,
                                              epsrel=_QUAD_REL, epsabs=1e-16 * mass, limit=400)[0]
                total += 2.0 * (mass - cos_part)
        rest = self.tail_mass(edges[-1])
        if rest > 1e-300:
            cos_tail = integrate.quad(self.pdf, edges[-1], np.inf, weight="cos", wvar=xi,
                                      epsabs=max(1e-13 * rest, 1e-300), limlst=200)[0]
            total += rest - 2.0 * cos_tail
        return total

    # -- moments and expansion ---------------------------------------------
    def _moment(self, p: int) -> float:
        f = lambda x: 2.0 * x**p * self.pdf(x)
        edges = [0.0, *self._breakpoints()]
        val = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            val += integrate.quad(f, lo, hi, epsrel=_QUAD_REL, epsabs=0, limit=200)[0]
        val += integrate.quad(f, edges[-1], np.inf, epsrel=_QUAD_REL, epsabs=0, limit=400)[0]
        return val

    @cached_property
    def m1(self) -> float:
        return self._moment(1)

    @cached_property
    def m2(self) -> float:
        return self._moment(2)

    def expansion(self) -> tuple[float, float]:
        """(beta, a) with ``J^(xi) = 1 - a|xi|^beta + o(|xi|^beta)``."""
        if math.isfinite(self.m2):
            return 2.0, 0.5 * self.m2
        return fit_expansion(self)

    @property
    def exp_bounded(self) -> bool:
        return self.lambda_max > 0.0

    @property
    def meta(self) -> KernelMeta:
        beta, a = self.expansion()
        return KernelMeta(beta, a, self.m1, self.m2, self.exp_bounded)

    def spread(self) -> float:
        """Standard deviation, or the interquartile range when the variance is infinite."""
        if math.isfinite(self.m2):
            return math.sqrt(self.m2)
        hi = 1.0
        while self.tail_mass(hi) > 0.5:
            hi *= 2.0
        q = optimize.brentq(lambda L: self.tail_mass(L) - 0.5, 0.0, hi, xtol=1e-12)
        return 2.0 * q

    # -- large deviations --------------------------------------------------
    def log_mgf(self, lam: float) -> float:
        """Lambda(lam) = ln int e^{lam x} J(x) dx, +inf when divergent."""
        lam = abs(float(lam))
        if lam == 0.0:
            return 0.0
        if lam >= self.lambda_max:
            return math.inf
        return self._log_mgf(lam)

    def _log_mgf(self, lam: float) -> float:
        raise NotImplementedError

    def log_mgf_prime(self, lam: float) -> float:
        """Lambda'(lam) for 0 <= lam < lambda_max (mean of the tilted law)."""
        raise NotImplementedError

    def rate_function(self, x: float) -> float:
        """Fenchel-Legendre transform Lambda*(x) = sup_lam (lam x - Lambda(lam))."""
        if not self.exp_bounded:
            raise NotExpBounded(f"{self!r} has no exponential moments")
        return _legendre(self, abs(float(x)))

    # -- serialization -----------------------------------------------------
    def params(self) -> dict:
        return {"family": self.family}


def _legendre(k: Kernel, x: float, tol: float = 1e-10) -> float:
    if x == 0.0:
        return 0.0
    if k.tail_mass(x) == 0.0:
        return math.inf  # at or beyond the edge of a compact support
    # Lambda' is increasing from Lambda'(0) = 0: root-find the stationarity condition
    lam_cap = k.lambda_max
    if math.isfinite(lam_cap):
        hi = lam_cap * (1.0 - 1e-13)
        if k.log_mgf_prime(hi) <= x:
            # supremum sits on the boundary of the finiteness domain
            return hi * x - k.log_mgf(hi)
    else:
        hi = 1.0
        while k.log_mgf_prime(hi) <= x:
            hi *= 2.0
            if hi > 1e8:
                # Lambda' saturates below x: x lies beyond the support
                return math.inf
    lam = optimize.brentq(lambda s: k.log_mgf_prime(s) - x, 0.0, hi, xtol=tol * 1e-3, rtol=1e-15,
                          maxiter=500)
    return lam * x - k.log_mgf(lam)


# ---------------------------------------------------------------------------
# closed-form families


@dataclass(frozen=True)
class Gaussian(Kernel):
    sigma: float = 1.0
    family: ClassVar[str] = "gaussian"
    lambda_max: ClassVar[float] = math.inf

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError("sigma must be positive")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * (x / self.sigma) ** 2) / (self.sigma * math.sqrt(2 * math.pi))

    def fourier(self, xi):
        return np.exp(-0.5 * (self.sigma * np.asarray(xi, dtype=float)) ** 2)

    def one_minus_fourier(self, xi):
        return -np.expm1(-0.5 * (self.sigma * np.asarray(xi, dtype=float)) ** 2)

    def tail_mass(self, L):
        return float(special.erfc(abs(L) / (self.sigma * math.sqrt(2.0))))

    @cached_property
    def m1(self):
        return self.sigma * math.sqrt(2.0 / math.pi)

    @cached_property
    def m2(self):
        return self.sigma**2

    def _log_mgf(self, lam):
        return 0.5 * (lam * self.sigma) ** 2

    def log_mgf_prime(self, lam):
        return lam * self.sigma**2

    def params(self):
        return {"family": self.family, "sigma": self.sigma}


@dataclass(frozen=True)
class Laplace(Kernel):
    """J(x) = (rate/2) exp(-rate |x|)."""

    rate: float = 1.0
    family: ClassVar[str] = "laplace"

    def __post_init__(self):
        if not self.rate > 0:
            raise ValidationError("rate must be positive")

    @property
    def lambda_max(self):
        return self.rate

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * self.rate * np.exp(-self.rate * np.abs(x))

    def fourier(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.rate**2 / (self.rate**2 + xi**2)

    def one_minus_fourier(self, xi):
        xi = np.asarray(xi, dtype=float)
        return xi**2 / (self.rate**2 + xi**2)

    def tail_mass(self, L):
        return math.exp(-self.rate * abs(L))

    def _breakpoints(self):
        return ()

    @cached_property
    def m1(self):
        return 1.0 / self.rate

    @cached_property
    def m2(self):
        return 2.0 / self.rate**2

    def _log_mgf(self, lam):
        return -math.log1p(-((lam / self.rate) ** 2))

    def log_mgf_prime(self, lam):
        return 2.0 * lam / (self.rate**2 - lam**2)

    def params(self):
        return {"family": self.family, "rate": self.rate}


@dataclass(frozen=True)
class Cauchy(Kernel):
    scale: float = 1.0
    family: ClassVar[str] = "cauchy"

    def __post_init__(self):
        if not self.scale > 0:
            raise ValidationError("scale must be positive")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale / (math.pi * (self.scale**2 + x**2))

    def fourier(self, xi):
        return np.exp(-self.scale * np.abs(np.asarray(xi, dtype=float)))

    def one_minus_fourier(self, xi):
        return -np.expm1(-self.scale * np.abs(np.asarray(xi, dtype=float)))

    def tail_mass(self, L):
        L = abs(float(L))
        if L == 0.0:
            return 1.0
        return 2.0 / math.pi * math.atan(self.scale / L)

    m1 = math.inf
    m2 = math.inf

    def expansion(self):
        return 1.0, self.scale

    def spread(self):
        return 2.0 * self.scale

    def params(self):
        return {"family": self.family, "scale": self.scale}


@dataclass(frozen=True)
class PowerLaw(Kernel):
    """J(x) = c min(1, (|x|/x0)^(-alpha)), alpha > 1.

    For 1 < alpha < 3 the tails J ~ |x|^(-alpha) give beta = alpha - 1; for
    alpha > 3 the variance is finite and beta = 2. R1 is regularly varying
    with index alpha - 1.
    """

    alpha: float = 2.5
    x0: float = 1.0
    family: ClassVar[str] = "powerlaw"

    def __post_init__(self):
        if not self.alpha > 1:
            raise ValidationError("power-law kernels need alpha > 1")
        if not self.x0 > 0:
            raise ValidationError("x0 must be positive")

    @property
    def c(self) -> float:
        return (self.alpha - 1.0) / (2.0 * self.x0 * self.alpha)

    def _breakpoints(self):
        return (self.x0,)

    def pdf(self, x):
        r = np.abs(np.asarray(x, dtype=float)) / self.x0
        with np.errstate(divide="ignore"):
            return self.c * np.where(r <= 1.0, 1.0, np.power(np.maximum(r, 1.0), -self.alpha))

    def tail_mass(self, L):
        L = abs(float(L))
        a, x0 = self.alpha, self.x0
        if L >= x0:
            return (x0 / L) ** (a - 1.0) / a
        return (a - 1.0) * (x0 - L) / (x0 * a) + 1.0 / a

    @cached_property
    def m1(self):
        if self.alpha <= 2:
            return math.inf
        return 2.0 * self.c * self.x0**2 * (0.5 + 1.0 / (self.alpha - 2.0))

    @cached_property
    def m2(self):
        if self.alpha <= 3:
            return math.inf
        return 2.0 * self.c * self.x0**3 * (1.0 / 3.0 + 1.0 / (self.alpha - 3.0))

    def expansion(self):
        a = self.alpha
        if a > 3:
            return 2.0, 0.5 * self.m2
        if a == 3:
            raise FitFailed("alpha = 3 has a logarithmically corrected expansion")
        coef = self.c * self.x0**a * math.pi / (math.gamma(a) * math.sin(0.5 * math.pi * (a - 1.0)))
        return a - 1.0, coef

    def tail_class(self) -> TailClass:
        return TailClass("RV", alpha=self.alpha - 1.0)

    def params(self):
        return {"family": self.family, "alpha": self.alpha, "x0": self.x0}


class _KneeKernel(Kernel):
    """Flat core on [0, x0], exact prescribed tail mass beyond x0.

    Subclasses give ``_log_tail(L)`` = ln(R1(L)/c) and its L-derivative; the
    density beyond the knee is -R1'/2 and the core height makes it continuous.
    """

    x0: float

    def _log_tail(self, L):
        raise NotImplementedError

    def _dlog_tail(self, L):
        raise NotImplementedError

    @cached_property
    def _c(self) -> float:
        x0 = self.x0
        # unit mass: R1(x0) + 2 x0 J(x0) = 1
        return 1.0 / (math.exp(self._log_tail(x0)) * (1.0 - x0 * self._dlog_tail(x0)))

    def _validate(self):
        if self._dlog_tail(self.x0) >= 0:
            raise ValidationError("tail parameters give a non-decreasing tail at the knee")
        xs = self.x0 * np.logspace(0, 3, 400)
        d = self.pdf(xs)
        if np.any(np.diff(d) > 1e-14 * d[:-1]) or np.any(d < 0):
            raise ValidationError("tail parameters give a non-monotone density")

    def _breakpoints(self):
        return (self.x0,)

    def pdf(self, x):
        r = np.maximum(np.abs(np.asarray(x, dtype=float)), self.x0)
        with np.errstate(over="ignore", under="ignore"):
            dens = -0.5 * self._c * np.exp(self._log_tail(r)) * self._dlog_tail(r)
        return dens

    def tail_mass(self, L):
        L = abs(float(L))
        x0 = self.x0
        if L >= x0:
            return self._c * math.exp(self._log_tail(L))
        core = float(self.pdf(x0))
        return self._c * math.exp(self._log_tail(x0)) + 2.0 * core * (x0 - L)

    def expansion(self):
        return 2.0, 0.5 * self.m2


@dataclass(frozen=True)
class WeibullTail(_KneeKernel):
    """R1(L) = c L^rho exp(-lam L^alpha) for L >= x0, with 0 < alpha < 1."""

    alpha: float = 0.5
    lam: float = 1.0
    rho: float = 0.0
    x0: float = 1.0
    family: ClassVar[str] = "weibull"

    def __post_init__(self):
        TailClass("WE", alpha=self.alpha, lam=self.lam, rho=self.rho)
        if not self.x0 > 0:
            raise ValidationError("x0 must be positive")
        self._validate()

    def _log_tail(self, L):
        return self.rho * np.log(L) - self.lam * np.power(L, self.alpha)

    def _dlog_tail(self, L):
        return self.rho / L - self.lam * self.alpha * np.power(L, self.alpha - 1.0)

    def tail_class(self) -> TailClass:
        return TailClass("WE", alpha=self.alpha, lam=self.lam, rho=self.rho)

    def params(self):
        return {"family": self.family, "alpha": self.alpha, "lam": self.lam, "rho": self.rho, "x0": self.x0}


@dataclass(frozen=True)
class LogNormalTail(_KneeKernel):
    """R1(L) = c L^rho exp(-lam ln(L)^gamma) for L >= x0 > 1, with gamma > 1."""

    gamma: float = 2.0
    lam: float = 1.0
    rho: float = 0.0
    x0: float = math.e
    family: ClassVar[str] = "lognormal"

    def __post_init__(self):
        TailClass("LN", gamma=self.gamma, lam=self.lam, rho=self.rho)
        if not self.x0 > 1:
            raise ValidationError("lognormal-type tails need a knee x0 > 1")
        self._validate()

    def _log_tail(self, L):
        lnL = np.log(L)
        return self.rho * lnL - self.lam * np.power(lnL, self.gamma)

    def _dlog_tail(self, L):
        lnL = np.log(L)
        return (self.rho - self.lam * self.gamma * np.power(lnL, self.gamma - 1.0)) / L

    def tail_class(self) -> TailClass:
        return TailClass("LN", gamma=self.gamma, lam=self.lam, rho=self.rho)

    def params(self):
        return {"family": self.family, "gamma": self.gamma, "lam": self.lam, "rho": self.rho, "x0": self.x0}


@dataclass(frozen=True, eq=False)
class Tabulated(Kernel):
    """Even, piecewise-linear density from samples on [0, x_max].

    ``x`` must start at 0 and increase; ``values`` must be nonincreasing and
    end at 0. The table is renormalized to unit mass at construction.
    """

    x: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0]))
    values: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0]))
    family: ClassVar[str] = "tabulated"
    lambda_max: ClassVar[float] = math.inf

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2:
            raise ValidationError("x and values must be 1-d arrays of equal length >= 2")
        if x[0] != 0.0 or np.any(np.diff(x) <= 0):
            raise ValidationError("x must start at 0 and increase strictly")
        if np.any(v < 0) or np.any(np.diff(v) > 0):
            raise ValidationError("tabulated kernels must be nonnegative and nonincreasing")
        if v[-1] != 0.0:
            raise ValidationError("tabulated kernels must end at 0")
        mass = 2.0 * np.sum(0.5 * (v[1:] + v[:-1]) * np.diff(x))
        if not mass > 0:
            raise ValidationError("tabulated kernel has zero mass")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v / mass)

    def pdf(self, x):
        return np.interp(np.abs(np.asarray(x, dtype=float)), self.x, self.values, right=0.0)

    def _segment_integral(self, p: int, lo=None, hi=None) -> float:
        # int of x^p J(x) over [0, x_max] (one side), exact for the linear pieces
        a, b = self.x[:-1], self.x[1:]
        va, vb = self.values[:-1], self.values[1:]
        s = (vb - va) / (b - a)
        A = va - s * a
        return float(np.sum(A * (b ** (p + 1) - a ** (p + 1)) / (p + 1) + s * (b ** (p + 2) - a ** (p + 2)) / (p + 2)))

    def tail_mass(self, L):
        L = abs(float(L))
        xm = self.x[-1]
        if L >= xm:
            return 0.0
        grid = np.concatenate([[L], self.x[self.x > L]])
        vals = self.pdf(grid)
        return float(2.0 * np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(grid)))

    @cached_property
    def m1(self):
        return 2.0 * self._segment_integral(1)

    @cached_property
    def m2(self):
        return 2.0 * self._segment_integral(2)

    @cached_property
    def _even_moments(self):
        return np.array([2.0 * self._segment_integral(2 * k) for k in range(1, 30)])

    def one_minus_fourier(self, xi):
        xi = np.abs(np.asarray(xi, dtype=float))
        out = np.empty_like(xi)
        xm = self.x[-1]
        small = xi * xm < 0.5
        if np.any(small):
            k = np.arange(1, 30)
            z = xi[small][:, None]
            with np.errstate(under="ignore"):
                terms = (-1.0) ** (k + 1) * z ** (2 * k) * self._even_moments / special.factorial(2 * k)
            out[small] = terms.sum(axis=1)
        if np.any(~small):
            z = xi[~small][:, None]
            s = np.diff(self.values) / np.diff(self.x)
            # slope jumps of the even extension; at 0 the slope goes from -s0 to s0
            jumps = np.diff(np.concatenate([s, [0.0]]))
            knots = self.x[1:]
            hat = (-2.0 * np.sum(jumps * np.cos(z * knots), axis=1) - 2.0 * s[0]) / z[:, 0] ** 2
            out[~small] = 1.0 - hat
        return out if out.ndim else float(out)

    def expansion(self):
        return fit_expansion(self)

    def _log_mgf(self, lam):
        xm = self.x[-1]
        f = lambda x: self.pdf(x) * (math.exp(lam * (x - xm)) + math.exp(-lam * (x + xm)))
        val = integrate.quad(f, 0.0, xm, points=self.x[1:-1][:100], epsrel=1e-13, epsabs=0, limit=500)[0]
        return lam * xm + math.log(val)

    def log_mgf_prime(self, lam):
        xm = self.x[-1]
        num = lambda x: x * self.pdf(x) * (math.exp(lam * (x - xm)) - math.exp(-lam * (x + xm)))
        den = lambda x: self.pdf(x) * (math.exp(lam * (x - xm)) + math.exp(-lam * (x + xm)))
        pts = self.x[1:-1][:100]
        n = integrate.quad(num, 0.0, xm, points=pts, epsrel=1e-13, epsabs=0, limit=500)[0]
        d = integrate.quad(den, 0.0, xm, points=pts, epsrel=1e-13, epsabs=0, limit=500)[0]
        return n / d if d > 0 else xm

    def params(self):
        return {"family": self.family, "x": self.x.tolist(), "values": self.values.tolist()}


def fit_expansion(k: Kernel, xi=None, max_residual: float = 0.05) -> tuple[float, float]:
    """Fit (beta, a) by least squares of ln(1 - J^) against ln xi.

    The default window is xi in [1e-4, 1e-2] scaled by the kernel spread.
    Raises FitFailed when the rms residual exceeds ``max_residual``.
    """
    if xi is None:
        xi = np.logspace(-4, -2, 13) / k.spread()
    xi = np.asarray(xi, dtype=float)
    y = np.asarray(k.one_minus_fourier(xi), dtype=float)
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise FitFailed("1 - J^ is not positive on the fit window")
    X = np.log(xi)
    Y = np.log(y)
    slope, intercept = np.polyfit(X, Y, 1)
    resid = Y - (slope * X + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    if rms > max_residual or not 0 < slope <= 2.05:
        raise FitFailed(f"expansion fit failed: slope={slope:.4g}, rms residual={rms:.3g}")
    return float(slope), float(math.exp(intercept))


FAMILIES = {
    "gaussian": Gaussian,
    "laplace": Laplace,
    "cauchy": Cauchy,
    "powerlaw": PowerLaw,
    "weibull": WeibullTail,
    "lognormal": LogNormalTail,
    "tabulated": Tabulated,
}


def make_kernel(spec: dict) -> Kernel:
    """Build a kernel from a flat record ``{"family": name, **params}``."""
    spec = dict(spec)
    try:
        cls = FAMILIES[str(spec.pop("family")).lower()]
    except KeyError as exc:
        raise ValidationError(f"unknown kernel family {exc.args[0]!r}") from None
    try:
        return cls(**spec)
    except TypeError as exc:
        raise ValidationError(str(exc)) from None


# module-level operations ----------------------------------------------------


def evaluate(k: Kernel, x):
    return k.pdf(x)


def fourier(k: Kernel, xi):
    return k.fourier(xi)


def tail_mass_1(k: Kernel, L: float) -> float:
    return k.tail_mass(L)


def expansion_params(k: Kernel) -> tuple[float, float]:
    return k.expansion()


def log_mgf(k: Kernel, lam: float) -> float:
    return k.log_mgf(lam)


def rate_function(k: Kernel, x: float) -> float:
    return k.rate_function(x)
