import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from threshlab import kernels as km
from threshlab.errors import FitFailed, NotExpBounded, ValidationError
from threshlab.kernels import (Cauchy, Gaussian, Kernel, Laplace, LogNormalTail, PowerLaw, Tabulated,
                               TailClass, WeibullTail, make_kernel)

ALL = [Gaussian(1.0), Laplace(1.0), Cauchy(1.0), PowerLaw(2.5), PowerLaw(4.0), WeibullTail(),
       LogNormalTail(), Tabulated([0.0, 1.0, 2.0], [1.0, 0.5, 0.0])]
IDS = [repr(k)[:40] for k in ALL]


def _triangle():
    return Tabulated([0.0, 1.0], [1.0, 0.0])


# -- unit mass, evenness, tails ------------------------------------------------


@pytest.mark.parametrize("k", ALL, ids=IDS)
def test_unit_mass_by_quadrature(k):
    pts = sorted({0.0, *[b for b in k._breakpoints() if b > 0]})
    total = 0.0
    edges = pts + [math.inf]
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(lambda x: float(k.pdf(x)), a, b, limit=400)[0]
    assert 2 * total == pytest.approx(1.0, abs=2e-7)


@pytest.mark.parametrize("k", ALL, ids=IDS)
def test_tail_mass_matches_density(k):
    for L in (0.3, 1.5, 4.0):
        direct = 2 * integrate.quad(lambda x: float(k.pdf(x)), L, math.inf, limit=400)[0]
        assert k.tail_mass(L) == pytest.approx(direct, rel=1e-6, abs=1e-12)


@pytest.mark.parametrize("k", ALL, ids=IDS)
@given(x=st.floats(-50, 50, allow_nan=False))
def test_pdf_even_and_nonnegative(k, x):
    assert k.pdf(x) >= 0
    assert float(k.pdf(x)) == pytest.approx(float(k.pdf(-x)), rel=1e-14, abs=0)


@pytest.mark.parametrize("k", ALL, ids=IDS)
@given(a=st.floats(0, 100), b=st.floats(0, 100))
def test_tail_mass_monotone(k, a, b):
    lo, hi = min(a, b), max(a, b)
    assert 0.0 <= k.tail_mass(hi) <= k.tail_mass(lo) + 1e-15 <= 1.0 + 1e-12


def test_tail_mass_at_zero_is_one():
    for k in ALL:
        assert k.tail_mass(0.0) == pytest.approx(1.0, abs=1e-9)


# -- Fourier transform -----------------------------------------------------------


@pytest.mark.parametrize("xi", [1e-3, 0.05, 0.7, 3.0, 40.0])
def test_generic_fourier_matches_closed_forms(xi):
    """The shared numerical transform reproduces the closed forms."""
    lap, cau, gau = Laplace(1.3), Cauchy(0.7), Gaussian(0.9)
    assert Kernel._one_minus_fourier_scalar(lap, xi) == pytest.approx(1 - 1 / (1 + (xi / 1.3) ** 2), rel=1e-7)
    assert Kernel._one_minus_fourier_scalar(cau, xi) == pytest.approx(-math.expm1(-0.7 * xi), rel=1e-7)
    assert Kernel._one_minus_fourier_scalar(gau, xi) == pytest.approx(-math.expm1(-0.5 * (0.9 * xi) ** 2), rel=1e-7)


@pytest.mark.parametrize("xi", [1e-4, 0.1, 0.49, 0.51, 2.0, 25.0])
def test_tabulated_fourier_triangle(xi):
    # triangle density 1 - |x| has transform 2 (1 - cos xi) / xi^2
    exact = 1 - 2 * (1 - math.cos(xi)) / xi**2 if xi > 1e-3 else xi**2 / 12 - xi**4 / 360
    assert _triangle().one_minus_fourier(xi) == pytest.approx(exact, rel=1e-9, abs=1e-16)


def test_powerlaw_fourier_monte_carlo():
    """Seeded Monte-Carlo estimate of E cos(xi X) for the power-law density."""
    k = PowerLaw(2.5, 1.0)
    rng = np.random.default_rng(12345)
    n = 400_000
    core = rng.random(n) < (1 - 1 / k.alpha)  # mass of |x| <= x0 is 1 - 1/alpha
    u = rng.random(n)
    mag = np.where(core, u, u ** (-1 / (k.alpha - 1)))  # Pareto beyond x0
    for xi in (0.2, 1.0):
        mc = float(np.mean(np.cos(xi * mag)))
        assert k.fourier(xi) == pytest.approx(mc, abs=5e-3)


@pytest.mark.parametrize("k", ALL, ids=IDS)
@given(xi=st.floats(1e-4, 100))
def test_one_minus_fourier_range(k, xi):
    v = float(k.one_minus_fourier(xi))
    assert 0.0 <= v <= 2.0


# -- expansion (beta, a) ------------------------------------------------------------


@pytest.mark.parametrize("k,beta,a", [(Gaussian(2.0), 2.0, 2.0), (Laplace(2.0), 2.0, 0.25),
                                      (Cauchy(3.0), 1.0, 3.0), (PowerLaw(4.0), 2.0, 0.5 * PowerLaw(4.0).m2)])
def test_expansion_closed_forms(k, beta, a):
    b, aa = k.expansion()
    assert b == beta and aa == pytest.approx(a, rel=1e-12)


def test_powerlaw_expansion_analytic_vs_fit():
    k = PowerLaw(2.5)
    beta, a = k.expansion()
    assert beta == pytest.approx(1.5)
    fb, fa = km.fit_expansion(k)
    assert fb == pytest.approx(beta, rel=0.02)
    assert fa == pytest.approx(a, rel=0.1)


def test_powerlaw_alpha_three_has_no_expansion():
    with pytest.raises(FitFailed):
        PowerLaw(3.0).expansion()


def test_tabulated_expansion_is_quadratic():
    beta, a = _triangle().expansion()
    assert beta == pytest.approx(2.0, abs=0.01)
    assert a == pytest.approx(1 / 12, rel=0.02)  # m2 / 2 with m2 = 1/6


# -- moments -------------------------------------------------------------------------


@pytest.mark.parametrize("k,m1,m2", [(Gaussian(1.0), math.sqrt(2 / math.pi), 1.0), (Laplace(2.0), 0.5, 0.5),
                                     (Cauchy(1.0), math.inf, math.inf), (_triangle(), 1 / 3, 1 / 6)])
def test_moments(k, m1, m2):
    assert k.m1 == pytest.approx(m1, rel=1e-10)
    assert k.m2 == pytest.approx(m2, rel=1e-10)


def test_powerlaw_moments_by_quadrature():
    k = PowerLaw(4.5, 2.0)
    m2 = 2 * integrate.quad(lambda x: x * x * float(k.pdf(x)), 0, 2.0)[0] \
        + 2 * integrate.quad(lambda x: x * x * float(k.pdf(x)), 2.0, math.inf)[0]
    assert k.m2 == pytest.approx(m2, rel=1e-8)
    assert PowerLaw(2.0).m1 == math.inf


# -- large deviations ----------------------------------------------------------------------


def _laplace_rate(x):
    # maximizer of lam x + ln(1 - lam^2) solves x lam^2 + 2 lam - x = 0
    lam = (math.sqrt(1 + x * x) - 1) / x
    return lam * x + math.log(1 - lam * lam)


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 3.0, 10.0])
def test_laplace_rate_closed_form(x):
    assert Laplace(1.0).rate_function(x) == pytest.approx(_laplace_rate(x), rel=1e-8)


def test_laplace_rate_at_one_frozen():
    assert Laplace(1.0).rate_function(1.0) == pytest.approx(0.2259872, abs=1e-6)


@pytest.mark.parametrize("x", [0.2, 1.0, 2.5])
def test_gaussian_rate(x):
    assert Gaussian(2.0).rate_function(x) == pytest.approx(x * x / 8, rel=1e-8)


def test_triangle_log_mgf():
    k = _triangle()
    for lam in (0.3, 2.0, 20.0):
        exact = math.log(2 * (math.cosh(lam) - 1) / lam**2)
        assert k.log_mgf(lam) == pytest.approx(exact, rel=1e-10)


def test_triangle_rate_beyond_support_is_infinite():
    assert _triangle().rate_function(1.5) == math.inf


def test_heavy_tails_not_exp_bounded():
    for k in (Cauchy(), PowerLaw(2.5), WeibullTail(), LogNormalTail()):
        assert not k.exp_bounded
        with pytest.raises(NotExpBounded):
            k.rate_function(1.0)


def test_log_mgf_diverges_past_abscissa():
    assert Laplace(2.0).log_mgf(2.0) == math.inf
    assert Cauchy().log_mgf(0.1) == math.inf


@given(x=st.floats(0.0, 5.0), y=st.floats(0.0, 5.0))
def test_rate_function_convex_nonnegative(x, y):
    k = Laplace(1.0)
    fx, fy, fm = k.rate_function(x), k.rate_function(y), k.rate_function(0.5 * (x + y))
    assert fx >= 0 and fy >= 0
    assert fm <= 0.5 * (fx + fy) + 1e-9


# -- tail classes, validation, factory ----------------------------------------------------


def test_tail_classes():
    assert PowerLaw(4.0).tail_class() == TailClass("RV", alpha=3.0)
    with pytest.raises(ValidationError):
        PowerLaw(2.5).tail_class()  # RV index 1.5 is outside the admissible range
    assert WeibullTail(alpha=0.5).tail_class().kind == "WE"
    assert LogNormalTail().tail_class().kind == "LN"


@pytest.mark.parametrize("bad", [dict(kind="RV", alpha=-1.0), dict(kind="WE", alpha=1.2),
                                 dict(kind="LN", gamma=0.5), dict(kind="XX")])
def test_tail_class_invariants(bad):
    with pytest.raises(ValidationError):
        TailClass(**bad)


def test_knee_kernel_tail_is_exact():
    k = WeibullTail(alpha=0.5, lam=1.0, rho=0.0, x0=1.0)
    assert k.tail_mass(16.0) / k.tail_mass(4.0) == pytest.approx(math.exp(-(4 - 2)), rel=1e-12)


@pytest.mark.parametrize("bad", [lambda: Gaussian(0.0), lambda: Laplace(-1.0), lambda: PowerLaw(1.0),
                                 lambda: Tabulated([0, 1], [0.5, 1.0]), lambda: Tabulated([0, 1], [1.0, 0.2]),
                                 lambda: Tabulated([0.5, 1], [1.0, 0.0]), lambda: LogNormalTail(x0=0.5)])
def test_invalid_parameters(bad):
    with pytest.raises(ValidationError):
        bad()


def test_make_kernel_round_trip():
    for k in ALL:
        again = make_kernel(k.params())
        assert again.params() == k.params()
    with pytest.raises(ValidationError):
        make_kernel({"family": "nope"})
    with pytest.raises(ValidationError):
        make_kernel({"family": "gaussian", "width": 2.0})


def test_module_wrappers():
    k = Laplace(1.0)
    assert km.evaluate(k, 0.0) == pytest.approx(0.5)
    assert km.fourier(k, 1.0) == pytest.approx(0.5)
    assert km.tail_mass_1(k, 1.0) == pytest.approx(math.exp(-1))
    assert km.expansion_params(k) == (2.0, 1.0)
    assert km.log_mgf(k, 0.5) == pytest.approx(-math.log(0.75))
    assert km.rate_function(k, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_spread():
    assert Gaussian(3.0).spread() == pytest.approx(3.0)
    assert Cauchy(1.0).spread() == pytest.approx(2.0)  # interquartile range
