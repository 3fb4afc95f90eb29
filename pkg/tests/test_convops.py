import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special, stats

from threshlab.convops import (ConvPowerSet, Grid, GridField, apply_fundamental, circular_convolve,
                               conv_power, discretize, grid_tail, lower_tail_bound, poisson_window, psi,
                               psi_tail, tail_mass_i, upper_tail_bound)
from threshlab.errors import ExtentTooSmall, PowerOverflow, ValidationError
from threshlab.kernels import Cauchy, Gaussian, Laplace


def _direct_circular(a, b, dx):
    """O(n^2) circular convolution with the origin at index n/2."""
    n = a.size
    o = n // 2
    out = np.zeros(n)
    for j in range(n):
        for m in range(n):
            out[j] += a[m] * b[(j - m + o) % n]
    return dx * out


def test_grid_validation():
    with pytest.raises(ValidationError):
        Grid(10.0, 15)
    with pytest.raises(ValidationError):
        Grid(0.0, 64)
    g = Grid(4.0, 16)
    assert g.dx == 0.5 and g.x[g.origin] == 0.0


def test_field_validation():
    g = Grid(4.0, 16)
    with pytest.raises(ValidationError):
        GridField(g, np.zeros(15))
    with pytest.raises(ValidationError):
        GridField(g, np.full(16, np.nan))


def test_discretize_mass_and_symmetry():
    g = Grid(200.0, 8192)
    f = discretize(Cauchy(1.0), g)
    assert f.mass == pytest.approx(1 - Cauchy(1.0).tail_mass(200.0), abs=1e-14)
    assert f.mass_loss == pytest.approx(Cauchy(1.0).tail_mass(200.0))
    assert f.symmetry_error() < 1e-15


def test_discretize_refuses_small_extent():
    with pytest.raises(ExtentTooSmall):
        discretize(Cauchy(1.0), Grid(20.0, 256))


@pytest.mark.parametrize("i", [2, 3, 4])
def test_conv_power_matches_direct_sum(i):
    g = Grid(12.0, 128)
    base = discretize(Laplace(1.0), g)
    ref = base.values
    for _ in range(i - 1):
        ref = _direct_circular(ref, base.values, g.dx)
    got = conv_power(base, i, wrap_tol=1.0).values
    assert np.max(np.abs(got - ref)) < 1e-9


@pytest.mark.parametrize("i", [2, 5, 17])
def test_gaussian_power_is_gaussian(i):
    g = Grid(40.0, 2048)
    p = conv_power(discretize(Gaussian(1.0), g), i)
    assert np.max(np.abs(p.values - Gaussian(math.sqrt(i)).pdf(g.x))) < 1e-6


def test_conv_power_guards():
    g = Grid(10.0, 64)
    base = discretize(Laplace(1.0), g)
    with pytest.raises(PowerOverflow):
        conv_power(base, 10, max_power=5)
    with pytest.raises(ValidationError):
        conv_power(GridField(g, base.values), 2)
    with pytest.raises(ValidationError):
        conv_power(base, 0)
    with pytest.raises(ExtentTooSmall):
        conv_power(base, 200)  # variance 400 on a half extent of 10


def test_grid_tail_of_linear_interpolant():
    g = Grid(10.0, 200)
    f = discretize(Laplace(1.0), g)
    assert grid_tail(f, 0.0) == pytest.approx(f.mass, abs=1e-12)
    # trapezoid on [-L, L] versus the exact tail
    for L in (0.5, 1.0, 3.0):
        assert grid_tail(f, L) + f.mass_loss == pytest.approx(math.exp(-L), abs=5e-4)
    vals = grid_tail(f, np.array([1.0, 2.0]))
    assert vals.shape == (2,) and vals[0] > vals[1]


@given(L1=st.floats(0, 5), L2=st.floats(0, 5))
def test_grid_tail_monotone(L1, L2):
    f = discretize(Laplace(1.0), Grid(10.0, 200))
    lo, hi = min(L1, L2), max(L1, L2)
    assert grid_tail(f, hi) <= grid_tail(f, lo) + 1e-15


def test_tail_mass_i_gaussian_closed_form():
    g = Grid(60.0, 2**14)
    for i, L in [(1, 1.0), (4, 3.0), (9, 2.0)]:
        exact = special.erfc(L / math.sqrt(2 * i))
        assert tail_mass_i(Gaussian(1.0), i, L, g) == pytest.approx(exact, abs=1e-5)


def test_tail_mass_i_refuses_far_tails():
    g = Grid(10.0, 256)
    with pytest.raises(ValidationError):
        tail_mass_i(Laplace(1.0), 1, 6.0, g)


def test_conv_power_set_caches_and_reports_loss():
    s = ConvPowerSet(Cauchy(1.0), Grid(400.0, 8192), 4)
    assert s.get(2) is s.get(2)
    assert s.mass_loss(3) == pytest.approx(1 - (1 - Cauchy(1.0).tail_mass(400.0)) ** 3)
    # sum of i Cauchy(1) variables is Cauchy(i)
    assert s.tail(2, 10.0) == pytest.approx(Cauchy(2.0).tail_mass(10.0), abs=2e-3)
    with pytest.raises(PowerOverflow):
        s.get(5)


# -- Poisson windows -------------------------------------------------------------


@given(t=st.floats(0.1, 200), extra=st.integers(1, 300))
def test_upper_tail_bound_dominates(t, extra):
    N = int(math.floor(math.e * t)) + extra
    assert upper_tail_bound(t, N) >= stats.poisson.sf(N - 1, t) * (1 - 1e-9)


@given(t=st.floats(2, 200), frac=st.floats(0.01, 0.99))
def test_lower_tail_bound_dominates(t, frac):
    M = max(1, int(frac * t))
    if M >= t:
        return
    assert lower_tail_bound(t, M) >= stats.poisson.cdf(M, t) - stats.poisson.pmf(0, t) - 1e-300


def test_poisson_window_meets_tolerance():
    for t in (0.5, 3.0, 40.0):
        N = poisson_window(t, 1e-12)
        assert N > math.e * t
        assert upper_tail_bound(t, N) <= 1e-12
        assert stats.poisson.sf(N - 1, t) <= 1e-12


# -- the series kernel -----------------------------------------------------------------


@pytest.mark.parametrize("t", [0.5, 1.0, 5.0])
def test_psi_mass_identity(t):
    p = psi(Laplace(1.0), t, Grid(100.0, 2**14))
    assert abs(p.mass - (1 - math.exp(-t))) <= 1e-6
    assert p.info["omitted_bound"] <= 1e-10


def test_psi_cauchy_closed_form_spectrum():
    """For Cauchy, e^{-t} + psi^ = exp(t (e^{-|xi|} - 1)); compare tails by direct transform."""
    t = 2.0
    g = Grid(2000.0, 2**16)
    p = psi(Cauchy(1.0), t, g)
    # psi(x) = (1/pi) int_0^inf (exp(t (e^{-s} - 1)) - e^{-t}) cos(s x) ds
    for x in (0.0, 1.0, 5.0):
        val = integrate.quad(lambda s: math.exp(t * math.expm1(-s)) - math.exp(-t), 0, 60,
                             weight="cos", wvar=x, limit=400)[0] / math.pi
        assert p.at(x) == pytest.approx(val, rel=2e-3, abs=1e-6)


def test_psi_tail_is_conservative():
    p = psi(Cauchy(1.0), 1.0, Grid(2000.0, 2**15))
    assert psi_tail(p, 0.0) >= p.mass


def test_psi_needs_positive_time():
    with pytest.raises(ValidationError):
        psi(Laplace(1.0), 0.0, Grid(10.0, 64))


@settings(max_examples=10)
@given(c=st.floats(0.0, 1.0), t=st.floats(0.1, 5.0))
def test_fundamental_preserves_constants(c, t):
    g = Grid(60.0, 1024)
    out = apply_fundamental(Laplace(1.0), t, GridField(g, np.full(g.n, c)))
    assert np.max(np.abs(out.values - c)) < 1e-9


def test_fundamental_is_positive_and_mass_preserving():
    g = Grid(60.0, 1024)
    u0 = GridField(g, (np.abs(g.x) < 3).astype(float))
    out = apply_fundamental(Gaussian(1.0), 2.0, u0)
    assert out.values.min() >= -1e-14
    assert out.mass == pytest.approx(u0.mass, rel=1e-9)


def test_circular_convolve_identity():
    g = Grid(5.0, 64)
    delta = np.zeros(g.n)
    delta[g.origin] = 1.0 / g.dx
    b = np.sin(g.x) ** 2
    got = circular_convolve(GridField(g, delta), GridField(g, b))
    assert np.max(np.abs(got - b)) < 1e-12
