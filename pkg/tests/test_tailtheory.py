import math

import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from threshlab import tailtheory as tt
from threshlab.convops import Grid, tail_mass_i
from threshlab.errors import BelowThreshold, NotExpBounded, Underflow, ValidationError, WrongRegime
from threshlab.kernels import Cauchy, Gaussian, Laplace, PowerLaw, TailClass


def _gauss_tail(i, L):
    return special.erfc(L / math.sqrt(2.0 * i))


@settings(max_examples=30)
@given(i=st.integers(1, 40), L=st.floats(0.05, 30))
def test_durrett_dominates_gaussian_tail(i, L):
    assert tt.durrett_bound(Gaussian(1.0), i, L) >= _gauss_tail(i, L)


@given(i=st.integers(1, 40), L=st.floats(0.0, 10))
def test_cramer_dominates_gaussian_tail(i, L):
    # Lambda*(L) = L^2 / 2 and R_i(iL) = erfc(sqrt(i) L / sqrt 2)
    assert tt.cramer_bound(Gaussian(1.0), i, L) >= special.erfc(math.sqrt(i / 2.0) * L) * (1 - 1e-9)


def test_durrett_closed_form_gaussian_i1():
    # L int_0^{2/L} (1 - e^{-xi^2/2}) dxi
    L = 2.0
    expected = L * (1.0 - math.sqrt(math.pi / 2) * special.erf(1 / math.sqrt(2)))
    assert tt.durrett_bound(Gaussian(1.0), 1, L) == pytest.approx(expected, rel=1e-9)


def test_durrett_needs_positive_L():
    with pytest.raises(ValidationError):
        tt.durrett_bound(Gaussian(1.0), 1, 0.0)


def test_stable_constant_cauchy():
    # R1(L) = (2/pi) atan(1/L) ~ 2/(pi L), a = 1, beta = 1
    assert tt.fit_stable_constant(Cauchy(1.0)) == pytest.approx(2 / math.pi, rel=1e-6)
    assert tt.stable_asymptotic(Cauchy(1.0), 3, 100.0, 2 / math.pi) == pytest.approx(6 / (100 * math.pi))


def test_stable_wrong_regime():
    with pytest.raises(WrongRegime):
        tt.stable_asymptotic(Laplace(1.0), 2, 10.0, 1.0)
    with pytest.raises(WrongRegime):
        tt.fit_stable_constant(Gaussian(1.0))


def test_cramer_needs_exponential_moments():
    with pytest.raises(NotExpBounded):
        tt.cramer_bound(Cauchy(1.0), 2, 1.0)
    with pytest.raises(NotExpBounded):
        tt.cramer_empirical_rate(Cauchy(1.0), 2, 1.0, Grid(1000.0, 4096))


def test_cramer_empirical_rate_gaussian():
    g = Grid(400.0, 2**15)
    rate = tt.cramer_empirical_rate(Gaussian(1.0), 50, 0.5, g)
    exact = -math.log(_gauss_tail(50, 25.0)) / 50
    assert rate == pytest.approx(exact, rel=1e-3)
    assert tt.cramer_empirical_rate(Gaussian(1.0), 4, 0.0, g) == 0.0


def test_cramer_empirical_rate_underflow():
    with pytest.raises(Underflow):
        tt.cramer_empirical_rate(Gaussian(1.0), 4, 20.0, Grid(400.0, 2**14))


def test_nagaev_calibration_dominates_lattice():
    k, g = Laplace(1.0), Grid(200.0, 8192)
    lattice = [(i, L) for i in (1, 2, 4) for L in (1.0, 3.0, 8.0)]
    C = tt.calibrate_nagaev(k, g, lattice)
    for i, L in lattice:
        assert tt.nagaev_bound(i, L, k.tail_mass(L / 2), C) >= tail_mass_i(k, i, L, g) * (1 - 1e-12)


@pytest.mark.parametrize("tc,n,d", [
    (TailClass("RV", alpha=3.0), 8, math.sqrt(8 * math.log(8))),
    (TailClass("LN", gamma=2.0), 8, math.sqrt(8) * math.log(8)),
    (TailClass("LN", gamma=3.0), 8, math.sqrt(8) * math.log(8) ** 2),
    (TailClass("WE", alpha=0.5), 8, 8.0),
])
def test_mikosch_threshold(tc, n, d):
    assert tt.mikosch_threshold(n, tc) == pytest.approx(d, rel=1e-12)


def test_mikosch_threshold_starts_at_two():
    with pytest.raises(ValidationError):
        tt.mikosch_threshold(1, TailClass("RV", alpha=3.0))


def test_mikosch_regime_powerlaw():
    k = PowerLaw(4.0)
    g = Grid(2000.0, 2**15)
    rep = tt.mikosch_regime_check(k, k.tail_class(), 4, 60.0, g)
    assert rep.empirical_value == pytest.approx(1.0, abs=0.2)
    assert tt.mikosch_regime_check(k, k.tail_class(), 1, 5.0, g).empirical_value == 1.0
    with pytest.raises(BelowThreshold):
        tt.mikosch_regime_check(k, k.tail_class(), 4, 1.0, g)


def test_cesaro_limit_finite_variance():
    # int_0^inf u R_i(u) du = E S_i^2 / 2 = i m2 / 2 = i a
    val = tt.cesaro_diagnostic(Laplace(1.0), 2, 40.0, Grid(200.0, 8192))
    assert val == pytest.approx(1.0, abs=2e-3)


def test_report_validation_and_rows():
    with pytest.raises(ValidationError):
        tt.TailBoundReport("Chernoff", 1, 1.0, 0.5)
    with pytest.raises(ValidationError):
        tt.TailBoundReport("Durrett", 1, 1.0, -0.5)
    rep = tt.TailBoundReport("Nagaev", 2, 3.0, 0.5, 0.2, {"C": 1.5})
    assert rep.dominates is True
    assert rep.to_row()["const_C"] == 1.5
    assert tt.TailBoundReport("Durrett", 1, 1.0, 0.5).dominates is None
