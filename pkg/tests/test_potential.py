import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from radsym import potential as P
from radsym.potential import (CompositePotential, NonDifferentiableError, PowerLawPotential,
                              PrototypePotential, ShapeError, TabulatedPotential,
                              excess_over_prototype, log_phi, phi, phi_derivative, phi_direct,
                              psi, verify_shape)


# -- bump and its integral ---------------------------------------------------

def test_psi_mass_scipy():
    val, err = quad(lambda x: np.exp(-1 / (1 - x * x)), -1, 1, epsabs=1e-14, limit=200)
    assert abs(val - P.PSI_MASS) < 1e-13


def test_psi_mass_mpmath():
    mpmath.mp.dps = 40
    try:
        val = mpmath.quad(lambda x: mpmath.exp(-1 / (1 - x * x)), [-1, -0.9, 0, 0.9, 1])
    finally:
        mpmath.mp.dps = 15
    assert abs(float(val) - P.PSI_MASS) < 1e-16


def test_table_mass_matches_constant():
    assert abs(P._TABLE_MASS - P.PSI_MASS) < 1e-15


def test_psi_support():
    assert psi(np.array([-1.0, 1.0, 2.0, -3.0])).tolist() == [0.0] * 4
    assert psi(np.array(0.0)) == pytest.approx(np.exp(-1))


def test_phi_endpoints_and_center():
    assert phi(np.array(-1.0)) == 0.0
    assert phi(np.array(-5.0)) == 0.0
    assert phi(np.array(1.0)) == 1.0
    assert phi(np.array(7.0)) == 1.0
    assert phi(np.array(0.0)) == 0.5


@given(st.floats(-1.2, 1.2))
def test_phi_reflection(x):
    assert phi(np.array(x)) + phi(np.array(-x)) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("x", [-0.99, -0.95, -0.9, -0.5, -0.1234, 0.0, 0.3, 0.77, 0.97])
def test_phi_against_direct_quadrature(x):
    assert phi(np.array(x)) == pytest.approx(phi_direct(x), rel=1e-11, abs=1e-15)


def _mp_log_left(x):
    # with v = 1/(1-t^2): int_{-1}^x psi = e^-g int_0^inf e^-u h(g+u) du
    xm = mpmath.mpf(x)
    g = 1 / (1 - xm * xm)
    h = lambda v: 1 / (2 * v * v * mpmath.sqrt(1 - 1 / v))
    inner = mpmath.quad(lambda u: mpmath.exp(-u) * h(g + u), [0, 1, 10, 100, mpmath.inf])
    return -g + mpmath.log(inner) - mpmath.log(mpmath.mpf(P.PSI_MASS))


@pytest.mark.parametrize("x", [-0.999, -0.9995, -0.99999])
def test_log_phi_deep_tail_against_mpmath(x):
    mpmath.mp.dps = 40
    try:
        ref = _mp_log_left(x)
    finally:
        mpmath.mp.dps = 15
    assert float(log_phi(np.array(x))) == pytest.approx(float(ref), rel=1e-13)


def test_log_tail_substitution_matches_direct_integral():
    mpmath.mp.dps = 40
    try:
        x = -0.96
        direct = mpmath.quad(lambda t: mpmath.exp(-1 / (1 - t * t)), [-1, -0.99, -0.97, x])
        direct = mpmath.log(direct / mpmath.mpf(P.PSI_MASS))
        assert abs(direct - _mp_log_left(x)) < 1e-25
    finally:
        mpmath.mp.dps = 15
    assert float(log_phi(np.array(x))) == pytest.approx(float(direct), rel=1e-14)


def test_phi_monotone():
    x = np.linspace(-1.1, 1.1, 20001)
    assert np.all(np.diff(phi(x)) >= 0)


@given(st.floats(-0.98, 0.98))
def test_phi_derivative_matches_difference(x):
    h = 1e-6
    fd = (phi(np.array(x + h)) - phi(np.array(x - h))) / (2 * h)
    assert phi_derivative(np.array(x)) == pytest.approx(fd, rel=1e-6, abs=1e-9)


# -- prototype -----------------------------------------------------------------

def test_prototype_values():
    w = PrototypePotential(0.25)
    r = np.array([0.0, 0.74, 0.75, 1.0, 1.25, 1.26, 3.0])
    assert w(r).tolist() == [0, 0, -1, -1, -1, 0, 0]


def test_prototype_derivative_raises_at_jumps():
    w = PrototypePotential(0.1)
    assert np.all(w.derivative(np.array([0.5, 1.0, 2.0])) == 0)
    for r in (0.9, 1.1, 0.9 + 5e-10):
        with pytest.raises(NonDifferentiableError):
            w.derivative(np.array([r]))


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.1])
def test_prototype_rejects_bad_eps(eps):
    with pytest.raises(ValueError):
        PrototypePotential(eps)


# -- composite -----------------------------------------------------------------

def test_composite_pieces(certified):
    w = certified
    e, b, a = w.eps, w.beta, w.alpha
    assert w(np.array(1.0)) == pytest.approx(a - 1.0, rel=1e-14)
    assert w.well(np.array(0.5)) == 0.0
    assert w.well(np.array(1 - e + b / 2)) == pytest.approx(-0.5, abs=1e-15)
    assert w.well(np.array(1 + e)) == pytest.approx(0.0, abs=1e-9)
    r = np.array([3 + e - b, 3.5, 10.0, 1e6])
    assert np.all(w(r) == w.far_value)
    mpmath.mp.dps = 40
    try:
        far = -1 + mpmath.exp(-_mp_log_left(-1 + b))
    finally:
        mpmath.mp.dps = 15
    assert w.far_value == pytest.approx(float(far), rel=1e-12)


def test_composite_far_value_matches_phi_for_moderate_beta():
    w = CompositePotential(0.3, 0.01, 0.2, 0.5, 2)
    assert w.far_value == pytest.approx(-1 + 1 / float(phi(np.array(-0.8))), rel=1e-12)


def test_composite_blows_up_at_origin(certified):
    v = certified(np.array([1e-2, 1e-4, 1e-8]))
    assert np.all(np.diff(v) > 0) and v[-1] > 50
    with pytest.raises(ValueError):
        certified(np.array([0.0]))


@pytest.mark.parametrize("lo,hi", [(0.05, 0.94), (0.9505, 0.9510), (0.96, 1.04),
                                   (1.0490, 1.0499), (1.2, 1.49), (1.51, 1.99)])
def test_composite_derivative_matches_difference(certified, lo, hi):
    r = np.linspace(lo, hi, 25)
    h = 1e-5 if hi - lo > 0.01 else 1e-7
    fd = (certified(r + h) - certified(r - h)) / (2 * h)
    an = certified.derivative(r)
    assert np.allclose(an, fd, rtol=1e-5, atol=1e-9 * np.max(np.abs(an)))


@given(st.floats(0.01, 6.0))
def test_composite_dominates_prototype(r):
    w = CompositePotential(0.05, 0.00625, 0.0015625, 0.5, 2)
    assert excess_over_prototype(w)(np.array([r]))[0] >= -1e-12


@pytest.mark.parametrize("kw", [
    dict(eps=0.6, alpha=0.1, beta=0.1, power_s=0.5, dim=2),
    dict(eps=0.05, alpha=0.1, beta=0.05, power_s=0.5, dim=2),
    dict(eps=0.05, alpha=0.0, beta=0.01, power_s=0.5, dim=2),
    dict(eps=0.05, alpha=0.1, beta=0.01, power_s=2.0, dim=2),
    dict(eps=0.05, alpha=0.1, beta=0.01, power_s=0.5, dim=3),
    dict(eps=0.05, alpha=0.1, beta=1e-7, power_s=0.5, dim=2),
])
def test_composite_validation(kw):
    with pytest.raises(ValueError):
        CompositePotential(**kw)


def test_verify_shape_certified(certified):
    rep = verify_shape(certified)
    assert 1 + certified.eps - certified.beta < rep.r0 < 1.5
    assert abs(certified.derivative(np.array(rep.r0))) < 1e-6
    assert rep.join_max_mismatch < 1e-9
    assert rep.join_max_derivative_mismatch < 1e-7


def test_verify_shape_rejects_no_repulsion():
    w = CompositePotential(0.05, 0.0, 0.0015625, 0.5, 2, validate=False)
    with pytest.raises(ShapeError) as exc:
        verify_shape(w)
    assert exc.value.radii


def test_verify_shape_rejects_second_sign_change():
    class Wiggle(CompositePotential):
        def derivative(self, r):
            r = np.asarray(r, dtype=float)
            return np.where((r > 2.5) & (r < 2.6), -1.0, super().derivative(r))

    with pytest.raises(ShapeError, match="more than once"):
        verify_shape(Wiggle(0.05, 0.00625, 0.0015625, 0.5, 2))


# -- tabulated and helpers -------------------------------------------------------

def test_tabulated_interpolates_and_extrapolates():
    w = TabulatedPotential((0.0, 1.0, 2.0), (1.0, -1.0, 0.0))
    assert w(np.array([-1.0, 0.5, 1.5, 5.0])).tolist() == [1.0, 0.0, -0.5, 0.0]
    assert w.derivative(np.array([0.5, 1.5])) == pytest.approx([-2.0, 1.0])


def test_tabulated_validation():
    with pytest.raises(ValueError):
        TabulatedPotential((0.0, 0.0), (1.0, 2.0))
    with pytest.raises(ValueError):
        TabulatedPotential((0.0, 1.0), (1.0,))


def test_power_law():
    w = PowerLawPotential(2.0, 1.5)
    assert w(np.array(4.0)) == pytest.approx(0.25)
    assert w.derivative(np.array(4.0)) == pytest.approx(-2 * 1.5 * 4 ** -2.5)
    assert w.singular_at_origin
