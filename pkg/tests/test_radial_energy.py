import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from radsym.measures import RadialProfile
from radsym.potential import (CompositePotential, PowerLawPotential, PrototypePotential,
                              TabulatedPotential, excess_over_prototype)
from radsym.quadrature import QuadratureSpec
from radsym.radial_energy import (ball_average, ball_volume, cap_fraction, kernel_eval,
                                  kernel_partial_integral, kernel_sup, krs_analytic_bound,
                                  lower_bound_from_c0, radial_energy, radial_lower_bound,
                                  shell_ratio, surface_area, tilde_w, tilde_w_mc_oracle)

GAUSS_T = QuadratureSpec(method="gauss_t")
radius = st.floats(0.05, 5.0)


class SquaredDistance(TabulatedPotential):
    """w(t) = t^2, for which W~(r, s) = r^2 + s^2 in every dimension."""

    def __init__(self):
        super().__init__((0.0, 1.0), (0.0, 1.0))

    def __call__(self, r):
        return np.asarray(r, dtype=float) ** 2

    def breakpoints(self):
        return ()


# -- geometry --------------------------------------------------------------------

def test_sphere_areas():
    assert surface_area(0) == pytest.approx(2.0)
    assert surface_area(1) == pytest.approx(2 * np.pi)
    assert surface_area(2) == pytest.approx(4 * np.pi)
    assert surface_area(3) == pytest.approx(2 * np.pi ** 2)
    assert ball_volume(3) == pytest.approx(4 * np.pi / 3)
    assert shell_ratio(2) == pytest.approx(1 / np.pi)
    assert shell_ratio(3) == pytest.approx(0.5)


@pytest.mark.parametrize("dim", [2, 3, 4, 7])
def test_cap_fraction_matches_integral(dim):
    for theta in (0.3, 1.2, np.pi / 2, 2.5, np.pi):
        ref = shell_ratio(dim) * quad(lambda a: np.sin(a) ** (dim - 2), 0, theta)[0]
        assert cap_fraction(theta, dim) == pytest.approx(ref, abs=1e-13)


# -- kernel ----------------------------------------------------------------------

def test_kernel_three_dim_values():
    # K = t / (2 r s) on (|r - s|, r + s) in R^3
    assert kernel_eval(1.0, 0.3, 0.5, 3) == 0.0
    assert kernel_eval(1.0, 0.3, 1.0, 3) == pytest.approx(1 / 0.6)
    assert kernel_eval(1.0, 0.3, 1.4, 3) == 0.0


def test_kernel_planar_endpoints_are_infinite():
    assert np.isinf(kernel_eval(1.0, 0.5, 0.5, 2))
    assert np.isinf(kernel_eval(1.0, 0.5, 1.5, 2))
    assert np.isfinite(kernel_eval(1.0, 0.5, 1.0, 2))


def test_kernel_rejects_zero_radius():
    with pytest.raises(ValueError):
        kernel_eval(0.0, 1.0, 1.0, 3)


@given(radius, radius, st.integers(2, 8))
def test_kernel_mass_is_one(r, s, dim):
    m = kernel_partial_integral(r, s, 0.0, r + s + 1.0, dim)
    assert m == pytest.approx(1.0, abs=1e-10)


@given(radius, radius, st.floats(0.0, 6.0), st.floats(0.0, 6.0))
def test_kernel_partial_three_dim_closed_form(r, s, a, b):
    a, b = min(a, b), max(a, b)
    lo, hi = max(a, abs(r - s)), min(b, r + s)
    exact = max(hi * hi - lo * lo, 0.0) / (4 * r * s)
    assert kernel_partial_integral(r, s, a, b, 3) == pytest.approx(exact, abs=1e-11)


@given(radius, radius, st.integers(2, 6), st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_kernel_partial_routes_agree(r, s, dim, a, b):
    a, b = min(a, b), max(a, b)
    v1 = kernel_partial_integral(r, s, a, b, dim)
    v2 = kernel_partial_integral(r, s, a, b, dim, GAUSS_T)
    assert v1 == pytest.approx(v2, abs=1e-9)


def test_kernel_partial_is_vectorized():
    r = np.array([0.5, 1.0, 2.0])
    out = kernel_partial_integral(r, 1.0, 0.0, 10.0, 3)
    assert out.shape == (3,) and np.allclose(out, 1.0)


def test_kernel_partial_rejects_reversed_limits():
    with pytest.raises(ValueError):
        kernel_partial_integral(1.0, 1.0, 0.5, 0.2, 3)


# -- shell-pair energy -------------------------------------------------------------

@given(radius, radius, st.integers(2, 7))
def test_tilde_w_squared_distance(r, s, dim):
    assert tilde_w(SquaredDistance(), r, s, dim) == pytest.approx(r * r + s * s, rel=1e-10)


@given(radius, radius)
def test_tilde_w_newton_shells(r, s):
    # shell theorem: the mean of 1/|x - y| over two shells in R^3 is 1/max(r, s)
    w = PowerLawPotential(1.0, 1.0)
    assert tilde_w(w, r, s, 3) == pytest.approx(1 / max(r, s), rel=1e-9)


@given(radius, radius, st.integers(2, 5))
def test_tilde_w_symmetric(r, s, dim):
    w = PrototypePotential(0.1)
    assert tilde_w(w, r, s, dim) == tilde_w(w, s, r, dim)


@given(radius, st.integers(2, 5))
def test_tilde_w_against_origin_point(r, dim):
    w = CompositePotential(0.05, 0.00625, 0.0015625, 0.5, 2)
    assert tilde_w(w, r, 0.0, dim) == w(np.array(r))
    assert tilde_w(w, 0.0, r, dim) == w(np.array(r))


@given(radius, radius, st.integers(2, 6))
def test_tilde_w_prototype_is_minus_window_mass(r, s, dim):
    eps = 0.1
    assert tilde_w(PrototypePotential(eps), r, s, dim) == pytest.approx(
        -kernel_partial_integral(r, s, 1 - eps, 1 + eps, dim), abs=1e-9)


def test_tilde_w_singular_self_pair():
    w = PowerLawPotential(1.0, 2.5)
    assert np.isinf(tilde_w(w, 1.0, 1.0, 3))
    assert np.isfinite(tilde_w(w, 1.0, 0.9, 3))
    assert np.isinf(tilde_w(w, 0.0, 0.0, 3))


def test_tilde_w_routes_agree_for_composite(certified):
    r = np.array([0.3, 0.5, 0.52, 0.7])
    s = np.array([0.25, 0.5, 0.49, 0.1])
    assert np.allclose(tilde_w(certified, r, s, 2), tilde_w(certified, r, s, 2, GAUSS_T),
                       rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("r,s,dim", [(0.6, 0.45, 2), (1.0, 0.3, 3), (0.8, 0.8, 4)])
def test_tilde_w_against_monte_carlo(r, s, dim):
    w = PrototypePotential(0.05)
    est, se = tilde_w_mc_oracle(w, r, s, dim, 200_000, seed=1)
    assert abs(tilde_w(w, r, s, dim) - est) <= 4 * se + 1e-12


def test_monte_carlo_reproducible_and_chunk_invariant():
    w = PrototypePotential(0.1)
    a = tilde_w_mc_oracle(w, 0.7, 0.4, 3, 50_000, seed=9)
    b = tilde_w_mc_oracle(w, 0.7, 0.4, 3, 50_000, seed=9)
    c = tilde_w_mc_oracle(w, 0.7, 0.4, 3, 50_000, seed=9, chunk=777)
    assert a == b
    assert c[0] == pytest.approx(a[0], abs=1e-14)
    assert c[1] == pytest.approx(a[1], rel=1e-9)


# -- radial energies and bounds --------------------------------------------------

def test_radial_energy_single_shell():
    w = PrototypePotential(0.05)
    prof = RadialProfile([0.55], [1.0])
    assert radial_energy(w, prof, 2) == pytest.approx(0.5 * tilde_w(w, 0.55, 0.55, 2))


def test_radial_energy_two_shells_matches_pair_sum():
    w = PrototypePotential(0.05)
    prof = RadialProfile([0.2, 0.8], [0.4, 0.6])
    t = lambda a, b: tilde_w(w, a, b, 3)
    exact = 0.5 * (0.16 * t(0.2, 0.2) + 0.36 * t(0.8, 0.8) + 2 * 0.24 * t(0.2, 0.8))
    assert radial_energy(w, prof, 3) == pytest.approx(exact, abs=1e-14)


def test_radial_energy_rejects_invalid_profile():
    with pytest.raises(ValueError):
        radial_energy(PrototypePotential(0.05), RadialProfile([0.5], [0.5]), 2)


@given(st.lists(st.tuples(st.floats(0.0, 2.0), st.floats(0.05, 1.0)), min_size=1, max_size=8))
def test_radial_energy_respects_lower_bound(nodes):
    r, w = np.array(nodes).T
    prof = RadialProfile(r, w / w.sum())
    assert radial_energy(PrototypePotential(0.05), prof, 2) >= -0.32110915


def test_kernel_sup_planar():
    res = kernel_sup(0.05, 2)
    assert res.raw_max <= res.sup_value <= krs_analytic_bound(0.05, 2)
    assert res.sup_value == pytest.approx(0.2863, abs=2e-3)
    assert res.tail_bound < res.raw_max


def test_kernel_sup_capped_at_one():
    assert kernel_sup(0.5, 2).sup_value <= 1.0


@pytest.mark.parametrize("dim,eps", [(2, 0.05), (3, 0.04), (4, 0.01)])
def test_c0_at_most_half(dim, eps):
    assert radial_lower_bound(eps, dim, "numeric").c0 <= 0.5


def test_analytic_bound_values():
    assert krs_analytic_bound(0.04, 3) == pytest.approx(0.1736111111, rel=1e-9)
    assert krs_analytic_bound(1 / 11, 2) == pytest.approx(22 * np.sqrt(2) / (5 * np.pi)
                                                          / np.sqrt(11))
    with pytest.raises(ValueError):
        krs_analytic_bound(0.2, 2)


def test_lower_bound_modes():
    an = radial_lower_bound(0.05, 2, "analytic")
    nu = radial_lower_bound(0.05, 2, "numeric")
    assert an.lower_bound == pytest.approx(-0.32110915, abs=1e-8)
    assert nu.lower_bound > an.lower_bound
    assert lower_bound_from_c0(0.0) == -0.25
    with pytest.raises(ValueError):
        radial_lower_bound(0.2, 2, "analytic")
    with pytest.raises(ValueError):
        radial_lower_bound(0.05, 2, "guess")


# -- ball averages ---------------------------------------------------------------

def test_ball_average_methods_agree(certified):
    w1 = excess_over_prototype(certified)
    x = np.array([0.0, 0.3, 0.95, 1.0])
    a = ball_average(w1, x, 0.025, 2)
    b = ball_average(w1, x, 0.025, 2, method="center_shells")
    assert np.allclose(a, b, rtol=1e-8, atol=1e-12)


@pytest.mark.parametrize("dim,s", [(2, 0.5), (3, 1.5), (4, 2.5)])
def test_ball_average_power_law_at_centre(dim, s):
    eta = 0.1
    got = ball_average(PowerLawPotential(2.0, s), 0.0, eta, dim)
    assert got == pytest.approx(2.0 * dim * eta ** -s / (dim - s), rel=1e-9)


@given(st.floats(0.0, 3.0), st.floats(0.01, 0.5), st.integers(2, 5))
def test_ball_average_of_squared_distance(x, eta, dim):
    # mean of |y|^2 over B(x, eta) is x^2 + d eta^2 / (d + 2)
    got = ball_average(SquaredDistance(), x, eta, dim)
    assert got == pytest.approx(x * x + dim * eta * eta / (dim + 2), rel=1e-9)


def test_ball_average_rejects_bad_input():
    with pytest.raises(ValueError):
        ball_average(PrototypePotential(0.1), 0.5, 0.0, 2)
    with pytest.raises(ValueError):
        ball_average(PrototypePotential(0.1), 0.5, 0.1, 2, method="other")
