"""Tests for invariants, the interpolation constant and the smallness
criterion."""

import numpy as np
import pytest

from skdv.conservation import (
    apriori_monitor,
    c_alpha_beta_gamma,
    c_alpha_beta_gamma_intro,
    energy,
    estimate_gn_constant,
    invariant_sample,
    mass,
    phi_of_norms,
    phi_smallness,
    q_momentum,
)
from skdv.model import InitialData, ModelParams, make_initial_data
from skdv.spectral import ComplexField, RealField, SpectralGrid, h1_norm


@pytest.fixture
def grid():
    return SpectralGrid(512, 32.0)


class TestInvariants:
    def test_mass_gaussian(self, grid):
        # int |A exp(-(x/w)^2)|^2 = A^2 w sqrt(pi/2)
        state = make_initial_data(
            InitialData(family="gaussian", amplitude_u=0.5, width_u=2.0), grid
        )
        assert mass(state) == pytest.approx(0.25 * 2.0 * np.sqrt(np.pi / 2.0), rel=1e-13)

    def test_q_plane_wave_sign(self, grid):
        # u = exp(i kappa x) phi: Im(u conj(u_x)) = -kappa phi^2
        state = make_initial_data(
            InitialData(family="modulated_gaussian", amplitude_u=1.0, amplitude_v=0.0,
                        carrier=1.0), grid
        )
        params = ModelParams(1.0, 0.0, 1.0)
        expected = -2.0 * 1.0 * np.sqrt(np.pi / 2.0)
        assert q_momentum(state, params) == pytest.approx(expected, rel=1e-12)

    def test_q_with_v(self, grid):
        state = make_initial_data(
            InitialData(family="gaussian", amplitude_u=0.0, amplitude_v=0.5), grid
        )
        params = ModelParams(2.0, 0.0, 1.0)
        assert q_momentum(state, params) == pytest.approx(
            2.0 * 0.25 * np.sqrt(np.pi / 2.0), rel=1e-12
        )

    def test_energy_closed_form(self, grid):
        # u = exp(-x^2), v = exp(-x^2): each term has a Gaussian closed form
        state = make_initial_data(InitialData(family="gaussian"), grid)
        a, b, g = 2.0, -1.0, 0.5
        i2 = np.sqrt(np.pi / 2.0)  # int exp(-2x^2)
        i3 = np.sqrt(np.pi / 3.0)  # int exp(-3x^2)
        i4 = np.sqrt(np.pi / 4.0)  # int exp(-4x^2)
        grad = np.sqrt(np.pi / 2.0)  # int 4 x^2 exp(-2x^2) = sqrt(pi/2)
        expected = (
            a * g * i3 - (a / 6.0) * i3 + (b * g / 2.0) * i4
            + (a / 2.0) * grad + g * grad
        )
        assert energy(state, ModelParams(a, b, g)) == pytest.approx(expected, rel=1e-12)

    def test_invariant_sample_fields(self, grid):
        state = make_initial_data(InitialData(family="gaussian"), grid)
        s = invariant_sample(state, ModelParams(1.0, 0.0, 1.0))
        assert s.mass == pytest.approx(mass(state))
        assert s.u_h1 == pytest.approx(h1_norm(state.u))


class TestGnConstant:
    def test_below_sharp_bound(self, grid):
        # the optimal L4 interpolation constant is below 1 in this
        # normalization; the sweep estimate must stay under it and above
        # the value attained by a plain Gaussian
        c = estimate_gn_constant(grid, "l4")
        assert 0.8 < c < 1.0

    def test_is_a_lower_bound(self, grid):
        # adding profiles can only increase the estimate
        small = estimate_gn_constant(grid, "l4", families=("gaussian",))
        full = estimate_gn_constant(grid, "l4")
        assert full >= small

    def test_l3_variant(self, grid):
        c = estimate_gn_constant(grid, "l3")
        assert 0.8 < c < 1.1

    def test_unknown_variant(self, grid):
        with pytest.raises(ValueError):
            estimate_gn_constant(grid, "l5")


def _reference_constant(alpha, beta, gamma, c):
    """Independent mpmath evaluation of the explicit constant."""
    import mpmath as mp

    mp.mp.dps = 50
    a, b, g = abs(mp.mpf(alpha)), abs(mp.mpf(beta)), abs(mp.mpf(gamma))
    c = mp.mpf(c)
    mu = min(g, a / 2)
    t1 = 2 + 2 * g / a + 8 * g**2 / a**2
    t2 = (4 * (c * a * g + 2 * a + 3 * g + 32 * g**2 / mu) + 2 * b * g * c) / mu
    t3 = 32 * (a * g**2 + b * g / 2) ** 2 / mu**2 * c**8
    t4 = (
        c**24 * 2**22 / (mu ** mp.mpf("4/3") * a ** mp.mpf("1/3"))
        * ((a + 2 * g) ** mp.mpf("5/3") + g**10 / (mu ** mp.mpf("20/3") * a ** mp.mpf("5/3")))
    )
    return t1 + t2 + t3 + t4


class TestExplicitConstant:
    @pytest.mark.parametrize(
        "alpha,beta,gamma",
        [(1.0, -0.1, 1.0), (2.0, -1.0, 0.5), (0.7, -0.3, 1.3)],
    )
    def test_matches_high_precision(self, alpha, beta, gamma):
        params = ModelParams(alpha, beta, gamma)
        got = c_alpha_beta_gamma(params, 0.9)
        ref = float(_reference_constant(alpha, beta, gamma, 0.9))
        assert abs(got - ref) / ref < 1e-12

    def test_intro_variant_differs(self):
        params = ModelParams(1.0, -0.1, 1.0)
        main = c_alpha_beta_gamma(params, 0.9)
        intro = c_alpha_beta_gamma_intro(params, 0.9)
        assert main != intro
        assert main > 0 and intro > 0

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            c_alpha_beta_gamma(ModelParams(0.0, 0.0, 1.0), 0.9)


class TestPhi:
    def test_zero_norms(self):
        rep = phi_smallness(0.0, 0.0, ModelParams(1.0, -1.0, 1.0), 0.9)
        assert rep.phi == 0.0
        assert rep.satisfied  # 0 <= alpha gamma

    def test_monotone_in_each_argument(self):
        params = ModelParams(1.0, -0.1, 1.0)
        base = phi_smallness(0.1, 0.1, params, 0.9).phi
        assert phi_smallness(0.2, 0.1, params, 0.9).phi > base
        assert phi_smallness(0.1, 0.2, params, 0.9).phi > base

    def test_norm_validation(self):
        with pytest.raises(ValueError):
            phi_smallness(-0.1, 0.0, ModelParams(1.0, -1.0, 1.0), 0.9)

    def test_phi_of_norms_formula(self):
        assert phi_of_norms(0.5, 0.25, 4.0) == pytest.approx(
            2.0 * (0.5 + 0.25 + 0.5**5 + 0.25**5)
        )


class TestAprioriMonitor:
    def test_trivial_hold(self, grid):
        state = make_initial_data(
            InitialData(family="gaussian", amplitude_u=0.01, amplitude_v=0.01), grid
        )
        rep = apriori_monitor([state], ModelParams(1.0, 0.0, 1.0), phi=10.0)
        assert rep.holds
        assert rep.v_bound_holds
        assert rep.tightest_margin > 9.0

    def test_violation_detected(self, grid):
        state = make_initial_data(InitialData(family="gaussian"), grid)
        rep = apriori_monitor([state], ModelParams(1.0, 0.0, 1.0), phi=1e-3)
        assert not rep.holds

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            apriori_monitor([], ModelParams(1.0, 0.0, 1.0), 1.0)
