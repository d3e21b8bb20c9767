"""Tests for model parameters, initial data families and nonlinear RHS."""

import numpy as np
import pytest

from skdv.model import (
    InitialData,
    ModelParams,
    SystemState,
    kdv_soliton_profile,
    make_initial_data,
    rhs_nonlinear_u,
    rhs_nonlinear_v,
)
from skdv.spectral import ComplexField, RealField, SpectralGrid, integrate


@pytest.fixture
def grid():
    return SpectralGrid(256, 32.0)


class TestModelParams:
    def test_regime(self):
        assert ModelParams(1.0, 0.0, 1.0).full_regime
        assert ModelParams(-2.0, 1.0, -0.5).full_regime
        assert not ModelParams(1.0, 0.0, -1.0).full_regime
        assert ModelParams(1.0, 0.0, -1.0).regime == "test"


class TestSystemState:
    def test_grid_mismatch(self, grid):
        other = SpectralGrid(128, 32.0)
        u = ComplexField(grid, np.zeros(256, dtype=complex))
        v = RealField(other, np.zeros(128))
        with pytest.raises(ValueError):
            SystemState(u, v)


class TestInitialData:
    def test_gaussian(self, grid):
        spec = InitialData(family="gaussian", amplitude_u=0.5, width_u=2.0)
        state = make_initial_data(spec, grid)
        assert state.u.samples[128] == pytest.approx(0.5)  # x = 0
        assert np.max(np.abs(state.u.samples.imag)) == 0.0

    def test_modulated_gaussian_carrier(self, grid):
        spec = InitialData(family="modulated_gaussian", carrier=1.0)
        state = make_initial_data(spec, grid)
        assert np.max(np.abs(np.abs(state.u.samples) - np.exp(-grid.x**2))) < 1e-14

    def test_zero(self, grid):
        state = make_initial_data(InitialData(family="zero"), grid)
        assert np.all(state.u.samples == 0)
        assert np.all(state.v.samples == 0)

    def test_soliton_profile(self):
        x = np.linspace(-10, 10, 101)
        v = kdv_soliton_profile(x, 2.0)
        assert v.max() == pytest.approx(6.0)
        with pytest.raises(ValueError):
            kdv_soliton_profile(x, -1.0)

    def test_sum_family(self, grid):
        spec = InitialData(
            family="sum",
            components=(
                InitialData(family="gaussian", amplitude_u=0.5, amplitude_v=0.0),
                InitialData(family="kdv_soliton", speed=0.5),
            ),
        )
        state = make_initial_data(spec, grid)
        assert state.v.samples[128] == pytest.approx(1.5)
        assert state.u.samples[128] == pytest.approx(0.5)

    def test_custom_family(self, grid):
        u = np.exp(-grid.x**2) * 1j
        v = np.exp(-grid.x**2)
        state = make_initial_data(
            InitialData(family="custom", u_samples=u, v_samples=v), grid
        )
        assert np.allclose(state.u.samples, u)

    def test_unknown_family(self, grid):
        with pytest.raises(ValueError):
            make_initial_data(InitialData(family="nope"), grid)

    def test_boundary_rejection(self, grid):
        # width comparable to the box: tails contaminate the boundary
        spec = InitialData(family="gaussian", width_u=20.0, width_v=20.0)
        with pytest.raises(ValueError):
            make_initial_data(spec, grid)


class TestRhs:
    def test_u_rhs_zero_state(self, grid):
        state = make_initial_data(InitialData(family="zero"), grid)
        out = rhs_nonlinear_u(state, ModelParams(1.0, 1.0, 1.0))
        assert np.all(out.samples == 0)

    def test_u_rhs_matches_pointwise(self, grid):
        # for band-limited smooth fields the dealiased product equals the
        # pointwise product
        state = make_initial_data(
            InitialData(family="gaussian", amplitude_u=0.5, amplitude_v=0.3,
                        width_u=2.0, width_v=2.0), grid
        )
        params = ModelParams(2.0, -1.0, 0.5)
        out = rhs_nonlinear_u(state, params)
        u, v = state.u.samples, state.v.samples
        expected = -1j * (2.0 * u * v - 1.0 * u * np.abs(u) ** 2)
        assert np.max(np.abs(out.samples - expected)) < 1e-12

    def test_v_rhs_forms_agree(self, grid):
        state = make_initial_data(
            InitialData(family="gaussian", amplitude_u=0.5, amplitude_v=0.3), grid
        )
        params = ModelParams(1.0, 0.0, 2.0)
        a = rhs_nonlinear_v(state, params, form="conservative")
        b = rhs_nonlinear_v(state, params, form="advective")
        assert np.max(np.abs(a.samples - b.samples)) < 1e-10

    def test_v_rhs_zero_mean(self, grid):
        # the conservative form is a perfect x-derivative
        state = make_initial_data(
            InitialData(family="gaussian", amplitude_u=0.5, amplitude_v=0.3), grid
        )
        out = rhs_nonlinear_v(state, ModelParams(1.0, 1.0, 1.0))
        assert abs(integrate(out)) < 1e-13
