import numpy as np
import pytest

from gkdvlab.grid import field_from_function, make_grid
from gkdvlab.norms import xsb_norm
from gkdvlab.solver import (
    conserved_quantities,
    duhamel_gamma,
    evolve_reference,
    nonlinearity,
    pde_residual,
    picard_solve,
    reconstruct_solution,
)
from gkdvlab.spacetime import (
    Cutoff,
    band_project,
    centered_axis,
    free_evolution,
    midpoint_axis,
    st_zero,
)
from gkdvlab.grid import airy_propagate

from conftest import banded_bump


class TestNonlinearity:
    def test_zero_maps_to_zero(self, grid512):
        z = field_from_function(grid512, lambda x: 0.0 * x)
        assert np.max(np.abs(nonlinearity(z).values)) == 0.0

    def test_constant_maps_to_zero(self, grid512):
        c = field_from_function(grid512, lambda x: 0.0 * x + 1.3)
        assert np.max(np.abs(nonlinearity(c).values)) <= 1e-13

    def test_sine_matches_symbolic_oracle(self):
        # N(sin) = -sin^7(x) cos(x), alias-free with 8x padding
        g = make_grid(np.pi, 256)
        out = nonlinearity(field_from_function(g, np.sin))
        exact = -np.sin(g.x) ** 7 * np.cos(g.x)
        assert np.max(np.abs(out.values.real - exact)) <= 1e-10
        assert np.max(np.abs(out.values.imag)) <= 1e-12

    def test_rejects_complex_data(self, grid512):
        f = field_from_function(grid512, lambda x: np.exp(1j * x))
        with pytest.raises(ValueError):
            nonlinearity(f)


class TestConservedQuantities:
    def test_zero_field(self, grid512):
        z = field_from_function(grid512, lambda x: 0.0 * x)
        assert conserved_quantities(z) == (0.0, 0.0, 0.0)

    def test_sine_closed_form(self):
        g = make_grid(np.pi, 128)
        mean, mass, energy = conserved_quantities(field_from_function(g, np.sin))
        assert abs(mean) <= 1e-13
        assert mass == pytest.approx(np.pi, rel=1e-13)
        # energy = (1/2) int cos^2 = pi/2; the odd u^9 term integrates to 0
        assert energy == pytest.approx(np.pi / 2, rel=1e-13)


class TestEvolveReference:
    def test_zero_data_stays_zero(self, grid512):
        z = field_from_function(grid512, lambda x: 0.0 * x)
        traj = evolve_reference(z, 0.01, 1e-3)
        assert np.max(np.abs(traj.u.values)) == 0.0
        assert np.max(np.abs(traj.diagnostics.mass)) == 0.0

    def test_linear_regime_matches_free_flow(self, grid512):
        phi = field_from_function(grid512, lambda x: 1e-8 * np.exp(-(x**2)))
        traj = evolve_reference(phi, 1.0, 1e-3, diag_stride=1000)
        final = traj.u.values[-1]
        lin = airy_propagate(phi, 1.0).values
        assert np.max(np.abs(final - lin)) <= 1e-8 * np.max(np.abs(lin))

    def test_fourth_order_self_convergence(self):
        # Richardson oracle: with a dt/8 self-reference the error ratio under
        # halving sits in the fourth-order window
        g = make_grid(32.0, 256)
        phi = field_from_function(g, lambda x: np.exp(-(x**2)))
        T, base = 0.5, 2048
        ref = evolve_reference(phi, T, T / (8 * base), diag_stride=10**9).u.values[-1]
        e1 = np.max(np.abs(evolve_reference(phi, T, T / base, diag_stride=10**9).u.values[-1] - ref))
        e2 = np.max(
            np.abs(evolve_reference(phi, T, T / (2 * base), diag_stride=10**9).u.values[-1] - ref)
        )
        assert 12.0 <= e1 / e2 <= 20.0

    def test_mean_preserved_exactly(self, grid512):
        phi = field_from_function(grid512, lambda x: np.exp(-(x**2)))
        traj = evolve_reference(phi, 0.02, 1e-3)
        d = traj.diagnostics
        assert np.max(np.abs(d.mean - d.mean[0])) <= 1e-12

    def test_short_run_conservation(self, grid512):
        phi = field_from_function(grid512, lambda x: np.exp(-(x**2)))
        traj = evolve_reference(phi, 0.05, 1e-4, diag_stride=50)
        d = traj.diagnostics
        assert np.max(np.abs(d.mass - d.mass[0])) <= 1e-10 * abs(d.mass[0])
        assert np.max(np.abs(d.energy - d.energy[0])) <= 1e-10 * abs(d.energy[0])

    def test_blowup_is_flagged_with_step(self):
        g = make_grid(16.0, 128)
        phi = field_from_function(g, lambda x: 10.0 * np.exp(-(x**2)))
        traj = evolve_reference(phi, 0.5, 1e-2)
        assert traj.blown_up
        assert traj.first_bad_step is not None and traj.first_bad_step >= 1

    def test_non_integer_step_count_rejected(self, grid512):
        phi = field_from_function(grid512, lambda x: np.exp(-(x**2)))
        with pytest.raises(ValueError):
            evolve_reference(phi, 1.0, 3e-4)


class TestDuhamelGamma:
    def test_zero_inputs_give_zero(self, grid64):
        ta = centered_axis(4.0, 256)
        z = st_zero(grid64, ta)
        out = duhamel_gamma(z, z, 0.25)
        assert np.max(np.abs(out.values)) == 0.0

    def test_output_vanishes_outside_cutoff(self, grid64):
        ta = centered_axis(4.0, 256)
        phi = banded_bump(grid64, amplitude=1.0, band=2.0)
        T = 0.25
        z = free_evolution(phi, ta, cutoff=Cutoff(T))
        out = duhamel_gamma(st_zero(grid64, ta), z, T)
        outside = np.abs(ta.t) >= 2 * T
        assert np.max(np.abs(out.values[outside])) == 0.0
        assert np.max(np.abs(out.values)) > 0.0

    def test_needs_centered_axis(self, grid64):
        ta = midpoint_axis(1.0, 64)
        z = st_zero(grid64, ta)
        with pytest.raises(ValueError):
            duhamel_gamma(z, z, 0.25)


class TestPicardSolve:
    def test_zero_data_converges_immediately(self, grid64):
        phi = field_from_function(grid64, lambda x: 0.0 * x)
        res = picard_solve(phi, 0.25, tol=1e-12, taxis=centered_axis(4.0, 256), xi_band=4.0)
        assert res.converged
        assert res.iterations == 1
        assert res.ratios == []
        assert np.max(np.abs(res.v.values)) == 0.0

    def test_tiny_data_contracts_below_half(self, grid512):
        phi = banded_bump(grid512, amplitude=1e-6, band=2.0)
        res = picard_solve(phi, 1.0 / 16.0, tol=1e-30, max_iter=4,
                           taxis=centered_axis(4.0, 2048), xi_band=8.0)
        assert res.distances[0] > 0.0
        assert all(r < 0.5 for r in res.ratios)

    def test_fixed_point_residual_at_exit(self, grid64):
        phi = banded_bump(grid64, amplitude=1.0, band=2.0)
        ta = centered_axis(4.0, 256)
        tol = 1e-9
        res = picard_solve(phi, 0.125, tol=tol, taxis=ta, xi_band=4.0)
        assert res.converged
        gamma_v = duhamel_gamma(res.v, res.z, 0.125)
        diff = gamma_v.with_values(gamma_v.values - res.v.values)
        projected, _ = band_project(diff, 4.0)
        assert xsb_norm(projected, res.sigma, res.b) <= tol

    def test_cross_validates_against_reference(self):
        # the fixed point plus the free evolution must follow the time
        # stepper on [0, T]
        g = make_grid(32.0, 512)
        phi = banded_bump(g, amplitude=1.0, band=2.0)
        T = 1.0 / 16.0
        ta = centered_axis(4.0, 2048)
        res = picard_solve(phi, T, tol=1e-11, taxis=ta, xi_band=8.0)
        assert res.converged
        u = reconstruct_solution(res)
        stride = 20
        traj = evolve_reference(phi, T, ta.dt / stride, output_stride=stride, diag_stride=10**9)
        j0 = int(np.argmin(np.abs(ta.t)))
        for k in range(traj.u.taxis.n_samples):
            a = u.values[j0 + k].real
            b = traj.u.values[k].real
            err = np.sqrt(np.sum((a - b) ** 2) / np.sum(b**2))
            assert err <= 1e-6

    def test_interior_pde_residual(self, grid64):
        # the discrete fixed point obeys the equation up to the trapezoid
        # quadrature's O(dt^2); this axis leaves a 3x margin under 1e-4
        phi = banded_bump(grid64, amplitude=1.0, band=2.0)
        ta = centered_axis(4.0, 1024)
        T = 0.25
        res = picard_solve(phi, T, tol=1e-10, taxis=ta, xi_band=4.0)
        assert res.converged
        u = reconstruct_solution(res)
        rel = pde_residual(u, (-T / 2, T / 2))
        assert np.max(rel) <= 1e-4

    def test_contraction_monotone_in_T(self, grid64):
        phi = banded_bump(grid64, amplitude=1.5, band=2.0)
        ta = centered_axis(4.0, 256)
        finals = []
        for T in (1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0):
            res = picard_solve(phi, T, tol=1e-10, taxis=ta, xi_band=4.0)
            assert res.converged
            finals.append(res.final_ratio)
        assert finals[0] >= finals[1] >= finals[2]

    def test_nonconvergence_is_a_state(self, grid64):
        phi = banded_bump(grid64, amplitude=2.5, band=2.0)
        res = picard_solve(phi, 0.25, tol=1e-10, max_iter=10,
                           taxis=centered_axis(4.0, 256), xi_band=4.0)
        assert not res.converged
        assert res.blown_up or res.iterations == 10
