import math
from dataclasses import replace

import numpy as np
import pytest

from qvortex import bessel_first_zero, evaluate, fd_minimize

# first positive zeros of the integer-order Bessel functions J_0..J_5
BESSEL_ZEROS = {
    0: 2.404825557695773,
    1: 3.831705970207512,
    2: 5.135622301840683,
    3: 6.380161895923984,
    4: 7.588342434503804,
    5: 8.771483815959954,
}


class TestBesselFirstZero:
    @pytest.mark.parametrize("order,reference", sorted(BESSEL_ZEROS.items()))
    def test_reference_values(self, order, reference):
        assert bessel_first_zero(order) == pytest.approx(reference, abs=2e-8)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            bessel_first_zero(11)
        with pytest.raises(ValueError):
            bessel_first_zero(-1)


class TestFdMinimize:
    def test_boundary_values_and_constraint(self, params):
        fd = fd_minimize(params, 100.0, n_fd=400)
        assert fd.phi_values[0] == 0.0
        assert fd.phi_values[-1] == 0.0
        q = 4.0 * math.pi * np.trapezoid(
            fd.grid_points * fd.phi_values**2, fd.grid_points
        )
        assert q == pytest.approx(100.0, rel=1e-10)

    def test_rejects_coarse_grid_and_bad_norm(self, params):
        with pytest.raises(ValueError):
            fd_minimize(params, 100.0, n_fd=50)
        with pytest.raises(ValueError):
            fd_minimize(params, -1.0)

    def test_agrees_with_spectral_solver(self, basis, params, solve):
        fd = fd_minimize(params, 100.0, n_fd=2000)
        sol = solve(100.0)
        assert fd.converged
        assert abs(fd.omega_sq - sol.omega_sq) < 0.01
        phi_at_nodes = evaluate(basis, sol.coeffs, fd.grid_points)
        assert np.max(np.abs(phi_at_nodes - fd.phi_values)) < 0.02 * sol.phi_max

    def test_profile_shape_agreement_high_winding(self, basis, params):
        from qvortex import SolveConfig, minimize_on_sphere

        n3 = replace(params, n=3)
        fd = fd_minimize(n3, 100.0, n_fd=2000)
        sol = minimize_on_sphere(basis, n3, SolveConfig(q0=100.0))
        rho, phi = fd.grid_points, fd.phi_values
        fd_peak = rho[np.argmax(np.abs(phi))]
        from qvortex import dense_profile

        rho_s, phi_s = dense_profile(basis, sol.coeffs)
        spec_peak = rho_s[np.argmax(np.abs(phi_s))]
        assert fd_peak == pytest.approx(spec_peak, rel=0.02)
        assert np.max(np.abs(phi)) == pytest.approx(sol.phi_max, rel=0.01)

    def test_grid_refinement_stability(self, params):
        coarse = fd_minimize(params, 100.0, n_fd=2000)
        fine = fd_minimize(params, 100.0, n_fd=4000)
        assert abs(fine.omega_sq - coarse.omega_sq) < 1e-3

    def test_linear_limit(self, params):
        fd = fd_minimize(params, 0.01, n_fd=2000)
        expected = 2.2 + (bessel_first_zero(1) / 20.0) ** 2
        assert fd.omega_sq == pytest.approx(expected, abs=2e-3)
