"""Constrained minimization on the coefficient sphere and its diagnostics.

With the orthonormal basis of `qvortex.basis`, a profile phi = sum a_j psi_j
has prescribed norm Q0 exactly when |a|^2 = Q0, so the variational problem
becomes: minimize over the sphere of radius sqrt(Q0) the function

    F(a) = 1/2 * a.(K + n^2 C).a + lam*b*Q0/(4*pi)
           + lam * int rho*(phi^6 - a_pot*phi^4) drho.

The quadratic coefficient of the potential contributes only the constant
lam*b*Q0/(4*pi) because of the constraint, so it never moves the minimizer.
The minimizer is computed by projected gradient descent with Armijo
backtracking: the Euclidean gradient is projected onto the sphere's tangent
space, a step is taken, and the iterate is retracted by rescaling back to
radius sqrt(Q0) (an exact retraction). Optional nonlinear conjugate-gradient
acceleration (Polak-Ribiere with restarts) sits behind a flag.

The squared frequency emerges as the constraint's Lagrange multiplier and is
recovered by projecting the stationarity condition onto the solution:

    omega^2 = (4*pi/Q0) * ( int rho*phi_rho^2 + n^2 * int phi^2/rho
                            + int rho*phi*U'(phi) ),

equivalently omega^2 = (4*pi/Q0) * a.grad F(a) + 2*lam*b on the sphere.
Solution quality is reported as the residual of the radial field equation,

    RE = (1/p) * sqrt( int (phi_rhorho + phi_rho/rho - n^2 phi/rho^2
                            + omega^2 phi - U'(phi))^2 drho ),

evaluated with analytic derivatives on the shared quadrature grid. For
|n| >= 2 the integrand grows like 1/rho^2 toward the origin because sine
modes vanish only linearly there; the grid has no node at rho = 0 and the
reported RE is understood as this grid-discretized value. The first panel's
contribution can be split out to expose that origin sensitivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import evaluate
from .model import decay_rate, potential_derivative
from .validation import check_coeffs, check_positive, readonly

__all__ = [
    "SolveConfig",
    "VortexSolution",
    "PROFILE_POINTS",
    "discrete_functional",
    "functional_gradient",
    "minimize_on_sphere",
    "recover_omega_sq",
    "residual_error",
    "residual_error_split",
    "dense_profile",
    "check_decay_envelope",
    "gradient_fd_check",
]

PROFILE_POINTS = 2001

_ARMIJO_C1 = 1e-4
_BACKTRACK = 0.5
_ETA_MAX = 1e6
_ETA_MIN = 1e-18

_INITIAL_GUESSES = ("ring_bump", "trapezoid", "custom")


@dataclass(frozen=True)
class SolveConfig:
    """Options for one constrained solve.

    q0            : prescribed reduced norm, > 0
    grad_tol      : stop when |tangent grad| <= grad_tol * max(1, |grad|)
    max_iter      : iteration cap per descent run
    initial_guess : "ring_bump" (default), "trapezoid", or "custom"
    custom_coeffs : coefficient vector for initial_guess="custom"
    restarts      : extra perturbed runs (1% relative noise), lowest F kept
    rng_seed      : seed for the restart perturbations (determinism)
    use_cg        : enable conjugate-gradient acceleration
    """

    q0: float
    grad_tol: float = 1e-8
    max_iter: int = 20000
    initial_guess: str = "ring_bump"
    custom_coeffs: tuple | None = None
    restarts: int = 2
    rng_seed: int = 0
    use_cg: bool = True

    def __post_init__(self):
        object.__setattr__(self, "q0", check_positive("q0", self.q0))
        object.__setattr__(self, "grad_tol", check_positive("grad_tol", self.grad_tol))
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.restarts < 0:
            raise ValueError(f"restarts must be >= 0, got {self.restarts}")
        if self.initial_guess not in _INITIAL_GUESSES:
            raise ValueError(
                f"initial_guess must be one of {_INITIAL_GUESSES}, got "
                f"{self.initial_guess!r}"
            )
        if self.initial_guess == "custom" and self.custom_coeffs is None:
            raise ValueError("initial_guess='custom' requires custom_coeffs")
        if self.custom_coeffs is not None:
            object.__setattr__(
                self, "custom_coeffs", tuple(float(v) for v in self.custom_coeffs)
            )


@dataclass(frozen=True)
class VortexSolution:
    """Converged (or best-effort) minimizer and its diagnostics.

    coeffs lie on the sphere |a|^2 = q0 and are sign-normalized so the
    profile is non-negative at its largest extremum. phi_max is taken over a
    dense uniform output grid of PROFILE_POINTS points. grad_norm is the
    final tangent-gradient norm, attached so non-convergence is never a
    silent success.
    """

    coeffs: np.ndarray
    omega_sq: float
    residual_error: float
    phi_max: float
    iterations: int
    converged: bool
    f_value: float
    grad_norm: float


def _nonlinear_energy(phi, w_rho, lam, a_pot):
    """lam * int rho*(phi^6 - a_pot*phi^4) on the grid (phi sampled at nodes)."""
    ph2 = phi * phi
    return lam * float(np.dot(w_rho, ph2 * ph2 * (ph2 - a_pot)))


def _nonlinear_gradient(phi, psi_nodes, w_rho, lam, a_pot):
    """Gradient of _nonlinear_energy with respect to the coefficients."""
    ph2 = phi * phi
    return lam * (psi_nodes @ (w_rho * (phi * ph2 * (6.0 * ph2 - 4.0 * a_pot))))


def discrete_functional(coeffs, basis, params, q0):
    """Value of F(a); q0 enters only through the additive constant."""
    a = check_coeffs("coeffs", coeffs, basis.m)
    q0 = check_positive("q0", q0)
    mat = basis.k_matrix + params.n**2 * basis.c_matrix
    phi = a @ basis.psi_nodes
    w_rho = basis.grid.weights * basis.grid.nodes
    const = params.lam * params.b * q0 / (4.0 * math.pi)
    return 0.5 * float(a @ (mat @ a)) + const + _nonlinear_energy(
        phi, w_rho, params.lam, params.a_pot
    )


def functional_gradient(coeffs, basis, params):
    """Euclidean gradient of F: (K + n^2 C) a + lam * g_nl."""
    a = check_coeffs("coeffs", coeffs, basis.m)
    mat = basis.k_matrix + params.n**2 * basis.c_matrix
    phi = a @ basis.psi_nodes
    w_rho = basis.grid.weights * basis.grid.nodes
    return mat @ a + _nonlinear_gradient(
        phi, basis.psi_nodes, w_rho, params.lam, params.a_pot
    )


def recover_omega_sq(coeffs, basis, params, q0):
    """Squared frequency from the stationarity condition projected on phi."""
    a = check_coeffs("coeffs", coeffs, basis.m)
    q0 = check_positive("q0", q0)
    norm_sq = float(a @ a)
    if abs(norm_sq - q0) > 1e-6 * q0:
        raise ValueError(
            f"coefficients violate the constraint: |a|^2 = {norm_sq} but q0 = {q0}"
        )
    phi = a @ basis.psi_nodes
    w_rho = basis.grid.weights * basis.grid.nodes
    grad_term = float(a @ (basis.k_matrix @ a))
    cent_term = float(a @ (basis.c_matrix @ a))
    pot_term = float(np.dot(w_rho, phi * potential_derivative(phi, params)))
    return 4.0 * math.pi / q0 * (grad_term + params.n**2 * cent_term + pot_term)


def _residual_on_nodes(coeffs, omega_sq, basis, params):
    a = check_coeffs("coeffs", coeffs, basis.m)
    rho = basis.grid.nodes
    phi = a @ basis.psi_nodes
    dphi = a @ basis.dpsi_nodes
    d2phi = a @ basis.d2psi_nodes
    return (
        d2phi
        + dphi / rho
        - params.n**2 * phi / rho**2
        + omega_sq * phi
        - potential_derivative(phi, params)
    )


def residual_error(coeffs, omega_sq, basis, params):
    """Normalized L2 residual of the field equation on the shared grid."""
    r = _residual_on_nodes(coeffs, omega_sq, basis, params)
    return float(np.sqrt(np.dot(basis.grid.weights, r * r))) / basis.p


def residual_error_split(coeffs, omega_sq, basis, params):
    """(total RE, RE restricted to the first quadrature panel).

    The first-panel share exposes origin sensitivity of the residual metric
    for |n| >= 2, where the integrand behaves like 1/rho^2 near rho = 0.
    """
    r = _residual_on_nodes(coeffs, omega_sq, basis, params)
    w = basis.grid.weights
    total = float(np.sqrt(np.dot(w, r * r))) / basis.p
    k = basis.grid.order_per_panel
    first = float(np.sqrt(np.dot(w[:k], r[:k] ** 2))) / basis.p
    return total, first


def dense_profile(basis, coeffs, points=PROFILE_POINTS):
    """Uniform output grid on [0, p] and the profile sampled on it."""
    rho = np.linspace(0.0, basis.p, points)
    return rho, evaluate(basis, coeffs, rho)


def check_decay_envelope(basis, coeffs, omega_sq, params, p0=None, points=PROFILE_POINTS):
    """Exponential tail check phi^2 <= (2*a_pot/3)*exp(-sigma*(rho - p0)).

    Returns (applicable, ok, worst_excess): applicable is False when
    omega_sq sits above 2*lam*b + n^2/p^2, where no decay rate exists;
    worst_excess is max(phi^2 - bound) over output-grid points in [p0, p].
    """
    if p0 is None:
        p0 = 0.75 * params.p
    if not 0.0 < p0 < params.p:
        raise ValueError(f"p0 must lie in (0, {params.p}), got {p0}")
    edge = 2.0 * params.lam * params.b + params.n**2 / params.p**2
    if omega_sq >= edge:
        return False, True, 0.0
    sigma = decay_rate(omega_sq, params)
    rho, phi = dense_profile(basis, coeffs, points)
    mask = rho >= p0
    bound = (2.0 * params.a_pot / 3.0) * np.exp(-sigma * (rho[mask] - p0))
    excess = phi[mask] ** 2 - bound
    worst = float(np.max(excess))
    return True, worst <= 0.0, worst


def gradient_fd_check(basis, params, q0, n_points=10, seed=0, step=1e-6):
    """Worst componentwise relative error of the gradient vs central differences.

    Samples n_points random points on the sphere |a|^2 = q0. Components are
    compared relative to max(|g_i|, 1e-8 * max|g|) so near-zero entries do
    not blow up the ratio.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        v = rng.standard_normal(basis.m)
        a = math.sqrt(q0) * v / np.linalg.norm(v)
        g = functional_gradient(a, basis, params)
        scale = np.maximum(np.abs(g), 1e-8 * np.max(np.abs(g)))
        fd = np.empty(basis.m)
        for i in range(basis.m):
            e = np.zeros(basis.m)
            e[i] = step
            fd[i] = (
                discrete_functional(a + e, basis, params, q0)
                - discrete_functional(a - e, basis, params, q0)
            ) / (2.0 * step)
        worst = max(worst, float(np.max(np.abs(fd - g) / scale)))
    return worst


def _ring_bump_nodes(rho, n_abs, p):
    scale = p / 4.0
    return rho**n_abs * (p - rho) * np.exp(-(((rho - scale) / scale) ** 2))


def _trapezoid_nodes(rho, p):
    return np.minimum(np.minimum(rho, 1.0), p - rho)


def _project_to_basis(basis, values):
    """Coefficients of the weighted-orthonormal projection of nodal values."""
    w_rho = basis.grid.weights * basis.grid.nodes
    return 4.0 * math.pi * (basis.psi_nodes @ (w_rho * values))


def _initial_coeffs(basis, params, config):
    if config.initial_guess == "custom":
        a = check_coeffs("custom_coeffs", np.asarray(config.custom_coeffs), basis.m)
    elif config.initial_guess == "trapezoid":
        a = _project_to_basis(basis, _trapezoid_nodes(basis.grid.nodes, basis.p))
    else:
        a = _project_to_basis(
            basis, _ring_bump_nodes(basis.grid.nodes, abs(params.n), basis.p)
        )
    norm = np.linalg.norm(a)
    if norm == 0.0:
        raise ValueError("initial guess projects to the zero vector")
    return a * (math.sqrt(config.q0) / norm)


class _SphereProblem:
    """F minus its additive constant, with machine-accurate differences.

    Near the minimizer the Armijo test must resolve decreases far below the
    roundoff of F itself, so the line search never compares two absolute
    values: delta() evaluates F(cand) - F(x) through factored increments
    (the quadratic part via step.M.(x + step/2), the sextic and quartic
    parts via the polynomial identities u^k - v^k = (u - v) * sum u^i v^j),
    whose error scales with the step instead of with |F|.
    """

    def __init__(self, basis, params):
        self.mat = basis.k_matrix + params.n**2 * basis.c_matrix
        self.psi = basis.psi_nodes
        self.w_rho = basis.grid.weights * basis.grid.nodes
        self.lam = params.lam
        self.a_pot = params.a_pot

    def phi(self, a):
        return a @ self.psi

    def value(self, a, phi=None):
        if phi is None:
            phi = self.phi(a)
        return 0.5 * float(a @ (self.mat @ a)) + _nonlinear_energy(
            phi, self.w_rho, self.lam, self.a_pot
        )

    def gradient(self, a, phi=None):
        if phi is None:
            phi = self.phi(a)
        return self.mat @ a + _nonlinear_gradient(
            phi, self.psi, self.w_rho, self.lam, self.a_pot
        )

    def delta(self, x, phi_x, cand, theta=0.0):
        """(F(cand) - F(x), phi(cand)) without cancellation in F.

        theta is the current Lagrange-multiplier estimate (x.g)/q0; the
        difference is taken of the shifted functional F - (theta/2)*|a|^2,
        which coincides with F on the sphere but has no radial slope, so
        the eps-level radius drift of the retraction cannot pollute the
        comparison. The shift changes nothing on-constraint.
        """
        step = cand - x
        dphi = step @ self.psi
        phi_c = phi_x + dphi
        mid = x + 0.5 * step
        quad = float(step @ (self.mat @ mid)) - theta * float(np.dot(step, mid))
        u, v = phi_c, phi_x
        u2, v2 = u * u, v * v
        u3, v3 = u2 * u, v2 * v
        s3 = u3 + u2 * v + u * v2 + v3
        s5 = u2 * s3 + v2 * v2 * (u + v)
        nl = self.lam * float(np.dot(self.w_rho, dphi * (s5 - self.a_pot * s3)))
        return quad + nl, phi_c


def _descend(x0, q0, problem, grad_tol, max_iter, use_cg, callback):
    """Projected-gradient (optionally CG-accelerated) descent on the sphere."""
    radius = math.sqrt(q0)
    x = x0 * (radius / np.linalg.norm(x0))
    phi_x = problem.phi(x)
    f_led = problem.value(x, phi_x)
    g = problem.gradient(x, phi_x)
    eta = 1.0
    d_prev = None
    gt_prev = None
    iterations = 0
    converged = False
    while iterations < max_iter:
        unit = x / radius
        gt = g - np.dot(g, unit) * unit
        gt_norm = float(np.linalg.norm(gt))
        if gt_norm <= grad_tol * max(1.0, float(np.linalg.norm(g))):
            converged = True
            break
        if use_cg and d_prev is not None:
            prev_tan = gt_prev - np.dot(gt_prev, unit) * unit
            beta = max(0.0, float(np.dot(gt, gt - prev_tan)) / float(np.dot(gt_prev, gt_prev)))
            d = gt + beta * (d_prev - np.dot(d_prev, unit) * unit)
            if np.dot(d, gt) <= 1e-12 * float(np.linalg.norm(d)) * gt_norm:
                d = gt  # lost the descent property; restart from steepest
        else:
            d = gt
        slope = float(np.dot(d, gt))
        theta = float(np.dot(x, g)) / q0
        eta = min(eta * 2.0, _ETA_MAX)
        accepted = False
        while eta > _ETA_MIN:
            y = x - eta * d
            cand = y * (radius / np.linalg.norm(y))
            df, phi_c = problem.delta(x, phi_x, cand, theta)
            if df <= -_ARMIJO_C1 * eta * slope:
                accepted = True
                break
            eta *= _BACKTRACK
        if not accepted:
            break
        gt_prev, d_prev = gt, d
        x, phi_x = cand, phi_c
        f_led += df
        g = problem.gradient(x, phi_x)
        iterations += 1
        if callback is not None:
            callback(iterations, x.copy(), f_led, gt_norm)
    if not converged:
        unit = x / radius
        gt = g - np.dot(g, unit) * unit
        gt_norm = float(np.linalg.norm(gt))
        converged = gt_norm <= grad_tol * max(1.0, float(np.linalg.norm(g)))
    return x, f_led, gt_norm, iterations, converged


def minimize_on_sphere(basis, params, config, callback=None):
    """Minimize F on the sphere |a|^2 = q0 and assemble the solution record.

    Runs the configured initial guess plus `restarts` perturbed reruns
    (1% relative noise seeded by rng_seed) and keeps the lowest final F.
    The callback, when given, receives (iteration, coeffs, f, tangent_grad_norm)
    after every accepted step of every run.
    """
    if basis.p != params.p:
        raise ValueError(f"basis built for p={basis.p}, params have p={params.p}")
    # The constant lam*b*q0/(4*pi) is dropped inside the descent (it cannot
    # move the minimizer) and added back into the reported functional value.
    problem = _SphereProblem(basis, params)

    rng = np.random.default_rng(config.rng_seed)
    x0 = _initial_coeffs(basis, params, config)
    best = None
    total_iterations = 0
    for attempt in range(config.restarts + 1):
        start = x0 if attempt == 0 else best[0] * (
            1.0 + 0.01 * rng.standard_normal(basis.m)
        )
        result = _descend(
            start,
            config.q0,
            problem,
            config.grad_tol,
            config.max_iter,
            config.use_cg,
            callback,
        )
        total_iterations += result[3]
        if best is None or result[1] < best[1]:
            best = result

    coeffs, f_val, gt_norm, _, converged = best
    rho_dense, phi_dense = dense_profile(basis, coeffs)
    peak = int(np.argmax(np.abs(phi_dense)))
    if phi_dense[peak] < 0.0:
        coeffs = -coeffs
        phi_dense = -phi_dense
    omega_sq = recover_omega_sq(coeffs, basis, params, config.q0)
    return VortexSolution(
        coeffs=readonly(coeffs),
        omega_sq=float(omega_sq),
        residual_error=residual_error(coeffs, omega_sq, basis, params),
        phi_max=float(np.max(np.abs(phi_dense))),
        iterations=total_iterations,
        converged=bool(converged),
        f_value=float(f_val + params.lam * params.b * config.q0 / (4.0 * math.pi)),
        grad_norm=float(gt_norm),
    )
