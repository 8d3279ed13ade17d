"""qvortex: spectral solver for spinning ring solitons (Q-vortices) on a disk.

The package computes radially symmetric profiles phi(rho) of stationary
spinning solutions Phi = phi(rho) * exp(i*omega*t + i*n*theta) of a complex
scalar field theory with sextic self-interaction, confined to a disk of
radius p with Dirichlet boundary conditions. Profiles are found by
minimizing the reduced action over a weighted-orthonormal sine basis at
prescribed reduced norm, with the squared frequency recovered as the
constraint's Lagrange multiplier; every closed-form bound the model imposes
(frequency window, amplitude ceiling, norm threshold, exponential tail) is
available as a runtime verifier.
"""

from .basis import (
    SpectralBasis,
    build_basis,
    evaluate,
    evaluate_derivatives,
    load_basis_cache,
    save_basis_cache,
)
from .crosscheck import FdSolution, bessel_first_zero, fd_minimize
from .estimator import NotFittedError, QVortexSolver
from .model import (
    ModelParams,
    TheoryBounds,
    decay_rate,
    p_star_bound,
    potential,
    potential_derivative,
    theory_bounds,
)
from .quadrature import QuadratureGrid, build_grid, integrate
from .solver import (
    PROFILE_POINTS,
    SolveConfig,
    VortexSolution,
    check_decay_envelope,
    dense_profile,
    discrete_functional,
    functional_gradient,
    minimize_on_sphere,
    recover_omega_sq,
    residual_error,
)
from .sweep import SweepRecord, locate_omega_crossing, sweep_n, sweep_q0

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "TheoryBounds",
    "potential",
    "potential_derivative",
    "theory_bounds",
    "decay_rate",
    "p_star_bound",
    "QuadratureGrid",
    "build_grid",
    "integrate",
    "SpectralBasis",
    "build_basis",
    "evaluate",
    "evaluate_derivatives",
    "save_basis_cache",
    "load_basis_cache",
    "SolveConfig",
    "VortexSolution",
    "PROFILE_POINTS",
    "discrete_functional",
    "functional_gradient",
    "minimize_on_sphere",
    "recover_omega_sq",
    "residual_error",
    "dense_profile",
    "check_decay_envelope",
    "FdSolution",
    "fd_minimize",
    "bessel_first_zero",
    "SweepRecord",
    "sweep_q0",
    "sweep_n",
    "locate_omega_crossing",
    "QVortexSolver",
    "NotFittedError",
    "__version__",
]
