"""Physical model: sextic potential, parameters, and closed-form bounds.

The field theory is a complex scalar with self-interaction

    U(phi) = lam * (phi^6 - a_pot*phi^4 + b*phi^2),    b > a_pot^2/4,

reduced to a radial profile phi(rho) on the disk (0, p) with Dirichlet
conditions phi(0) = phi(p) = 0 and integer winding number n. Several
quantities that constrain any nontrivial solution have closed forms and are
collected in TheoryBounds:

* the open frequency window 2*lam*(b - a_pot^2/4) < omega^2 < 2*lam*b in
  which ring solitons exist on a large enough disk,
* a sharper necessary lower bound 2*lam*(b - a_pot^2/3) + n^2/p^2 < omega^2,
* the uniform amplitude ceiling phi^2 < 2*a_pot/3,
* the prescribed-norm threshold Q0 > pi*|n|/(a_pot*lam) required whenever
  omega^2 < 2*lam*b,
* a sufficient disk radius p_star derived from a trapezoidal trial profile
  (see p_star_bound).

These are used by the solver as runtime verifiers, never as fitting knobs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .validation import check_finite, check_positive

__all__ = [
    "ModelParams",
    "TheoryBounds",
    "potential",
    "potential_derivative",
    "theory_bounds",
    "decay_rate",
    "p_star_bound",
    "satisfies_necessary_condition",
    "satisfies_amplitude_ceiling",
    "satisfies_norm_threshold",
]


@dataclass(frozen=True)
class ModelParams:
    """Immutable physical parameter set.

    lam   : coupling strength, > 0
    a_pot : quartic coefficient of the potential, > 0
    b     : quadratic coefficient, > a_pot^2/4
    n     : winding number, |n| >= 1
    p     : disk radius, > 0
    """

    lam: float = 1.0
    a_pot: float = 2.0
    b: float = 1.1
    n: int = 1
    p: float = 20.0

    def __post_init__(self):
        object.__setattr__(self, "lam", check_positive("lam", self.lam))
        object.__setattr__(self, "a_pot", check_positive("a_pot", self.a_pot))
        object.__setattr__(self, "b", check_positive("b", self.b))
        object.__setattr__(self, "p", check_positive("p", self.p))
        n = int(self.n)
        if n != self.n or n == 0:
            raise ValueError(f"n must be a nonzero integer, got {self.n!r}")
        object.__setattr__(self, "n", n)
        if not self.b > self.a_pot**2 / 4.0:
            raise ValueError(
                f"b > a_pot^2/4 violated: b={self.b}, a_pot^2/4={self.a_pot ** 2 / 4.0}"
            )


@dataclass(frozen=True)
class TheoryBounds:
    """Closed-form bounds implied by a ModelParams instance.

    omega_sq_min       : lower edge of the existence window, 2*lam*(b - a_pot^2/4)
    omega_sq_max       : upper edge, 2*lam*b
    omega_sq_necessary : necessary lower bound 2*lam*(b - a_pot^2/3) + n^2/p^2
    phi_max_ceiling    : uniform amplitude ceiling sqrt(2*a_pot/3)
    q0_threshold       : prescribed-norm threshold pi*|n|/(a_pot*lam)
    p_star             : sufficient disk radius from the trapezoid trial profile,
                         evaluated at p_star_omega_sq (midpoint of the window
                         unless a frequency was supplied to theory_bounds)
    """

    omega_sq_min: float
    omega_sq_max: float
    omega_sq_necessary: float
    phi_max_ceiling: float
    q0_threshold: float
    p_star: float
    p_star_omega_sq: float


def potential(phi, params):
    """Sextic potential U(phi) = lam*(phi^6 - a_pot*phi^4 + b*phi^2).

    Accepts a scalar or ndarray phi; total function, no domain errors.
    """
    p2 = phi * phi
    return params.lam * p2 * (p2 * p2 - params.a_pot * p2 + params.b)


def potential_derivative(phi, params):
    """U'(phi) = lam*(6*phi^5 - 4*a_pot*phi^3 + 2*b*phi)."""
    p2 = phi * phi
    return params.lam * phi * (6.0 * p2 * p2 - 4.0 * params.a_pot * p2 + 2.0 * params.b)


def decay_rate(omega_sq, params):
    """Exponential tail rate sigma = sqrt(n^2/p^2 + 2*lam*b - omega^2).

    Valid only below the shifted window edge; raises ValueError when the
    radicand is non-positive (the decay estimate is then inapplicable).
    """
    omega_sq = check_finite("omega_sq", omega_sq)
    radicand = params.n**2 / params.p**2 + 2.0 * params.lam * params.b - omega_sq
    if radicand <= 0.0:
        raise ValueError(
            "decay rate undefined: omega_sq = "
            f"{omega_sq} is not below 2*lam*b + n^2/p^2 = "
            f"{2.0 * params.lam * params.b + params.n ** 2 / params.p ** 2}"
        )
    return math.sqrt(radicand)


def p_star_bound(params, omega_sq):
    """Sufficient disk radius for a trapezoidal trial profile to go subcritical.

    The trial profile ramps linearly to height t over [0, 1], stays flat on
    [1, p-1], and ramps back down; with t^2 = a_pot/2 its action is bounded
    by -A*p^2 + B*p + C*log(p) with

        A = (lam*a_pot/4) * (omega_sq/(2*lam) - (b - a_pot^2/4))
        B = t^2/2 + lam*[t^6 - a_pot*t^4 + c*t^2]
            + lam*[(a_pot/5)*t^4 - t^6/7 - (c/3)*t^2],   c = b - omega_sq/(2*lam)
        C = n^2 * t^2 / 2

    Bounding log(p) < p folds C into the linear term, so the action is
    negative whenever p > (B + C)/A, which this function returns. A > 0
    requires omega_sq above the lower window edge; below it the construction
    fails and ValueError is raised.
    """
    omega_sq = check_finite("omega_sq", omega_sq)
    lam, a, b = params.lam, params.a_pot, params.b
    t2 = a / 2.0
    c = b - omega_sq / (2.0 * lam)
    bracket = t2**3 - a * t2**2 + c * t2
    coef_a = -lam * bracket / 2.0
    if coef_a <= 0.0:
        raise ValueError(
            f"p_star undefined: omega_sq = {omega_sq} is not above the lower "
            f"window edge 2*lam*(b - a_pot^2/4) = {2.0 * lam * (b - a * a / 4.0)}"
        )
    coef_b = t2 / 2.0 + lam * bracket + lam * ((a / 5.0) * t2**2 - t2**3 / 7.0 - (c / 3.0) * t2)
    coef_c = params.n**2 * t2 / 2.0
    return (coef_b + coef_c) / coef_a


def theory_bounds(params, omega_sq=None):
    """Compute all closed-form bounds for a parameter set.

    p_star depends on a frequency; by convention it is evaluated at the
    midpoint of the existence window unless omega_sq is supplied.
    """
    lam, a, b = params.lam, params.a_pot, params.b
    omega_sq_min = 2.0 * lam * (b - a * a / 4.0)
    omega_sq_max = 2.0 * lam * b
    omega_sq_necessary = 2.0 * lam * (b - a * a / 3.0) + params.n**2 / params.p**2
    if omega_sq is None:
        omega_sq = 0.5 * (omega_sq_min + omega_sq_max)
    return TheoryBounds(
        omega_sq_min=omega_sq_min,
        omega_sq_max=omega_sq_max,
        omega_sq_necessary=omega_sq_necessary,
        phi_max_ceiling=math.sqrt(2.0 * a / 3.0),
        q0_threshold=math.pi * abs(params.n) / (a * lam),
        p_star=p_star_bound(params, omega_sq),
        p_star_omega_sq=float(omega_sq),
    )


def satisfies_necessary_condition(omega_sq, params):
    """True iff omega_sq exceeds the necessary existence bound."""
    return omega_sq > 2.0 * params.lam * (params.b - params.a_pot**2 / 3.0) + params.n**2 / params.p**2


def satisfies_amplitude_ceiling(phi_max, omega_sq, params):
    """Amplitude ceiling check; (True, applicable) pair.

    The ceiling phi_max < sqrt(2*a_pot/3) is guaranteed only when
    omega_sq < 2*lam*b + n^2/p^2; outside that range the check is reported
    as inapplicable rather than failed.
    """
    applicable = omega_sq < 2.0 * params.lam * params.b + params.n**2 / params.p**2
    ok = (not applicable) or (phi_max < math.sqrt(2.0 * params.a_pot / 3.0))
    return ok, applicable


def satisfies_norm_threshold(q0, omega_sq, params):
    """Norm threshold check; (True, applicable) pair.

    Whenever omega_sq < 2*lam*b, a nontrivial solution requires
    q0 > pi*|n|/(a_pot*lam).
    """
    applicable = omega_sq < 2.0 * params.lam * params.b
    ok = (not applicable) or (q0 > math.pi * abs(params.n) / (params.a_pot * params.lam))
    return ok, applicable
