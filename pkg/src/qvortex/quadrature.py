"""Composite Gauss-Legendre quadrature on (0, p).

One fixed grid serves every integral in the package: weights rho*drho,
weights drho/rho, and plain drho. Gauss nodes are strictly interior to each
panel, so integrands carrying 1/rho or 1/rho^2 factors are always evaluated
at nonzero arguments; no special endpoint rule is needed because every
basis function vanishes linearly at rho = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_positive, check_positive_int, readonly

__all__ = ["QuadratureGrid", "build_grid", "integrate"]


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes and weights of a composite Gauss-Legendre rule on (0, p)."""

    nodes: np.ndarray
    weights: np.ndarray
    panels: int
    order_per_panel: int
    p: float

    @property
    def signature(self):
        """Key identifying the rule, used by the basis cache."""
        return (self.p, self.panels, self.order_per_panel)


def build_grid(p, panels=48, order_per_panel=8):
    """Composite Gauss-Legendre grid over `panels` uniform panels of [0, p].

    order_per_panel >= 2 Gauss points per panel integrate polynomials of
    degree <= 2*order_per_panel - 1 exactly on each panel.
    """
    p = check_positive("p", p)
    panels = check_positive_int("panels", panels)
    order = check_positive_int("order_per_panel", order_per_panel, minimum=2)

    ref_nodes, ref_weights = np.polynomial.legendre.leggauss(order)
    width = p / panels
    starts = width * np.arange(panels)
    nodes = (starts[:, None] + 0.5 * width * (ref_nodes[None, :] + 1.0)).ravel()
    weights = np.broadcast_to(0.5 * width * ref_weights, (panels, order)).ravel()
    return QuadratureGrid(
        nodes=readonly(nodes),
        weights=readonly(weights),
        panels=panels,
        order_per_panel=order,
        p=p,
    )


def integrate(grid, integrand):
    """Apply the rule: sum_k w_k * integrand(node_k).

    The integrand may be scalar-valued or vectorized over ndarray input.
    Non-finite values are rejected with an error naming the offending node.
    """
    try:
        values = np.asarray(integrand(grid.nodes), dtype=float)
        if values.shape != grid.nodes.shape:
            raise TypeError
    except (TypeError, ValueError):
        values = np.fromiter(
            (float(integrand(x)) for x in grid.nodes), dtype=float, count=grid.nodes.size
        )
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        k = int(bad[0])
        raise ValueError(
            f"integrand returned non-finite value {values[k]!r} at node "
            f"rho = {grid.nodes[k]!r} (index {k})"
        )
    return float(np.dot(grid.weights, values))
