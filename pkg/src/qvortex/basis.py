"""Orthonormal spectral basis built from sines by modified Gram-Schmidt.

Raw sine modes s_k(rho) = sin(k*pi*rho/p) satisfy the Dirichlet conditions
but are not orthogonal under the weighted inner product

    (u, v) = 4*pi * int_0^p rho * u(rho) * v(rho) drho,

which is the natural product here because it turns the prescribed-norm
constraint 4*pi*int(rho*phi^2) = Q0 into a plain sum of squared
coefficients. Modified Gram-Schmidt in mode order produces psi_j =
sum_{k<=j} G[j,k] * s_k with (psi_i, psi_j) = delta_ij; the lower-triangular
G is the basis' defining data, so first and second derivatives of any
expansion are available analytically through the sine/cosine series rather
than by numerical differentiation.

Two Galerkin matrices are precomputed on the shared quadrature grid:

    K[i,j] = int rho * psi_i' * psi_j' drho      (stiffness)
    C[i,j] = int psi_i * psi_j / rho drho        (centrifugal, n-independent)

All inner products use the grid, including C, which has no elementary
closed form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .quadrature import QuadratureGrid, build_grid
from .validation import check_coeffs, check_positive_int, readonly

__all__ = [
    "SpectralBasis",
    "build_basis",
    "evaluate",
    "evaluate_derivatives",
    "save_basis_cache",
    "load_basis_cache",
]

CACHE_FORMAT_VERSION = 1

_PIVOT_TOL = 1e-12
_REORTH_TOL = 1e-10


@dataclass(frozen=True)
class SpectralBasis:
    """Orthonormalized sine basis with precomputed Galerkin matrices.

    gs_matrix is lower triangular: psi_j = sum_k gs_matrix[j, k] * s_k.
    psi_nodes / dpsi_nodes / d2psi_nodes sample psi_j and its first two
    derivatives at the quadrature nodes (row j = function j); they are
    derived from gs_matrix and stored for fast functional evaluation.
    """

    m: int
    gs_matrix: np.ndarray
    k_matrix: np.ndarray
    c_matrix: np.ndarray
    grid: QuadratureGrid
    p: float
    psi_nodes: np.ndarray
    dpsi_nodes: np.ndarray
    d2psi_nodes: np.ndarray
    orthonormality_residual: float


def _sine_tables(m, p, rho):
    """Rows k = 1..m of sin(k*pi*rho/p), its derivative, and 2nd derivative."""
    k = np.arange(1, m + 1)
    freq = k[:, None] * (np.pi / p)
    arg = freq * rho[None, :]
    s = np.sin(arg)
    ds = freq * np.cos(arg)
    d2s = -(freq**2) * np.sin(arg)
    return s, ds, d2s


def _mgs(w_gram):
    """Modified Gram-Schmidt of the identity under the metric w_gram.

    Returns lower-triangular G with G @ w_gram @ G.T = I. Raises when a
    pivot falls below the independence threshold, which happens only when
    the quadrature grid is too coarse to keep the sine modes distinct.
    """
    m = w_gram.shape[0]
    g = np.zeros((m, m))
    wg = np.zeros((m, m))  # rows: w_gram @ g[i]
    for j in range(m):
        v = np.zeros(m)
        v[j] = 1.0
        for i in range(j):
            v -= np.dot(wg[i], v) * g[i]
        norm = np.sqrt(np.dot(v, w_gram @ v))
        raw_norm = np.sqrt(w_gram[j, j])
        if not norm > _PIVOT_TOL * raw_norm:
            raise RuntimeError(
                f"Gram-Schmidt pivot {norm:.3e} below {_PIVOT_TOL:.0e} * "
                f"{raw_norm:.3e} at mode {j + 1}; quadrature grid too coarse "
                "to keep the sine modes independent"
            )
        g[j] = v / norm
        wg[j] = w_gram @ g[j]
    return g


def _reorthogonalize(g, w_gram):
    """One extra Gram-Schmidt sweep over already near-orthonormal rows."""
    out = g.copy()
    wg = np.zeros_like(g)
    for j in range(g.shape[0]):
        v = out[j]
        for i in range(j):
            v = v - np.dot(wg[i], v) * out[i]
        v /= np.sqrt(np.dot(v, w_gram @ v))
        out[j] = v
        wg[j] = w_gram @ v
    return out


def _ortho_residual(g, w_gram):
    gram = g @ w_gram @ g.T
    return float(np.max(np.abs(gram - np.eye(g.shape[0]))))


def build_basis(params, m, grid):
    """Orthonormalize the first m sine modes and assemble K and C.

    Requires the grid to resolve mode m: at least 6 nodes per wavelength,
    i.e. len(nodes) >= 3*m.
    """
    m = check_positive_int("m", m)
    if grid.p != params.p:
        raise ValueError(f"grid radius {grid.p} does not match params.p {params.p}")
    nodes_per_wavelength = 2.0 * grid.nodes.size / m
    if nodes_per_wavelength < 6.0:
        raise ValueError(
            f"grid too coarse for basis size m={m}: {nodes_per_wavelength:.2f} "
            "nodes per wavelength of the highest mode (need >= 6)"
        )

    s, ds, _ = _sine_tables(m, params.p, grid.nodes)
    w_rho = grid.weights * grid.nodes
    w_gram = 4.0 * np.pi * (s * w_rho) @ s.T

    g = _mgs(w_gram)
    resid = _ortho_residual(g, w_gram)
    if resid > _REORTH_TOL:
        g = _reorthogonalize(g, w_gram)
        resid = _ortho_residual(g, w_gram)

    k_raw = (ds * w_rho) @ ds.T
    c_raw = (s * (grid.weights / grid.nodes)) @ s.T
    k_mat = g @ k_raw @ g.T
    c_mat = g @ c_raw @ g.T
    k_mat = 0.5 * (k_mat + k_mat.T)
    c_mat = 0.5 * (c_mat + c_mat.T)

    return _assemble(m, g, k_mat, c_mat, grid, params.p, resid)


def _assemble(m, g, k_mat, c_mat, grid, p, resid):
    s, ds, d2s = _sine_tables(m, p, grid.nodes)
    return SpectralBasis(
        m=m,
        gs_matrix=readonly(g),
        k_matrix=readonly(k_mat),
        c_matrix=readonly(c_mat),
        grid=grid,
        p=p,
        psi_nodes=readonly(g @ s),
        dpsi_nodes=readonly(g @ ds),
        d2psi_nodes=readonly(g @ d2s),
        orthonormality_residual=float(resid),
    )


def _sine_coeffs(basis, coeffs):
    a = check_coeffs("coeffs", coeffs, basis.m)
    return a @ basis.gs_matrix


def evaluate(basis, coeffs, rho):
    """Profile value phi(rho) = sum_j coeffs[j] * psi_j(rho).

    rho may be a scalar or ndarray in the closed interval [0, p]. The
    Dirichlet endpoints return exactly 0.
    """
    rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho_arr < 0.0) or np.any(rho_arr > basis.p):
        raise ValueError(f"rho outside [0, {basis.p}]")
    c = _sine_coeffs(basis, coeffs)
    k = np.arange(1, basis.m + 1)
    values = np.sin(rho_arr[:, None] * (k * (np.pi / basis.p))[None, :]) @ c
    values[(rho_arr == 0.0) | (rho_arr == basis.p)] = 0.0
    return values if np.ndim(rho) else float(values[0])


def _derivatives_arrays(basis, coeffs, rho_arr):
    c = _sine_coeffs(basis, coeffs)
    freq = np.arange(1, basis.m + 1) * (np.pi / basis.p)
    arg = rho_arr[:, None] * freq[None, :]
    d1 = np.cos(arg) @ (c * freq)
    d2 = -np.sin(arg) @ (c * freq**2)
    return d1, d2


def evaluate_derivatives(basis, coeffs, rho):
    """First and second radial derivatives (phi_rho, phi_rhorho) at rho.

    rho must lie strictly inside (0, p); endpoint derivative queries are
    rejected because the radial operator is singular there.
    """
    rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho_arr <= 0.0) or np.any(rho_arr >= basis.p):
        raise ValueError(f"rho outside the open interval (0, {basis.p})")
    d1, d2 = _derivatives_arrays(basis, coeffs, rho_arr)
    if np.ndim(rho):
        return d1, d2
    return float(d1[0]), float(d2[0])


def save_basis_cache(basis, path):
    """Write (G, K, C) keyed by (p, m, grid signature) as documented JSON.

    Matrices are stored row-major; the grid itself is rebuilt on load from
    its defining parameters.
    """
    payload = {
        "format_version": CACHE_FORMAT_VERSION,
        "p": basis.p,
        "m": basis.m,
        "grid": {
            "panels": basis.grid.panels,
            "order_per_panel": basis.grid.order_per_panel,
        },
        "orthonormality_residual": basis.orthonormality_residual,
        "gs_matrix": basis.gs_matrix.ravel().tolist(),
        "k_matrix": basis.k_matrix.ravel().tolist(),
        "c_matrix": basis.c_matrix.ravel().tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_basis_cache(path, expect=None):
    """Load a cached basis; optionally check it matches (p, m, signature).

    expect, when given, is a (p, m, panels, order_per_panel) tuple; a
    mismatch raises ValueError rather than silently returning a basis built
    for different resolution.
    """
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format_version") != CACHE_FORMAT_VERSION:
        raise ValueError(
            f"unsupported basis cache version {payload.get('format_version')!r}"
        )
    p = float(payload["p"])
    m = int(payload["m"])
    panels = int(payload["grid"]["panels"])
    order = int(payload["grid"]["order_per_panel"])
    if expect is not None and (p, m, panels, order) != tuple(expect):
        raise ValueError(
            f"basis cache key (p={p}, m={m}, panels={panels}, order={order}) "
            f"does not match expected {tuple(expect)}"
        )
    grid = build_grid(p, panels, order)
    g = np.asarray(payload["gs_matrix"], dtype=float).reshape(m, m)
    k_mat = np.asarray(payload["k_matrix"], dtype=float).reshape(m, m)
    c_mat = np.asarray(payload["c_matrix"], dtype=float).reshape(m, m)
    return _assemble(m, g, k_mat, c_mat, grid, p, float(payload["orthonormality_residual"]))
