"""Collocation Dirichlet Laplacian, its eigenbasis and the artificial control shapes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericError
from .quadrature import DiffMatrices, QuadratureRule, interpolation_matrix


@dataclass(frozen=True)
class DirichletLaplacian:
    """d2 restricted to interior nodes with homogeneous Dirichlet data.

    ``stiffness`` is K[i, j] = int Psi_i' Psi_j' over the interior cardinal
    functions, so that ``diag(weight_diag) @ interior_block == -stiffness``.
    """

    interior_block: np.ndarray
    boundary_left: np.ndarray
    boundary_right: np.ndarray
    stiffness: np.ndarray
    weight_diag: np.ndarray


@dataclass(frozen=True)
class EigenBasis:
    """L2-normalised eigenpairs of the collocation Dirichlet Laplacian.

    ``modes[k]`` holds node values over all N + 1 nodes (zeros at both ends).
    The trace arrays are per mode: first and second derivatives at x = +1
    and x = -1.
    """

    rule: QuadratureRule
    diff: DiffMatrices
    eigenvalues: np.ndarray
    modes: np.ndarray
    dx_right: np.ndarray
    dx_left: np.ndarray
    dxx_right: np.ndarray
    dxx_left: np.ndarray
    norms_n: np.ndarray

    @property
    def count(self) -> int:
        return len(self.eigenvalues)

    @property
    def frequencies(self) -> np.ndarray:
        return np.sqrt(self.eigenvalues)

    @property
    def interior_modes(self) -> np.ndarray:
        return self.modes[:, 1:-1]

    def synthesize(self, coeffs) -> np.ndarray:
        return np.asarray(coeffs, dtype=float) @ self.modes


@dataclass(frozen=True)
class ControlShapes:
    g_left: np.ndarray
    g_right: np.ndarray
    h_left: np.ndarray
    h_right: np.ndarray


def assemble_laplacian(rule: QuadratureRule, diff: DiffMatrices) -> DirichletLaplacian:
    n = rule.order
    inner = rule.interior
    d1 = diff.d1
    stiffness = (d1[:, inner].T * rule.weights) @ d1[:, inner]
    stiffness = 0.5 * (stiffness + stiffness.T)
    return DirichletLaplacian(
        interior_block=diff.d2[inner, inner].copy(),
        boundary_left=diff.d2[inner, 0].copy(),
        boundary_right=diff.d2[inner, n].copy(),
        stiffness=stiffness,
        weight_diag=rule.weights[inner].copy(),
    )


def _parity_split_eigh(stiff, wdiag):
    """Generalised eigensolve done separately on even and odd vectors.

    Both K and W commute with the reflection x -> -x of the interior nodes.
    At high frequency even and odd eigenvalues nearly coincide, and a
    single solve mixes the two partners; splitting keeps each mode exactly
    even or odd.
    """
    m = stiff.shape[0]
    half = m // 2
    blocks = []
    for sign in (1.0, -1.0):
        q = np.zeros((m, half + (m % 2 if sign > 0 else 0)))
        for j in range(half):
            q[j, j] = 1.0 / np.sqrt(2.0)
            q[m - 1 - j, j] = sign / np.sqrt(2.0)
        if sign > 0 and m % 2:
            q[half, half] = 1.0
        if q.shape[1] == 0:
            continue
        try:
            lam, y = scipy.linalg.eigh(q.T @ stiff @ q, q.T @ (wdiag[:, None] * q))
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"generalized eigensolve failed for {m} unknowns: {exc}") from exc
        blocks.append((lam, q @ y))
    lam = np.concatenate([b[0] for b in blocks])
    vecs = np.hstack([b[1] for b in blocks])
    order = np.argsort(lam, kind="stable")
    return lam[order], vecs[:, order]


def solve_eigen(op: DirichletLaplacian, rule: QuadratureRule, diff: DiffMatrices) -> EigenBasis:
    """Solve K v = lambda W v and post-process the modes.

    Modes are rescaled to unit L2 norm (computed exactly with an N+1 point
    Gauss rule) and signed so that phi_x(-1) > 0.
    """
    n = rule.order
    lam, vecs = _parity_split_eigh(op.stiffness, op.weight_diag)
    if np.any(lam <= 0) or np.any(np.diff(lam) <= 0):
        bad = int(np.argmin(np.diff(lam))) if len(lam) > 1 else 0
        raise NumericError(f"eigenvalues not positive and simple near index {bad}")

    modes = np.zeros((n - 1, n + 1))
    modes[:, 1:n] = vecs.T

    gx, gw = np.polynomial.legendre.leggauss(n + 1)
    at_gauss = modes @ interpolation_matrix(rule, gx).T
    l2 = np.sqrt(at_gauss**2 @ gw)
    modes /= l2[:, None]

    d1, d2 = diff.d1, diff.d2
    sign = np.sign(modes @ d1[0])
    modes *= sign[:, None]

    norms_n = (modes**2) @ rule.weights
    return EigenBasis(
        rule=rule,
        diff=diff,
        eigenvalues=lam,
        modes=modes,
        dx_right=modes @ d1[n],
        dx_left=modes @ d1[0],
        dxx_right=modes @ d2[n],
        dxx_left=modes @ d2[0],
        norms_n=norms_n,
    )


def control_shapes(rule: QuadratureRule, diff: DiffMatrices) -> ControlShapes:
    """Node values of the artificial control shapes G_L and G_R."""
    n = rule.order
    x = rule.nodes
    h_right = np.zeros(n + 1)
    h_left = np.zeros(n + 1)
    h_right[1:n] = 0.5 * (1.0 + x[1:n])
    h_left[1:n] = 0.5 * (1.0 - x[1:n])
    w0, wn = rule.weights[0], rule.weights[n]
    g_right = (diff.d2 @ h_right + diff.d1[:, n] / wn) / np.sqrt(wn)
    g_left = (diff.d2 @ h_left - diff.d1[:, 0] / w0) / np.sqrt(w0)
    return ControlShapes(g_left=g_left, g_right=g_right, h_left=h_left, h_right=h_right)


@dataclass(frozen=True)
class Discretization1D:
    """Everything derived from one LGL order, built once and shared."""

    rule: QuadratureRule
    diff: DiffMatrices
    laplacian: DirichletLaplacian
    basis: EigenBasis
    shapes: ControlShapes

    @property
    def order(self) -> int:
        return self.rule.order


def build_discretization(order: int) -> Discretization1D:
    from .quadrature import diff_matrices, lgl_rule

    rule = lgl_rule(order)
    diff = diff_matrices(rule)
    lap = assemble_laplacian(rule, diff)
    basis = solve_eigen(lap, rule, diff)
    shapes = control_shapes(rule, diff)
    return Discretization1D(rule=rule, diff=diff, laplacian=lap, basis=basis, shapes=shapes)
