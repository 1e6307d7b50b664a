"""Legendre-Gauss-Lobatto nodes, weights and differentiation matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, InvalidOrderError

_NEWTON_MAX_ITER = 100
_NEWTON_TOL = 1e-14


@dataclass(frozen=True)
class QuadratureRule:
    """LGL rule of a given order on [-1, 1].

    ``nodes`` has ``order + 1`` entries in ascending order with both
    endpoints included; ``legendre_at_nodes`` caches L_N(x_i), which fixes
    both the weights and the barycentric weights.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray
    legendre_at_nodes: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.order + 1

    @property
    def interior(self) -> slice:
        return slice(1, self.order)

    @property
    def bary_weights(self) -> np.ndarray:
        # node polynomial (1-x^2) L_N'(x) has derivative -N(N+1) L_N(x)
        return 1.0 / self.legendre_at_nodes


@dataclass(frozen=True)
class DiffMatrices:
    d1: np.ndarray
    d2: np.ndarray


def legendre_and_derivative(n: int, x):
    """Return L_n(x) and L_n'(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev, np.zeros_like(x)
    p = x.copy()
    dp_prev = np.zeros_like(x)
    dp = np.ones_like(x)
    for k in range(1, n):
        p_next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
        # derivative recurrence avoids division by (1 - x^2) at the endpoints
        dp_next = dp_prev + (2 * k + 1) * p
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return p, dp


def lgl_rule(order: int) -> QuadratureRule:
    """Build the LGL rule with ``order + 1`` nodes.

    Interior nodes are the roots of L_N', found by Newton's method started
    from the Chebyshev-Gauss-Lobatto points.  L_N'' comes from the Legendre
    ODE, which is regular at interior points.
    """
    if int(order) != order or order < 2:
        raise InvalidOrderError(f"LGL order must be an integer >= 2, got {order!r}")
    n = int(order)
    j = np.arange(1, n)
    x = -np.cos(np.pi * j / n)
    for _ in range(_NEWTON_MAX_ITER):
        p, dp = legendre_and_derivative(n, x)
        d2p = (2.0 * x * dp - n * (n + 1) * p) / (1.0 - x * x)
        step = dp / d2p
        x = x - step
        if np.max(np.abs(step)) < _NEWTON_TOL:
            break
    # enforce exact reflection symmetry
    x = 0.5 * (x - x[::-1])
    nodes = np.concatenate(([-1.0], x, [1.0]))
    p, _ = legendre_and_derivative(n, nodes)
    weights = 2.0 / (n * (n + 1) * p * p)
    weights = 0.5 * (weights + weights[::-1])
    return QuadratureRule(order=n, nodes=nodes, weights=weights, legendre_at_nodes=p)


def discrete_inner(w, z, rule: QuadratureRule) -> float:
    """Discrete L2 inner product sum_i w_i z_i omega_i."""
    w = np.asarray(w, dtype=float)
    z = np.asarray(z, dtype=float)
    if w.shape != (rule.n_nodes,) or z.shape != (rule.n_nodes,):
        raise DimensionError(
            f"expected vectors of length {rule.n_nodes}, got {w.shape} and {z.shape}"
        )
    return float(np.sum(w * z * rule.weights))


def discrete_norm(w, rule: QuadratureRule) -> float:
    return float(np.sqrt(discrete_inner(w, w, rule)))


def diff_matrices(rule: QuadratureRule) -> DiffMatrices:
    """First and second derivative matrices of the Lagrange basis at the nodes.

    Off-diagonal entries use the barycentric formula; diagonals use the
    negative-sum trick so every row annihilates constants.
    """
    x = rule.nodes
    bw = rule.bary_weights
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    d1 = (bw[None, :] / bw[:, None]) / diff
    np.fill_diagonal(d1, 0.0)
    np.fill_diagonal(d1, -d1.sum(axis=1))
    d2 = d1 @ d1
    return DiffMatrices(d1=d1, d2=d2)


def interpolation_matrix(rule: QuadratureRule, x) -> np.ndarray:
    """Matrix E with E[p, j] = Psi_j(x_p), barycentric second form."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < -1.0 - 1e-14) or np.any(x > 1.0 + 1e-14):
        raise DomainError("evaluation points must lie in [-1, 1]")
    bw = rule.bary_weights
    diff = x[:, None] - rule.nodes[None, :]
    exact = diff == 0.0
    diff[exact] = 1.0
    terms = bw[None, :] / diff
    mat = terms / terms.sum(axis=1, keepdims=True)
    rows = np.any(exact, axis=1)
    if np.any(rows):
        mat[rows] = exact[rows].astype(float)
    return mat


def lagrange_eval(rule: QuadratureRule, j: int, x) -> float:
    """Value of the j-th cardinal polynomial Psi_j at ``x``."""
    if not 0 <= j <= rule.order:
        raise DomainError(f"basis index {j} outside 0..{rule.order}")
    val = interpolation_matrix(rule, x)[:, j]
    return float(val[0]) if np.ndim(x) == 0 else val


def interpolate(rule: QuadratureRule, values, x) -> np.ndarray:
    """Evaluate the polynomial with the given node values at ``x``."""
    return interpolation_matrix(rule, x) @ np.asarray(values, dtype=float)


def l2_inner_exact(rule: QuadratureRule, w, z) -> float:
    """Exact L2(-1,1) inner product of two polynomials in P_N.

    The product has degree 2N, one more than the LGL rule integrates, so a
    Gauss-Legendre rule with N + 1 points is used instead.
    """
    gx, gw = np.polynomial.legendre.leggauss(rule.order + 1)
    e = interpolation_matrix(rule, gx)
    return float(np.sum(gw * (e @ w) * (e @ z)))
