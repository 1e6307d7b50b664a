"""Initial data for the control problems and their discrete versions."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import InvalidDataError, ParameterError
from .operators1d import EigenBasis
from .quadrature import QuadratureRule

ALPHA_MAX = 2.0 / math.pi


def _samples(u, nodes) -> np.ndarray:
    if callable(u):
        vals = np.asarray(u(nodes), dtype=float)
        if vals.shape != nodes.shape:
            vals = np.broadcast_to(vals, nodes.shape).astype(float)
    else:
        vals = np.asarray(u, dtype=float)
        if vals.shape != nodes.shape:
            raise InvalidDataError(f"expected {nodes.shape} node samples, got {vals.shape}")
    return vals


def interpolate_data(u0, u1, rule: QuadratureRule) -> tuple[np.ndarray, np.ndarray]:
    """Node vectors of (u0, u1) in P^Di_N: data at interior nodes, zero at the ends."""
    out = []
    for name, u in (("u0", u0), ("u1", u1)):
        v = _samples(u, rule.nodes).copy()
        if not np.all(np.isfinite(v[1:-1])):
            raise InvalidDataError(f"{name} is not finite at every interior node")
        v[0] = v[-1] = 0.0
        out.append(v)
    return out[0], out[1]


def truncation_level(order: int, alpha: float = 0.6) -> int:
    """r(N) = max(1, floor(alpha N^(1/8)))."""
    if not 0.0 < alpha < ALPHA_MAX:
        raise ParameterError(f"alpha must lie in (0, 2/pi), got {alpha}")
    return max(1, int(math.floor(alpha * order ** 0.125)))


def modal_coefficients(values, basis: EigenBasis) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return (basis.modes @ (basis.rule.weights * v)) / basis.norms_n


def truncated_projection(u0, u1, basis: EigenBasis, alpha: float = 0.6,
                         keep: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Keep only the first r(N) modes of the expansion of the interpolated data.

    ``keep`` overrides r(N) (used to compare against the untruncated expansion).
    """
    r = truncation_level(basis.rule.order, alpha) if keep is None else int(keep)
    v0, v1 = interpolate_data(u0, u1, basis.rule)
    mask = np.arange(1, basis.count + 1) <= r
    c0 = modal_coefficients(v0, basis) * mask
    c1 = modal_coefficients(v1, basis) * mask
    return basis.synthesize(c0), basis.synthesize(c1)


def h_minus1_norm(coeffs, basis: EigenBasis) -> float:
    """(sum_k |b_k / mu_k|^2)^(1/2) over the given leading coefficients."""
    b = np.asarray(coeffs, dtype=float)
    mu = basis.frequencies[: b.size]
    return float(np.sqrt(np.sum((b / mu) ** 2)))


# built-in data ------------------------------------------------------------

def gaussian_bump() -> tuple[Callable, Callable]:
    """A bump travelling to the left."""
    return (lambda x: np.exp(-10.0 * x**2), lambda x: -20.0 * x * np.exp(-10.0 * x**2))


def hat() -> tuple[Callable, Callable]:
    return (lambda x: np.minimum(1.0 - x, 1.0 + x), lambda x: np.zeros_like(x))


def gaussian_2d() -> tuple[Callable, Callable]:
    def u0(x1, x2):
        return np.exp(-10.0 * x1**2) * np.exp(-10.0 * x2**2)

    def u1(x1, x2):
        return (-20.0 * x1 * np.exp(-10.0 * x1**2)) * (-20.0 * x2 * np.exp(-10.0 * x2**2))

    return u0, u1


BUILTINS_1D = {"gaussian-bump": gaussian_bump, "hat": hat}
BUILTINS_2D = {"gaussian-2d": gaussian_2d}


def builtin_1d(name: str, rule: QuadratureRule):
    try:
        u0, u1 = BUILTINS_1D[name]()
    except KeyError:
        raise InvalidDataError(f"unknown 1-d data {name!r}; known: {sorted(BUILTINS_1D)}") from None
    return interpolate_data(u0, u1, rule)


def interpolate_data_2d(u0, u1, rule1: QuadratureRule, rule2: QuadratureRule):
    x1, x2 = np.meshgrid(rule1.nodes, rule2.nodes, indexing="ij")
    out = []
    for name, u in (("u0", u0), ("u1", u1)):
        v = np.array(u(x1, x2) if callable(u) else u, dtype=float)
        if v.shape != x1.shape:
            raise InvalidDataError(f"{name} must have shape {x1.shape}")
        if not np.all(np.isfinite(v[1:-1, 1:-1])):
            raise InvalidDataError(f"{name} is not finite at every interior node")
        v[[0, -1], :] = 0.0
        v[:, [0, -1]] = 0.0
        out.append(v)
    return out[0], out[1]


def builtin_2d(name: str, rule1: QuadratureRule, rule2: QuadratureRule):
    try:
        u0, u1 = BUILTINS_2D[name]()
    except KeyError:
        raise InvalidDataError(f"unknown 2-d data {name!r}; known: {sorted(BUILTINS_2D)}") from None
    return interpolate_data_2d(u0, u1, rule1, rule2)


def load_node_file(path, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Two-column text file of (u0, u1) node values, one row per node."""
    arr = np.loadtxt(path, dtype=float, ndmin=2)
    if arr.shape != (n_nodes, 2):
        raise InvalidDataError(f"{path}: expected {n_nodes} rows of (u0, u1), got {arr.shape}")
    return arr[:, 0].copy(), arr[:, 1].copy()
