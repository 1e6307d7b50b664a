"""Tensor-product HUM on the square (-1,1)^2.

The Dirichlet control acts on Gamma = Gamma_1 (x1 = 1) and Gamma_2 (x2 = 1);
artificial controls act on all four sides.  Side numbering:

    Gamma_1: x1 = +1    Gamma_2: x2 = +1    Gamma_3: x1 = -1    Gamma_4: x2 = -1

Product modes Phi_km(x1, x2) = phi_k(x1) phi_m(x2) diagonalise the collocation
Laplacian.  Each boundary observation is a 1-d trace constant of the normal
factor times the tangential factor at the tangential nodes, and summing over
those nodes with the tangential weights reduces to the discrete orthogonality
of the tangential factors.  The Gramian therefore couples (k, m) only with
(k', m) through the x1 observations and with (k, m') through the x2
observations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .adjoint1d import TimeGrid, trace_constants
from .cutoff import WeightFunction, pair_integrals
from .errors import ConfigurationError, DimensionError
from .forward1d import _DENOM_FLOOR, oscillator_panels
from .hum1d import CGRecord, conjugate_gradient, time_l2
from .operators1d import ControlShapes, Discretization1D, EigenBasis, build_discretization

log = logging.getLogger(__name__)

SIDES = (1, 2, 3, 4)

# corner owners: (x1 index end, x2 index end) -> side
DEFAULT_CORNERS = {(1, 1): 1, (1, -1): 1, (-1, 1): 2, (-1, -1): 3}


@dataclass(frozen=True)
class Grid2D:
    """Two 1-d discretisations and the node index sets of the square.

    Node (a, b) sits at (x1_a, x2_b).  ``side_nodes[s]`` lists the (a, b)
    pairs owned by side s; every boundary node belongs to exactly one side,
    with corners assigned by ``corners``.
    """

    dir1: Discretization1D
    dir2: Discretization1D
    corners: dict

    @property
    def shape(self) -> tuple[int, int]:
        return self.dir1.order + 1, self.dir2.order + 1

    @property
    def weights(self) -> np.ndarray:
        return np.outer(self.dir1.rule.weights, self.dir2.rule.weights)

    def interior_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[1:-1, 1:-1] = True
        return mask

    def side_nodes(self) -> dict[int, list[tuple[int, int]]]:
        n1, n2 = self.dir1.order, self.dir2.order
        owner = {}
        for b in range(n2 + 1):
            owner[(n1, b)] = 1
            owner[(0, b)] = 3
        for a in range(1, n1):
            owner[(a, n2)] = 2
            owner[(a, 0)] = 4
        end = {1: n1, -1: 0}
        end2 = {1: n2, -1: 0}
        for (s1, s2), side in self.corners.items():
            owner[(end[s1], end2[s2])] = side
        sides = {s: [] for s in SIDES}
        for node, side in sorted(owner.items()):
            sides[side].append(node)
        return sides

    def tangential_weights(self, side: int) -> np.ndarray:
        """Weights omega^{xi_2} along a side, indexed by the tangential node."""
        return self.dir2.rule.weights if side in (1, 3) else self.dir1.rule.weights

    def normal_end_weight(self, side: int) -> float:
        """omega^{xi_1}: the end weight of the rule normal to the side."""
        return float(self.dir1.rule.weights[-1] if side in (1, 3) else self.dir2.rule.weights[-1])


def make_grid(n1: int, n2: int, corners: dict | None = None) -> Grid2D:
    d1 = build_discretization(n1)
    d2 = d1 if n2 == n1 else build_discretization(n2)
    return Grid2D(d1, d2, dict(DEFAULT_CORNERS if corners is None else corners))


@dataclass(frozen=True)
class EigenBasis2D:
    b1: EigenBasis
    b2: EigenBasis

    @property
    def eigenvalues(self) -> np.ndarray:
        """lambda_km = lambda_k + lambda_m, shape (N1-1, N2-1)."""
        return self.b1.eigenvalues[:, None] + self.b2.eigenvalues[None, :]

    @property
    def frequencies(self) -> np.ndarray:
        return np.sqrt(self.eigenvalues)

    @property
    def count(self) -> int:
        return self.b1.count * self.b2.count

    @property
    def norms_n(self) -> np.ndarray:
        return np.outer(self.b1.norms_n, self.b2.norms_n)

    def mode(self, k: int, m: int) -> np.ndarray:
        return np.outer(self.b1.modes[k], self.b2.modes[m])

    def sorted_indices(self) -> list[tuple[int, int]]:
        lam = self.eigenvalues
        flat = np.argsort(lam, axis=None, kind="stable")
        return [tuple(int(i) for i in np.unravel_index(f, lam.shape)) for f in flat]

    def synthesize(self, coeffs) -> np.ndarray:
        return self.b1.modes.T @ np.asarray(coeffs, dtype=float) @ self.b2.modes

    def project(self, values) -> np.ndarray:
        """Modal coefficients of a node array vanishing on the boundary."""
        w1 = self.b1.rule.weights
        w2 = self.b2.rule.weights
        p = (self.b1.modes * w1) @ np.asarray(values, dtype=float) @ (self.b2.modes * w2).T
        return p / self.norms_n

    def side_traces(self) -> dict[int, dict[str, np.ndarray]]:
        """Per side: normal-factor trace constants and tangential factor node values.

        For side s the observation of mode (k, m) at tangential node j is
        const[normal index] * tangential_modes[tangential index, j].
        """
        a1, r1, l1 = trace_constants(self.b1)
        a2, r2, l2 = trace_constants(self.b2)
        return {
            1: {"f": a1, "g": r1, "tangential": self.b2.modes},
            3: {"f": None, "g": l1, "tangential": self.b2.modes},
            2: {"f": a2, "g": r2, "tangential": self.b1.modes},
            4: {"f": None, "g": l2, "tangential": self.b1.modes},
        }


def tensor_basis(b1: EigenBasis, b2: EigenBasis) -> EigenBasis2D:
    return EigenBasis2D(b1, b2)


def shapes_2d(grid: Grid2D) -> dict[int, np.ndarray]:
    """Node arrays of G_1..G_4 over the full tensor grid (constant along the tangent)."""
    s1: ControlShapes = grid.dir1.shapes
    s2: ControlShapes = grid.dir2.shapes
    n1, n2 = grid.shape
    return {
        1: np.repeat(s1.g_right[:, None], n2, axis=1),
        3: np.repeat(s1.g_left[:, None], n2, axis=1),
        2: np.repeat(s2.g_right[None, :], n1, axis=0),
        4: np.repeat(s2.g_left[None, :], n1, axis=0),
    }


@dataclass
class ControlSet2D:
    """Controls sampled in time and along each side.

    ``f1`` and ``f2`` are the Dirichlet data on Gamma_1 (indexed by the x2
    node) and Gamma_2 (indexed by the x1 node); ``g[s]`` is the artificial
    control on side s indexed by its tangential node.
    """

    grid: TimeGrid
    f1: np.ndarray
    f2: np.ndarray
    g: dict
    tangential_weights: dict

    def norm_f(self) -> float:
        w1 = self.tangential_weights[1]
        w2 = self.tangential_weights[2]
        return time_l2(self.grid, np.hstack([self.f1 * np.sqrt(w1), self.f2 * np.sqrt(w2)]))

    def norm_g(self, side: int) -> float:
        return time_l2(self.grid, self.g[side] * np.sqrt(self.tangential_weights[side]))

    def gamma_profile(self) -> np.ndarray:
        """Pointwise-in-time norm of f over Gamma, (sum_j w_j f(t, x_j)^2)^(1/2)."""
        w1 = self.tangential_weights[1]
        w2 = self.tangential_weights[2]
        return np.sqrt(self.f1**2 @ w1 + self.f2**2 @ w2)


class Gramian2D:
    """Matrix-free Lambda for the square, acting on (c, d) arrays of shape (N1-1, N2-1)."""

    def __init__(self, basis: EigenBasis2D, weight: WeightFunction):
        self.basis = basis
        self.weight = weight
        mu = basis.frequencies
        self.mu = mu
        a1, r1, l1 = trace_constants(basis.b1)
        a2, r2, l2 = trace_constants(basis.b2)
        self.obs1 = np.vstack([a1, r1, l1])
        self.obs2 = np.vstack([a2, r2, l2])
        n1, n2 = mu.shape
        # x1 observations: for each m a table over (k, k'), scaled by ||phi_m||_N^2
        self.t1 = self._tables([mu[:, m] for m in range(n2)], basis.b2.norms_n)
        # x2 observations: for each k a table over (m, m')
        self.t2 = self._tables([mu[k, :] for k in range(n1)], basis.b1.norms_n)

    def _tables(self, freqs, scale):
        cc, cs, ss = [], [], []
        for f, s in zip(freqs, scale):
            a, b, c = pair_integrals(f, f, self.weight)
            cc.append(s * a)
            cs.append(s * b / f[None, :])
            ss.append(s * c / np.outer(f, f))
        return np.stack(cc), np.stack(cs), np.stack(ss)

    @property
    def size(self) -> int:
        return 2 * self.basis.count

    def _split(self, z):
        z = np.asarray(z, dtype=float)
        shp = self.mu.shape
        n = shp[0] * shp[1]
        return z[:n].reshape(shp), z[n:].reshape(shp)

    def apply(self, z) -> np.ndarray:
        zc, zd = self._split(z)
        cc1, cs1, ss1 = self.t1
        cc2, cs2, ss2 = self.t2
        oc = np.zeros_like(zc)
        od = np.zeros_like(zd)
        for o in self.obs1:
            yc, yd = o[:, None] * zc, o[:, None] * zd
            oc += o[:, None] * (np.einsum("mkj,jm->km", cc1, yc) + np.einsum("mkj,jm->km", cs1, yd))
            od += o[:, None] * (np.einsum("mjk,jm->km", cs1, yc) + np.einsum("mkj,jm->km", ss1, yd))
        for o in self.obs2:
            yc, yd = o[None, :] * zc, o[None, :] * zd
            oc += o[None, :] * (np.einsum("kmj,kj->km", cc2, yc) + np.einsum("kmj,kj->km", cs2, yd))
            od += o[None, :] * (np.einsum("kjm,kj->km", cs2, yc) + np.einsum("kmj,kj->km", ss2, yd))
        return np.concatenate([oc.ravel(), od.ravel()])

    def diagonal(self) -> np.ndarray:
        b1 = np.sum(self.obs1**2, axis=0)
        b2 = np.sum(self.obs2**2, axis=0)
        cc1, _, ss1 = self.t1
        cc2, _, ss2 = self.t2
        dc = b1[:, None] * np.einsum("mkk->km", cc1) + b2[None, :] * np.einsum("kmm->km", cc2)
        dd = b1[:, None] * np.einsum("mkk->km", ss1) + b2[None, :] * np.einsum("kmm->km", ss2)
        return np.concatenate([dc.ravel(), dd.ravel()])

    def dense(self) -> np.ndarray:
        n = self.size
        if n > 2000:
            raise ConfigurationError(f"dense 2-d Gramian limited to 2000 unknowns, got {n}")
        eye = np.eye(n)
        return np.column_stack([self.apply(eye[:, j]) for j in range(n)])


@dataclass
class HUMSolution2D:
    c: np.ndarray
    d: np.ndarray
    controls: ControlSet2D
    functional_value: float
    cg_iterations: int
    cg_residual: float
    gramian_condition_estimate: float = np.nan
    forward_residual: float = np.nan


def rhs_vector_2d(data, basis: EigenBasis2D, t_final: float) -> np.ndarray:
    u0, u1 = (np.asarray(v, dtype=float) for v in data)
    w1 = basis.b1.rule.weights
    w2 = basis.b2.rule.weights
    p0 = (basis.b1.modes * w1) @ u0 @ (basis.b2.modes * w2).T
    p1 = (basis.b1.modes * w1) @ u1 @ (basis.b2.modes * w2).T
    mu = basis.frequencies
    cos, sin = np.cos(mu * t_final), np.sin(mu * t_final)
    b_c = cos * p1 - mu * sin * p0
    b_d = -sin / mu * p1 - cos * p0
    return np.concatenate([b_c.ravel(), b_d.ravel()])


def modal_amplitudes_2d(c, d, mu, times, t_final):
    """phi amplitudes of every product mode at each time, shape (len(times), N1-1, N2-1)."""
    s = np.asarray(times, dtype=float)[:, None, None] - t_final
    return c * np.cos(mu * s) + (d / mu) * np.sin(mu * s)


def extract_controls_2d(c, d, basis: EigenBasis2D, grid: Grid2D, w: WeightFunction,
                        tgrid: TimeGrid) -> ControlSet2D:
    times = tgrid.times
    amp = modal_amplitudes_2d(c, d, basis.frequencies, times, tgrid.t_final)
    e = w(times)[:, None]
    a1, r1, l1 = trace_constants(basis.b1)
    a2, r2, l2 = trace_constants(basis.b2)
    m1, m2 = basis.b1.modes, basis.b2.modes
    # contract the normal index with its trace constant, then expand the tangential factor
    along1 = lambda const: np.einsum("tkm,k,mj->tj", amp, const, m2)
    along2 = lambda const: np.einsum("tkm,m,kj->tj", amp, const, m1)
    f1 = e * along1(a1)
    f2 = e * along2(a2)
    g = {1: e * along1(r1), 3: e * along1(l1), 2: e * along2(r2), 4: e * along2(l2)}
    tw = {s: grid.tangential_weights(s) for s in SIDES}
    return ControlSet2D(tgrid, f1, f2, g, tw)


def solve_hum_2d(data, grid: Grid2D, basis: EigenBasis2D, w: WeightFunction, tgrid: TimeGrid,
                 tol: float = 1e-10, max_iter: int = 5000,
                 gramian: Gramian2D | None = None) -> HUMSolution2D:
    if 4.0 * w.delta >= w.t_final:
        raise ConfigurationError("degenerate cutoff: T <= 4 delta")
    if tgrid.t_final <= 4.0 * np.sqrt(2.0):
        log.warning("T=%g is below the continuous control time 4*sqrt(2)", tgrid.t_final)
    u0, u1 = (np.asarray(v, dtype=float) for v in data)
    if u0.shape != grid.shape or u1.shape != grid.shape:
        raise DimensionError(f"2-d data must have shape {grid.shape}")
    gram = gramian or Gramian2D(basis, w)
    b = rhs_vector_2d((u0, u1), basis, tgrid.t_final)
    diag = gram.diagonal()
    x, rec = conjugate_gradient(gram.apply, b, tol=tol, max_iter=max_iter, precond=lambda r: r / diag)
    n = basis.count
    shp = basis.frequencies.shape
    c, d = x[:n].reshape(shp), x[n:].reshape(shp)
    controls = extract_controls_2d(c, d, basis, grid, w, tgrid)
    cond = rec.ritz_max / rec.ritz_min if rec.ritz_min > 0 else np.inf
    return HUMSolution2D(c, d, controls, -0.5 * float(b @ x), rec.iterations, rec.residual, cond)


@dataclass
class ForwardState2D:
    u: np.ndarray
    v: np.ndarray
    t: float


def _projectors(basis: EigenBasis2D):
    def proj(b: EigenBasis):
        return (b.interior_modes * b.rule.weights[1:-1]) / b.norms_n[:, None]

    return proj(basis.b1), proj(basis.b2)


def forward_solve_2d(data, controls: ControlSet2D, grid: Grid2D, basis: EigenBasis2D,
                     tgrid: TimeGrid) -> ForwardState2D:
    """Modal Duhamel solve of the controlled 2-d collocation system up to T."""
    u0, u1 = (np.asarray(v, dtype=float) for v in data)
    if u0.shape != grid.shape or u1.shape != grid.shape:
        raise DimensionError(f"2-d data must have shape {grid.shape}")
    m = tgrid.n_steps + 1
    if controls.f1.shape[0] != m or controls.f2.shape[0] != m:
        raise DimensionError("controls are sampled on a different time grid")
    p1, p2 = _projectors(basis)
    s1, s2 = grid.dir1.shapes, grid.dir2.shapes
    col1 = p1 @ grid.dir1.laplacian.boundary_right
    col2 = p2 @ grid.dir2.laplacian.boundary_right
    # tangential factors restricted to interior tangential nodes
    f1 = controls.f1[:, 1:-1] @ p2.T
    f2 = controls.f2[:, 1:-1] @ p1.T
    forcing = np.einsum("k,tm->tkm", col1, f1) + np.einsum("tk,m->tkm", f2, col2)
    forcing += np.einsum("k,tm->tkm", p1 @ s1.g_right[1:-1], controls.g[1][:, 1:-1] @ p2.T)
    forcing += np.einsum("k,tm->tkm", p1 @ s1.g_left[1:-1], controls.g[3][:, 1:-1] @ p2.T)
    forcing += np.einsum("tk,m->tkm", controls.g[2][:, 1:-1] @ p1.T, p2 @ s2.g_right[1:-1])
    forcing += np.einsum("tk,m->tkm", controls.g[4][:, 1:-1] @ p1.T, p2 @ s2.g_left[1:-1])
    q0 = p1 @ u0[1:-1, 1:-1] @ p2.T
    v0 = p1 @ u1[1:-1, 1:-1] @ p2.T
    mu = basis.frequencies
    q, v = oscillator_panels(q0.ravel(), v0.ravel(), mu.ravel(),
                             forcing.reshape(m, -1), tgrid.dt)
    shp = mu.shape
    q, v = q.reshape(shp), v.reshape(shp)
    u = np.zeros(grid.shape)
    u[1:-1, 1:-1] = basis.b1.interior_modes.T @ q @ basis.b2.interior_modes
    u[-1, :] = controls.f1[-1]
    u[:, -1] = controls.f2[-1]
    vel = basis.b1.interior_modes.T @ v @ basis.b2.interior_modes
    return ForwardState2D(u=u, v=vel, t=tgrid.t_final)


def final_residual_2d(state: ForwardState2D, grid: Grid2D, data) -> float:
    u0, u1 = (np.asarray(v, dtype=float) for v in data)
    w = grid.weights[1:-1, 1:-1]
    num = np.sum(w * state.u[1:-1, 1:-1] ** 2) + np.sum(w * state.v**2)
    den = np.sum(w * u0[1:-1, 1:-1] ** 2) + np.sum(w * u1[1:-1, 1:-1] ** 2)
    return float(np.sqrt(num) / np.sqrt(max(den, _DENOM_FLOOR)))


def forward_verify_2d(data, controls: ControlSet2D, grid: Grid2D, basis: EigenBasis2D,
                      tgrid: TimeGrid) -> float:
    state = forward_solve_2d(data, controls, grid, basis, tgrid)
    return final_residual_2d(state, grid, data)


def energy_2d(state: ForwardState2D, grid: Grid2D) -> float:
    """1/2 (||u_t||_N^2 + ||grad u||_N^2) for a state with zero boundary values."""
    w = grid.weights
    ux1 = grid.dir1.diff.d1 @ state.u
    ux2 = state.u @ grid.dir2.diff.d1.T
    vel = np.zeros(grid.shape)
    vel[1:-1, 1:-1] = state.v
    return 0.5 * float(np.sum(w * vel**2) + np.sum(w * (ux1**2 + ux2**2)))


def zero_controls_2d(grid: Grid2D, tgrid: TimeGrid) -> ControlSet2D:
    m = tgrid.n_steps + 1
    n1, n2 = grid.shape
    g = {1: np.zeros((m, n2)), 3: np.zeros((m, n2)), 2: np.zeros((m, n1)), 4: np.zeros((m, n1))}
    tw = {s: grid.tangential_weights(s) for s in SIDES}
    return ControlSet2D(tgrid, np.zeros((m, n2)), np.zeros((m, n1)), g, tw)
