"""Forward solve of the controlled collocation system and the rest-condition check.

Interior node values obey

    u'' = A u + A_bnd[:, N] f(t) + g_L(t) G_L + g_R(t) G_R

where A is the interior block of d2.  The system is propagated mode by mode:
each amplitude is a forced oscillator q'' + lambda q = F(t) and, with F
linear on each time panel, the update over a panel is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adjoint1d import TimeGrid
from .errors import DimensionError
from .hum1d import ControlSet
from .operators1d import ControlShapes, DirichletLaplacian, EigenBasis
from .quadrature import QuadratureRule

_DENOM_FLOOR = 1e-300


@dataclass
class ForwardState:
    """State at time ``t``; ``u`` holds all nodes, boundary slots carry the Dirichlet data."""

    u: np.ndarray
    v: np.ndarray
    t: float


def oscillator_panels(q0, p0, omega, forcing, dt):
    """Advance q'' + omega^2 q = F(t) over consecutive panels of width ``dt``.

    ``forcing`` has shape (n_steps + 1, n_modes) and is taken piecewise
    linear in time.  On each panel q - F/omega^2 solves the homogeneous
    equation, so the rotation is exact.  Returns (q, p) at the last sample.
    """
    q = np.array(q0, dtype=float)
    p = np.array(p0, dtype=float)
    w2 = omega * omega
    c, s = np.cos(omega * dt), np.sin(omega * dt)
    for n in range(forcing.shape[0] - 1):
        f0, f1 = forcing[n], forcing[n + 1]
        slope = (f1 - f0) / dt
        e = q - f0 / w2
        de = p - slope / w2
        e, de = e * c + de * s / omega, -e * omega * s + de * c
        q = e + f1 / w2
        p = de + slope / w2
    return q, p


def _modal_projector(basis: EigenBasis) -> np.ndarray:
    # rows map interior node values to modal amplitudes
    w = basis.rule.weights[1:-1]
    v = basis.interior_modes
    return (v * w) / basis.norms_n[:, None]


def modal_forcing(controls: ControlSet, basis: EigenBasis, shapes: ControlShapes,
                  op: DirichletLaplacian) -> np.ndarray:
    proj = _modal_projector(basis)
    col_f = proj @ op.boundary_right
    col_l = proj @ shapes.g_left[1:-1]
    col_r = proj @ shapes.g_right[1:-1]
    return (np.outer(controls.f, col_f) + np.outer(controls.g_l, col_l)
            + np.outer(controls.g_r, col_r))


def forward_solve(data, controls: ControlSet, basis: EigenBasis, shapes: ControlShapes,
                  op: DirichletLaplacian, grid: TimeGrid) -> ForwardState:
    u0, u1 = (np.asarray(v, dtype=float) for v in data)
    n = basis.rule.order
    if u0.shape != (n + 1,) or u1.shape != (n + 1,):
        raise DimensionError(f"initial data must have {n + 1} node values")
    m = grid.n_steps + 1
    for name in ("f", "g_r", "g_l"):
        if np.shape(getattr(controls, name)) != (m,):
            raise DimensionError(f"control {name} must be sampled on the {m}-point grid")
    if abs(controls.grid.dt - grid.dt) > 1e-14 or abs(controls.grid.t_final - grid.t_final) > 1e-12:
        raise DimensionError("controls are sampled on a different time grid")

    proj = _modal_projector(basis)
    q0 = proj @ u0[1:-1]
    p0 = proj @ u1[1:-1]
    forcing = modal_forcing(controls, basis, shapes, op)
    q, p = oscillator_panels(q0, p0, basis.frequencies, forcing, grid.dt)
    u = np.zeros(n + 1)
    u[1:-1] = q @ basis.interior_modes
    u[-1] = controls.f[-1]
    v = p @ basis.interior_modes
    return ForwardState(u=u, v=v, t=grid.t_final)


def final_residual(state: ForwardState, rule: QuadratureRule, data) -> float:
    """Relative size of (u(T), u_t(T)) at interior nodes, in the discrete norm."""
    u0, u1 = (np.asarray(x, dtype=float) for x in data)
    w = rule.weights[1:-1]
    num = np.sum(w * state.u[1:-1] ** 2) + np.sum(w * state.v**2)
    den = np.sum(w * u0[1:-1] ** 2) + np.sum(w * u1[1:-1] ** 2)
    return float(np.sqrt(num) / np.sqrt(max(den, _DENOM_FLOOR)))


def forward_energy(state: ForwardState, rule: QuadratureRule, d1: np.ndarray) -> float:
    """Discrete energy 1/2 (||u_t||_N^2 + ||u_x||_N^2) of a state with zero boundary data."""
    w = rule.weights
    ux = d1 @ state.u
    return 0.5 * float(np.sum(w[1:-1] * state.v**2) + np.sum(w * ux**2))


def trapezoidal_reference(data, controls: ControlSet, basis: EigenBasis, shapes: ControlShapes,
                          op: DirichletLaplacian, grid: TimeGrid, substeps: int = 8) -> ForwardState:
    """Implicit trapezoidal integration of the same nodal system, Richardson-extrapolated.

    Used only as an independent check of the modal propagator on small N.
    The trapezoidal error expands in even powers of the step, so two levels
    of extrapolation over steps h, h/2, h/4 give a sixth-order result.
    """
    levels = [_trapezoid(data, controls, shapes, op, grid, substeps * 2**j) for j in range(3)]
    r1 = [(4.0 * levels[j + 1] - levels[j]) / 3.0 for j in range(2)]
    y = (16.0 * r1[1] - r1[0]) / 15.0
    n = basis.rule.order
    u = np.zeros(n + 1)
    u[1:-1] = y[: n - 1]
    u[-1] = controls.f[-1]
    return ForwardState(u=u, v=y[n - 1:], t=grid.t_final)


def _trapezoid(data, controls, shapes, op, grid, substeps):
    a = op.interior_block
    k = a.shape[0]
    u0, u1 = (np.asarray(v, dtype=float) for v in data)
    y = np.concatenate([u0[1:-1], u1[1:-1]])
    big = np.zeros((2 * k, 2 * k))
    big[:k, k:] = np.eye(k)
    big[k:, :k] = a
    h = grid.dt / substeps
    lhs = np.eye(2 * k) - 0.5 * h * big
    rhs_mat = np.eye(2 * k) + 0.5 * h * big
    lu = np.linalg.inv(lhs)

    def force(f, gl, gr):
        out = np.zeros(2 * k)
        out[k:] = op.boundary_right * f + shapes.g_left[1:-1] * gl + shapes.g_right[1:-1] * gr
        return out

    samples = np.stack([controls.f, controls.g_l, controls.g_r], axis=1)
    prev = force(*samples[0])
    for n in range(grid.n_steps):
        for j in range(substeps):
            theta = (j + 1) / substeps
            cur = force(*((1 - theta) * samples[n] + theta * samples[n + 1]))
            y = lu @ (rhs_mat @ y + 0.5 * h * (prev + cur))
            prev = cur
    return y
