"""HUM functional, Gramian, conjugate gradient solve and control extraction in 1-d.

The unknown is the adjoint final datum z = (c, d) in modal coordinates.  The
quadratic part of J^N is

    (Lambda z, z) = int_0^T eta (|psi_f|^2 + |psi_r|^2 + |psi_l|^2) dt

where every trace is a sum over modes of a trace constant times
cos(mu_k (t-T)) or sin(mu_k (t-T)) / mu_k.  The Gramian is therefore
B * I entrywise, with B = a a^T + r r^T + l l^T of rank three and I a table
of closed-form time integrals.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .adjoint1d import (
    AdjointFinalData,
    TimeGrid,
    adjoint_state,
    adjoint_traces,
    trace_constants,
)
from .cutoff import WeightFunction, pair_integrals
from .errors import ConfigurationError, DimensionError, NonConvergenceError
from .operators1d import ControlShapes, EigenBasis
from .quadrature import QuadratureRule

log = logging.getLogger(__name__)


def eta(w: WeightFunction, t):
    return w(t)


def duality_pair(phi_state_at_0, data, rule: QuadratureRule) -> float:
    """<(phi(0), phi_t(0)), (u0, u1)>_N = (u1, phi(0))_N - (u0, phi_t(0))_N."""
    phi0, phi1 = (np.asarray(v, dtype=float) for v in phi_state_at_0)
    u0, u1 = (np.asarray(v, dtype=float) for v in data)
    n = rule.n_nodes
    for v in (phi0, phi1, u0, u1):
        if v.shape != (n,):
            raise DimensionError(f"expected node vectors of length {n}, got {v.shape}")
    w = rule.weights
    return float(np.sum(u1 * phi0 * w) - np.sum(u0 * phi1 * w))


@dataclass
class ControlSet:
    grid: TimeGrid
    f: np.ndarray
    g_r: np.ndarray
    g_l: np.ndarray

    def l2_norms(self) -> tuple[float, float, float]:
        return tuple(time_l2(self.grid, v) for v in (self.f, self.g_r, self.g_l))

    @classmethod
    def zeros(cls, grid: TimeGrid) -> "ControlSet":
        z = np.zeros(grid.n_steps + 1)
        return cls(grid, z, z.copy(), z.copy())


def time_l2(grid: TimeGrid, values) -> float:
    """L2(0,T) norm by the trapezoidal rule on the sample grid."""
    v = np.asarray(values, dtype=float)
    v2 = v * v
    if v2.ndim > 1:
        v2 = v2.reshape(v2.shape[0], -1).sum(axis=1)
    return float(np.sqrt(grid.dt * (v2.sum() - 0.5 * (v2[0] + v2[-1]))))


@dataclass
class CGRecord:
    iterations: int
    residual: float
    history: list = field(default_factory=list)
    ritz_min: float = np.nan
    ritz_max: float = np.nan


@dataclass
class HUMSolution:
    minimizer: AdjointFinalData
    controls: ControlSet
    functional_value: float
    cg_iterations: int
    cg_residual: float
    rhs: np.ndarray
    gramian_condition_estimate: float = np.nan
    forward_residual: float = np.nan


class Gramian1D:
    """The operator Lambda on modal final data for a fixed basis and cutoff."""

    def __init__(self, basis: EigenBasis, weight: WeightFunction):
        self.basis = basis
        self.weight = weight
        self.mu = basis.frequencies
        self.obs = np.vstack(trace_constants(basis))
        cc, cs, ss = pair_integrals(self.mu, self.mu, weight)
        self.cc = cc
        # d-components carry the 1/mu factor of sin(mu s)/mu
        self.cs = cs / self.mu[None, :]
        self.ss = ss / np.outer(self.mu, self.mu)

    @property
    def size(self) -> int:
        return 2 * self.basis.count

    def apply(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        m = self.basis.count
        zc, zd = z[:m], z[m:]
        out_c = np.zeros(m)
        out_d = np.zeros(m)
        for o in self.obs:
            yc, yd = o * zc, o * zd
            out_c += o * (self.cc @ yc + self.cs @ yd)
            out_d += o * (self.cs.T @ yc + self.ss @ yd)
        return np.concatenate([out_c, out_d])

    def dense(self) -> np.ndarray:
        b = sum(np.outer(o, o) for o in self.obs)
        top = np.hstack([b * self.cc, b * self.cs])
        bottom = np.hstack([(b * self.cs).T, b * self.ss])
        return np.vstack([top, bottom])

    def diagonal(self) -> np.ndarray:
        b = np.sum(self.obs**2, axis=0)
        return np.concatenate([b * np.diag(self.cc), b * np.diag(self.ss)])


def gramian_apply(coeffs: AdjointFinalData, w: WeightFunction, basis: EigenBasis) -> AdjointFinalData:
    gram = Gramian1D(basis, w)
    return AdjointFinalData.from_vector(gram.apply(coeffs.as_vector()), basis)


def rhs_vector(data, basis: EigenBasis, t_final: float) -> np.ndarray:
    """Duality pairing of each basis final datum's t = 0 state with (u0, u1).

    The mode-k cosine datum has phi(0) = cos(mu T) phi_k and
    phi_t(0) = mu sin(mu T) phi_k; the sine datum has
    phi(0) = -sin(mu T)/mu phi_k and phi_t(0) = cos(mu T) phi_k.
    """
    u0, u1 = (np.asarray(v, dtype=float) for v in data)
    w = basis.rule.weights
    p0 = basis.modes @ (w * u0)
    p1 = basis.modes @ (w * u1)
    mu = basis.frequencies
    cos, sin = np.cos(mu * t_final), np.sin(mu * t_final)
    b_c = cos * p1 - mu * sin * p0
    b_d = -sin / mu * p1 - cos * p0
    return np.concatenate([b_c, b_d])


def conjugate_gradient(apply, b, tol=1e-10, max_iter=5000, precond=None, x0=None):
    """Preconditioned CG for a symmetric positive definite operator.

    Stops when ||b - A x|| <= tol * ||b||.  Returns (x, CGRecord); raises
    NonConvergenceError carrying the last iterate when ``max_iter`` is hit.
    Extreme Ritz values are estimated from the Lanczos coefficients.
    """
    b = np.asarray(b, dtype=float)
    bnorm = float(np.linalg.norm(b))
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    if bnorm == 0.0:
        return np.zeros_like(b), CGRecord(0, 0.0)
    r = b - apply(x)
    z = precond(r) if precond is not None else r
    p = z.copy()
    rz = float(r @ z)
    history = [float(np.linalg.norm(r)) / bnorm]
    alphas, betas = [], []
    it = 0
    while history[-1] > tol:
        if it >= max_iter:
            raise NonConvergenceError(
                f"CG did not reach tol={tol:g} in {max_iter} iterations "
                f"(relative residual {history[-1]:.3e})",
                best=x,
                iterations=it,
                residual=history[-1],
            )
        ap = apply(p)
        pap = float(p @ ap)
        if pap <= 0.0:
            raise NonConvergenceError("operator is not positive definite along a CG direction",
                                      best=x, iterations=it, residual=history[-1])
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        z = precond(r) if precond is not None else r
        rz_new = float(r @ z)
        beta = rz_new / rz
        rz = rz_new
        p = z + beta * p
        alphas.append(alpha)
        betas.append(beta)
        it += 1
        history.append(float(np.linalg.norm(r)) / bnorm)
    record = CGRecord(it, history[-1], history)
    if alphas:
        record.ritz_min, record.ritz_max = _ritz_extremes(alphas, betas)
    return x, record


def _ritz_extremes(alphas, betas):
    k = len(alphas)
    diag = np.empty(k)
    off = np.empty(max(k - 1, 0))
    diag[0] = 1.0 / alphas[0]
    for i in range(1, k):
        diag[i] = 1.0 / alphas[i] + betas[i - 1] / alphas[i - 1]
        off[i - 1] = np.sqrt(betas[i - 1]) / alphas[i - 1]
    t = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    ev = np.linalg.eigvalsh(t)
    return float(ev[0]), float(ev[-1])


def extract_controls(minimizer: AdjointFinalData, w: WeightFunction, grid: TimeGrid,
                     basis: EigenBasis | None = None) -> ControlSet:
    traces = adjoint_traces(minimizer, grid)
    e = w(grid.times)
    return ControlSet(grid, e * traces.psi_f, e * traces.psi_r, e * traces.psi_l)


def evaluate_functional(z: AdjointFinalData, data, w: WeightFunction, t_final: float | None = None,
                        gramian: Gramian1D | None = None) -> float:
    """J^N(z) = 1/2 (Lambda z, z) - <(phi(0), phi_t(0)), (u0, u1)>_N."""
    t_final = w.t_final if t_final is None else t_final
    gram = gramian or Gramian1D(z.basis, w)
    vec = z.as_vector()
    phi, phi_t = adjoint_state(z, [0.0], t_final)
    pairing = duality_pair((phi[0], phi_t[0]), data, z.basis.rule)
    return 0.5 * float(vec @ gram.apply(vec)) - pairing


def observability_threshold(order: int) -> float:
    return 4.0 * (2.0 + 1.0 / order)


def solve_hum(data, basis: EigenBasis, shapes: ControlShapes | None, w: WeightFunction,
              grid: TimeGrid, tol: float = 1e-10, max_iter: int = 5000,
              gramian: Gramian1D | None = None) -> HUMSolution:
    """Minimise J^N by preconditioned CG and extract (f, g_R, g_L).

    ``shapes`` is accepted for interface symmetry with the forward solver;
    the minimisation itself only needs the eigenbasis.
    """
    if 4.0 * w.delta >= w.t_final:
        raise ConfigurationError("degenerate cutoff: T <= 4 delta")
    if abs(w.t_final - grid.t_final) > 1e-12 * grid.t_final:
        raise ConfigurationError("cutoff and time grid disagree on T")
    n = basis.rule.order
    if grid.t_final <= observability_threshold(n):
        log.warning("T=%g is below the uniform observability time 4(2+1/N)=%g",
                    grid.t_final, observability_threshold(n))
    gram = gramian or Gramian1D(basis, w)
    b = rhs_vector(data, basis, grid.t_final)
    diag = gram.diagonal()
    x, rec = conjugate_gradient(gram.apply, b, tol=tol, max_iter=max_iter, precond=lambda r: r / diag)
    z = AdjointFinalData.from_vector(x, basis)
    controls = extract_controls(z, w, grid, basis)
    value = -0.5 * float(b @ x)
    cond = rec.ritz_max / rec.ritz_min if rec.ritz_min > 0 else np.inf
    return HUMSolution(
        minimizer=z,
        controls=controls,
        functional_value=value,
        cg_iterations=rec.iterations,
        cg_residual=rec.residual,
        rhs=b,
        gramian_condition_estimate=cond,
    )
