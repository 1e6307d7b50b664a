"""Exact modal evolution of the backward collocation adjoint system.

With final data phi(T) = sum c_k phi_k and phi_t(T) = sum d_k phi_k, each
mode evolves as

    c_k cos(mu_k (t - T)) + (d_k / mu_k) sin(mu_k (t - T))

so traces and energies are evaluated in closed form at any time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InvalidDataError
from .operators1d import EigenBasis


@dataclass(frozen=True)
class TimeGrid:
    t_final: float
    dt: float

    def __post_init__(self):
        if not (self.t_final > 0 and self.dt > 0):
            raise ConfigurationError("t_final and dt must be positive")
        steps = self.t_final / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ConfigurationError(f"t_final={self.t_final} is not a multiple of dt={self.dt}")
        if round(steps) < 2:
            raise ConfigurationError("time grid needs at least two steps")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def times(self) -> np.ndarray:
        # M * dt reproduces T exactly at the last sample
        return np.linspace(0.0, self.t_final, self.n_steps + 1)

    def refined(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.t_final, self.dt / factor)


@dataclass(frozen=True)
class AdjointFinalData:
    """Modal coefficients of (phi^0, phi^1) in an :class:`EigenBasis`."""

    c: np.ndarray
    d: np.ndarray
    basis: EigenBasis

    @classmethod
    def zeros(cls, basis: EigenBasis) -> "AdjointFinalData":
        return cls(np.zeros(basis.count), np.zeros(basis.count), basis)

    @classmethod
    def from_vector(cls, z, basis: EigenBasis) -> "AdjointFinalData":
        z = np.asarray(z, dtype=float)
        m = basis.count
        return cls(z[:m].copy(), z[m:].copy(), basis)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.c, self.d])

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        return self.basis.synthesize(self.c), self.basis.synthesize(self.d)


@dataclass(frozen=True)
class BoundaryTraces:
    """Observed traces, one value per time sample.

    psi_f = phi_x(t,1) - w_N phi_xx(t,1), psi_r = sqrt(w_N) phi_xx(t,1),
    psi_l = sqrt(w_0) phi_xx(t,-1).
    """

    times: np.ndarray
    psi_f: np.ndarray
    psi_r: np.ndarray
    psi_l: np.ndarray


def trace_constants(basis: EigenBasis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-mode constants (a_k, r_k, l_k) multiplying the modal amplitude."""
    w = basis.rule.weights
    a = basis.dx_right - w[-1] * basis.dxx_right
    r = np.sqrt(w[-1]) * basis.dxx_right
    l = np.sqrt(w[0]) * basis.dxx_left
    return a, r, l


def modal_decompose(phi0, phi1, basis: EigenBasis) -> AdjointFinalData:
    phi0 = np.asarray(phi0, dtype=float)
    phi1 = np.asarray(phi1, dtype=float)
    n = basis.rule.order
    for name, v in (("phi0", phi0), ("phi1", phi1)):
        if v.shape != (n + 1,):
            raise InvalidDataError(f"{name} must have {n + 1} node values")
        scale = max(1.0, float(np.max(np.abs(v))))
        if abs(v[0]) > 1e-12 * scale or abs(v[-1]) > 1e-12 * scale:
            raise InvalidDataError(f"{name} must vanish at both boundary nodes")
    proj = basis.modes * basis.rule.weights
    c = (proj @ phi0) / basis.norms_n
    d = (proj @ phi1) / basis.norms_n
    return AdjointFinalData(c, d, basis)


def _amplitudes(data: AdjointFinalData, t, t_final: float):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    mu = data.basis.frequencies
    s = t[:, None] - t_final
    cos, sin = np.cos(mu * s), np.sin(mu * s)
    a = data.c * cos + (data.d / mu) * sin
    a_t = -data.c * mu * sin + data.d * cos
    return a, a_t


def adjoint_state(data: AdjointFinalData, t, t_final: float) -> tuple[np.ndarray, np.ndarray]:
    """Node values of phi and phi_t at times ``t``; rows follow ``t``."""
    a, a_t = _amplitudes(data, t, t_final)
    return a @ data.basis.modes, a_t @ data.basis.modes


def adjoint_traces(data: AdjointFinalData, grid) -> BoundaryTraces:
    times = grid.times
    a, _ = _amplitudes(data, times, grid.t_final)
    ka, kr, kl = trace_constants(data.basis)
    return BoundaryTraces(times=times, psi_f=a @ ka, psi_r=a @ kr, psi_l=a @ kl)


def energy(data: AdjointFinalData, t: float, t_final: float) -> float:
    """Discrete energy 1/2 (||phi_t||_N^2 + ||phi_x||_N^2) at time ``t``."""
    phi, phi_t = adjoint_state(data, [t], t_final)
    w = data.basis.rule.weights
    phi_x = data.basis.diff.d1 @ phi[0]
    return 0.5 * float(np.sum(w * phi_t[0] ** 2) + np.sum(w * phi_x**2))
