"""Time cutoff eta(t) and closed-form integrals of eta against trigonometric factors.

eta is 0 on [0, delta] and [T - delta, T], 1 on [2 delta, T - 2 delta], and
follows a polynomial smoothstep on the two bands in between.  The smoothstep
of order p is the normalised primitive of u^p (1-u)^p, a polynomial of degree
2p + 1 whose first p derivatives vanish at both ends (p = 2 gives
6u^5 - 15u^4 + 10u^3).

Mode frequencies grow like N^2, so every time integral
int_0^T eta(t) cos/sin(nu (t - T)) dt is evaluated in closed form rather
than on a time grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import ConfigurationError, DomainError

# below this |kappa| the integration-by-parts series cancels badly
_KAPPA_SWITCH = 30.0
_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)
_GL_U = 0.5 * (_GL_X + 1.0)
_GL_WU = 0.5 * _GL_W


@lru_cache(maxsize=None)
def smoothstep_coefficients(order: int) -> np.ndarray:
    """Increasing-power coefficients of the order-``order`` smoothstep."""
    if order < 1:
        raise ConfigurationError("smoothstep order must be >= 1")
    bump = P.polypow([0.0, 1.0, -1.0], order)  # (u - u^2)^p
    prim = P.polyint(bump)
    return prim / P.polyval(1.0, prim)


@lru_cache(maxsize=None)
def _band_tables(order: int):
    q = -smoothstep_coefficients(order)
    q[0] += 1.0
    derivs = [q]
    for _ in range(len(q) - 1):
        derivs.append(P.polyder(derivs[-1]))
    at0 = np.array([P.polyval(0.0, c) for c in derivs])
    at1 = np.array([P.polyval(1.0, c) for c in derivs])
    return q, at0, at1, P.polyval(_GL_U, q)


@dataclass(frozen=True)
class WeightFunction:
    t_final: float
    delta: float
    order: int = 2
    _tables: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigurationError("delta must be positive")
        if not 4.0 * self.delta < self.t_final:
            raise ConfigurationError(
                f"need 4*delta < T, got delta={self.delta}, T={self.t_final}"
            )
        object.__setattr__(self, "_tables", _band_tables(int(self.order)))

    def profile(self, u):
        u = np.clip(u, 0.0, 1.0)
        return P.polyval(u, smoothstep_coefficients(int(self.order)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        tol = 1e-12 * self.t_final
        if np.any(t < -tol) or np.any(t > self.t_final + tol):
            raise DomainError("eta is defined on [0, T] only")
        d, T = self.delta, self.t_final
        return np.minimum(self.profile((t - d) / d), self.profile((T - d - t) / d))

    def fourier(self, nu):
        """Return (C, S) with C = int eta cos(nu (t-T)) dt, S = int eta sin(nu (t-T)) dt."""
        nu = np.asarray(nu, dtype=float)
        h = self._even_transform(nu)
        half = 0.5 * nu * self.t_final
        return np.cos(half) * h, -np.sin(half) * h

    def _even_transform(self, nu):
        # H(nu) = int_{-T/2}^{T/2} eta(T/2 + tau) cos(nu tau) dtau; eta is even about T/2
        d = self.delta
        a = 0.5 * self.t_final - 2.0 * d
        plateau = a * np.sinc(nu * a / np.pi)
        band = d * np.real(np.exp(1j * nu * a) * self._band_transform(nu * d))
        return 2.0 * (plateau + band)

    def _band_transform(self, kappa):
        """F(kappa) = int_0^1 q(u) exp(i kappa u) du for the falling band q = 1 - s."""
        _, at0, at1, q_gl = self._tables
        kappa = np.asarray(kappa, dtype=float)
        out = np.empty(kappa.shape, dtype=complex)
        small = np.abs(kappa) < _KAPPA_SWITCH
        if np.any(small):
            k = kappa[small]
            out[small] = np.exp(1j * np.multiply.outer(k, _GL_U)) @ (_GL_WU * q_gl)
        big = ~small
        if np.any(big):
            ik = 1j * kappa[big]
            e1 = np.exp(ik)
            total = np.zeros(ik.shape, dtype=complex)
            # sum_m (-1)^m [q^(m)(u) e^{i k u}]_0^1 / (i k)^(m+1)
            for m in range(len(at0)):
                total += (-1) ** m * (at1[m] * e1 - at0[m]) / ik ** (m + 1)
            out[big] = total
        return out

    def integral(self) -> float:
        return self.t_final - 3.0 * self.delta


def pair_integrals(mu_a, mu_b, weight: WeightFunction):
    """Tables of int eta trig(mu_a s) trig(mu_b s) dt with s = t - T.

    Returns (cc, cs, ss) where cs[j, k] = int eta cos(mu_a[j] s) sin(mu_b[k] s).
    """
    mu_a = np.asarray(mu_a, dtype=float)[:, None]
    mu_b = np.asarray(mu_b, dtype=float)[None, :]
    c_minus, s_minus = weight.fourier(mu_a - mu_b)
    c_plus, s_plus = weight.fourier(mu_a + mu_b)
    cc = 0.5 * (c_minus + c_plus)
    ss = 0.5 * (c_minus - c_plus)
    cs = 0.5 * (s_plus - s_minus)
    return cc, cs, ss


def default_delta(t_final: float, min_window: float = 4.0) -> float:
    """Cutoff width used when none is given.

    T/10 unless that leaves the plateau [2 delta, T - 2 delta] shorter than
    ``min_window`` (the continuous control time on (-1, 1)); then the
    largest delta keeping the plateau that long.  At T = 4.4 this is 0.1.
    """
    d = 0.1 * t_final
    if t_final - 4.0 * d < min_window and t_final > min_window:
        d = 0.25 * (t_final - min_window)
    return d
