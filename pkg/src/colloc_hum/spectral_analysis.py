"""Spectral diagnostics of the collocation Laplacian: gaps, observability quotients, scalings."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .operators1d import EigenBasis
from .quadrature import QuadratureRule, interpolation_matrix

log = logging.getLogger(__name__)


def gap_scan(basis: EigenBasis) -> list[tuple[int, float]]:
    """(k, sqrt(lambda_{k+1}) - sqrt(lambda_k)) for k = 1..count-1."""
    mu = basis.frequencies
    return [(k + 1, float(g)) for k, g in enumerate(np.diff(mu))]


def top_pair_gap(basis: EigenBasis) -> float:
    """Smallest gap between the even/odd pairs (2k, 2k+1) at the top of the spectrum.

    The top quartile of the spectrum is searched; pairs are taken with
    1-based index 2k so the two partners have opposite parity.
    """
    mu = basis.frequencies
    n = mu.size
    lo = max(2, (3 * n) // 4)
    gaps = [mu[j] - mu[j - 1] for j in range(lo, n) if (j % 2) == 0]  # mu[j] has index j + 1
    return float(min(gaps))


def _numerators(basis: EigenBasis) -> np.ndarray:
    dx = basis.modes @ basis.diff.d1.T
    return (dx**2) @ basis.rule.weights


@dataclass
class QuotientResult:
    value: float
    argmax: int
    per_mode: np.ndarray
    degenerate: bool = False


def observability_quotient(basis: EigenBasis, rule: QuadratureRule | None = None,
                           reinforced: bool = False) -> QuotientResult:
    """max_k ||phi_k,x||_N^2 / (boundary observation of phi_k).

    Plain: the observation is phi_k,x(1)^2.  Reinforced: it adds
    w_N phi_k,xx(1)^2 + w_0 phi_k,xx(-1)^2.  A vanishing denominator gives
    an infinite quotient and sets ``degenerate``.
    """
    rule = basis.rule if rule is None else rule
    w = rule.weights
    den = basis.dx_right**2
    if reinforced:
        den = den + w[-1] * basis.dxx_right**2 + w[0] * basis.dxx_left**2
    num = _numerators(basis)
    with np.errstate(divide="ignore"):
        q = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
    degenerate = bool(np.any(~np.isfinite(q)))
    if degenerate:
        log.warning("zero boundary observation for some mode")
    k = int(np.argmax(q))
    return QuotientResult(float(q[k]), k + 1, q, degenerate)


@dataclass
class ScalingFit:
    exponent: float
    prefactor: float
    r_squared: float


def scaling_fit(samples) -> ScalingFit:
    """Least-squares fit value ~ prefactor * N^exponent in log-log coordinates."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise DomainError("need at least three (N, value) samples")
    n, v = arr[:, 0], arr[:, 1]
    if np.any(n <= 0) or np.any(v <= 0):
        raise DomainError("scaling fit needs positive N and values")
    x, y = np.log(n), np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(float(slope), float(np.exp(intercept)), r2)


def parity_defect(basis: EigenBasis) -> float:
    """max_k |phi_k(-x) - (-1)^(k+1) phi_k(x)| at the (symmetric) nodes."""
    signs = (-1.0) ** np.arange(basis.count)  # k = 1 gives +1
    flipped = basis.modes[:, ::-1]
    return float(np.max(np.abs(flipped - signs[:, None] * basis.modes)))


def continuous_mode(k: int):
    """phi_k = sin(k pi (x+1)/2), unit L2 norm on (-1,1), phi_k,x(-1) > 0."""
    c = 0.5 * k * np.pi
    return (lambda x: np.sin(c * (np.asarray(x) + 1.0)),
            lambda x: c * np.cos(c * (np.asarray(x) + 1.0)))


def mode_l2_error(basis: EigenBasis, k: int, n_gauss: int | None = None) -> float:
    """||phi^N_k - phi_k||_L2(-1,1) by Gauss-Legendre quadrature."""
    n_gauss = n_gauss or max(2 * basis.rule.order + 20, 64)
    gx, gw = np.polynomial.legendre.leggauss(n_gauss)
    vals = interpolation_matrix(basis.rule, gx) @ basis.modes[k - 1]
    exact = continuous_mode(k)[0](gx)
    return float(np.sqrt(np.sum(gw * (vals - exact) ** 2)))


def mode_estimates(basis: EigenBasis, k: int) -> dict:
    """Discrete vs continuum estimate quantities for mode k (1-based)."""
    n = basis.rule.order
    wn = basis.rule.weights[-1]
    dphi = continuous_mode(k)[1]
    return {
        "N": n,
        "k": k,
        "l2_error": mode_l2_error(basis, k),
        "weighted_dxx": abs(np.sqrt(wn) * basis.dxx_right[k - 1]),
        "dx_error": abs(basis.dx_right[k - 1] - float(dphi(1.0))),
    }
