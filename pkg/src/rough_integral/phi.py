"""The auxiliary function

    φ(z) = C_α ∫_0^1 (1-q)^{2α-2} q^{-α} (1+qz)^{-1} dq,   C_α = 1/(α Γ(α) Γ(2α-1)),

and its derivatives φ^{(k)}(z) = (-1)^k k! C_α ∫ (1-q)^{2α-2} q^{k-α} (1+qz)^{-k-1} dq.

Up to ``PHI_DIRECT_SPLIT`` the integral is a Gauss-Jacobi sum with the
endpoint singularities absorbed into the weight. Beyond it the equivalent
Gauss hypergeometric form is used:

    C_α B(k+1-α, 2α-1) 2F1(k+1, k+1-α; k+α; -z).
"""

import logging
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import beta as beta_fn
from scipy.special import factorial, gamma, hyp2f1, roots_jacobi

from src.core.config import get_settings
from src.core.exceptions import DomainError

logger = logging.getLogger(__name__)


def check_alpha(alpha: float) -> float:
    if not 0.5 < alpha < 1.0:
        raise DomainError(f"phi needs 1/2 < alpha < 1, got {alpha}")
    return float(alpha)


def phi_constant(alpha: float) -> float:
    return 1.0 / (alpha * gamma(alpha) * gamma(2 * alpha - 1))


@lru_cache(maxsize=64)
def _jacobi_rule(k: int, alpha: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    a = 2 * alpha - 2
    b = k - alpha
    x, w = roots_jacobi(n, a, b)
    q = (1 + x) / 2
    w = w * 2.0 ** (-a - b - 1)
    return q, w


def _prefactor(k: int, alpha: float) -> float:
    return (-1) ** k * float(factorial(k)) * phi_constant(alpha)


def phi_derivative(z, alpha: float, k: int = 0) -> np.ndarray:
    """k-th derivative of φ, evaluated directly (no table)."""
    alpha = check_alpha(alpha)
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("phi is defined for z >= 0")
    settings = get_settings()
    out = np.empty(z.shape)
    near = z <= settings.PHI_DIRECT_SPLIT
    if near.any():
        q, w = _jacobi_rule(k, alpha, settings.PHI_JACOBI_NODES)
        zn = z[near][..., None]
        out[near] = np.sum(w * (1 + q * zn) ** (-k - 1), axis=-1)
    if (~near).any():
        out[~near] = beta_fn(k + 1 - alpha, 2 * alpha - 1) * hyp2f1(
            k + 1, k + 1 - alpha, k + alpha, -z[~near]
        )
    out *= _prefactor(k, alpha)
    return out if out.ndim else out[()]


class PhiTable:
    """Log-z cubic-spline cache of φ, φ′ and φ″ for one α.

    Inside |log z| <= range the splines interpolate log|φ^{(k)}|; outside, and
    at z = 0, values are computed directly.
    """

    def __init__(self, alpha: float, log_range: float = None, points: int = None):
        settings = get_settings()
        self.alpha = check_alpha(alpha)
        self.log_range = log_range or settings.PHI_TABLE_LOG_RANGE
        points = points or settings.PHI_TABLE_POINTS
        s = np.linspace(-self.log_range, self.log_range, points)
        z = np.exp(s)
        self._splines = []
        for k in range(3):
            values = phi_derivative(z, self.alpha, k)
            self._splines.append(CubicSpline(s, np.log(np.abs(values))))
        logger.debug(f"built phi table for alpha={alpha} on {points} points")

    def __call__(self, z, k: int = 0) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        out = np.empty(z.shape)
        with np.errstate(divide="ignore"):
            s = np.log(z)
        inside = np.abs(s) <= self.log_range
        if inside.any():
            out[inside] = (-1) ** k * np.exp(self._splines[k](s[inside]))
        if (~inside).any():
            out[~inside] = phi_derivative(z[~inside], self.alpha, k)
        return out if out.ndim else out[()]


@lru_cache(maxsize=16)
def phi_table(alpha: float) -> PhiTable:
    return PhiTable(alpha)


def phi(z, alpha: float, use_table: bool = False):
    if use_table:
        return phi_table(check_alpha(alpha))(z, 0)
    return phi_derivative(z, alpha, 0)


def phi_prime(z, alpha: float, use_table: bool = False):
    if use_table:
        return phi_table(check_alpha(alpha))(z, 1)
    return phi_derivative(z, alpha, 1)


def phi_second(z, alpha: float, use_table: bool = False):
    if use_table:
        return phi_table(check_alpha(alpha))(z, 2)
    return phi_derivative(z, alpha, 2)


def phi_decay_constant(alpha: float, exponent: float, z=None) -> float:
    """sup z**exponent φ(z) over a log grid of [1, 1e6]."""
    z = np.logspace(0, 6, 241) if z is None else np.asarray(z)
    return float(np.max(z**exponent * phi(z, alpha)))
