"""Compensated fractional derivative

    D̂^α_{a+} f(x)(r) = 1/Γ(1-α) [ f(x_r) (r-a)^{-α}
        + α ∫_a^r (f(x_r) - f(x_θ) - f′(x_θ)(x_r - x_θ)) (r-θ)^{-α-1} dθ ].

The compensated numerator is O((r-θ)^{(1+λ)β}), so away from the diagonal
the integrand is handled by product integration with linear interpolation;
on the cell next to r the numerator is modelled as c (r-θ)².
"""

from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
from scipy.linalg import toeplitz
from scipy.special import gamma

from src.core.exceptions import DomainError
from src.frac_calc.quadrature import cell_moments
from src.path_core.grid import GridPath, Window
from src.rough_integral.config import IntegralConfig

if TYPE_CHECKING:
    from src.rde_solver.fields import VectorField


@lru_cache(maxsize=32)
def _remainder_matrix(n: int, alpha: float) -> np.ndarray:
    """Unit-grid weights of the cells at distance >= 1 from the evaluation node."""
    near, far = cell_moments(n + 1, -alpha - 1.0)
    near = np.array(near)
    far = np.array(far)
    near[0] = far[0] = 0.0
    zeros = np.zeros(n + 1)
    lower = toeplitz(near[: n + 1], zeros)
    lower[:, 0] = 0.0
    shifted = toeplitz(np.concatenate([[0.0], far[:n]]), zeros)
    out = lower + shifted
    out.setflags(write=False)
    return out


def compensated_numerators(fx: np.ndarray, jac: np.ndarray, xv: np.ndarray) -> np.ndarray:
    """N[i, k] = f(x_i) - f(x_k) - f′(x_k)(x_i - x_k), shape (n+1, n+1) + f-shape."""
    dx = xv[:, None, :] - xv[None, :, :]
    return fx[:, None] - fx[None, :] - np.einsum("k...m,ikm->ik...", jac, dx)


def compensated_weighted_values(
    fx: np.ndarray, jac: np.ndarray, xv: np.ndarray, h: float, alpha: float
) -> np.ndarray:
    """(r-a)^α D̂^α_{a+} f(x)(r) at every node of a window.

    fx has shape (n+1, ...) and jac (n+1, ..., m); node 0 is a, where the
    weighted value tends to f(x_a)/Γ(1-α).
    """
    n = fx.shape[0] - 1
    numer = compensated_numerators(fx, jac, xv)
    remainder = np.einsum("ik,ik...->i...", _remainder_matrix(n, alpha), numer)
    idx = np.arange(1, n + 1)
    remainder[1:] += numer[idx, idx - 1] / (2.0 - alpha)
    remainder *= h ** (-alpha)
    offsets = (h * np.arange(n + 1)) ** alpha
    weighted = fx + alpha * offsets.reshape((-1,) + (1,) * (fx.ndim - 1)) * remainder
    return weighted / gamma(1.0 - alpha)


def compensated_deriv(
    f: "VectorField", x: GridPath, cfg: IntegralConfig, a: int, r: int
) -> np.ndarray:
    """D̂^α_{a+} f(x)(t_r) for grid indices a < r, shape (rows, d)."""
    if r <= a:
        raise DomainError(f"compensated derivative needs a < r, got a={a}, r={r}")
    w = Window(a, r).check(x.n_points)
    xv = x.window_values(w)
    weighted = compensated_weighted_values(f.eval(xv), f.jacobian(xv), xv, x.step, cfg.alpha)
    return weighted[-1] / ((r - a) * x.step) ** cfg.alpha
