"""Riemann-Liouville integrals and Weyl derivatives on uniform grids.

Right-sided operators carry no complex phase: they are the left-sided ones
conjugated by the reflection s -> a + b - s.

The ``*_values`` functions work on raw node arrays of shape (n+1,) or
(n+1, k) with spacing h; node 0 is the base point a. The GridPath functions
wrap them for windows.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import toeplitz
from scipy.special import gamma

from src.core.exceptions import DataFormatError, DomainError
from src.frac_calc.quadrature import cell_moments, left_power_matrix
from src.path_core.grid import GridPath, Window

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FracOrder:
    alpha: float

    def __post_init__(self):
        if not 0.0 < float(self.alpha) < 1.0:
            raise DomainError(f"fractional order must lie in (0, 1), got {self.alpha}")


def _order(alpha) -> float:
    if isinstance(alpha, FracOrder):
        return alpha.alpha
    return FracOrder(float(alpha)).alpha


def _check_finite(values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise DataFormatError("operand contains non-finite values")


@lru_cache(maxsize=32)
def weyl_matrix(n: int, alpha: float) -> np.ndarray:
    """Unit-grid Marchaud derivative of order alpha; row 0 is NaN.

    The cell adjacent to the evaluation node uses the secant slope, so the
    integrand there is slope * u**(-alpha) and integrates exactly.
    """
    near, far = cell_moments(n + 1, -alpha - 1.0)
    near = np.array(near)
    far = np.array(far)
    near[0] = 0.0
    far[0] = 0.0
    zeros = np.zeros(n + 1)
    lower = toeplitz(near[: n + 1], zeros)
    lower[:, 0] = 0.0
    shifted = toeplitz(np.concatenate([[0.0], far[:n]]), zeros)
    out = -alpha * (lower + shifted)
    idx = np.arange(1, n + 1)
    out[idx, idx] += 1.0 / (1.0 - alpha)
    out[idx, idx - 1] += -alpha / (1.0 - alpha)
    out /= gamma(1.0 - alpha)
    out[0, :] = np.nan
    out.setflags(write=False)
    return out


def frac_integral_values(values: np.ndarray, h: float, alpha: float) -> np.ndarray:
    n = values.shape[0] - 1
    return h**alpha / gamma(alpha) * (left_power_matrix(n, alpha - 1.0) @ values)


def frac_integral_right_values(values: np.ndarray, h: float, alpha: float) -> np.ndarray:
    return frac_integral_values(values[::-1], h, alpha)[::-1]


def weyl_left_values(values: np.ndarray, h: float, alpha: float) -> np.ndarray:
    """D^alpha_{a+} at every node; the entry at node 0 is NaN."""
    n = values.shape[0] - 1
    return h ** (-alpha) * (weyl_matrix(n, alpha) @ values)


def weyl_right_values(values: np.ndarray, h: float, alpha: float) -> np.ndarray:
    """D^alpha_{b-} at every node; the entry at the last node is NaN."""
    return weyl_left_values(values[::-1], h, alpha)[::-1]


def _window(f: GridPath, w: Optional[Window]) -> Window:
    return (w or f.full_window()).check(f.n_points)


def frac_integral_left(f: GridPath, alpha, w: Optional[Window] = None) -> GridPath:
    a = _order(alpha)
    w = _window(f, w)
    vals = f.window_values(w)
    _check_finite(vals)
    return GridPath(f.node(w.lo), f.node(w.hi), frac_integral_values(vals, f.step, a))


def frac_integral_right(f: GridPath, alpha, w: Optional[Window] = None) -> GridPath:
    a = _order(alpha)
    w = _window(f, w)
    vals = f.window_values(w)
    _check_finite(vals)
    return GridPath(
        f.node(w.lo), f.node(w.hi), frac_integral_right_values(vals, f.step, a)
    )


def weyl_deriv_left(f: GridPath, alpha, w: Optional[Window] = None) -> GridPath:
    """D^alpha_{a+} f on the nodes a < t <= b of the window.

    The boundary term is singular at t = a, so the returned path starts one
    node after the window's base point.
    """
    a = _order(alpha)
    w = _window(f, w)
    if w.length < 2:
        raise DomainError("Weyl derivative is undefined at t = a; window too short")
    vals = f.window_values(w)
    _check_finite(vals)
    out = weyl_left_values(vals, f.step, a)
    return GridPath(f.node(w.lo + 1), f.node(w.hi), out[1:])


def weyl_deriv_right(f: GridPath, alpha, w: Optional[Window] = None) -> GridPath:
    """D^alpha_{b-} f on the nodes a <= t < b of the window."""
    a = _order(alpha)
    w = _window(f, w)
    if w.length < 2:
        raise DomainError("Weyl derivative is undefined at t = b; window too short")
    vals = f.window_values(w)
    _check_finite(vals)
    out = weyl_right_values(vals, f.step, a)
    return GridPath(f.node(w.lo), f.node(w.hi - 1), out[:-1])


def ibp_residual(f: GridPath, g: GridPath, alpha, w: Optional[Window] = None) -> float:
    """int I^alpha_{a+}f * g - int f * I^alpha_{b-}g over the window (trapezoid)."""
    f.require_same_grid(g)
    a = _order(alpha)
    w = _window(f, w)
    fv = f.window_values(w)[:, 0]
    gv = g.window_values(w)[:, 0]
    left = frac_integral_values(fv, f.step, a) * gv
    right = fv * frac_integral_right_values(gv, f.step, a)
    return float(trapezoid(left - right, dx=f.step))


def deriv_ibp_residual(f: GridPath, g: GridPath, alpha, w: Optional[Window] = None) -> float:
    """int D^alpha_{a+}f * g - int f * D^alpha_{b-}g over the window (trapezoid).

    Needs f(a) = 0 and g(b) = 0; both derivatives then vanish at their
    singular endpoint, which is where the NaN entries are replaced by zero.
    """
    f.require_same_grid(g)
    a = _order(alpha)
    w = _window(f, w)
    if w.length < 2:
        raise DomainError("window too short for Weyl derivatives")
    fv = f.window_values(w)[:, 0]
    gv = g.window_values(w)[:, 0]
    _check_finite(fv)
    _check_finite(gv)
    if abs(fv[0]) > 1e-12 or abs(gv[-1]) > 1e-12:
        raise DomainError("need f(a) = 0 and g(b) = 0 for the derivative form")
    df = weyl_left_values(fv, f.step, a)
    dg = weyl_right_values(gv, f.step, a)
    df[0] = 0.0
    dg[-1] = 0.0
    return float(trapezoid(df * gv - fv * dg, dx=f.step))
