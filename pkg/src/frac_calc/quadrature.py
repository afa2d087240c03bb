"""Quadrature for integrands with algebraic endpoint singularities.

Two schemes are provided:

* product integration on the uniform grid: on every cell the regular factor
  is replaced by its linear interpolant and integrated against the power
  weight u**p. The cell touching the singular point uses the closed-form
  moments; the remaining cells use a fixed Gauss-Legendre rule, which is
  exact to rounding because u**p is analytic there.
* graded-mesh Gauss rules on [lo, hi]: the map w -> lo + (hi - lo) * w**q
  clusters Gauss-Legendre panels at a singular endpoint.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import ceil
from typing import Literal, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import toeplitz

from src.core.exceptions import DomainError

_CELL_GAUSS_POINTS = 10


@dataclass(frozen=True)
class SingularQuadRule:
    scheme: Literal["product_integration", "graded_mesh"] = "graded_mesh"
    cells_per_interval: int = 8
    grading_exponent: float = 4.0
    gauss_points: int = 8

    def __post_init__(self):
        if self.scheme not in ("product_integration", "graded_mesh"):
            raise DomainError(f"unknown quadrature scheme {self.scheme!r}")
        if self.cells_per_interval < 1:
            raise DomainError("cells_per_interval must be >= 1")
        if self.grading_exponent < 1:
            raise DomainError("grading_exponent must be >= 1")
        if self.gauss_points < 1:
            raise DomainError("gauss_points must be >= 1")

    def refined(self, factor: int = 2) -> "SingularQuadRule":
        return SingularQuadRule(
            self.scheme,
            self.cells_per_interval * factor,
            self.grading_exponent,
            self.gauss_points,
        )

    def nodes(
        self, lo: float, hi: float, left: bool = True, right: bool = False
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes and weights on [lo, hi], graded towards the flagged endpoints."""
        return graded_nodes(
            lo,
            hi,
            self.grading_exponent if left else 1.0,
            self.grading_exponent if right else 1.0,
            self.cells_per_interval,
            self.gauss_points,
        )


def grading_for(exponent_margin: float) -> float:
    """Grading exponent for a singularity |u|**(margin - 1)."""
    if exponent_margin <= 0:
        raise DomainError(f"non-integrable singularity (margin {exponent_margin})")
    return float(max(1, ceil(2.0 / exponent_margin)))


@lru_cache(maxsize=64)
def _graded_unit(q: float, panels: int, points: int) -> Tuple[np.ndarray, np.ndarray]:
    g, gw = leggauss(points)
    edges = np.linspace(0.0, 1.0, panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    w = ((a + b) / 2 + (b - a) / 2 * g).ravel()
    ww = ((b - a) / 2 * gw).ravel()
    u = w**q
    du = q * w ** (q - 1) * ww
    u.setflags(write=False)
    du.setflags(write=False)
    return u, du


@lru_cache(maxsize=128)
def graded_unit_pair(
    q_left: float, q_right: float, panels: int, points: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Graded rule on (0, 1) as (x, 1 - x, weights).

    Both x and its complement are formed directly from the graded map, so
    gaps next to a graded endpoint keep full relative precision.
    """
    if q_left == 1.0 and q_right == 1.0:
        u, du = _graded_unit(1.0, panels, points)
        x, comp, w = u, 1.0 - u, du
    elif q_right == 1.0:
        u, du = _graded_unit(q_left, panels, points)
        x, comp, w = u, 1.0 - u, du
    elif q_left == 1.0:
        u, du = _graded_unit(q_right, panels, points)
        x, comp, w = 1.0 - u[::-1], u[::-1], du[::-1]
    else:
        ul, dul = _graded_unit(q_left, panels, points)
        ur, dur = _graded_unit(q_right, panels, points)
        x = np.concatenate([ul / 2, (1.0 - ur / 2)[::-1]])
        comp = np.concatenate([1.0 - ul / 2, (ur / 2)[::-1]])
        w = np.concatenate([dul / 2, (dur / 2)[::-1]])
    x, comp, w = (np.array(v) for v in (x, comp, w))
    for v in (x, comp, w):
        v.setflags(write=False)
    return x, comp, w


def graded_nodes(
    lo: float, hi: float, q_left: float, q_right: float, panels: int, points: int
) -> Tuple[np.ndarray, np.ndarray]:
    length = hi - lo
    if length <= 0:
        raise DomainError(f"empty interval [{lo}, {hi}]")
    if q_left == 1.0 and q_right == 1.0:
        u, du = _graded_unit(1.0, panels, points)
        return lo + length * u, length * du
    if q_right == 1.0:
        u, du = _graded_unit(q_left, panels, points)
        return lo + length * u, length * du
    if q_left == 1.0:
        u, du = _graded_unit(q_right, panels, points)
        return hi - length * u[::-1], length * du[::-1]
    half = length / 2
    ul, dul = _graded_unit(q_left, panels, points)
    ur, dur = _graded_unit(q_right, panels, points)
    x = np.concatenate([lo + half * ul, (hi - half * ur)[::-1]])
    w = np.concatenate([half * dul, (half * dur)[::-1]])
    return x, w


@lru_cache(maxsize=64)
def cell_moments(n: int, p: float) -> Tuple[np.ndarray, np.ndarray]:
    """Linear-interpolation weights of u**p on the unit cells [j, j+1], j < n.

    Returns (near, far) with near[j] = int u**p (j+1-u) du and
    far[j] = int u**p (u-j) du over [j, j+1].
    """
    if p <= -1 and n > 0:
        # the first cell is non-integrable; callers treat it separately
        near0 = far0 = np.nan
    else:
        near0 = 1.0 / ((p + 1) * (p + 2))
        far0 = 1.0 / (p + 2)
    near = np.empty(n)
    far = np.empty(n)
    if n == 0:
        return near, far
    near[0], far[0] = near0, far0
    if n > 1:
        g, gw = leggauss(_CELL_GAUSS_POINTS)
        j = np.arange(1, n)[:, None]
        u = j + 0.5 + 0.5 * g
        kern = u**p * (0.5 * gw)
        far[1:] = np.sum(kern * (u - j), axis=1)
        near[1:] = np.sum(kern * (j + 1 - u), axis=1)
    near.setflags(write=False)
    far.setflags(write=False)
    return near, far


@lru_cache(maxsize=32)
def left_power_matrix(n: int, p: float) -> np.ndarray:
    """Matrix W with (W f)_i = int_0^i (i-s)**p f(s) ds on the unit grid.

    f is linear between integer nodes; row 0 is zero.
    """
    near, far = cell_moments(n + 1, p)
    lower = toeplitz(near[: n + 1], np.zeros(n + 1))
    lower[:, 0] = 0.0
    shifted = toeplitz(np.concatenate([[0.0], far[:n]]), np.zeros(n + 1))
    out = lower + shifted
    out[0, :] = 0.0
    out.setflags(write=False)
    return out


def power_weights(n: int, p: float) -> np.ndarray:
    """Node weights of int_0^n u**p g(u) du for g linear between integer nodes."""
    near, far = cell_moments(n, p)
    w = np.zeros(n + 1)
    w[:-1] += near
    w[1:] += far
    return w
