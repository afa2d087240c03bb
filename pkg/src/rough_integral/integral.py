"""The fractional rough integral

    ∫_a^b f(x) dy = - Σ_i ∫_a^b D̂^α_{a+} f_i(x)(r) D^{1-α}_{b-} y^i_{b-}(r) dr
        + α/Γ(1-α) Σ_{ij} ∫_a^b D^{2α-1}_{a+} ∂_i f_j(x)(r) Λ_r^b(x^i ⊗ y^j) dr

with Λ_r^b the level-two correction over {r < ξ < η < b}. Two evaluations of
Λ are available:

* ``measure``: ∫∫ G(r, ξ, η) d²(x⊗y)(ξ, η), where the area measure gives
  Δx_p ⊗ Δy_q to the grid rectangle (p, q) and the one-cell area to the
  diagonal cell p;
* ``kernel``: ∫∫ K_{r,b}(ξ, η) Γ^{α-ε}(x⊗y)_{ξ,η} dξ dη + B_r, with Γ^{α-ε}
  tabulated on grid pairs and interpolated onto the kernel nodes.

K is the fractional derivative of G(r, ξ, η) - G(r, ξ, b), so the double
integral alone recovers ∫∫ (G(r, ξ, η) - G(r, ξ, b)) d²(x⊗y). The boundary
part B_r = ∫∫ G(r, ξ, b) d²(x⊗y)(ξ, η) only sees the mass of each strip
{ξ} × (ξ, b), i.e. Δx_p ⊗ (y_b - y_{p+1}) plus the one-cell area of p.
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Optional, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.special import gamma

from src.core.exceptions import AdmissibilityError, DomainError, QuadratureError
from src.frac_calc.operators import weyl_left_values
from src.frac_calc.young import left_weighted_integral, right_remainder_derivative
from src.mult_func.functional import MultFunc
from src.mult_func.gamma import GammaParams, gamma_table
from src.path_core.grid import Window
from src.rough_integral.config import IntegralConfig, default_integral_config
from src.rough_integral.derivatives import compensated_weighted_values
from src.rough_integral.kernels import KernelCache, boundary_weights, level_two_weights

if TYPE_CHECKING:
    from src.rde_solver.fields import VectorField

logger = logging.getLogger(__name__)


def measure_lambda_path(mf: MultFunc, w: Window, alpha: float) -> np.ndarray:
    """Λ_r^{hi}(x ⊗ y) in measure form for every node r of the window, shape (n+1, m, d)."""
    w = w.check(mf.n_points)
    n = w.length
    weights = level_two_weights(alpha, n)
    rect = weights.rect[:n, :n]
    tri = weights.tri[:n]
    dx = mf.x.increments()[w.lo : w.hi]
    dy = mf.y.increments()[w.lo : w.hi]
    cells = mf.cell_area[w.lo : w.hi]
    out = np.zeros((n + 1, mf.m, mf.d))
    for r in range(n):
        k = n - r
        out[r] = dx[r:].T @ (rect[:k, :k] @ dy[r:])
        out[r] += 2.0 * np.einsum("p,pij->ij", tri[:k], cells[r:])
    return mf.step ** (2.0 * alpha - 2.0) * out


def boundary_lambda_path(mf: MultFunc, w: Window, alpha: float) -> np.ndarray:
    """B_r = ∫∫ G(r, ξ, hi) d²(x ⊗ y) for every node r of the window, shape (n+1, m, d)."""
    w = w.check(mf.n_points)
    n = w.length
    weights = boundary_weights(alpha, n)
    dx = mf.x.increments()[w.lo : w.hi]
    yv = mf.y.window_values(w)
    strips = np.einsum("pi,pj->pij", dx, yv[-1] - yv[1:])
    cells = mf.cell_area[w.lo : w.hi]
    out = np.zeros((n + 1, mf.m, mf.d))
    for r in range(n):
        k = n - r
        out[r] = np.einsum("p,pij->ij", weights.rect[k - 1, :k], strips[r:])
        out[r] += np.einsum("p,pij->ij", weights.tri[k - 1, :k], cells[r:])
    return mf.step ** (2.0 * alpha - 2.0) * out


def _gamma_interpolator(
    mf: MultFunc, ij: Tuple[int, int], w: Window, cfg: IntegralConfig
) -> RegularGridInterpolator:
    table = gamma_table(mf, ij, GammaParams(cfg.mu, cfg.quad), w.lo, w.hi)
    table = np.nan_to_num(table, nan=0.0)
    times = mf.x.times[w.slice()]
    return RegularGridInterpolator(
        (times, times), table, method="linear", bounds_error=False, fill_value=None
    )


def _kernel_lambda(
    interp: RegularGridInterpolator, s: float, b: float, cache: KernelCache
) -> float:
    nodes = cache.window(s, b)
    values = interp(np.column_stack([nodes.xi, nodes.eta]))
    return float(np.sum(nodes.weight * nodes.values * values))


def lambda_op(
    mf: MultFunc,
    ij: Tuple[int, int],
    a: int,
    b: int,
    cfg: IntegralConfig,
    cache: Optional[KernelCache] = None,
) -> float:
    """Λ_a^b = ∫∫_{a<ξ<η<b} K_{a,b}(ξ,η) Γ^{α-ε}(x⊗y)^{ij}_{ξ,η} dξ dη + B_a for grid indices a < b."""
    if not 0 <= a < b <= mf.n_points:
        raise DomainError(f"lambda_op needs grid indices a < b, got ({a}, {b})")
    w = Window(a, b)
    cache = cache or KernelCache(cfg)
    interp = _gamma_interpolator(mf, ij, w, cfg)
    boundary = boundary_lambda_path(mf, w, cfg.alpha)[0][ij]
    return _kernel_lambda(interp, mf.x.node(a), mf.x.node(b), cache) + float(boundary)


def kernel_lambda_path(
    mf: MultFunc, w: Window, cfg: IntegralConfig, cache: Optional[KernelCache] = None
) -> np.ndarray:
    """Λ_r^{hi} in kernel form for every node r of the window, shape (n+1, m, d)."""
    w = w.check(mf.n_points)
    cache = cache or KernelCache(cfg)
    b = mf.x.node(w.hi)
    out = boundary_lambda_path(mf, w, cfg.alpha)
    for i in range(mf.m):
        for j in range(mf.d):
            interp = _gamma_interpolator(mf, (i, j), w, cfg)
            for k, r in enumerate(range(w.lo, w.hi)):
                out[k, i, j] += _kernel_lambda(interp, mf.x.node(r), b, cache)
    return out


def lambda_value(
    mf: MultFunc, ij: Tuple[int, int], a: int, b: int, cfg: IntegralConfig
) -> float:
    """Λ_a^b by the method the config selects."""
    if cfg.lambda_method == "kernel":
        return lambda_op(mf, ij, a, b, cfg)
    return float(measure_lambda_path(mf, Window(a, b), cfg.alpha)[0][ij])


def lambda_scaling_slope(
    mf: MultFunc,
    ij: Tuple[int, int],
    cfg: IntegralConfig,
    windows: Iterable[Window],
) -> float:
    """Least-squares slope of log|Λ_a^b| against log(b - a)."""
    lengths, values = [], []
    for w in windows:
        value = abs(lambda_value(mf, ij, w.lo, w.hi, cfg))
        if value > 0:
            lengths.append(w.length * mf.step)
            values.append(value)
    if len(values) < 2:
        raise DomainError("need at least two windows with non-zero Λ for a slope")
    slope, _ = np.polyfit(np.log(lengths), np.log(values), 1)
    return float(slope)


@dataclass(frozen=True)
class RoughIntTerms:
    first: np.ndarray
    second: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.first + self.second


def _check_admissible(f: "VectorField", mf: MultFunc, cfg: IntegralConfig) -> None:
    cfg.require_beta(mf.beta)
    lam = getattr(f, "lam", 1.0)
    if lam < cfg.lam:
        raise AdmissibilityError(
            f"vector field is only {lam}-Hölder in f′ but the config assumes lambda={cfg.lam}"
        )


def rough_int_terms(
    f: "VectorField",
    mf: MultFunc,
    w: Optional[Window] = None,
    cfg: Optional[IntegralConfig] = None,
    cache: Optional[KernelCache] = None,
) -> RoughIntTerms:
    cfg = cfg or default_integral_config(mf.beta)
    _check_admissible(f, mf, cfg)
    w = (w or mf.x.full_window()).check(mf.n_points)
    alpha = cfg.alpha
    h = mf.step
    n = w.length

    xv = mf.x.window_values(w)
    yv = mf.y.window_values(w)
    fx = f.eval(xv)
    jac = f.jacobian(xv)

    weighted = compensated_weighted_values(fx, jac, xv, h, alpha)
    dg = right_remainder_derivative(yv, h, 1.0 - alpha)
    first = -left_weighted_integral(np.einsum("nrd,nd->nr", weighted, dg), h, alpha)
    if not np.all(np.isfinite(first)):
        raise QuadratureError("non-finite compensated term", "T1")

    order = 2.0 * alpha - 1.0
    flat = jac.reshape(n + 1, -1)
    dfrac = weyl_left_values(flat, h, order)
    dfrac *= ((h * np.arange(n + 1)) ** order)[:, None]
    dfrac[0] = flat[0] / gamma(1.0 - order)
    dfrac = dfrac.reshape(jac.shape)

    if cfg.lambda_method == "kernel":
        lam = kernel_lambda_path(mf, w, cfg, cache)
    else:
        lam = measure_lambda_path(mf, w, alpha)
    integrand = np.einsum("nrjm,nmj->nr", dfrac, lam)
    second = alpha / gamma(1.0 - alpha) * left_weighted_integral(integrand, h, order)
    if not np.all(np.isfinite(second)):
        raise QuadratureError("non-finite level-two term", "T2")
    return RoughIntTerms(np.asarray(first), np.asarray(second))


def rough_int(
    f: "VectorField",
    mf: MultFunc,
    w: Optional[Window] = None,
    cfg: Optional[IntegralConfig] = None,
    cache: Optional[KernelCache] = None,
) -> np.ndarray:
    """∫ f(x) dy over the window, shape (rows,)."""
    return rough_int_terms(f, mf, w, cfg, cache).total
