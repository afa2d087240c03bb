"""Kernels of the level-two correction.

G(θ, ξ, η) = (ξ-θ)^{α-1} (η-ξ)^{α-1} φ((ξ-θ)/(η-ξ)) only depends on the gaps
u = ξ - θ and v = η - ξ. The ``*_from_gaps`` helpers take the gaps directly so
that points next to a singular endpoint keep their relative precision.

K_{s,b}(ξ, η) is the mixed Marchaud derivative of order μ = α - ε, left-sided
in ξ from s and right-sided in η from b, of G_{b-}(s, ξ, η) = G(s, ξ, η) -
G(s, ξ, b). Expanding both derivatives gives

    K = Γ(1-μ)^{-2} (A1 + μ A2 + μ A3 + μ² A4)

    A1 = (G(ξ,η) - G(ξ,b)) (b-η)^{-μ} (ξ-s)^{-μ}
    A2 = (ξ-s)^{-μ} ∫_η^b (G(ξ,η) - G(ξ,η')) (η'-η)^{-μ-1} dη'
    A3 = (b-η)^{-μ} ∫_s^ξ (G(ξ,η) - G(ξ,b) - G(ξ',η) + G(ξ',b)) (ξ-ξ')^{-μ-1} dξ'
    A4 = ∫_s^ξ ∫_η^b (G(ξ,η) - G(ξ,η') - G(ξ',η) + G(ξ',η'))
                      (η'-η)^{-μ-1} (ξ-ξ')^{-μ-1} dη' dξ'

with G(·,·) short for G(s,·,·). The defining minus sign and the phase of the
right-sided derivative cancel, so K carries a plus sign in real arithmetic.
Differences of nearly coincident points switch to the first-order Taylor
model built from ∂G/∂ξ, ∂G/∂η and ∂²G/∂ξ∂η.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gamma

from src.core.exceptions import DomainError, QuadratureError
from src.frac_calc.quadrature import graded_unit_pair, grading_for
from src.rough_integral.config import IntegralConfig
from src.rough_integral.phi import check_alpha, phi_derivative, phi_table

logger = logging.getLogger(__name__)

# gaps below this fraction of the local scale use the Taylor model
_TAYLOR_GAP = 1e-4
_MAX_GRADING = 60.0
_CHUNK = 128


def _phi_k(z: np.ndarray, alpha: float, k: int, use_table: bool) -> np.ndarray:
    if use_table:
        return phi_table(alpha)(z, k)
    return phi_derivative(z, alpha, k)


class GDerivatives(NamedTuple):
    d_xi: np.ndarray
    d_eta: np.ndarray
    d_xi_eta: np.ndarray


def aux_functions(z, alpha: float, use_table: bool = False) -> Tuple[np.ndarray, ...]:
    """(χ, γ, ψ) with

    χ = (α-1)φ - zφ′,
    γ = (1-α)φ + (1+z)φ′,
    ψ = ((α-1)² - (α-1)(α-2)z)φ - (z + 2(2-α)z²)φ′ - z²(1+z)φ″.
    """
    alpha = check_alpha(alpha)
    z = np.asarray(z, dtype=float)
    f0, f1, f2 = (_phi_k(z, alpha, k, use_table) for k in range(3))
    chi = (alpha - 1) * f0 - z * f1
    gam = (1 - alpha) * f0 + (1 + z) * f1
    psi = (
        ((alpha - 1) ** 2 - (alpha - 1) * (alpha - 2) * z) * f0
        - (z + 2 * (2 - alpha) * z**2) * f1
        - z**2 * (1 + z) * f2
    )
    return chi, gam, psi


def g_from_gaps(u, v, alpha: float, use_table: bool = True) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u ** (alpha - 1) * v ** (alpha - 1) * _phi_k(u / v, alpha, 0, use_table)


def g_derivatives_from_gaps(u, v, alpha: float, use_table: bool = True) -> GDerivatives:
    """∂G/∂ξ, ∂G/∂η and ∂²G/∂ξ∂η at gaps (u, v)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    z = u / v
    chi, gam, psi = aux_functions(z, alpha, use_table)
    f0 = _phi_k(z, alpha, 0, use_table)
    ua = u ** (alpha - 1)
    va = v ** (alpha - 1)
    d_eta = ua * va / v * chi
    d_xi = (alpha - 1) * ua / u * va * f0 + ua * va / v * gam
    d_xi_eta = ua / u * va / v * psi
    return GDerivatives(d_xi, d_eta, d_xi_eta)


def _ordered_gaps(theta, xi, eta) -> Tuple[np.ndarray, np.ndarray]:
    theta, xi, eta = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (theta, xi, eta))
    )
    if not (np.all(theta < xi) and np.all(xi < eta)):
        raise DomainError("kernel arguments must satisfy theta < xi < eta")
    return xi - theta, eta - xi


def kernel_G(theta, xi, eta, alpha: float, use_table: bool = False):
    u, v = _ordered_gaps(theta, xi, eta)
    out = g_from_gaps(u, v, check_alpha(alpha), use_table)
    return out if out.ndim else float(out)


def kernel_G_derivatives(theta, xi, eta, alpha: float, use_table: bool = False) -> GDerivatives:
    u, v = _ordered_gaps(theta, xi, eta)
    return g_derivatives_from_gaps(u, v, check_alpha(alpha), use_table)


@dataclass(frozen=True)
class KernelRules:
    """Graded reference rules shared by every K evaluation for one (α, μ)."""

    alpha: float
    mu: float
    panels: int
    points: int

    @classmethod
    def from_config(cls, cfg: IntegralConfig, density: int = 1) -> "KernelRules":
        panels = max(2, cfg.quad.cells_per_interval // 4) * density
        return cls(cfg.alpha, cfg.mu, panels, cfg.quad.gauss_points)

    def grading(self, margin: float) -> float:
        return min(grading_for(margin), _MAX_GRADING)

    def unit(self, left_margin: Optional[float], right_margin: Optional[float]):
        ql = 1.0 if left_margin is None else self.grading(left_margin)
        qr = 1.0 if right_margin is None else self.grading(right_margin)
        return graded_unit_pair(ql, qr, self.panels, self.points)

    @property
    def tau(self):
        """η' = η + (b-η)τ; the difference quotient leaves (η'-η)^{-μ}."""
        return self.unit(1.0 - self.mu, None)

    @property
    def sigma(self):
        """ξ' = s + (ξ-s)σ; G(s,ξ',·) ~ σ^{α-1} at 0 and (ξ-ξ')^{-μ} at 1."""
        return self.unit(self.alpha, 1.0 - self.mu)

    @property
    def outer_u(self):
        """(ξ-s)/(b-s); K ~ (ξ-s)^{ε-1} near s."""
        return self.unit(self.alpha - self.mu, 1.0 - self.mu)

    @property
    def outer_t(self):
        """(η-ξ)/(b-ξ); K ~ (η-ξ)^{α-2μ} near the diagonal and (b-η)^{-μ} near b."""
        return self.unit(1.0 - self.alpha + 2.0 * (self.alpha - self.mu), 1.0 - self.mu)


def _check_term(values: np.ndarray, term: str) -> None:
    if not np.all(np.isfinite(values)):
        raise QuadratureError("non-finite kernel quadrature", term)


def kernel_from_gaps(u, v, c, rules: KernelRules) -> np.ndarray:
    """K at points given by the gaps u = ξ-s, v = η-ξ, c = b-η."""
    u, v, c = (np.atleast_1d(np.asarray(a, dtype=float)).ravel() for a in (u, v, c))
    out = np.empty(u.shape)
    for start in range(0, len(u), _CHUNK):
        sl = slice(start, start + _CHUNK)
        out[sl] = _kernel_chunk(u[sl], v[sl], c[sl], rules)
    return out


def _kernel_chunk(u: np.ndarray, v: np.ndarray, c: np.ndarray, rules: KernelRules) -> np.ndarray:
    a, mu = rules.alpha, rules.mu
    tau, _, tau_w = rules.tau
    sig, sig_c, sig_w = rules.sigma

    def G(uu, vv):
        return g_from_gaps(uu, vv, a)

    at_eta = g_derivatives_from_gaps(u, v, a)
    at_b = g_derivatives_from_gaps(u, v + c, a)
    g0 = G(u, v)
    base = g0 - G(u, v + c)

    a1 = base * c ** (-mu) * u ** (-mu)
    _check_term(a1, "A1")

    # A2 over d = η' - η
    d = c[:, None] * tau
    g_eta_p = G(u[:, None], v[:, None] + d)
    diff2 = g0[:, None] - g_eta_p
    near_d = d < _TAYLOR_GAP * v[:, None]
    diff2 = np.where(near_d, -at_eta.d_eta[:, None] * d, diff2)
    a2 = u ** (-mu) * np.sum((c[:, None] * tau_w) * diff2 * d ** (-mu - 1), axis=1)
    _check_term(a2, "A2")

    # A3 over e = ξ - ξ'
    up = u[:, None] * sig
    e = u[:, None] * sig_c
    g_xip_eta = G(up, v[:, None] + e)
    numer3 = base[:, None] - (g_xip_eta - G(up, (v + c)[:, None] + e))
    near_e = e < _TAYLOR_GAP * np.minimum(u, v)[:, None]
    numer3 = np.where(near_e, e * (at_eta.d_xi - at_b.d_xi)[:, None], numer3)
    a3 = c ** (-mu) * np.sum((u[:, None] * sig_w) * numer3 * e ** (-mu - 1), axis=1)
    _check_term(a3, "A3")

    # A4 over (e, d)
    E = e[:, :, None]
    D = d[:, None, :]
    g_cross = G(up[:, :, None], v[:, None, None] + E + D)
    numer4 = g0[:, None, None] - g_eta_p[:, None, :] - g_xip_eta[:, :, None] + g_cross
    small_e = near_e[:, :, None]
    small_d = near_d[:, None, :]
    if small_e.any():
        dxi_eta_p = g_derivatives_from_gaps(u[:, None], v[:, None] + d, a).d_xi
        only_e = E * (at_eta.d_xi[:, None, None] - dxi_eta_p[:, None, :])
        numer4 = np.where(small_e & ~small_d, only_e, numer4)
    if small_d.any():
        deta_xip = g_derivatives_from_gaps(up, v[:, None] + e, a).d_eta
        only_d = -D * (at_eta.d_eta[:, None, None] - deta_xip[:, :, None])
        numer4 = np.where(small_d & ~small_e, only_d, numer4)
    both = -E * D * at_eta.d_xi_eta[:, None, None]
    numer4 = np.where(small_e & small_d, both, numer4)
    weight4 = (
        (u[:, None] * sig_w * e ** (-mu - 1))[:, :, None]
        * (c[:, None] * tau_w * d ** (-mu - 1))[:, None, :]
    )
    a4 = np.sum(weight4 * numer4, axis=(1, 2))
    _check_term(a4, "A4")

    return (a1 + mu * a2 + mu * a3 + mu**2 * a4) / gamma(1.0 - mu) ** 2


def kernel_K(s: float, b: float, xi, eta, cfg: IntegralConfig, density: int = 1):
    s_, xi_, eta_, b_ = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (s, xi, eta, b))
    )
    if not (np.all(s_ < xi_) and np.all(xi_ < eta_) and np.all(eta_ < b_)):
        raise DomainError("kernel_K needs s < xi < eta < b")
    values = kernel_from_gaps(
        xi_ - s_, eta_ - xi_, b_ - eta_, KernelRules.from_config(cfg, density)
    ).reshape(xi_.shape)
    return values if values.ndim else float(values)


@dataclass(frozen=True)
class KernelNodes:
    """Simplex quadrature nodes of one window with K evaluated on them."""

    xi: np.ndarray
    eta: np.ndarray
    weight: np.ndarray
    values: np.ndarray


def _unit_simplex(rules: KernelRules) -> Tuple[np.ndarray, ...]:
    """Gaps (u, v, c) and weights of the outer rule on {0 < ξ < η < 1}."""
    x, xc, xw = rules.outer_u
    t, tc, tw = rules.outer_t
    u = np.repeat(x, len(t))
    rest = np.repeat(xc, len(t))
    v = rest * np.tile(t, len(x))
    c = rest * np.tile(tc, len(x))
    w = np.repeat(xw, len(t)) * rest * np.tile(tw, len(x))
    return u, v, c, w


class KernelCache:
    """K_{s,b} on the outer simplex nodes, one entry per window (s, b).

    K is homogeneous of degree 2α - 2 - 2μ under dilations about s, so each
    window is a rescaled copy of the unit one. Entries are written once; a
    repeated insertion of the same key stores the same arrays.
    """

    def __init__(self, cfg: IntegralConfig, density: int = 1):
        self.cfg = cfg
        self.rules = KernelRules.from_config(cfg, density)
        self._unit: Optional[Tuple[np.ndarray, ...]] = None
        self._windows: Dict[Tuple[float, float], KernelNodes] = {}

    @property
    def degree(self) -> float:
        return 2.0 * self.cfg.alpha - 2.0 - 2.0 * self.cfg.mu

    def unit(self) -> Tuple[np.ndarray, ...]:
        if self._unit is None:
            u, v, c, w = _unit_simplex(self.rules)
            values = kernel_from_gaps(u, v, c, self.rules)
            logger.debug(f"kernel cache: {len(u)} unit nodes for mu={self.rules.mu:.4f}")
            self._unit = (u, v, c, w, values)
        return self._unit

    def window(self, s: float, b: float) -> KernelNodes:
        key = (float(s), float(b))
        hit = self._windows.get(key)
        if hit is not None:
            return hit
        if not b > s:
            raise DomainError(f"empty kernel window [{s}, {b}]")
        L = b - s
        u, v, c, w, values = self.unit()
        nodes = KernelNodes(
            xi=s + L * u,
            eta=s + L * (u + v),
            weight=L**2 * w,
            values=L**self.degree * values,
        )
        if self.cfg.kernel_cache_enabled:
            return self._windows.setdefault(key, nodes)
        return nodes

    def __len__(self) -> int:
        return len(self._windows)


def kernel_abs_integral(s: float, b: float, cfg: IntegralConfig, density: int = 1) -> float:
    """∫∫_{s<ξ<η<b} |K_{s,b}(ξ, η)| dξ dη on the graded simplex rule."""
    nodes = KernelCache(cfg, density).window(s, b)
    return float(np.sum(nodes.weight * np.abs(nodes.values)))


@dataclass(frozen=True, eq=False)
class LevelTwoWeights:
    """Unit-grid integrals of G(0, ·, ·) over grid rectangles and triangles.

        rect[P, Q] = ∫_P^{P+1} ∫_Q^{Q+1} G(0, u, v) dv du     (Q > P, zero otherwise)
        tri[P]     = ∫∫_{P < u < v < P+1} G(0, u, v) dv du

    Rectangles touching u = 0 or the diagonal use graded tensor rules, the
    others a fixed Gauss-Legendre product rule.
    """

    alpha: float
    size: int
    rect: np.ndarray
    tri: np.ndarray

    @classmethod
    def build(cls, alpha: float, size: int, panels: int = 4, points: int = 8) -> "LevelTwoWeights":
        alpha = check_alpha(alpha)
        n = size
        rect = np.zeros((n, n))
        tri = np.zeros(n)
        qa = min(grading_for(alpha), _MAX_GRADING)

        def G(uu, vv):
            return g_from_gaps(uu, vv, alpha)

        # far rectangles
        g, gw = leggauss(6)
        g = 0.5 + 0.5 * g
        gw = 0.5 * gw
        for P in range(1, n - 2):
            Q = np.arange(P + 2, n)
            uu = (P + g)[None, :, None]
            vv = (Q[:, None] + g[None, :])[:, None, :] - uu
            vals = G(uu, vv)
            rect[P, Q] = np.einsum("qab,a,b->q", vals, gw, gw)

        # first row, graded at u = 0 and at the corner (1, 1)
        x, xc, xw = graded_unit_pair(qa, 2.0, panels, points)
        y, _, yw = graded_unit_pair(2.0, 1.0, panels, points)
        if n > 1:
            Q = np.arange(1, n)
            gap = (Q - 1)[:, None, None] + xc[None, :, None] + y[None, None, :]
            vals = G(x[None, :, None], gap)
            rect[0, Q] = np.einsum("qab,a,b->q", vals, xw, yw)

        # rectangles on the first off-diagonal, graded at the corner (P+1, P+1)
        xr, xrc, xrw = graded_unit_pair(1.0, 2.0, panels, points)
        if n > 2:
            P = np.arange(1, n - 1)
            uu = P[:, None, None] + xr[None, :, None]
            gap = xrc[None, :, None] + y[None, None, :]
            vals = G(uu, np.broadcast_to(gap, uu.shape[:1] + gap.shape[1:]))
            rect[P, P + 1] = np.einsum("pab,a,b->p", vals, xrw, yw)

        # triangles: v = u + (P + 1 - u) s
        qt = min(grading_for(2 * alpha - 1), _MAX_GRADING)
        s, _, sw = graded_unit_pair(qa, 1.0, panels, points)
        x0, x0c, x0w = graded_unit_pair(qt, 1.0, panels, points)
        vals = G(x0[:, None], x0c[:, None] * s[None, :])
        tri[0] = np.einsum("ab,a,b->", vals * x0c[:, None], x0w, sw)
        if n > 1:
            P = np.arange(1, n)
            uu = P[:, None, None] + g[None, :, None]
            rest = (1.0 - g)[None, :, None]
            vals = G(uu, np.broadcast_to(rest * s[None, None, :], uu.shape[:1] + (len(g), len(s))))
            tri[P] = np.einsum("pab,a,b->p", vals * rest, gw, sw)

        if not (np.all(np.isfinite(rect)) and np.all(np.isfinite(tri))):
            raise QuadratureError("non-finite level-two weights", "T2")
        rect.setflags(write=False)
        tri.setflags(write=False)
        logger.debug(f"level-two weights built for alpha={alpha}, size={n}")
        return cls(alpha, n, rect, tri)


@lru_cache(maxsize=8)
def _level_two_weights(alpha: float, size: int) -> LevelTwoWeights:
    return LevelTwoWeights.build(alpha, size)


def level_two_weights(alpha: float, n: int) -> LevelTwoWeights:
    """Cached weights covering at least n cells (sizes are powers of two)."""
    size = max(16, 1 << max(0, int(n - 1).bit_length()))
    return _level_two_weights(float(alpha), size)


@dataclass(frozen=True, eq=False)
class BoundaryWeights:
    """Unit-grid integrals of G(0, ·, K) over the cells of a window of K cells.

        rect[K-1, P] = ∫_P^{P+1} G(0, s, K) ds
        tri[K-1, P]  = 2 ∫_P^{P+1} (P + 1 - s) G(0, s, K) ds     (P < K, zero otherwise)

    ``rect`` spreads a cell's mass uniformly in ξ, ``tri`` uses the ξ-marginal
    of the uniform density on the diagonal triangle, matching the two kinds of
    mass in LevelTwoWeights.
    """

    alpha: float
    size: int
    rect: np.ndarray
    tri: np.ndarray

    @classmethod
    def build(cls, alpha: float, size: int, panels: int = 4, points: int = 8) -> "BoundaryWeights":
        alpha = check_alpha(alpha)
        n = size
        rect = np.zeros((n, n))
        tri = np.zeros((n, n))
        qa = min(grading_for(alpha), _MAX_GRADING)
        qt = min(grading_for(2 * alpha - 1), _MAX_GRADING)

        def G(ss, vv):
            return g_from_gaps(ss, vv, alpha)

        # a single cell, graded at both ends
        x, comp, xw = graded_unit_pair(qa, qt, panels, points)
        vals = G(x, comp)
        rect[0, 0] = np.dot(xw, vals)
        tri[0, 0] = 2.0 * np.dot(xw, comp * vals)

        first, first_c, first_w = graded_unit_pair(qa, 1.0, panels, points)
        last, last_c, last_w = graded_unit_pair(1.0, qt, panels, points)
        g, gw = leggauss(points)
        g = 0.5 + 0.5 * g
        gw = 0.5 * gw
        for K in range(2, n + 1):
            vals = G(first, K - first)
            rect[K - 1, 0] = np.dot(first_w, vals)
            tri[K - 1, 0] = 2.0 * np.dot(first_w, first_c * vals)
            vals = G(K - 1 + last, last_c)
            rect[K - 1, K - 1] = np.dot(last_w, vals)
            tri[K - 1, K - 1] = 2.0 * np.dot(last_w, last_c * vals)
            if K > 2:
                P = np.arange(1, K - 1)[:, None]
                vals = G(P + g[None, :], (K - P) - g[None, :])
                rect[K - 1, 1 : K - 1] = vals @ gw
                tri[K - 1, 1 : K - 1] = 2.0 * (vals * (1.0 - g)[None, :]) @ gw

        if not (np.all(np.isfinite(rect)) and np.all(np.isfinite(tri))):
            raise QuadratureError("non-finite boundary weights", "T2")
        rect.setflags(write=False)
        tri.setflags(write=False)
        logger.debug(f"boundary weights built for alpha={alpha}, size={n}")
        return cls(alpha, n, rect, tri)


@lru_cache(maxsize=8)
def _boundary_weights(alpha: float, size: int) -> BoundaryWeights:
    return BoundaryWeights.build(alpha, size)


def boundary_weights(alpha: float, n: int) -> BoundaryWeights:
    """Cached boundary weights covering windows of up to n cells."""
    size = max(16, 1 << max(0, int(n - 1).bit_length()))
    return _boundary_weights(float(alpha), size)
