"""The mixed fractional derivative Γ^μ applied to an area component.

For ξ < η and L = η - ξ:

    Γ^μ ψ(ξ,η) = 1/Γ(μ)² { L^{2μ-2} ψ(ξ,η)
        + (1-μ) ∫_ξ^η [L^{μ-1} ψ(ξ,η) - (η-ξ')^{μ-1} ψ(ξ',η)] (ξ'-ξ)^{μ-2} dξ'
        + (1-μ)² ∫∫_{ξ<ξ'<η'<η} [ψ(ξ,η) - ψ(ξ,η') - ψ(ξ',η) + ψ(ξ',η')]
                                  (ξ'-ξ)^{μ-2} (η-η')^{μ-2} dη' dξ'
        + (1-μ) ∫_ξ^η [ψ(ξ,η) - ψ(ξ,η')] (η-η')^{μ-2} (η'-ξ)^{μ-1} dη' }

ψ is only known on grid nodes, so every integral is a product rule on the
node values. For ψ(ξ,η) = (η-ξ)²/2 the value is L^{2μ}/Γ(2μ+1).
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import gamma

from src.core.exceptions import DomainError
from src.frac_calc.quadrature import SingularQuadRule, cell_moments
from src.mult_func.functional import MultFunc


@dataclass(frozen=True)
class GammaParams:
    alpha_eff: float
    quad: SingularQuadRule = field(default_factory=lambda: SingularQuadRule("product_integration"))

    def __post_init__(self):
        if not 0.5 < self.alpha_eff < 1.0:
            raise DomainError(f"alpha_eff must lie in (1/2, 1), got {self.alpha_eff}")


@lru_cache(maxsize=256)
def origin_weights(n: int, mu: float) -> np.ndarray:
    """Unit-grid node weights of int_0^n u**(mu-2) g(u) du for g with g(0) = 0.

    The first cell uses g(u) ≈ g(1) u; later cells interpolate linearly.
    """
    w = np.zeros(n + 1)
    if n == 0:
        return w
    w[1] += 1.0 / mu
    if n > 1:
        near, far = cell_moments(n, mu - 2.0)
        w[1:n] += near[1:n]
        w[2 : n + 1] += far[1:n]
    w.setflags(write=False)
    return w


def component_table(mf: MultFunc, ij: Tuple[int, int], lo: int, hi: int) -> np.ndarray:
    """ψ on the node pairs of [lo, hi] as a dense matrix (zero below the diagonal)."""
    i, j = ij
    idx = np.arange(lo, hi + 1)
    a, b = np.meshgrid(idx, idx, indexing="ij")
    upper = a <= b
    table = np.zeros(a.shape)
    table[upper] = mf.area_pairs(a[upper], b[upper])[:, i, j]
    return table


def gamma_from_table(psi: np.ndarray, p: int, q: int, h: float, mu: float) -> float:
    """Γ^μ ψ(t_p, t_q) for a node table ψ with psi[k, l] = ψ(t_k, t_l)."""
    n = q - p
    L = n * h
    base = psi[p, q]
    k = np.arange(n + 1)

    term1 = L ** (2 * mu - 2) * base

    # ξ'-integral; the limit (η-ξ')^{μ-1} ψ(ξ',η) -> 0 fills the node ξ' = η
    dist = (n - k[:-1]) * h
    g2 = np.full(n + 1, L ** (mu - 1) * base)
    g2[:-1] -= dist ** (mu - 1) * psi[p + k[:-1], q]
    term2 = (1 - mu) * h ** (mu - 1) * (origin_weights(n, mu) @ g2)

    # double difference over ξ' = ξ + a h, η' = η - b h with a + b <= n
    a, b = np.meshgrid(k[1:n], k[1:n], indexing="ij")
    inside = a + b <= n
    term3 = 0.0
    if inside.any():
        aa, bb = a[inside], b[inside]
        numer = base - psi[p, q - bb] - psi[p + aa, q] + psi[p + aa, q - bb]
        w = origin_weights(n, mu)
        weight = w[aa] * w[bb] * np.where(aa + bb == n, 0.5, 1.0)
        term3 = (1 - mu) ** 2 * h ** (2 * mu - 2) * np.sum(weight * numer)

    # η'-integral; the cell at η' = ξ carries the (η'-ξ)^{μ-1} singularity
    term4 = 0.0
    if n > 1:
        j = np.arange(n)
        g4 = (base - psi[p, q - j]) * ((n - j) * h) ** (mu - 1)
        term4 += h ** (mu - 1) * (origin_weights(n - 1, mu) @ g4)
    edge = psi[p, p + 1]
    term4 += (L - h / 2) ** (mu - 2) * (base * h**mu / mu - edge * h**mu / (mu + 1))
    term4 *= 1 - mu

    return float((term1 + term2 + term3 + term4) / gamma(mu) ** 2)


def gamma_op(
    mf: MultFunc, ij: Tuple[int, int], gp: GammaParams, xi: int, eta: int
) -> float:
    if not 0 <= xi < eta <= mf.n_points:
        raise DomainError(f"gamma_op needs xi < eta within the grid, got ({xi}, {eta})")
    psi = component_table(mf, ij, xi, eta)
    return gamma_from_table(psi, 0, eta - xi, mf.step, gp.alpha_eff)


def gamma_table(mf: MultFunc, ij: Tuple[int, int], gp: GammaParams, lo: int, hi: int) -> np.ndarray:
    """Γ^μ ψ for every node pair lo <= p < q <= hi (NaN elsewhere)."""
    psi = component_table(mf, ij, lo, hi)
    n = hi - lo
    out = np.full((n + 1, n + 1), np.nan)
    for p in range(n):
        for q in range(p + 1, n + 1):
            out[p, q] = gamma_from_table(psi, p, q, mf.step, gp.alpha_eff)
    return out
