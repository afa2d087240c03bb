from dataclasses import dataclass, field, replace
from typing import Literal

from src.core.exceptions import AdmissibilityError, DomainError
from src.frac_calc.quadrature import SingularQuadRule
from src.path_core.grid import BetaLike, HolderExponent, as_beta

LambdaMethod = Literal["measure", "kernel"]


@dataclass(frozen=True)
class IntegralConfig:
    """Parameters (β, α, ε, λ) of the fractional rough integral.

    Admissibility:
        1 - β < α < 2β,   α < (λβ + 1)/2,   0 < ε < α + β - 1.

    ``lambda_method`` picks how the level-two correction Λ is evaluated:
    "measure" integrates G directly against the area increments, "kernel"
    integrates K against Γ^{α-ε} of the area.
    """

    beta: float
    alpha: float
    epsilon: float
    lam: float = 1.0
    quad: SingularQuadRule = field(default_factory=SingularQuadRule)
    kernel_cache_enabled: bool = True
    lambda_method: LambdaMethod = "measure"

    def __post_init__(self):
        object.__setattr__(self, "beta", HolderExponent(as_beta(self.beta)).rough().beta)
        b, a, e, lam = self.beta, self.alpha, self.epsilon, self.lam
        if not 0.0 < lam <= 1.0:
            raise AdmissibilityError(f"lambda must lie in (0, 1], got {lam}")
        if not 1.0 - b < a < 2.0 * b:
            raise AdmissibilityError(
                f"alpha={a} outside (1 - beta, 2 beta) = ({1 - b:.4f}, {2 * b:.4f})"
            )
        if not a < (lam * b + 1.0) / 2.0:
            raise AdmissibilityError(
                f"alpha={a} must be below (lambda beta + 1)/2 = {(lam * b + 1) / 2:.4f}"
            )
        if not 0.0 < e < a + b - 1.0:
            raise AdmissibilityError(
                f"epsilon={e} outside (0, alpha + beta - 1) = (0, {a + b - 1:.4f})"
            )
        if lam <= 1.0 / b - 2.0:
            raise AdmissibilityError(
                f"lambda={lam} must exceed 1/beta - 2 = {1 / b - 2:.4f}"
            )
        if self.lambda_method not in ("measure", "kernel"):
            raise DomainError(f"unknown lambda_method {self.lambda_method!r}")

    @property
    def mu(self) -> float:
        """Order α - ε of the mixed derivatives in K and Γ."""
        return self.alpha - self.epsilon

    def require_beta(self, beta: BetaLike) -> "IntegralConfig":
        """Check that a functional of regularity ``beta`` is covered by this config."""
        beta = as_beta(beta)
        if beta + 1e-12 < self.beta:
            raise AdmissibilityError(
                f"config built for beta={self.beta} but the functional has beta={beta}"
            )
        return self

    def with_orders(self, alpha: float, epsilon: float) -> "IntegralConfig":
        return replace(self, alpha=alpha, epsilon=epsilon)


def default_integral_config(beta: BetaLike = 0.4, **overrides) -> IntegralConfig:
    """Admissible defaults: α = 0.65, ε = 0.02 at β = 0.4."""
    params = {"alpha": 0.65, "epsilon": 0.02, "lam": 1.0}
    params.update(overrides)
    return IntegralConfig(beta=as_beta(beta), **params)
