"""Vector fields f: R^m -> R^{rows x d} with declared regularity bounds.

A field returns arrays shaped (..., rows, d) for points (..., m); the
Jacobian appends one axis of length m and the second derivative two. For
the differential equation rows == m. Norms of matrix values are Frobenius
norms, and each built-in declares bounds that hold on its box.
"""

import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from src.core.exceptions import (
    AdmissibilityError,
    BoxExitError,
    ConfigurationError,
    DomainError,
)

logger = logging.getLogger(__name__)

ArrayMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FieldBounds:
    """Sup norms of f, f′, f″ and the λ-Hölder seminorms of f′ and f″."""

    sup_f: float
    sup_f1: float
    holder_f1_lambda: float
    sup_f2: float = 0.0
    holder_f2_lambda: float = 0.0
    holder_f_lambda: Optional[float] = None

    def __post_init__(self):
        for name in ("sup_f", "sup_f1", "holder_f1_lambda", "sup_f2", "holder_f2_lambda"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ConfigurationError(f"field bound {name} must be finite and >= 0, got {value}")
        if self.holder_f_lambda is not None and (
            not np.isfinite(self.holder_f_lambda) or self.holder_f_lambda < 0
        ):
            raise ConfigurationError("field bound holder_f_lambda must be finite and >= 0")

    def holder_f(self, lam: float) -> float:
        """‖f‖_λ, or the interpolation bound ‖f′‖^λ (2‖f‖)^{1-λ} when undeclared."""
        if self.holder_f_lambda is not None:
            return self.holder_f_lambda
        return self.sup_f1**lam * (2.0 * self.sup_f) ** (1.0 - lam)

    @property
    def rho(self) -> float:
        """ρ_f = ‖f‖_∞ + ‖f′‖_∞ + ‖f′‖_λ."""
        return self.sup_f + self.sup_f1 + self.holder_f1_lambda

    def rho_hat(self, lam: float) -> float:
        """ρ̂_f, which adds ‖f‖_λ, ‖f″‖_∞ and ‖f″‖_λ to ρ_f."""
        return self.rho + self.holder_f(lam) + self.sup_f2 + self.holder_f2_lambda


@dataclass(frozen=True, eq=False)
class VectorField:
    m: int
    d: int
    func: ArrayMap
    jac: ArrayMap
    bounds: FieldBounds
    hess: Optional[ArrayMap] = None
    rows: Optional[int] = None
    lam: float = 1.0
    box: Optional[Tuple[np.ndarray, np.ndarray]] = None
    name: str = "custom"

    def __post_init__(self):
        if self.m < 1 or self.d < 1:
            raise ConfigurationError(f"field dimensions must be positive, got m={self.m}, d={self.d}")
        if self.rows is None:
            object.__setattr__(self, "rows", self.m)
        if not 0.0 < self.lam <= 1.0:
            raise ConfigurationError(f"field Hölder order lambda must lie in (0, 1], got {self.lam}")
        if self.box is not None:
            lower, upper = (np.asarray(v, dtype=float).reshape(self.m) for v in self.box)
            if np.any(lower >= upper):
                raise ConfigurationError(f"{self.name}: box lower corner must lie below the upper")
            object.__setattr__(self, "box", (lower, upper))

    def _points(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.m:
            raise DomainError(f"{self.name} expects points with last axis {self.m}, got {x.shape}")
        return x

    def _checked(self, out, x: np.ndarray, tail: Tuple[int, ...], what: str) -> np.ndarray:
        out = np.asarray(out, dtype=float)
        expected = x.shape[:-1] + tail
        if out.shape != expected:
            raise DomainError(f"{self.name}.{what} returned shape {out.shape}, expected {expected}")
        return out

    def eval(self, x) -> np.ndarray:
        x = self._points(x)
        return self._checked(self.func(x), x, (self.rows, self.d), "eval")

    def jacobian(self, x) -> np.ndarray:
        x = self._points(x)
        return self._checked(self.jac(x), x, (self.rows, self.d, self.m), "jacobian")

    def second_derivative(self, x) -> np.ndarray:
        if self.hess is None:
            raise DomainError(f"{self.name} declares no second derivative")
        x = self._points(x)
        return self._checked(self.hess(x), x, (self.rows, self.d, self.m, self.m), "second_derivative")

    def in_box(self, x) -> np.ndarray:
        x = self._points(x)
        if self.box is None:
            return np.ones(x.shape[:-1], dtype=bool)
        lower, upper = self.box
        return np.all((x >= lower) & (x <= upper), axis=-1)

    def require_in_box(self, x) -> None:
        inside = self.in_box(x)
        if not np.all(inside):
            first = int(np.argmin(inside.reshape(-1)))
            raise BoxExitError(
                f"solution left the box of field '{self.name}' at node {first}; "
                "declare a larger box"
            )

    def require_lambda(self, beta: float) -> None:
        if self.lam <= 1.0 / beta - 2.0:
            raise AdmissibilityError(
                f"{self.name}: lambda={self.lam} must exceed 1/beta - 2 = {1.0 / beta - 2.0:.4g}"
            )

    @property
    def rho(self) -> float:
        return self.bounds.rho

    @property
    def rho_hat(self) -> float:
        return self.bounds.rho_hat(self.lam)

    def with_box(self, lower, upper) -> "VectorField":
        return replace(self, box=(lower, upper))


def constant_field(value=1.0, m: int = 1, d: int = 1) -> VectorField:
    """f ≡ c, with c broadcast to an (m, d) matrix."""
    c = np.broadcast_to(np.asarray(value, dtype=float), (m, d)).copy()

    def func(x):
        return np.broadcast_to(c, x.shape[:-1] + (m, d)).copy()

    def jac(x):
        return np.zeros(x.shape[:-1] + (m, d, m))

    def hess(x):
        return np.zeros(x.shape[:-1] + (m, d, m, m))

    bounds = FieldBounds(float(np.linalg.norm(c)), 0.0, 0.0, 0.0, 0.0, 0.0)
    return VectorField(m, d, func, jac, bounds, hess=hess, name="constant")


def sine_field(m: int = 1, d: int = 1, scale: float = 1.0) -> VectorField:
    """f(x)_{kk} = scale·sin(x_k) for k < min(m, d), zero elsewhere."""
    k = min(m, d)
    diag = np.arange(k)
    root = scale * np.sqrt(k)

    def func(x):
        out = np.zeros(x.shape[:-1] + (m, d))
        out[..., diag, diag] = scale * np.sin(x[..., :k])
        return out

    def jac(x):
        out = np.zeros(x.shape[:-1] + (m, d, m))
        out[..., diag, diag, diag] = scale * np.cos(x[..., :k])
        return out

    def hess(x):
        out = np.zeros(x.shape[:-1] + (m, d, m, m))
        out[..., diag, diag, diag, diag] = -scale * np.sin(x[..., :k])
        return out

    bounds = FieldBounds(root, root, root, root, root, root)
    return VectorField(m, d, func, jac, bounds, hess=hess, name="sine")


def _rotations(d: int) -> np.ndarray:
    angles = np.pi * np.arange(d) / (2.0 * d)
    c, s = np.cos(angles), np.sin(angles)
    return np.stack([np.stack([c, -s], axis=-1), np.stack([s, c], axis=-1)], axis=-2)


def rotation_field(d: int = 2, scale: float = 1.0) -> VectorField:
    """Planar field whose column j is scale·R_j (-sin x₂, sin x₁), R_j a rotation by jπ/(2d).

    The columns do not commute as vector fields, so the driver's area
    matters for the solution.
    """
    m = 2
    rot = scale * _rotations(d)
    root = scale * np.sqrt(2.0 * d)

    def base(x):
        return np.stack([-np.sin(x[..., 1]), np.sin(x[..., 0])], axis=-1)

    def func(x):
        return np.einsum("jab,...b->...aj", rot, base(x))

    def jac(x):
        grad = np.zeros(x.shape[:-1] + (2, 2))
        grad[..., 0, 1] = -np.cos(x[..., 1])
        grad[..., 1, 0] = np.cos(x[..., 0])
        return np.einsum("jab,...bk->...ajk", rot, grad)

    def hess(x):
        second = np.zeros(x.shape[:-1] + (2, 2, 2))
        second[..., 0, 1, 1] = np.sin(x[..., 1])
        second[..., 1, 0, 0] = -np.sin(x[..., 0])
        return np.einsum("jab,...bkl->...ajkl", rot, second)

    bounds = FieldBounds(root, root, root, root, root, root)
    return VectorField(m, d, func, jac, bounds, hess=hess, name="rotation")


def _bump_profile(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """g(s) = exp(1 - 1/(1-s)) on [0, 1) and its first two derivatives."""
    inside = s < 1.0
    g = np.zeros_like(s)
    g1 = np.zeros_like(s)
    g2 = np.zeros_like(s)
    q = 1.0 / (1.0 - s[inside])
    g[inside] = np.exp(1.0 - q)
    g1[inside] = -g[inside] * q**2
    g2[inside] = g[inside] * (q**4 - 2.0 * q**3)
    return g, g1, g2


def bump_field(
    m: int = 1, d: int = 1, center=0.0, radius: float = 2.0, scale: float = 1.0
) -> VectorField:
    """f(x) = scale·g(|x-c|²/r²)·E with E the all-ones (m, d) matrix; zero outside the ball."""
    c = np.broadcast_to(np.asarray(center, dtype=float), (m,)).copy()
    r2 = radius**2
    ones = np.ones((m, d))

    def parts(x):
        z = x - c
        return z, _bump_profile(np.sum(z**2, axis=-1) / r2)

    def func(x):
        _, (g, _, _) = parts(x)
        return scale * g[..., None, None] * ones

    def jac(x):
        z, (_, g1, _) = parts(x)
        grad = 2.0 * g1[..., None] * z / r2
        return scale * np.einsum("...k,ij->...ijk", grad, ones)

    def hess(x):
        z, (_, g1, g2) = parts(x)
        second = 4.0 * g2[..., None, None] * z[..., :, None] * z[..., None, :] / r2**2
        second = second + 2.0 * g1[..., None, None] * np.eye(m) / r2
        return scale * np.einsum("...kl,ij->...ijkl", second, ones)

    # bounds by a radial scan of the profile
    s = np.linspace(0.0, 1.0, 20001)[:-1]
    g, g1, g2 = _bump_profile(s)
    rho = np.sqrt(s) * radius
    size = scale * np.sqrt(m * d)
    sup_f1 = size * float(np.max(np.abs(2.0 * g1 * rho / r2)))
    sup_f2 = size * float(
        np.max(np.abs(4.0 * g2 * rho**2 / r2**2) + np.abs(2.0 * g1 / r2)) * np.sqrt(m)
    )
    bounds = FieldBounds(size, sup_f1, sup_f2, sup_f2, sup_f2 * 4.0 / radius)
    return VectorField(m, d, func, jac, bounds, hess=hess, name="bump")


def linear_scalar(c: float = 1.0, radius: float = 10.0) -> VectorField:
    """f(x) = c·x in one dimension, with bounds valid on the box [-radius, radius]."""

    def func(x):
        return c * x[..., None]

    def jac(x):
        return np.full(x.shape[:-1] + (1, 1, 1), c)

    def hess(x):
        return np.zeros(x.shape[:-1] + (1, 1, 1, 1))

    bounds = FieldBounds(abs(c) * radius, abs(c), 0.0, 0.0, 0.0, abs(c))
    return VectorField(
        1, 1, func, jac, bounds, hess=hess, box=([-radius], [radius]), name="linear_scalar"
    )


FIELD_REGISTRY: Dict[str, Callable[..., VectorField]] = {
    "constant": constant_field,
    "sine": sine_field,
    "rotation": rotation_field,
    "bump": bump_field,
    "linear_scalar": linear_scalar,
}


def build_field(name: str, **params) -> VectorField:
    try:
        factory = FIELD_REGISTRY[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown vector field '{name}'; choose one of {sorted(FIELD_REGISTRY)}"
        )
    try:
        field = factory(**params)
    except TypeError as e:
        raise ConfigurationError(f"bad parameters for field '{name}': {e}")
    logger.debug(f"built field {name} with {params}")
    return field
