"""Uniformly sampled paths and index windows."""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from src.core.exceptions import DataFormatError, DomainError


@dataclass(frozen=True)
class HolderExponent:
    """Hölder exponent beta in (0, 1).

    ``rough()`` checks the tighter range (1/3, 1/2) used by the rough-path
    modules.
    """

    beta: float

    def __post_init__(self):
        if not 0.0 < float(self.beta) < 1.0:
            raise DomainError(f"Hölder exponent must lie in (0, 1), got {self.beta}")

    def rough(self) -> "HolderExponent":
        if not 1.0 / 3.0 < self.beta < 0.5:
            raise DomainError(
                f"rough-path exponent must lie in (1/3, 1/2), got {self.beta}"
            )
        return self

    def __float__(self) -> float:
        return float(self.beta)


BetaLike = Union[HolderExponent, float]


def as_beta(beta: BetaLike) -> float:
    if isinstance(beta, HolderExponent):
        return beta.beta
    return HolderExponent(float(beta)).beta


@dataclass(frozen=True)
class Window:
    """Grid-index interval [lo, hi] with lo < hi."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 0 or self.hi <= self.lo:
            raise DomainError(f"invalid window [{self.lo}, {self.hi}]")

    @property
    def length(self) -> int:
        return self.hi - self.lo

    def check(self, n_points: int) -> "Window":
        if self.hi > n_points:
            raise DomainError(
                f"window [{self.lo}, {self.hi}] exceeds grid of {n_points} intervals"
            )
        return self

    def slice(self) -> slice:
        return slice(self.lo, self.hi + 1)


@dataclass(frozen=True, eq=False)
class GridPath:
    """Path sampled on n_points + 1 equispaced nodes of [t0, T]."""

    t0: float
    T: float
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise DataFormatError(f"path values must be 2-D, got shape {values.shape}")
        if values.shape[0] < 2:
            raise DataFormatError("a path needs at least two nodes")
        if not self.T > self.t0:
            raise DomainError(f"T={self.T} must exceed t0={self.t0}")
        if not np.all(np.isfinite(values)):
            raise DataFormatError("path values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, func, n_points: int, t0: float = 0.0, T: float = 1.0):
        """Sample ``func`` on the uniform grid.

        ``func`` maps the time array to shape (n+1,) or (dim, n+1).
        """
        times = np.linspace(t0, T, n_points + 1)
        return cls(t0, T, np.asarray(func(times), dtype=float).T.reshape(n_points + 1, -1))

    @property
    def n_points(self) -> int:
        return self.values.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def step(self) -> float:
        return (self.T - self.t0) / self.n_points

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.step * np.arange(self.n_points + 1)

    def node(self, i: int) -> float:
        return self.t0 + i * self.step

    def full_window(self) -> Window:
        return Window(0, self.n_points)

    def window_values(self, w: Optional[Window] = None) -> np.ndarray:
        w = (w or self.full_window()).check(self.n_points)
        return self.values[w.slice()]

    def component(self, k: int) -> "GridPath":
        return GridPath(self.t0, self.T, self.values[:, k : k + 1])

    def scalar(self) -> np.ndarray:
        if self.dim != 1:
            raise DomainError(f"expected a scalar path, got dimension {self.dim}")
        return self.values[:, 0]

    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=0)

    def with_values(self, values: np.ndarray) -> "GridPath":
        return GridPath(self.t0, self.T, values)

    def restrict(self, w: Window) -> "GridPath":
        w = w.check(self.n_points)
        return GridPath(self.node(w.lo), self.node(w.hi), self.values[w.slice()])

    def reversed(self) -> "GridPath":
        """The path s -> x(t0 + T - s)."""
        return GridPath(self.t0, self.T, self.values[::-1])

    def shift(self, offset) -> "GridPath":
        return self.with_values(self.values + np.asarray(offset, dtype=float))

    def scale(self, c: float) -> "GridPath":
        return self.with_values(c * self.values)

    def difference(self, other: "GridPath") -> "GridPath":
        self.require_same_grid(other)
        return self.with_values(self.values - other.values)

    def same_grid(self, other: "GridPath") -> bool:
        return (
            self.n_points == other.n_points
            and np.isclose(self.t0, other.t0)
            and np.isclose(self.T, other.T)
        )

    def require_same_grid(self, other: "GridPath") -> None:
        if not self.same_grid(other):
            raise DomainError("paths live on different grids")
