"""Multiplicative functionals (x, y, x⊗y) on a uniform grid.

The area of a grid pair is determined by the one-cell areas through the
Chen relation

    area(s, t) = area(s, u) + area(u, t) + (x_u - x_s) ⊗ (y_t - y_u),

which gives area(i, j) = S(j) - S(i) - x_i ⊗ (y_j - y_i) with the running
sum S(j) = sum_{k<j} x_k ⊗ (y_{k+1} - y_k) + cell_area_k. A functional can
also be built from an explicit (possibly non-multiplicative) table, which is
what loaders and defect checks work with.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.core.config import get_settings
from src.core.exceptions import ChenViolationError, DataFormatError, DomainError
from src.path_core.grid import BetaLike, GridPath, Window, as_beta
from src.path_core.norms import holder_norm, lagged_sup, resample

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MultFunc:
    x: GridPath
    y: GridPath
    beta: float
    cell_area: np.ndarray
    table: Optional[np.ndarray] = None
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "beta", as_beta(self.beta))
        self.x.require_same_grid(self.y)
        n, m, d = self.x.n_points, self.x.dim, self.y.dim
        cells = np.array(self.cell_area, dtype=float).reshape(n, m, d)
        if not np.all(np.isfinite(cells)):
            raise DataFormatError("cell areas must be finite")
        cells.setflags(write=False)
        object.__setattr__(self, "cell_area", cells)
        if self.table is not None:
            table = np.array(self.table, dtype=float)
            if table.shape != (n + 1, n + 1, m, d):
                raise DataFormatError(f"area table has shape {table.shape}")
            table.setflags(write=False)
            object.__setattr__(self, "table", table)

        running = np.einsum("ki,kj->kij", self.x.values[:-1], self.y.increments())
        cumulative = np.zeros((n + 1, m, d))
        np.cumsum(running + cells, axis=0, out=cumulative[1:])
        cumulative.setflags(write=False)
        object.__setattr__(self, "_cumulative", cumulative)

    @classmethod
    def from_cell_areas(
        cls,
        x: GridPath,
        y: GridPath,
        cell_area: np.ndarray,
        beta: BetaLike,
        provenance: Optional[Dict[str, Any]] = None,
    ) -> "MultFunc":
        return cls(x, y, beta, cell_area, provenance=dict(provenance or {}))

    @classmethod
    def from_table(
        cls, x: GridPath, y: GridPath, table: np.ndarray, beta: BetaLike
    ) -> "MultFunc":
        """Wrap an explicit area table; the one-cell areas are read off it."""
        table = np.asarray(table, dtype=float)
        idx = np.arange(x.n_points)
        return cls(x, y, beta, table[idx, idx + 1], table=table)

    @property
    def n_points(self) -> int:
        return self.x.n_points

    @property
    def m(self) -> int:
        return self.x.dim

    @property
    def d(self) -> int:
        return self.y.dim

    @property
    def step(self) -> float:
        return self.x.step

    def area_pairs(self, i, j) -> np.ndarray:
        """Areas for index arrays i <= j, shape broadcast(i, j) + (m, d)."""
        i = np.asarray(i)
        j = np.asarray(j)
        if self.table is not None:
            return self.table[i, j]
        s = self._cumulative
        dy = self.y.values[j] - self.y.values[i]
        return s[j] - s[i] - self.x.values[i][..., :, None] * dy[..., None, :]

    def area_at(self, i: int, j: int) -> np.ndarray:
        if not 0 <= i <= j <= self.n_points:
            raise DomainError(f"area index pair ({i}, {j}) out of order or range")
        return self.area_pairs(i, j)

    @cached_property
    def area(self) -> np.ndarray:
        """Dense (n+1, n+1, m, d) table, zero below the diagonal."""
        if self.table is not None:
            return self.table
        n = self.n_points
        i, j = np.triu_indices(n + 1)
        dense = np.zeros((n + 1, n + 1, self.m, self.d))
        dense[i, j] = self.area_pairs(i, j)
        dense.setflags(write=False)
        return dense

    def component(self, i: int, j: int) -> "MultFunc":
        """Scalar functional (x^i, y^j, (x⊗y)^{ij})."""
        table = None if self.table is None else self.table[:, :, i : i + 1, j : j + 1]
        return MultFunc(
            self.x.component(i),
            self.y.component(j),
            self.beta,
            self.cell_area[:, i : i + 1, j : j + 1],
            table=table,
            provenance=self.provenance,
        )

    def restrict(self, w: Window) -> "MultFunc":
        w = w.check(self.n_points)
        table = None
        if self.table is not None:
            table = self.table[w.slice(), w.slice()]
        return MultFunc(
            self.x.restrict(w),
            self.y.restrict(w),
            self.beta,
            self.cell_area[w.lo : w.hi],
            table=table,
            provenance=self.provenance,
        )

    def resample(self, factor: int) -> "MultFunc":
        """Chen-consistent refinement with linearly split increments.

        Each sub-cell receives an equal share of the cell area left over after
        the cross terms between sub-increments.
        """
        if factor == 1:
            return self
        k = factor
        dx = self.x.increments() / k
        dy = self.y.increments() / k
        cross = 0.5 * k * (k - 1) * np.einsum("ci,cj->cij", dx, dy)
        share = (self.cell_area - cross) / k
        fine = np.repeat(share, k, axis=0)
        return MultFunc(
            resample(self.x, k),
            resample(self.y, k),
            self.beta,
            fine,
            provenance={**self.provenance, "resampled_by": k},
        )

    def with_beta(self, beta: BetaLike) -> "MultFunc":
        return MultFunc(
            self.x, self.y, beta, self.cell_area, table=self.table, provenance=self.provenance
        )


def area_from_lipschitz(
    x: GridPath, y: GridPath, beta: BetaLike = 0.4
) -> MultFunc:
    """Area of piecewise-linear paths: int_s^t (x_r - x_s) ⊗ dy_r in closed form."""
    if not x.same_grid(y):
        raise DomainError("x and y must share a grid")
    cells = 0.5 * np.einsum("ci,cj->cij", x.increments(), y.increments())
    return MultFunc.from_cell_areas(x, y, cells, beta, {"construction": "lipschitz"})


def transpose_area(mf: MultFunc) -> MultFunc:
    """(y, x, y⊗x) with (y⊗x)_{s,t} = Δy ⊗ Δx - ((x⊗y)_{s,t})ᵀ."""
    cells = np.einsum("ci,cj->cij", mf.y.increments(), mf.x.increments())
    cells = cells - np.transpose(mf.cell_area, (0, 2, 1))
    return MultFunc.from_cell_areas(
        mf.y, mf.x, cells, mf.beta, {**mf.provenance, "transposed": True}
    )


def chen_defect(mf: MultFunc, s: int, u: int, t: int) -> np.ndarray:
    if not 0 <= s <= u <= t <= mf.n_points:
        raise DomainError(f"chen_defect needs s <= u <= t in range, got ({s}, {u}, {t})")
    dx = mf.x.values[u] - mf.x.values[s]
    dy = mf.y.values[t] - mf.y.values[u]
    return (
        mf.area_pairs(s, u)
        + mf.area_pairs(u, t)
        + np.outer(dx, dy)
        - mf.area_pairs(s, t)
    )


def chen_defect_batch(mf: MultFunc, s, u, t) -> np.ndarray:
    """Max absolute Chen defect for each triple in the index arrays."""
    s, u, t = (np.asarray(v) for v in (s, u, t))
    dx = mf.x.values[u] - mf.x.values[s]
    dy = mf.y.values[t] - mf.y.values[u]
    defect = (
        mf.area_pairs(s, u)
        + mf.area_pairs(u, t)
        + dx[..., :, None] * dy[..., None, :]
        - mf.area_pairs(s, t)
    )
    return np.abs(defect).reshape(defect.shape[0], -1).max(axis=1)


def area_holder_norm(mf: MultFunc, w: Optional[Window] = None) -> float:
    w = (w or mf.x.full_window()).check(mf.n_points)

    def magnitude(k: int) -> np.ndarray:
        i = np.arange(w.lo, w.hi - k + 1)
        return np.linalg.norm(mf.area_pairs(i, i + k).reshape(len(i), -1), axis=1)

    return lagged_sup(magnitude, w.length, mf.step, 2.0 * mf.beta)


def driver_norms(mf: MultFunc, w: Optional[Window] = None) -> Tuple[float, float]:
    """(‖y‖_β, ‖y⊗y‖_β) for a self-area functional (y, y, y⊗y)."""
    return holder_norm(mf.y, mf.beta, w), area_holder_norm(mf, w)


def validate_chen(mf: MultFunc, tolerance: Optional[float] = None) -> float:
    """Compare a table-backed functional against its Chen reconstruction.

    Returns the worst scaled defect; raises ChenViolationError above tolerance.
    """
    if mf.table is None:
        return 0.0
    tol = get_settings().CHEN_TOLERANCE if tolerance is None else tolerance
    rebuilt = MultFunc.from_cell_areas(mf.x, mf.y, mf.cell_area, mf.beta)
    n = mf.n_points
    i, j = np.triu_indices(n + 1)
    gap = np.abs(mf.table[i, j] - rebuilt.area_pairs(i, j)).reshape(len(i), -1).max(axis=1)
    diag = np.abs(mf.table[np.arange(n + 1), np.arange(n + 1)]).max()
    scale = max(1.0, area_holder_norm(rebuilt))
    allowed = tol * scale * np.maximum((j - i) * mf.step, mf.step) ** (2.0 * mf.beta)
    worst = float(np.max(gap / allowed)) if len(i) else 0.0
    if diag > tol or worst > 1.0:
        raise ChenViolationError(
            f"area table violates the Chen relation (scaled defect {worst:.3g}, "
            f"diagonal {diag:.3g})"
        )
    return worst
