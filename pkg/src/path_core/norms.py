"""Grid Hölder, p-variation and sup norms.

All suprema run over grid pairs only. Above ``HOLDER_EXHAUSTIVE_LIMIT``
intervals the pair scan is restricted to lags that are powers of two, which
can underestimate the exhaustive value.
"""

import logging
from typing import Callable, Dict, Iterable, Optional

import numpy as np

from src.core.config import get_settings
from src.core.exceptions import DomainError
from src.path_core.grid import BetaLike, GridPath, Window, as_beta

logger = logging.getLogger(__name__)


def pair_lags(n: int) -> Iterable[int]:
    """Index lags scanned by the grid suprema on a window of n intervals."""
    limit = get_settings().HOLDER_EXHAUSTIVE_LIMIT
    if n <= limit:
        return range(1, n + 1)
    logger.debug(f"{n} intervals exceed {limit}; scanning dyadic lags only")
    lags = [1 << k for k in range(int(np.log2(n)) + 1)]
    if lags[-1] != n:
        lags.append(n)
    return lags


def lagged_sup(
    magnitude: Callable[[int], np.ndarray], n: int, step: float, exponent: float
) -> float:
    """max over lags k of max(magnitude(k)) / (k*step)^exponent."""
    best = 0.0
    for k in pair_lags(n):
        values = magnitude(k)
        if values.size:
            best = max(best, float(values.max()) / (k * step) ** exponent)
    return best


def holder_norm(path: GridPath, beta: BetaLike, w: Optional[Window] = None) -> float:
    b = as_beta(beta)
    vals = path.window_values(w)
    n = vals.shape[0] - 1
    return lagged_sup(
        lambda k: np.linalg.norm(vals[k:] - vals[:-k], axis=1), n, path.step, b
    )


def sup_norm(path: GridPath, w: Optional[Window] = None) -> float:
    return float(np.linalg.norm(path.window_values(w), axis=1).max())


def p_variation(path: GridPath, p: float, w: Optional[Window] = None) -> float:
    """Supremum over grid partitions of (sum |dx|^p)^(1/p), by dynamic programming."""
    if p < 1.0:
        raise DomainError(f"p-variation needs p >= 1, got {p}")
    vals = path.window_values(w)
    n = vals.shape[0] - 1
    best = np.zeros(n + 1)
    for j in range(1, n + 1):
        jumps = np.linalg.norm(vals[j] - vals[:j], axis=1) ** p
        best[j] = np.max(best[:j] + jumps)
    return float(best[n] ** (1.0 / p))


def resample(path: GridPath, factor: int) -> GridPath:
    """Linear interpolation onto a grid with ``factor`` times as many intervals."""
    if factor < 1:
        raise DomainError(f"resample factor must be >= 1, got {factor}")
    if factor == 1:
        return path
    left = path.values[:-1]
    incr = path.increments()
    frac = np.arange(factor) / factor
    fine = left[:, None, :] + frac[None, :, None] * incr[:, None, :]
    fine = fine.reshape(-1, path.dim)
    return path.with_values(np.vstack([fine, path.values[-1:]]))


def subsample(path: GridPath, stride: int) -> GridPath:
    if stride < 1 or path.n_points % stride:
        raise DomainError(f"stride {stride} does not divide {path.n_points}")
    return path.with_values(path.values[::stride])


def holder_norm_refinement(
    path: GridPath, beta: BetaLike, levels: int = 4
) -> Dict[int, float]:
    """Hölder norms of the dyadic sub-samplings of ``path``, keyed by interval count.

    Grid suprema only increase towards the continuum value; the sequence is a
    convergence diagnostic.
    """
    out: Dict[int, float] = {}
    stride = 1
    for _ in range(levels):
        if path.n_points % stride or path.n_points // stride < 1:
            break
        coarse = subsample(path, stride)
        out[coarse.n_points] = holder_norm(coarse, beta)
        stride *= 2
    return dict(sorted(out.items()))


def holder_exponent_estimate(path: GridPath, w: Optional[Window] = None) -> float:
    """Fitted exponent of max |x_{i+k} - x_i| against k over dyadic lags.

    A heuristic for admissibility warnings; constant paths report 1.
    """
    vals = path.window_values(w)
    n = vals.shape[0] - 1
    lags = [1 << k for k in range(int(np.log2(n)) + 1)] if n >= 1 else []
    sizes = np.array(
        [np.linalg.norm(vals[k:] - vals[:-k], axis=1).max() for k in lags]
    )
    keep = sizes > 0
    if keep.sum() < 2:
        return 1.0
    slope = np.polyfit(np.log(np.asarray(lags)[keep]), np.log(sizes[keep]), 1)[0]
    return float(np.clip(slope, 0.0, 1.0))
