"""Wong–Zakai convergence study.

For every seed the rough equation driven by the Brownian functional gives a
reference X, and the classical ODE driven by the polygonal B^π gives X^π for
each n. The error ‖X - X^π‖_β should decay like n^{β - 1/2} √(log n); the
√(log n) factor is divided out before the log-log fit.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.core.config import get_settings
from src.core.exceptions import DomainError, RoughIntException
from src.path_core.norms import holder_norm, sup_norm
from src.rde_solver.classical import classical_solve
from src.rde_solver.fields import VectorField
from src.rde_solver.solver import SolverConfig, solve
from src.rough_integral.sums import uniform_partition
from src.stochastic.brownian import (
    BrownianConfig,
    brownian_from_increments,
    fine_increments,
    polygonal_error_norms,
    sample_brownian,
)

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["seed", "n", "err_beta", "err_sup", "slope_contrib"]


def _rate_coordinates(n_values, errors) -> Tuple[np.ndarray, np.ndarray]:
    n = np.asarray(n_values, dtype=float)
    if np.any(n <= 1):
        raise DomainError("rate fits need n > 1 (log n must be positive)")
    err = np.asarray(errors, dtype=float)
    n = np.broadcast_to(n, err.shape)
    keep = np.isfinite(err) & (err > 0)
    return np.log(n[keep]), np.log(err[keep] / np.sqrt(np.log(n[keep])))


def fit_rate(n_values: Sequence[int], errors) -> float:
    """Least-squares slope of log(err/√log n) against log n.

    ``errors`` is one row per seed (or a single row); non-positive or missing
    entries are left out. Returns NaN when fewer than two distinct n remain.
    """
    x, y = _rate_coordinates(n_values, errors)
    if np.unique(x).size < 2:
        return float("nan")
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def bootstrap_slope(
    n_values: Sequence[int],
    errors,
    n_boot: int = 1000,
    seed: int = 0,
    level: float = 0.95,
) -> Tuple[float, float]:
    """Percentile interval of the fitted slope with seeds resampled with replacement."""
    err = np.atleast_2d(np.asarray(errors, dtype=float))
    rng = np.random.default_rng(seed)
    slopes = []
    for _ in range(n_boot):
        rows = rng.integers(0, err.shape[0], size=err.shape[0])
        slope = fit_rate(n_values, err[rows])
        if np.isfinite(slope):
            slopes.append(slope)
    if not slopes:
        return float("nan"), float("nan")
    tail = 50.0 * (1.0 - level)
    lo, hi = np.percentile(slopes, [tail, 100.0 - tail])
    return float(lo), float(hi)


@dataclass
class WongZakaiReport:
    n_values: Tuple[int, ...]
    seeds: Tuple[int, ...]
    errors_beta: np.ndarray
    errors_sup: np.ndarray
    slope: float
    slope_ci: Tuple[float, float]
    failures: int = 0
    failed: Tuple[Tuple[int, int], ...] = ()
    metadata: Dict[str, Any] = field(default_factory=dict)

    def seed_slopes(self) -> np.ndarray:
        return np.array([fit_rate(self.n_values, row) for row in self.errors_beta])

    def median_ratios(self) -> np.ndarray:
        """Median error at n over the median at 2n, for consecutive doublings."""
        med = np.nanmedian(self.errors_beta, axis=0)
        return med[:-1] / med[1:]

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for seed, slope, eb, es in zip(
            self.seeds, self.seed_slopes(), self.errors_beta, self.errors_sup
        ):
            for n, b, s in zip(self.n_values, eb, es):
                rows.append({"seed": seed, "n": n, "err_beta": b, "err_sup": s, "slope_contrib": slope})
        return pd.DataFrame(rows, columns=CSV_COLUMNS)

    def summary(self) -> Dict[str, Any]:
        return {
            "n_values": list(self.n_values),
            "seeds": list(self.seeds),
            "slope": self.slope,
            "slope_ci": list(self.slope_ci),
            "failures": self.failures,
            "failed": [list(pair) for pair in self.failed],
            **self.metadata,
        }


def _check_ladder(n_values: Sequence[int], n_coarse: int) -> Tuple[int, ...]:
    ladder = tuple(int(n) for n in n_values)
    if not ladder or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise DomainError(f"n values must be strictly increasing, got {ladder}")
    for n in ladder:
        if n < 2 or n_coarse % n:
            raise DomainError(f"n={n} must be >= 2 and divide n_coarse={n_coarse}")
    return ladder


def seed_errors(
    f: VectorField,
    x0,
    bc: BrownianConfig,
    n_values: Sequence[int],
    sc: SolverConfig,
) -> Tuple[np.ndarray, np.ndarray, int]:
    """(err_beta, err_sup, failures) over the n ladder for one seed.

    A failed solve leaves NaN in the affected entries; a failed reference
    solve fails every n.
    """
    beta = sc.cfg.beta
    err_beta = np.full(len(n_values), np.nan)
    err_sup = np.full(len(n_values), np.nan)
    b_mf = sample_brownian(bc, beta)
    try:
        reference = solve(f, b_mf, x0, sc).x
    except RoughIntException as e:
        logger.warning(f"seed {bc.seed}: reference solve failed: {e}")
        return err_beta, err_sup, len(n_values)

    failures = 0
    for k, n in enumerate(n_values):
        try:
            approx = classical_solve(f, b_mf.y, x0, uniform_partition(bc.n_coarse, n))
        except RoughIntException as e:
            logger.warning(f"seed {bc.seed}, n={n}: classical solve failed: {e}")
            failures += 1
            continue
        gap = reference.difference(approx)
        err_beta[k] = holder_norm(gap, beta)
        err_sup[k] = sup_norm(gap)
    logger.debug(f"seed {bc.seed}: errors {err_beta}")
    return err_beta, err_sup, failures


def wong_zakai_study(
    f: VectorField,
    x0,
    bc: BrownianConfig,
    n_values: Sequence[int],
    seeds: int,
    sc: SolverConfig,
    max_workers: Optional[int] = None,
    n_boot: int = 1000,
) -> WongZakaiReport:
    """Errors ‖X - X^π‖_β for seeds bc.seed, ..., bc.seed + seeds - 1 and the fitted rate."""
    ladder = _check_ladder(n_values, bc.n_coarse)
    if seeds < 1:
        raise DomainError(f"need at least one seed, got {seeds}")
    seed_ids = sorted(bc.seed + k for k in range(seeds))
    workers = max_workers or get_settings().MAX_WORKERS
    logger.info(
        f"Wong-Zakai study: {len(seed_ids)} seeds, n in {list(ladder)}, "
        f"{bc.n_coarse} coarse cells, {workers} workers"
    )

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(
            pool.map(lambda s: seed_errors(f, x0, replace(bc, seed=s), ladder, sc), seed_ids)
        )

    errors_beta = np.array([r[0] for r in results])
    errors_sup = np.array([r[1] for r in results])
    failures = sum(r[2] for r in results)
    failed = tuple(
        (seed, n)
        for seed, row in zip(seed_ids, errors_beta)
        for n, err in zip(ladder, row)
        if np.isnan(err)
    )
    slope = fit_rate(ladder, errors_beta)
    if not np.isfinite(slope):
        logger.warning("no positive errors to fit; the slope is undefined")
    ci = bootstrap_slope(ladder, errors_beta, n_boot=n_boot, seed=bc.seed)
    logger.info(f"fitted slope {slope:.4f}, interval ({ci[0]:.4f}, {ci[1]:.4f}), {failures} failures")
    return WongZakaiReport(
        ladder,
        tuple(seed_ids),
        errors_beta,
        errors_sup,
        slope,
        ci,
        failures,
        failed,
        {"target_slope": sc.cfg.beta - 0.5, "beta": sc.cfg.beta, **bc.provenance()},
    )


def reference_stability(f: VectorField, x0, bc: BrownianConfig, sc: SolverConfig) -> float:
    """‖X_r - X_{2r}‖_β for reference solutions built from nested fine grids.

    The finer functional uses 2·refine_factor; the coarser one sums its fine
    increments in pairs, so both share the same coarse path.
    """
    fine_bc = replace(bc, refine_factor=2 * bc.refine_factor)
    db = fine_increments(fine_bc)
    beta = sc.cfg.beta
    fine = brownian_from_increments(db, fine_bc, beta)
    paired = db.reshape(-1, 2, bc.d).sum(axis=1)
    coarse = brownian_from_increments(paired, bc, beta)
    gap = solve(f, fine, x0, sc).x.difference(solve(f, coarse, x0, sc).x)
    return holder_norm(gap, beta)


def driver_rate_study(
    bc: BrownianConfig, n_values: Sequence[int], seeds: int, beta: float
) -> Dict[str, float]:
    """Fitted rates of ‖B - B^π‖_β, ‖B⊗(B - B^π)‖_β and ‖B - B^π‖_∞ over the seeds."""
    ladder = _check_ladder(n_values, bc.n_coarse)
    rows: Dict[str, List[List[float]]] = {"e1": [], "e2": [], "e_sup": []}
    for s in sorted(bc.seed + k for k in range(seeds)):
        b_mf = sample_brownian(replace(bc, seed=s), beta)
        norms = [polygonal_error_norms(b_mf, n, beta) for n in ladder]
        for key in rows:
            rows[key].append([entry[key] for entry in norms])
    return {f"{key}_slope": fit_rate(ladder, values) for key, values in rows.items()}
