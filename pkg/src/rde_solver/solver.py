"""Picard solver for x_t = x₀ + ∫₀ᵗ f(x_r) dy_r.

The unknown is the pair (x, x⊗y), held as node values and one-cell areas.
One Picard map sends an iterate to

    J₁x_t = x_lo + ∫_{lo}^t f(x) dy,     J₂(x⊗y)_cell = f(x_k) (y⊗y)_cell + f′(x_k) (x⊗y⊗y)_cell,

with x_k the value at the start of the cell. J₁ is evaluated by compensated
Riemann sums ("riemann") or by the fractional integral on every window prefix
("fractional"). The Riemann map keeps only the first term of J₂; the
fractional map adds the level-three term from ``cell_triples``. Window
lengths come from the step thresholds 1/α(y) (existence) or 1/β(y)
(uniqueness), halved when a window fails to contract.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, NamedTuple, Tuple

import numpy as np

from src.core.exceptions import AdmissibilityError, ConfigurationError, DomainError, SolverError
from src.core.state import StepRecord
from src.mult_func.functional import MultFunc, driver_norms
from src.mult_func.tensor import cell_triples
from src.path_core.grid import GridPath, Window
from src.path_core.norms import holder_norm
from src.rde_solver.fields import VectorField
from src.rough_integral.config import IntegralConfig
from src.rough_integral.integral import rough_int
from src.rough_integral.sums import integral_path

logger = logging.getLogger(__name__)

EVALUATORS = ("riemann", "fractional")
MODES = ("existence", "uniqueness")
INITIAL_ITERATES = ("constant", "euler")
A_PRIORI_GAMMA_OFFSET = 0.1


@dataclass(frozen=True)
class SolverConfig:
    cfg: IntegralConfig
    k_universal: float = 1.0
    max_picard: int = 50
    picard_tol: float = 1e-10
    min_step: float = 1e-4
    evaluator: str = "riemann"
    mode: str = "existence"
    initial_iterate: str = "constant"

    def __post_init__(self):
        if not self.k_universal > 0:
            raise DomainError(f"k_universal must be positive, got {self.k_universal}")
        if self.max_picard < 1:
            raise DomainError(f"max_picard must be >= 1, got {self.max_picard}")
        if self.picard_tol < 0:
            raise DomainError(f"picard_tol must be >= 0, got {self.picard_tol}")
        if not self.min_step > 0:
            raise DomainError(f"min_step must be positive, got {self.min_step}")
        if self.evaluator not in EVALUATORS:
            raise ConfigurationError(f"evaluator must be one of {EVALUATORS}, got {self.evaluator}")
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode}")
        if self.initial_iterate not in INITIAL_ITERATES:
            raise ConfigurationError(
                f"initial_iterate must be one of {INITIAL_ITERATES}, got {self.initial_iterate}"
            )
        if self.cfg.beta - 2.0 * self.cfg.epsilon <= 0:
            raise AdmissibilityError(
                f"the step threshold needs beta > 2 epsilon, got beta={self.cfg.beta}, "
                f"epsilon={self.cfg.epsilon}"
            )


def growth_factor(y_mf: MultFunc, f: VectorField, sc: SolverConfig) -> float:
    """α(y) in existence mode, β(y) in uniqueness mode."""
    return growth_from_norms(*driver_norms(y_mf), f, sc)


def growth_from_norms(y_norm: float, area_norm: float, f: VectorField, sc: SolverConfig) -> float:
    ratio = area_norm / y_norm if y_norm > 0 else 0.0
    beta = sc.cfg.beta
    if sc.mode == "existence":
        base = 2.0 * sc.k_universal * f.rho * (y_norm + ratio)
        exponent = 1.0 / (beta - 2.0 * sc.cfg.epsilon)
    else:
        base = 2.0 * sc.k_universal * f.rho_hat * (y_norm + y_norm**2 + area_norm + ratio)
        exponent = 1.0 / (beta * f.lam)
    return max(base, 1.0) ** exponent


def step_threshold(y_mf: MultFunc, f: VectorField, sc: SolverConfig) -> float:
    """Largest admissible window length 1/α(y) or 1/β(y)."""
    return 1.0 / growth_factor(y_mf, f, sc)


def a_priori_ratio(x: GridPath, x0: np.ndarray, alpha_y: float, beta: float) -> float:
    """sup|x| / (|x₀| + T α(y)^γ) with γ = 1/β + 0.1."""
    gamma = 1.0 / beta + A_PRIORI_GAMMA_OFFSET
    span = x.T - x.t0
    bound = float(np.linalg.norm(x0)) + span * alpha_y**gamma
    return float(np.linalg.norm(x.values, axis=1).max()) / bound


def _level_two(fx: np.ndarray, yy_cells: np.ndarray) -> np.ndarray:
    return np.einsum("krd,kde->kre", fx, yy_cells)


def _riemann_map(
    f: VectorField, xv: np.ndarray, cells: np.ndarray, dy: np.ndarray, yy_cells: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    fx = f.eval(xv[:-1])
    steps = np.einsum("krd,kd->kr", fx, dy)
    steps += np.einsum("krdm,kmd->kr", f.jacobian(xv[:-1]), cells)
    out = np.empty_like(xv)
    out[0] = xv[0]
    out[1:] = xv[0] + np.cumsum(steps, axis=0)
    return out, _level_two(fx, yy_cells)


def _fractional_map(
    f: VectorField,
    xv: np.ndarray,
    cells: np.ndarray,
    y_window: GridPath,
    yy_cells: np.ndarray,
    cfg: IntegralConfig,
    beta: float,
) -> Tuple[np.ndarray, np.ndarray]:
    x_window = y_window.with_values(xv)
    mf = MultFunc.from_cell_areas(x_window, y_window, cells, beta)
    out = np.empty_like(xv)
    out[0] = xv[0]
    for k in range(1, len(xv)):
        out[k] = xv[0] + rough_int(f, mf, Window(0, k), cfg)
    yy = MultFunc.from_cell_areas(y_window, y_window, yy_cells, beta)
    triples = cell_triples(mf, yy)
    level_two = _level_two(f.eval(xv[:-1]), yy_cells)
    level_two += np.einsum("krdm,kmde->kre", f.jacobian(xv[:-1]), triples)
    return out, level_two


def picard_step(
    x: GridPath,
    xy: MultFunc,
    y_mf: MultFunc,
    yy_mf: MultFunc,
    f: VectorField,
    w: Window,
    cfg: IntegralConfig,
    evaluator: str = "riemann",
) -> Tuple[GridPath, MultFunc]:
    """Apply (J₁, J₂) on the window and return the full-grid iterate with the window replaced."""
    w = w.check(x.n_points)
    if evaluator not in EVALUATORS:
        raise ConfigurationError(f"evaluator must be one of {EVALUATORS}, got {evaluator}")
    xv = x.window_values(w)
    cells = xy.cell_area[w.lo : w.hi]
    yy_cells = yy_mf.cell_area[w.lo : w.hi]
    if evaluator == "riemann":
        dy = y_mf.y.increments()[w.lo : w.hi]
        new_x, new_cells = _riemann_map(f, xv, cells, dy, yy_cells)
    else:
        new_x, new_cells = _fractional_map(
            f, xv, cells, y_mf.y.restrict(w), yy_cells, cfg, y_mf.beta
        )
    values = x.values.copy()
    values[w.slice()] = new_x
    all_cells = np.array(xy.cell_area)
    all_cells[w.lo : w.hi] = new_cells
    x_new = x.with_values(values)
    return x_new, MultFunc.from_cell_areas(x_new, xy.y, all_cells, xy.beta, xy.provenance)


class WindowOutcome(NamedTuple):
    x: np.ndarray
    cells: np.ndarray
    iterations: int
    defect: float
    ratio: float
    converged: bool


@dataclass(frozen=True, eq=False)
class Solution:
    x: GridPath
    xy_area: MultFunc
    steps: Tuple[StepRecord, ...]
    threshold_used: float
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def x0(self) -> np.ndarray:
        return self.x.values[0]

    def residual(self, f: VectorField) -> float:
        """max_t |x_t - x₀ - ∫₀ᵗ f(x) dy| with the integral by compensated sums."""
        integral = integral_path(f, self.xy_area)
        gap = self.x.values - self.x0 - integral.values
        return float(np.abs(gap).max())

    def step_records(self) -> List[Dict[str, Any]]:
        return [s.to_dict() for s in self.steps]


class PicardSolver:
    """Window-by-window Picard iteration for one (f, y) pair."""

    def __init__(self, f: VectorField, y_mf: MultFunc, sc: SolverConfig):
        if y_mf.m != y_mf.d or not np.allclose(y_mf.x.values, y_mf.y.values):
            raise DomainError("the driver must be a self-area functional (y, y, y⊗y)")
        if f.rows != f.m or f.d != y_mf.d:
            raise DomainError(
                f"field '{f.name}' maps R^{f.m} to {f.rows}x{f.d} matrices; "
                f"the driver has dimension {y_mf.d}"
            )
        sc.cfg.require_beta(y_mf.beta)
        f.require_lambda(sc.cfg.beta)
        self.f = f
        self.y_mf = y_mf
        self.sc = sc
        self.h = y_mf.step
        self.dy = y_mf.y.increments()
        self.yy = y_mf.cell_area

    def _initial(self, xa: np.ndarray, lo: int, hi: int) -> np.ndarray:
        xv = np.repeat(xa[None, :], hi - lo + 1, axis=0)
        if self.sc.initial_iterate == "euler":
            fa = self.f.eval(xa)
            xv[1:] += np.cumsum(self.dy[lo:hi] @ fa.T, axis=0)
        return xv

    def _apply(self, xv: np.ndarray, cells: np.ndarray, lo: int, hi: int):
        if self.sc.evaluator == "riemann":
            return _riemann_map(self.f, xv, cells, self.dy[lo:hi], self.yy[lo:hi])
        return _fractional_map(
            self.f,
            xv,
            cells,
            self.y_mf.y.restrict(Window(lo, hi)),
            self.yy[lo:hi],
            self.sc.cfg,
            self.y_mf.beta,
        )

    def _defect(self, gap_x: np.ndarray, gap_cells: np.ndarray, lo: int, hi: int) -> float:
        path = GridPath(self.y_mf.x.node(lo), self.y_mf.x.node(hi), gap_x)
        beta = self.sc.cfg.beta
        area = float(np.abs(gap_cells).max()) / self.h ** (2.0 * beta) if gap_cells.size else 0.0
        return holder_norm(path, beta) + area

    def iterate_window(self, xa: np.ndarray, lo: int, hi: int) -> WindowOutcome:
        xv = self._initial(xa, lo, hi)
        cells = np.zeros((hi - lo, self.f.m, self.f.d))
        previous = np.inf
        ratio = float("nan")
        for it in range(1, self.sc.max_picard + 1):
            new_x, new_cells = self._apply(xv, cells, lo, hi)
            if not (np.all(np.isfinite(new_x)) and np.all(np.isfinite(new_cells))):
                return WindowOutcome(xv, cells, it, float("inf"), ratio, False)
            defect = self._defect(new_x - xv, new_cells - cells, lo, hi)
            if np.isfinite(previous) and previous > 0:
                ratio = defect / previous
            logger.debug(f"window [{lo}, {hi}] iteration {it}: defect {defect:.3e}")
            xv, cells = new_x, new_cells
            if defect <= self.sc.picard_tol:
                return WindowOutcome(xv, cells, it, defect, ratio, True)
            previous = defect
        return WindowOutcome(xv, cells, self.sc.max_picard, defect, ratio, False)

    def run(self, x0) -> Solution:
        f, sc = self.f, self.sc
        x0 = np.asarray(x0, dtype=float).reshape(-1)
        if x0.shape != (f.m,) or not np.all(np.isfinite(x0)):
            raise DomainError(f"initial value must be a finite vector of length {f.m}")
        f.require_in_box(x0)

        alpha_y = growth_factor(self.y_mf, f, sc)
        threshold = 1.0 / alpha_y
        n = self.y_mf.n_points
        xv = np.empty((n + 1, f.m))
        xv[0] = x0
        cells = np.zeros((n, f.m, f.d))
        steps: List[StepRecord] = []
        logger.info(
            f"solving with field '{f.name}' on {n} intervals: threshold {threshold:.4g}, "
            f"evaluator {sc.evaluator}, mode {sc.mode}"
        )

        lo = 0
        while lo < n:
            width = max(1, min(n - lo, int(np.floor(threshold / self.h * (1.0 + 1e-12)))))
            hi = lo + width
            outcome = self.iterate_window(xv[lo], lo, hi)
            record = StepRecord(
                lo, hi, outcome.iterations, outcome.defect, threshold, outcome.ratio
            )
            if not outcome.converged:
                logger.info(
                    f"window [{lo}, {hi}] did not contract (defect {outcome.defect:.3e}); "
                    "halving the threshold"
                )
                if width == 1 or threshold / 2.0 < sc.min_step:
                    raise SolverError(
                        f"Picard iteration failed to contract on window [{lo}, {hi}] "
                        f"at threshold {threshold:.4g}",
                        [s.to_dict() for s in steps] + [record.to_dict()],
                    )
                threshold /= 2.0
                continue
            f.require_in_box(outcome.x)
            xv[lo : hi + 1] = outcome.x
            cells[lo:hi] = outcome.cells
            steps.append(record)
            lo = hi

        x = self.y_mf.y.with_values(xv)
        xy = MultFunc.from_cell_areas(
            x, self.y_mf.y, cells, self.y_mf.beta, {"construction": "solution", "field": f.name}
        )
        diagnostics = {
            "threshold_initial": 1.0 / alpha_y,
            "threshold_used": threshold,
            "growth_factor": alpha_y,
            "a_priori_ratio": a_priori_ratio(
                x, x0, growth_factor(self.y_mf, f, replace(sc, mode="existence")), sc.cfg.beta
            ),
            "windows": len(steps),
            "evaluator": sc.evaluator,
            "mode": sc.mode,
        }
        logger.info(
            f"solved over {len(steps)} windows; a-priori ratio {diagnostics['a_priori_ratio']:.3g}"
        )
        return Solution(x, xy, tuple(steps), threshold, diagnostics)


def solve(f: VectorField, y_mf: MultFunc, x0, sc: SolverConfig) -> Solution:
    return PicardSolver(f, y_mf, sc).run(x0)
