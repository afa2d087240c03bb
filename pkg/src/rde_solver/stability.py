"""Stability report comparing two solutions against their input gaps."""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from src.core.exceptions import DomainError
from src.mult_func.functional import MultFunc, area_from_lipschitz, area_holder_norm
from src.path_core.norms import holder_norm, sup_norm
from src.rde_solver.solver import Solution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StabilityReport:
    sup_gap: float
    holder_gap: float
    x0_gap: float
    driver_gap: float
    cross_area_gap: float

    @property
    def input_gap(self) -> float:
        """|x₀ - x̃₀| + ‖y - ỹ‖_β + ‖y⊗(y - ỹ)‖_β."""
        return self.x0_gap + self.driver_gap + self.cross_area_gap

    @property
    def ratio(self) -> float:
        """‖x - x̃‖_∞ over the input gap; the stability constant is not asserted."""
        if self.input_gap == 0:
            return 0.0 if self.sup_gap == 0 else float("inf")
        return self.sup_gap / self.input_gap

    def to_dict(self) -> Dict[str, Any]:
        return {**asdict(self), "input_gap": self.input_gap, "ratio": self.ratio}


def stability_gap(
    sol: Solution,
    sol_tilde: Solution,
    y_mf: MultFunc,
    y_tilde_mf: MultFunc,
    cross_area_norm: Optional[float] = None,
) -> StabilityReport:
    """Both sides of the stability estimate for two runs on one grid.

    Without ``cross_area_norm`` the area y⊗(y - ỹ) is built in closed form,
    which is exact when y - ỹ is piecewise linear on the grid.
    """
    if not (sol.x.same_grid(sol_tilde.x) and y_mf.y.same_grid(y_tilde_mf.y) and sol.x.same_grid(y_mf.y)):
        raise DomainError("stability_gap needs both solutions and drivers on one grid")
    beta = y_mf.beta
    gap = sol.x.difference(sol_tilde.x)
    driver_gap = y_mf.y.difference(y_tilde_mf.y)
    if cross_area_norm is None:
        cross_area_norm = area_holder_norm(area_from_lipschitz(y_mf.y, driver_gap, beta))
    report = StabilityReport(
        sup_gap=sup_norm(gap),
        holder_gap=holder_norm(gap, beta),
        x0_gap=float(np.linalg.norm(sol.x0 - sol_tilde.x0)),
        driver_gap=holder_norm(driver_gap, beta),
        cross_area_gap=float(cross_area_norm),
    )
    logger.debug(f"stability gap {report.to_dict()}")
    return report
