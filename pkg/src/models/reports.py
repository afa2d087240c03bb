from datetime import datetime
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class SelftestReport(BaseModel):
    """Residuals of the fractional-calculus and φ checks"""

    residuals: Dict[str, float] = Field(..., description="Named residual values")
    passed: Dict[str, bool] = Field(..., description="Pass flag per residual")

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())


class IntegrateReport(BaseModel):
    """Fractional integral of one field against one functional"""

    value: List[float] = Field(..., description="∫ f(x) dy, one entry per row of f")
    first_term: List[float] = Field(..., description="Compensated first-order term")
    second_term: List[float] = Field(..., description="Level-two correction term")
    riemann: List[float] = Field(..., description="Compensated Riemann sum")
    relative_gap: float = Field(..., description="|value - riemann| / max(|value|, |riemann|)")
    grid: int = Field(..., description="Grid intervals")


class SolveReport(BaseModel):
    """Outcome of one differential-equation solve"""

    windows: int = Field(..., description="Number of solver windows")
    threshold_used: float = Field(..., description="Final window threshold")
    max_iterations: int = Field(..., description="Largest Picard count over windows")
    residual: float = Field(..., description="Fixed-point residual of the solution")
    a_priori_ratio: float = Field(..., description="sup|x| over the a-priori bound")
    classical_gap: Optional[float] = Field(
        default=None, description="Sup gap to the classical ODE oracle for piecewise-linear drivers"
    )
    x_final: List[float] = Field(..., description="Solution value at the final time")


class StudyReport(BaseModel):
    """Summary of a Wong–Zakai study"""

    slope: float = Field(..., description="Fitted rate of ‖X - X^π‖_β")
    slope_ci: List[float] = Field(..., description="Bootstrap interval of the slope")
    target_slope: float = Field(..., description="β - 1/2")
    failures: int = Field(..., description="Excluded (seed, n) solves")
    driver_slopes: Dict[str, float] = Field(default_factory=dict, description="Driver error rates")
    median_ratios: List[float] = Field(default_factory=list, description="Median error ratios per doubling")


class AuditReport(BaseModel):
    """Checks of φ, the kernel K and the scaling of Λ"""

    phi_monotone: bool = Field(..., description="φ strictly decreasing on the sample grid")
    phi_decay_constant: float = Field(..., description="sup z^{(1-α)/2} φ(z)")
    phi_derivative_error: float = Field(..., description="Max relative finite-difference error of φ′")
    kernel_integrals: List[float] = Field(..., description="∫∫|K| per window at base density")
    kernel_changes: List[float] = Field(..., description="Relative change under density doubling")
    lambda_slope: Optional[float] = Field(default=None, description="log-log slope of |Λ| against window length")


class RunManifest(BaseModel):
    """Record written next to every run's artifacts"""

    command: str = Field(..., description="Sub-command")
    config: Dict[str, Any] = Field(..., description="Validated configuration echo")
    versions: Dict[str, str] = Field(..., description="Package, numpy, scipy and python versions")
    generator: str = Field(..., description="Random generator id")
    started_at: datetime = Field(..., description="Start of the run")
    wall_time: float = Field(..., description="Seconds from start to manifest")
    artifacts: List[str] = Field(default_factory=list, description="Files written by the run")
    report: Dict[str, Any] = Field(default_factory=dict, description="Command report")
