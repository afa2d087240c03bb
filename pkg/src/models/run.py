from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.core.config import get_settings
from src.core.exceptions import ConfigurationError
from src.rough_integral.config import IntegralConfig
from src.utils.config import Config

Command = Literal["frac-selftest", "integrate", "solve", "wz-study", "kernel-audit"]
COMMANDS = ("frac-selftest", "integrate", "solve", "wz-study", "kernel-audit")


class PathSpec(BaseModel):
    """Input files for integrate and solve"""

    x: Optional[str] = Field(default=None, description="Path CSV for the integrand path x")
    y: Optional[str] = Field(default=None, description="Path CSV for the driver y")
    area: Optional[str] = Field(default=None, description="Area CSV for (x, y, x⊗y)")


class FieldSpec(BaseModel):
    """Named built-in vector field"""

    name: str = Field(default="sine", description="Registry name of the field")
    params: Dict[str, Any] = Field(default_factory=dict, description="Factory keyword arguments")


class SolverSpec(BaseModel):
    """Picard solver settings"""

    k_universal: float = Field(default=1.0, gt=0, description="Constant k in the step thresholds")
    max_picard: int = Field(default=50, ge=1, description="Picard iterations per window")
    picard_tol: float = Field(default=1e-10, ge=0, description="Window defect tolerance")
    min_step: float = Field(default=1e-4, gt=0, description="Smallest threshold before failing")
    evaluator: Literal["riemann", "fractional"] = "riemann"
    mode: Literal["existence", "uniqueness"] = "existence"


class StudySpec(BaseModel):
    """Wong–Zakai study settings"""

    n_values: List[int] = Field(
        default_factory=lambda: [16, 32, 64, 128, 256, 512], description="Polygon resolutions"
    )
    seeds: int = Field(default=10, ge=1, description="Number of seeds")
    n_coarse: int = Field(default=2048, ge=2, description="Coarse grid of the Brownian driver")
    refine_factor: int = Field(default=16, ge=2, description="Fine cells per coarse cell")
    d: int = Field(default=2, ge=1, description="Brownian dimension")
    n_boot: int = Field(default=1000, ge=1, description="Bootstrap resamples for the slope interval")
    driver_rates: bool = Field(default=True, description="Also fit the driver error rates")


class AuditSpec(BaseModel):
    """Kernel audit settings"""

    windows: int = Field(default=5, ge=1, description="Random windows for the |K| integral")
    density: int = Field(default=1, ge=1, description="Base quadrature density")


class SelftestSpec(BaseModel):
    """Fractional-calculus self-test settings"""

    order: float = Field(default=0.4, gt=0, lt=1, description="Fractional order")
    band: float = Field(default=0.02, ge=0, lt=0.5, description="Boundary band left out")


class RunConfig(BaseModel):
    """Validated configuration of one CLI run"""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    command: Command
    beta: float = 0.4
    alpha: float = 0.65
    epsilon: float = 0.02
    lam: float = Field(default=1.0, alias="lambda")
    lambda_method: Literal["measure", "kernel"] = "measure"
    grid: int = Field(default=256, ge=2, description="Grid intervals for synthetic inputs")
    seed: int = 0
    output_dir: str = "results"
    x0: List[float] = Field(default_factory=lambda: [1.0])
    paths: PathSpec = Field(default_factory=PathSpec)
    field: FieldSpec = Field(default_factory=FieldSpec)
    solver: SolverSpec = Field(default_factory=SolverSpec)
    study: StudySpec = Field(default_factory=StudySpec)
    audit: AuditSpec = Field(default_factory=AuditSpec)
    selftest: SelftestSpec = Field(default_factory=SelftestSpec)

    @model_validator(mode="after")
    def check_admissible(self) -> "RunConfig":
        self.integral_config()
        return self

    def integral_config(self) -> IntegralConfig:
        return IntegralConfig(
            beta=self.beta,
            alpha=self.alpha,
            epsilon=self.epsilon,
            lam=self.lam,
            lambda_method=self.lambda_method,
        )

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True)


def load_run_config(
    command: str,
    path: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    defaults_path: Optional[str] = None,
) -> RunConfig:
    """Merge defaults, the command section, the user file and flag overrides."""
    if command not in COMMANDS:
        raise ConfigurationError(f"unknown command {command!r}")
    defaults_path = defaults_path or get_settings().DEFAULT_CONFIG_PATH
    merged: Dict[str, Any] = {}
    if Path(defaults_path).exists():
        defaults = Config.load_config(defaults_path)
        merged = Config.merge(defaults.get("defaults", {}), defaults.get(command, {}))
    if path:
        merged = Config.merge(merged, Config.load_config(path))
    named = ((overrides or {}).get("field") or {}).get("name")
    if named and named != merged.get("field", {}).get("name"):
        # parameters of a replaced field do not carry over
        merged["field"] = {}
    merged = Config.merge(merged, overrides)
    merged["command"] = command
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as e:
        raise ConfigurationError(f"invalid run configuration: {e}")
