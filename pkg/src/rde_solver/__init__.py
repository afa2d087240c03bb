from .fields import (
    FieldBounds,
    VectorField,
    FIELD_REGISTRY,
    build_field,
    constant_field,
    sine_field,
    rotation_field,
    bump_field,
    linear_scalar,
)
from .solver import (
    SolverConfig,
    Solution,
    PicardSolver,
    growth_factor,
    growth_from_norms,
    step_threshold,
    picard_step,
    solve,
)
from .classical import classical_solve
from .stability import StabilityReport, stability_gap
from .io import write_solution

__all__ = [
    "FieldBounds",
    "VectorField",
    "FIELD_REGISTRY",
    "build_field",
    "constant_field",
    "sine_field",
    "rotation_field",
    "bump_field",
    "linear_scalar",
    "SolverConfig",
    "Solution",
    "PicardSolver",
    "growth_factor",
    "growth_from_norms",
    "step_threshold",
    "picard_step",
    "solve",
    "classical_solve",
    "StabilityReport",
    "stability_gap",
    "write_solution",
]
