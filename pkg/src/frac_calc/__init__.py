from .quadrature import SingularQuadRule, grading_for, graded_nodes, power_weights
from .operators import (
    FracOrder,
    frac_integral_left,
    frac_integral_right,
    weyl_deriv_left,
    weyl_deriv_right,
    ibp_residual,
    deriv_ibp_residual,
    frac_integral_values,
    weyl_left_values,
    weyl_right_values,
)
from .young import young_integral, right_remainder_derivative, left_weighted_integral

__all__ = [
    "SingularQuadRule",
    "grading_for",
    "graded_nodes",
    "power_weights",
    "FracOrder",
    "frac_integral_left",
    "frac_integral_right",
    "weyl_deriv_left",
    "weyl_deriv_right",
    "ibp_residual",
    "deriv_ibp_residual",
    "frac_integral_values",
    "weyl_left_values",
    "weyl_right_values",
    "young_integral",
    "right_remainder_derivative",
    "left_weighted_integral",
]
