from .config import IntegralConfig, default_integral_config
from .phi import phi, phi_prime, phi_second, phi_derivative, PhiTable, phi_decay_constant
from .kernels import (
    kernel_G,
    kernel_G_derivatives,
    kernel_K,
    KernelCache,
    KernelRules,
    LevelTwoWeights,
    BoundaryWeights,
    level_two_weights,
    boundary_weights,
    kernel_abs_integral,
)
from .derivatives import compensated_deriv
from .integral import (
    lambda_op,
    lambda_value,
    lambda_scaling_slope,
    measure_lambda_path,
    kernel_lambda_path,
    boundary_lambda_path,
    rough_int,
    rough_int_terms,
    RoughIntTerms,
)
from .sums import (
    compensated_riemann_sum,
    averaged_riemann_sum,
    integral_path,
    uniform_partition,
)

__all__ = [
    "IntegralConfig",
    "default_integral_config",
    "phi",
    "phi_prime",
    "phi_second",
    "phi_derivative",
    "PhiTable",
    "phi_decay_constant",
    "kernel_G",
    "kernel_G_derivatives",
    "kernel_K",
    "KernelCache",
    "KernelRules",
    "LevelTwoWeights",
    "BoundaryWeights",
    "level_two_weights",
    "boundary_weights",
    "kernel_abs_integral",
    "compensated_deriv",
    "lambda_op",
    "lambda_value",
    "lambda_scaling_slope",
    "measure_lambda_path",
    "kernel_lambda_path",
    "boundary_lambda_path",
    "rough_int",
    "rough_int_terms",
    "RoughIntTerms",
    "compensated_riemann_sum",
    "averaged_riemann_sum",
    "integral_path",
    "uniform_partition",
]
