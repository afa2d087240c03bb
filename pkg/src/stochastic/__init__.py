from .brownian import (
    BrownianConfig,
    GENERATOR_ID,
    sample_brownian,
    polygonal,
    polygonal_error_norms,
    pathwise_integral_brownian,
    modulus_constant,
    increment_statistics,
    IncrementStatistics,
)
from .wong_zakai import (
    WongZakaiReport,
    wong_zakai_study,
    fit_rate,
    bootstrap_slope,
    reference_stability,
    driver_rate_study,
)

__all__ = [
    "BrownianConfig",
    "GENERATOR_ID",
    "sample_brownian",
    "polygonal",
    "polygonal_error_norms",
    "pathwise_integral_brownian",
    "modulus_constant",
    "increment_statistics",
    "IncrementStatistics",
    "WongZakaiReport",
    "wong_zakai_study",
    "fit_rate",
    "bootstrap_slope",
    "reference_stability",
    "driver_rate_study",
]
