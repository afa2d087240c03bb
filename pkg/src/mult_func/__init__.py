from .functional import (
    MultFunc,
    area_from_lipschitz,
    transpose_area,
    chen_defect,
    chen_defect_batch,
    area_holder_norm,
    driver_norms,
    validate_chen,
)
from .gamma import GammaParams, gamma_op, gamma_table
from .io import read_area_csv, write_area_csv
from .tensor import (
    cell_triples,
    joint_functional,
    refined_cell_triple,
    tensor_triple,
    triple_area,
    triple_area_riemann,
)

__all__ = [
    "MultFunc",
    "area_from_lipschitz",
    "transpose_area",
    "chen_defect",
    "chen_defect_batch",
    "area_holder_norm",
    "driver_norms",
    "validate_chen",
    "GammaParams",
    "gamma_op",
    "gamma_table",
    "read_area_csv",
    "write_area_csv",
    "joint_functional",
    "tensor_triple",
    "cell_triples",
    "refined_cell_triple",
    "triple_area",
    "triple_area_riemann",
]
