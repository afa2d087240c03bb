from .grid import GridPath, Window, HolderExponent, as_beta
from .norms import (
    holder_norm,
    sup_norm,
    p_variation,
    resample,
    subsample,
    holder_norm_refinement,
    holder_exponent_estimate,
)
from .io import read_path_csv, write_path_csv

__all__ = [
    "GridPath",
    "Window",
    "HolderExponent",
    "as_beta",
    "holder_norm",
    "sup_norm",
    "p_variation",
    "resample",
    "subsample",
    "holder_norm_refinement",
    "holder_exponent_estimate",
    "read_path_csv",
    "write_path_csv",
]
