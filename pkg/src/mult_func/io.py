"""Area files: one row ``i,j,a11,...,amd`` per grid pair i <= j.

Loading pairs the table with the x and y path files and checks the Chen
relation before anything is integrated against it.
"""

import logging
from pathlib import Path
from typing import List, Union

import numpy as np
import pandas as pd

from src.core.exceptions import DataFormatError
from src.mult_func.functional import MultFunc, validate_chen
from src.path_core.grid import BetaLike, GridPath
from src.utils.serialization import write_csv

logger = logging.getLogger(__name__)


def area_columns(m: int, d: int) -> List[str]:
    return [f"a{k + 1}{l + 1}" for k in range(m) for l in range(d)]


def write_area_csv(mf: MultFunc, target: Union[str, Path]) -> Path:
    n = mf.n_points
    i, j = np.triu_indices(n + 1)
    values = mf.area_pairs(i, j).reshape(len(i), -1)
    frame = pd.DataFrame(values, columns=area_columns(mf.m, mf.d))
    frame.insert(0, "j", j)
    frame.insert(0, "i", i)
    return write_csv(frame, target)


def read_area_csv(
    source: Union[str, Path], x: GridPath, y: GridPath, beta: BetaLike
) -> MultFunc:
    """Load an area table for the paths x and y and validate it against Chen."""
    try:
        frame = pd.read_csv(source)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataFormatError(f"cannot read area file {source}: {e}")

    expected = ["i", "j"] + area_columns(x.dim, y.dim)
    if list(frame.columns) != expected:
        raise DataFormatError(
            f"{source}: header must be {','.join(expected)}, got {list(frame.columns)}"
        )
    if not x.same_grid(y):
        raise DataFormatError(f"{source}: x and y paths are not on one grid")

    n = x.n_points
    i = frame["i"].to_numpy()
    j = frame["j"].to_numpy()
    values = frame[expected[2:]].to_numpy(dtype=float)
    if not np.all(np.isfinite(values)):
        raise DataFormatError(f"{source}: area entries must be finite")
    if np.any(i < 0) or np.any(j > n) or np.any(i > j):
        raise DataFormatError(f"{source}: index pairs must satisfy 0 <= i <= j <= {n}")

    table = np.zeros((n + 1, n + 1, x.dim, y.dim))
    seen = np.zeros((n + 1, n + 1), dtype=bool)
    table[i, j] = values.reshape(-1, x.dim, y.dim)
    seen[i, j] = True
    iu, ju = np.triu_indices(n + 1)
    if not seen[iu, ju].all():
        missing = int((~seen[iu, ju]).sum())
        raise DataFormatError(f"{source}: {missing} grid pairs have no area entry")

    mf = MultFunc.from_table(x, y, table, beta)
    worst = validate_chen(mf)
    logger.debug(f"loaded {source}: {n} intervals, scaled Chen defect {worst:.3g}")
    return mf
