import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from src.core.exceptions import DataFormatError
from src.path_core.grid import GridPath
from src.utils.serialization import write_csv

logger = logging.getLogger(__name__)

SPACING_TOLERANCE = 1e-9


def path_frame(path: GridPath) -> pd.DataFrame:
    columns = {"t": path.times}
    for k in range(path.dim):
        columns[f"x{k + 1}"] = path.values[:, k]
    return pd.DataFrame(columns)


def write_path_csv(path: GridPath, target: Union[str, Path]) -> Path:
    return write_csv(path_frame(path), target)


def read_path_csv(source: Union[str, Path]) -> GridPath:
    """Load a ``t,x1,...,xm`` file, enforcing equispaced increasing times."""
    try:
        frame = pd.read_csv(source)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataFormatError(f"cannot read path file {source}: {e}")

    expected = ["t"] + [f"x{k + 1}" for k in range(frame.shape[1] - 1)]
    if list(frame.columns) != expected or frame.shape[1] < 2:
        raise DataFormatError(
            f"{source}: header must be {','.join(expected)}, got {list(frame.columns)}"
        )
    data = frame.to_numpy(dtype=float)
    if data.shape[0] < 2 or not np.all(np.isfinite(data)):
        raise DataFormatError(f"{source}: need at least two finite rows")

    t = data[:, 0]
    dt = np.diff(t)
    h = (t[-1] - t[0]) / (len(t) - 1)
    if np.any(dt <= 0) or np.max(np.abs(dt - h)) > SPACING_TOLERANCE * abs(h):
        raise DataFormatError(f"{source}: times must be strictly increasing and equispaced")

    logger.debug(f"loaded {source}: {len(t) - 1} intervals, dim {data.shape[1] - 1}")
    return GridPath(float(t[0]), float(t[-1]), data[:, 1:])
