import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, Union

import numpy as np
import pandas as pd

from src.core.config import get_settings


def _to_builtin(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return _to_builtin(value.tolist())
    if isinstance(value, np.generic):
        return _to_builtin(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Path):
        return str(value)
    return value


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Write a frame with 17 significant digits and no index."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=get_settings().FLOAT_FORMAT)
    return path


def write_json(payload: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(_to_builtin(payload), f, indent=2, sort_keys=True)
    return path


def write_jsonl(records: Iterable[Dict[str, Any]], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        for record in records:
            f.write(json.dumps(_to_builtin(record), sort_keys=True))
            f.write("\n")
    return path
