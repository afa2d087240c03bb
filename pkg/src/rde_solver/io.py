import logging
from pathlib import Path
from typing import Dict, Union

from src.mult_func.io import write_area_csv
from src.path_core.io import write_path_csv
from src.rde_solver.solver import Solution
from src.utils.serialization import write_jsonl

logger = logging.getLogger(__name__)


def write_solution(sol: Solution, out_dir: Union[str, Path], prefix: str = "solution") -> Dict[str, Path]:
    """Path CSV, area CSV and one JSON line per solver window."""
    out_dir = Path(out_dir)
    written = {
        "path": write_path_csv(sol.x, out_dir / f"{prefix}_path.csv"),
        "area": write_area_csv(sol.xy_area, out_dir / f"{prefix}_area.csv"),
        "diagnostics": write_jsonl(sol.step_records(), out_dir / f"{prefix}_steps.jsonl"),
    }
    logger.info(f"wrote solution artifacts to {out_dir}")
    return written
