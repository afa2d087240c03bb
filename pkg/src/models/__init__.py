from .run import RunConfig, load_run_config, COMMANDS
from .reports import (
    SelftestReport,
    IntegrateReport,
    SolveReport,
    StudyReport,
    AuditReport,
    RunManifest,
)

__all__ = [
    "RunConfig",
    "load_run_config",
    "COMMANDS",
    "SelftestReport",
    "IntegrateReport",
    "SolveReport",
    "StudyReport",
    "AuditReport",
    "RunManifest",
]
