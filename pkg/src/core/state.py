from typing import Dict, Any, List
from dataclasses import dataclass, field, asdict
from datetime import datetime


@dataclass(frozen=True)
class StepRecord:
    """Outcome of the Picard iteration on one solver window"""

    lo: int
    hi: int
    picard_iterations: int
    final_defect: float
    threshold: float
    contraction_ratio: float = float("nan")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class RunState:
    """Bookkeeping for one CLI run"""

    command: str
    started_at: datetime = field(default_factory=datetime.now)
    last_updated: datetime = field(default_factory=datetime.now)
    artifacts: List[str] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def update(self, key: str, value: Any) -> None:
        """Update state with new information"""
        self.metadata[key] = value
        self.last_updated = datetime.now()

    def add_artifact(self, path: str) -> None:
        self.artifacts.append(path)
        self.last_updated = datetime.now()

    @property
    def wall_time(self) -> float:
        return (datetime.now() - self.started_at).total_seconds()
