from .config import Config
from .logger import setup_logging
from .decorators import log_execution
from .serialization import write_csv, write_json, write_jsonl

__all__ = [
    "Config",
    "setup_logging",
    "log_execution",
    "write_csv",
    "write_json",
    "write_jsonl",
]
