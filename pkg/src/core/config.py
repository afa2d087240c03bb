from pydantic import ConfigDict
from pydantic_settings import BaseSettings
from functools import lru_cache


class Settings(BaseSettings):
    """Application settings"""

    PROJECT_NAME: str = "roughint"
    VERSION: str = "1.0.0"
    DESCRIPTION: str = "Rough-path integration by fractional calculus"

    # Files
    DEFAULT_CONFIG_PATH: str = "config/default.yaml"
    LOGGING_CONFIG_PATH: str = "config/logging.yaml"
    OUTPUT_DIR: str = "results"

    # Norms
    HOLDER_EXHAUSTIVE_LIMIT: int = 2048

    # Auxiliary function phi
    PHI_TABLE_LOG_RANGE: float = 12.0
    PHI_TABLE_POINTS: int = 481
    PHI_JACOBI_NODES: int = 80
    PHI_DIRECT_SPLIT: float = 100.0

    # Multiplicative functionals
    CHEN_TOLERANCE: float = 1e-8

    # Experiments
    MAX_WORKERS: int = 1
    FLOAT_FORMAT: str = "%.17g"

    model_config = ConfigDict(env_file=".env", case_sensitive=True, extra="allow")


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings"""
    return Settings()
