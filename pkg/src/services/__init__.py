from .experiments import ExperimentService, synthetic_driver

__all__ = ["ExperimentService", "synthetic_driver"]
