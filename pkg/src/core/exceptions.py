from typing import Any, Dict, List, Optional


class RoughIntException(Exception):
    """Base exception class for the roughint project"""

    pass


class ConfigurationError(RoughIntException):
    """Raised when there's a configuration error"""

    pass


class DomainError(RoughIntException):
    """Raised when an argument lies outside an operator's domain"""

    pass


class AdmissibilityError(DomainError):
    """Raised when (beta, alpha, epsilon, lambda) violate the integral's constraints"""

    pass


class DataFormatError(RoughIntException):
    """Raised when a path or area file is malformed"""

    pass


class ChenViolationError(DataFormatError):
    """Raised when a loaded area fails the multiplicative identity"""

    pass


class NumericalError(RoughIntException):
    """Raised when a numerical procedure fails"""

    pass


class QuadratureError(NumericalError):
    """Raised when a singular quadrature does not converge"""

    def __init__(self, message: str, term: str):
        super().__init__(f"[{term}] {message}")
        self.term = term


class SolverError(NumericalError):
    """Raised when Picard iteration fails to contract at the minimal step"""

    def __init__(self, message: str, diagnostics: Optional[List[Dict[str, Any]]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class BoxExitError(NumericalError):
    """Raised when the solution leaves the vector field's declared box"""

    pass


VALIDATION_ERRORS = (ConfigurationError, DomainError, DataFormatError)
