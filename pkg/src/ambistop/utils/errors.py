"""
Error hierarchy for ambistop solvers and verification engines
Every error carries a stable code and an optional details dict for reports
"""

from typing import Dict, Any, Optional


class AmbistopError(Exception):
    """
    Base class for all solver, simulation and configuration failures
    """

    code = "AmbistopError"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": self.code,
            "message": self.message,
            "details": self.details,
        }

    def __str__(self) -> str:
        if self.details:
            return f"{self.code}: {self.message} {self.details}"
        return f"{self.code}: {self.message}"


class ParameterError(AmbistopError, ValueError):
    code = "ParameterError"


class PayoffDomainError(AmbistopError, ValueError):
    code = "PayoffDomainError"


class ConfigError(AmbistopError):
    code = "ConfigError"


class NoConvergence(AmbistopError):
    code = "NoConvergence"


class UnboundedRatio(AmbistopError):
    code = "UnboundedRatio"


class NotUnimodal(AmbistopError):
    code = "NotUnimodal"


class NotEven(AmbistopError):
    code = "NotEven"


class SymmetryViolation(AmbistopError):
    code = "SymmetryViolation"


class BracketFailure(AmbistopError):
    code = "BracketFailure"


class InnerMaxNotUnique(AmbistopError):
    code = "InnerMaxNotUnique"


class NoStationaryLaw(AmbistopError):
    code = "NoStationaryLaw"


__all__ = [
    "AmbistopError", "ParameterError", "PayoffDomainError", "ConfigError",
    "NoConvergence", "UnboundedRatio", "NotUnimodal", "NotEven",
    "SymmetryViolation", "BracketFailure", "InnerMaxNotUnique",
    "NoStationaryLaw",
]
