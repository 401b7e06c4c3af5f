from .errors import (
    AmbistopError, ParameterError, PayoffDomainError, ConfigError,
    NoConvergence, UnboundedRatio, NotUnimodal, NotEven, SymmetryViolation,
    BracketFailure, InnerMaxNotUnique, NoStationaryLaw,
)
from .roots import (
    expand_bracket, bisect_root, local_maxima, refine_maximum,
    derivative_root_or_refine,
)

__all__ = [
    "AmbistopError", "ParameterError", "PayoffDomainError", "ConfigError",
    "NoConvergence", "UnboundedRatio", "NotUnimodal", "NotEven",
    "SymmetryViolation", "BracketFailure", "InnerMaxNotUnique",
    "NoStationaryLaw",
    "expand_bracket", "bisect_root", "local_maxima", "refine_maximum",
    "derivative_root_or_refine",
]
