from .hypergeometric import (
    SpecFunConfig, DEFAULT_CONFIG, kummer_m, tricomi_u, whittaker_m, whittaker_w,
)
from .gamma import gamma, gamma_upper

__all__ = [
    "SpecFunConfig", "DEFAULT_CONFIG", "kummer_m", "tricomi_u",
    "whittaker_m", "whittaker_w", "gamma", "gamma_upper",
]
