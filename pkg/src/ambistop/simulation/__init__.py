"""Monte Carlo verification engine"""

from .engine import (
    MCEstimate, PathBatch, PriorKind, PriorStrategy, SimConfig, StoppingRule, estimate_stopped_value,
    simulate_linear, simulate_radial, supermartingale_check,
)

__all__ = [
    "SimConfig", "PriorKind", "PriorStrategy", "MCEstimate", "StoppingRule", "PathBatch",
    "simulate_linear", "simulate_radial", "estimate_stopped_value", "supermartingale_check",
]
