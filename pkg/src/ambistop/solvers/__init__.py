from .base import ExcessiveFunction
from .linear import (
    Exponents, compute_exponents, UcLinear, stationary_density_linear, solve_even,
    solve_digital, calibrate_digital_kappa, solve_periodic_cosine, solve_symmetric_periodic,
)
from .representation import RepresentationSolver, value_via_representation, solve_representation
from .radial import (
    radial_coefficients, Fundamental, RadialFundamentals, build_fundamentals, UcRadial,
    build_uc_radial, stationary_density_radial, stationary_mode_radial, solve_radial_single_boundary,
)
from .straddle import (
    straddle_stopping_bound, straddle_single_threshold, critical_strike,
    straddle_zero_strike_threshold, solve_straddle,
)
from .bounds import sandwich_bounds

__all__ = [
    "ExcessiveFunction",
    "Exponents", "compute_exponents", "UcLinear", "stationary_density_linear", "solve_even",
    "solve_digital", "calibrate_digital_kappa", "solve_periodic_cosine", "solve_symmetric_periodic",
    "RepresentationSolver", "value_via_representation", "solve_representation",
    "radial_coefficients", "Fundamental", "RadialFundamentals", "build_fundamentals", "UcRadial",
    "build_uc_radial", "stationary_density_radial", "stationary_mode_radial",
    "solve_radial_single_boundary",
    "straddle_stopping_bound", "straddle_single_threshold", "critical_strike",
    "straddle_zero_strike_threshold", "solve_straddle",
    "sandwich_bounds",
]
