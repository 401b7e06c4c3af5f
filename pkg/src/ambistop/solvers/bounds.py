"""
Bounds for the two-dimensional sup-norm ambiguity problem from the
Euclidean problems at levels κ√2 and κ
"""

import logging
import math
from typing import Tuple

from ..models.problem import AmbiguityParams, BasePayoff, IdentityRadial
from ..models.solution import Solution
from ..utils.errors import ParameterError
from .radial import solve_radial_single_boundary

logger = logging.getLogger(__name__)


def sandwich_bounds(p2: AmbiguityParams, payoff: BasePayoff = IdentityRadial()) -> Tuple[Solution, Solution]:
    """
    (lower, upper): the Euclidean solutions at κ√2 and κ. The sup-norm ball
    of radius κ sits between the Euclidean balls of radius κ and κ√2, so
    its value lies between the two.
    """
    if p2.require_radial() != 2:
        raise ParameterError("sandwich bounds are stated for d = 2", {"dim": p2.dim})
    lower = solve_radial_single_boundary(p2.with_kappa(math.sqrt(2.0) * p2.kappa), payoff)
    upper = solve_radial_single_boundary(p2, payoff)
    logger.info(f"sandwich thresholds: lower {lower.thresholds}, upper {upper.thresholds}")
    return lower, upper


__all__ = ["sandwich_bounds"]
