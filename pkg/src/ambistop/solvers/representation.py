"""
Generic linear-case solver: V(y) = min_c λ(c)·U_c(y) with λ(c) = sup_w F̂(w)/U_c(w)
"""

import logging
import math
from typing import Any, Dict, List, Tuple

import numpy as np
from scipy import optimize

from ..models.problem import AmbiguityParams, BasePayoff
from ..models.solution import GeneratorDescriptor, GeneratorKind, LinearRegime, Solution
from ..utils.errors import UnboundedRatio
from ..utils.roots import local_maxima, refine_maximum
from .linear import UcLinear, compute_exponents


class RepresentationSolver:
    """
    Evaluates the infimum representation of the value function for any
    payoff whose ratio to some U_c is bounded.

    λ(c) is tabulated once on a log-symmetric c-grid around the payoff
    support plus c = ±inf; ``value`` refines the minimizing c per point.
    """

    def __init__(self, params: AmbiguityParams, payoff: BasePayoff, n_c: int = 201, n_w: int = 2001):
        self.logger = logging.getLogger(__name__)
        self.params = params
        self.payoff = payoff
        self.exponents = compute_exponents(params)

        center, half = payoff.support()
        scale = self.exponents.length_scale
        self.center = float(center)
        pad = half + 30.0 * scale
        self.window = (center - pad, center + pad)
        self.breakpoints = tuple(b for b in payoff.breakpoints() if self.window[0] < b < self.window[1])
        self.w_grid = np.unique(np.concatenate([np.linspace(*self.window, n_w), self.breakpoints]))

        reach = half + 10.0 * scale
        offsets = np.geomspace(1e-3 * reach, reach, (n_c - 1) // 2)
        self.c_grid = np.unique(np.concatenate([center - offsets, [center], center + offsets]))
        self._table: Dict[float, float] = {}
        for c in list(self.c_grid) + [-math.inf, math.inf]:
            self._table[float(c)] = self.lambda_of(float(c))
        finite = [v for k, v in self._table.items() if math.isfinite(v)]
        self.logger.debug(f"lambda table: {len(finite)} finite entries of {len(self._table)}")

    def lambda_of(self, c: float) -> float:
        """sup_w F̂(w)/U_c(w) over the window; inf when the ratio grows toward an edge."""
        uc = UcLinear(self.exponents, c)
        grid = self.w_grid
        if math.isfinite(c) and self.window[0] < c < self.window[1]:
            grid = np.unique(np.append(grid, c))
        with np.errstate(over="ignore", invalid="ignore"):
            ratio = np.asarray(self.payoff.evaluate(grid)) / uc(grid)
        ratio = np.nan_to_num(ratio, nan=0.0)
        index = int(np.argmax(ratio))
        if ratio[index] <= 0:
            return 0.0
        if index in (0, len(grid) - 1):
            return math.inf

        def fun(w: float) -> float:
            return float(self.payoff.evaluate(w) / uc(w))

        # near-tied peaks on both sides of the payoff structure are each refined
        peaks = {index, *(int(i) for i in local_maxima(ratio) if ratio[i] >= 0.99 * ratio[index])}
        best = max(
            refine_maximum(fun, grid, ratio, i, xatol=1e-12, cuts=self.breakpoints)[1] for i in sorted(peaks)
        )
        return float(best)

    def _candidate_values(self, y: float) -> Tuple[List[float], np.ndarray]:
        table = dict(self._table)
        table.setdefault(y, self.lambda_of(y))
        cs = sorted(table)
        values = []
        for c in cs:
            lam = table[c]
            if not math.isfinite(lam):
                values.append(math.inf)
                continue
            values.append(lam * UcLinear(self.exponents, c)(y) if lam > 0 else 0.0)
        return cs, np.asarray(values)

    def value(self, y: float) -> Tuple[float, float, float]:
        """(V(y), c*, λ(c*)) for a single reduced state."""
        y = float(y)
        cs, values = self._candidate_values(y)
        if not np.any(np.isfinite(values)):
            raise UnboundedRatio(
                "payoff/U_c ratio diverges for every reference point",
                {"window": list(self.window), "y": y},
            )
        index = int(np.argmin(values))
        c_best, v_best = cs[index], float(values[index])
        if not math.isfinite(c_best):
            return v_best, c_best, self.lambda_of(c_best)

        lo = cs[index - 1] if index > 0 and math.isfinite(cs[index - 1]) else c_best
        hi = cs[index + 1] if index + 1 < len(cs) and math.isfinite(cs[index + 1]) else c_best
        if hi > lo:
            result = optimize.minimize_scalar(
                lambda c: self.lambda_of(c) * UcLinear(self.exponents, c)(y),
                bounds=(lo, hi), method="bounded", options={"xatol": 1e-8, "maxiter": 500},
            )
            if result.success and result.fun < v_best:
                c_best, v_best = float(result.x), float(result.fun)
        lam = self.lambda_of(c_best)
        return v_best, c_best, lam

    def evaluate(self, y: Any):
        arr = np.asarray(y, dtype=float)
        out = np.array([self.value(v)[0] for v in arr.ravel()]).reshape(arr.shape)
        return float(out) if np.ndim(y) == 0 else out


def value_via_representation(p: AmbiguityParams, payoff: BasePayoff, y: float) -> Tuple[float, float, float]:
    """(value, c_star, lambda_star) at y from the infimum representation."""
    return RepresentationSolver(p, payoff).value(y)


def _mask_intervals(grid: np.ndarray, mask: np.ndarray) -> List[Tuple[float, float]]:
    intervals = []
    start = None
    for i, inside in enumerate(mask):
        if inside and start is None:
            start = i
        if not inside and start is not None:
            intervals.append((start, i - 1))
            start = None
    if start is not None:
        intervals.append((start, len(mask) - 1))
    return intervals


def solve_representation(
    p: AmbiguityParams,
    payoff: BasePayoff,
    n_sample: int = 801,
    gap_tol: float = 1e-7,
) -> Solution:
    """
    Solution wrapper around the representation solver. Thresholds are the
    edges of {V > F̂} detected on a sampling grid and sharpened by bisection.
    """
    logger = logging.getLogger(__name__)
    solver = RepresentationSolver(p, payoff)
    scale = solver.exponents.length_scale
    center, half = payoff.support()
    grid = np.linspace(center - half - 5.0 * scale, center + half + 5.0 * scale, n_sample)

    def is_continuation(y: float) -> bool:
        f = float(payoff.evaluate(y))
        return solver.value(y)[0] - f > gap_tol * (1.0 + abs(f))

    mask = np.array([is_continuation(y) for y in grid])

    def sharpen(inside: float, outside: float) -> float:
        for _ in range(30):
            mid = 0.5 * (inside + outside)
            if is_continuation(mid):
                inside = mid
            else:
                outside = mid
        return 0.5 * (inside + outside)

    continuation = []
    for i_lo, i_hi in _mask_intervals(grid, mask):
        lo = sharpen(grid[i_lo], grid[i_lo - 1]) if i_lo > 0 else -math.inf
        hi = sharpen(grid[i_hi], grid[i_hi + 1]) if i_hi < len(grid) - 1 else math.inf
        continuation.append((lo, hi))
    thresholds = tuple(t for interval in continuation for t in interval if math.isfinite(t))

    value_ref, c_star, lam = solver.value(center)
    logger.info(f"representation: {len(continuation)} continuation interval(s), c*={c_star:.6g} at y={center:.6g}")
    return Solution(
        regime=LinearRegime.GENERIC_REPRESENTATION,
        c_star=c_star,
        thresholds=thresholds,
        lambda_star=lam,
        value=solver.evaluate,
        generator=GeneratorDescriptor(GeneratorKind.SIGN_SWITCH_LINEAR, kappa=p.kappa, c=c_star),
        payoff=payoff,
        continuation=tuple(continuation),
        diagnostics={"y_ref": float(center), "value_ref": value_ref},
    )


__all__ = ["RepresentationSolver", "value_via_representation", "solve_representation"]
