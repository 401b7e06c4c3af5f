"""
Bracketing, root polishing and grid-maximum helpers shared by the solvers
"""

import logging
import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from .errors import BracketFailure

logger = logging.getLogger(__name__)

ScalarFunction = Callable[[float], float]


def _sign(value: float) -> int:
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


def expand_bracket(
    f: ScalarFunction,
    start: float,
    step: float,
    direction: int = 1,
    max_expansions: int = 64,
    limit: Optional[float] = None,
    label: str = "root",
) -> Tuple[float, float]:
    """
    Walk away from ``start`` with doubling steps until ``f`` changes sign.

    Args:
        f: Scalar function with a known sign at ``start``
        start: Point where the sign of ``f`` is known
        step: Initial step length (positive)
        direction: +1 to search upwards, -1 downwards
        max_expansions: Number of doublings before giving up
        limit: Optional absolute bound on the search
        label: Name used in diagnostics

    Returns:
        Tuple (lo, hi) with lo < hi and a sign change of ``f`` inside
    """
    f_start = f(start)
    start_sign = _sign(f_start)
    if start_sign == 0:
        return start, start

    inner = start
    width = step
    for expansion in range(max_expansions):
        outer = start + direction * width
        if limit is not None:
            outer = min(outer, limit) if direction > 0 else max(outer, limit)
        f_outer = f(outer)
        if not math.isfinite(f_outer):
            break
        if _sign(f_outer) != start_sign:
            logger.debug(f"{label}: bracket found after {expansion + 1} expansions")
            return (inner, outer) if direction > 0 else (outer, inner)
        inner = outer
        if limit is not None and outer == limit:
            break
        width *= 2.0

    raise BracketFailure(
        f"no sign change found for {label}",
        {"start": start, "direction": direction, "last_point": inner, "f_start": f_start},
    )


def bisect_root(
    f: ScalarFunction,
    lo: float,
    hi: float,
    xtol: float = 1e-12,
    fprime: Optional[ScalarFunction] = None,
    polish_steps: int = 3,
    label: str = "root",
) -> float:
    """
    Bracketed bisection followed by a few guarded Newton steps.

    Newton iterates are only accepted while they stay inside the bracket and
    do not increase |f|.
    """
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if _sign(f_lo) == _sign(f_hi):
        raise BracketFailure(
            f"{label}: endpoints do not bracket a root",
            {"lo": lo, "hi": hi, "f_lo": f_lo, "f_hi": f_hi},
        )

    root = optimize.bisect(f, lo, hi, xtol=xtol, maxiter=500)
    if fprime is None:
        return root

    f_root = f(root)
    for _ in range(polish_steps):
        slope = fprime(root)
        if slope == 0.0 or not math.isfinite(slope):
            break
        candidate = root - f_root / slope
        if not (lo <= candidate <= hi):
            break
        f_candidate = f(candidate)
        if abs(f_candidate) > abs(f_root):
            break
        root, f_root = candidate, f_candidate
        if f_root == 0.0:
            break
    return root


def local_maxima(values: np.ndarray) -> np.ndarray:
    """Indices of interior local maxima (plateaus counted once, at their left end)."""
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        return np.array([], dtype=int)
    left = v[1:-1] > v[:-2]
    right = v[1:-1] >= v[2:]
    candidates = np.flatnonzero(left & right) + 1
    keep = []
    for i in candidates:
        # a plateau must eventually descend to count as a maximum
        j = i
        while j + 1 < v.size and v[j + 1] == v[i]:
            j += 1
        if j + 1 < v.size and v[j + 1] < v[i]:
            keep.append(i)
    return np.asarray(keep, dtype=int)


def refine_maximum(
    fun: ScalarFunction,
    grid: np.ndarray,
    values: np.ndarray,
    index: int,
    xatol: float = 1e-12,
    cuts: Sequence[float] = (),
) -> Tuple[float, float]:
    """
    Refine a grid argmax with a bounded scalar search between its neighbours.

    ``cuts`` are jump or kink locations of ``fun``. The neighbour interval is
    split at every cut inside it and each piece is searched on its own; the
    cut and the next float to its right are also tried, so a supremum that is
    a right limit at a jump is found.

    Returns the best of the grid point and the refined points.
    """
    best_x, best_f = float(grid[index]), float(values[index])
    lo = float(grid[max(index - 1, 0)])
    hi = float(grid[min(index + 1, len(grid) - 1)])
    if hi <= lo:
        return best_x, best_f

    inner = sorted(float(c) for c in cuts if lo < c < hi)
    for x in inner:
        for candidate in (x, math.nextafter(x, math.inf)):
            f = float(fun(candidate))
            if f > best_f:
                best_x, best_f = candidate, f

    edges = [lo, *inner, hi]
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        result = optimize.minimize_scalar(
            lambda x: -fun(x),
            bounds=(a, b),
            method="bounded",
            options={"xatol": xatol, "maxiter": 500},
        )
        if result.success and -result.fun > best_f:
            best_x, best_f = float(result.x), float(-result.fun)
    return best_x, best_f


def derivative_root_or_refine(
    numerator: Optional[ScalarFunction],
    fun: ScalarFunction,
    grid: np.ndarray,
    values: np.ndarray,
    index: int,
    xtol: float = 1e-13,
) -> Tuple[float, float]:
    """
    Locate the maximizer next to grid point ``index``.

    ``numerator`` is a function with the sign of the derivative of ``fun``
    (positive before the maximum, negative after). When it changes sign
    between the neighbours of ``index`` the maximizer is its root, otherwise
    the bounded search of :func:`refine_maximum` is used.
    """
    if numerator is not None and 0 < index < len(grid) - 1:
        lo, hi = float(grid[index - 1]), float(grid[index + 1])
        n_lo, n_hi = numerator(lo), numerator(hi)
        if n_lo > 0 > n_hi:
            x = optimize.brentq(numerator, lo, hi, xtol=xtol, rtol=1e-15, maxiter=200)
            return x, fun(x)
    return refine_maximum(fun, grid, values, index)
