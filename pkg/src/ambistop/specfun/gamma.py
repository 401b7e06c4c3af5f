"""
Complete and upper incomplete gamma functions
"""

import math
import sys

from scipy import special

from ..utils.errors import NoConvergence, ParameterError

_TINY = sys.float_info.min / sys.float_info.epsilon


def gamma(s: float) -> float:
    return float(special.gamma(s))


def _lower_series(s: float, x: float, tol: float, max_iter: int) -> float:
    """γ(s, x) by its power series."""
    ap = s
    term = 1.0 / s
    total = term
    for _ in range(max_iter):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * tol:
            return total * math.exp(-x + s * math.log(x))
    raise NoConvergence("lower incomplete gamma series did not converge", {"s": s, "x": x})


def _upper_continued_fraction(s: float, x: float, tol: float, max_iter: int) -> float:
    """Γ(s, x) by the modified Lentz evaluation of its continued fraction."""
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, max_iter + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return math.exp(-x + s * math.log(x)) * h
    raise NoConvergence("upper incomplete gamma fraction did not converge", {"s": s, "x": x})


def gamma_upper(s: float, x: float, tol: float = 1e-15, max_iter: int = 1000) -> float:
    """
    Upper incomplete gamma Γ(s, x) = ∫_x^∞ t^(s−1) e^(−t) dt.

    Args:
        s: Shape, s > 0
        x: Lower integration limit, x ≥ 0

    Returns:
        Γ(s, x) (not regularized)
    """
    if s <= 0:
        raise ParameterError("gamma_upper: s must be positive", {"s": s})
    if x < 0:
        raise ParameterError("gamma_upper: x must be nonnegative", {"x": x})
    if x == 0.0:
        return gamma(s)
    if x < s + 1.0:
        return gamma(s) - _lower_series(s, x, tol, max_iter)
    return _upper_continued_fraction(s, x, tol, max_iter)

