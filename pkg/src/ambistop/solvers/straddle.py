"""
Straddle payoff |√y − K| under Euclidean ambiguity: single upper boundary
for small strikes, a two-sided continuation interval around K² otherwise
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from ..models.problem import AmbiguityParams, Straddle
from ..models.solution import GeneratorDescriptor, GeneratorKind, RadialRegime, StraddleSolution, piecewise_value
from ..utils.errors import BracketFailure, InnerMaxNotUnique, ParameterError
from ..utils.roots import bisect_root, derivative_root_or_refine, expand_bracket, local_maxima
from .radial import RadialFundamentals, UcRadial, build_fundamentals, radial_coefficients

logger = logging.getLogger(__name__)


def _upper_jet(y: float, K: float) -> Tuple[float, float, float]:
    """F, F', F'' of √y − K (the payoff above K²)."""
    root = math.sqrt(y)
    return root - K, 0.5 / root, -0.25 / (root * y)


def straddle_stopping_bound(p: AmbiguityParams, K: float) -> float:
    """
    ỹ_0: the point above K² where r·F̂ meets the worst-case generator applied
    to F̂ = √y − K. The single threshold always lies above it.
    """
    start = K * K * (1.0 + 1e-9)

    def g(y: float) -> float:
        f0, f1, f2 = _upper_jet(y, K)
        diffusion, drift = radial_coefficients(p, y, p.kappa)
        return float(p.r * f0 - diffusion * f2 - drift * f1)

    if g(start) >= 0:
        return start
    lo, hi = expand_bracket(g, start, max(K * K, 1.0), direction=1, label="y0 tilde")
    return bisect_root(g, lo, hi, xtol=1e-12, label="y0 tilde")


def _single_threshold(f: RadialFundamentals, K: float) -> float:
    psi1 = f.psi1

    def foc(y: float) -> float:
        f0, f1, _ = _upper_jet(y, K)
        v, v1, _ = psi1.jet(y)
        return f0 * v1 - f1 * v

    def foc_prime(y: float) -> float:
        f0, _, f2 = _upper_jet(y, K)
        v, _, v2 = psi1.jet(y)
        return f0 * v2 - f2 * v

    start = K * K * (1.0 + 1e-9)
    step = max(K * K, f.length_scale())
    lo, hi = expand_bracket(foc, start, step, direction=1, label="y_K*")
    return bisect_root(foc, lo, hi, xtol=1e-12, fprime=foc_prime, label="y_K*")


def straddle_single_threshold(p: AmbiguityParams, K: float,
                              fundamentals: Optional[RadialFundamentals] = None) -> float:
    """y_K* > K²: maximizer of (√y − K)/ψ_1(y)."""
    if K <= 0:
        raise ParameterError("strike must be positive", {"K": K})
    return _single_threshold(fundamentals or build_fundamentals(p), K)


def _single_regime_excess(f: RadialFundamentals, K: float) -> Tuple[float, float]:
    """(y_K*, Π_0(y_K*)·ψ_1(0) − K); nonnegative excess means a single boundary."""
    y_star = _single_threshold(f, K)
    pi0 = (math.sqrt(y_star) - K) / f.psi1(y_star)
    return y_star, pi0 * f.entrance_value - K


def critical_strike(p: AmbiguityParams, fundamentals: Optional[RadialFundamentals] = None,
                    xtol: float = 1e-7) -> float:
    """Strike where the single-boundary condition holds with equality."""
    f = fundamentals or build_fundamentals(p)

    def excess(K: float) -> float:
        return _single_regime_excess(f, K)[1]

    lo, hi = expand_bracket(excess, 1e-2, 1e-2, direction=1, label="critical strike")
    k_crit = optimize.brentq(excess, lo, hi, xtol=xtol)
    logger.info(f"critical strike {k_crit:.8g}")
    return float(k_crit)


def straddle_zero_strike_threshold(p: AmbiguityParams,
                                   fundamentals: Optional[RadialFundamentals] = None) -> float:
    """Limit of y_K* as K → 0: root of ψ_1(y) = 2y·ψ_1'(y)."""
    f = fundamentals or build_fundamentals(p)
    scale = f.length_scale()

    def foc(y: float) -> float:
        v, v1, _ = f.psi1.jet(y)
        return v - 2.0 * y * v1

    lo, hi = expand_bracket(foc, 1e-3 * scale, scale, direction=1, label="y_0*")
    return bisect_root(foc, lo, hi, xtol=1e-12, label="y_0*")


class _Matching:
    """One-sided ratio suprema of the straddle around the evaluation point K²."""

    def __init__(self, f: RadialFundamentals, payoff: Straddle, y_single: float, n_grid: int = 160):
        self.f = f
        self.payoff = payoff
        K2 = payoff.K ** 2
        self.K2 = K2
        self.upper_grid = np.geomspace(K2 * (1.0 + 1e-9), 16.0 * y_single, n_grid)
        self.lower_base = np.geomspace(1e-6 * K2, K2 * (1.0 - 1e-9), n_grid)
        self.logger = logging.getLogger(f"{__name__}.matching")

    def lower_grid(self, c: float) -> np.ndarray:
        extras = [x for x in (c, c * (1 - 1e-3), c * (1 + 1e-3), 1e-2 * c) if 0 < x < self.lower_base[-1]]
        return np.unique(np.concatenate([self.lower_base, extras]))

    def side_sup(self, uc: UcRadial, grid: np.ndarray, side: str) -> Tuple[float, float]:
        payoff = self.payoff
        values = np.asarray(payoff.evaluate(grid)) / uc(grid)
        peaks = local_maxima(values)
        if len(peaks) > 1:
            raise InnerMaxNotUnique(
                f"{side} ratio has several local maxima",
                {"c": uc.c, "maxima": [float(grid[i]) for i in peaks]},
            )
        index = int(np.argmax(values))

        def numerator(w: float) -> float:
            u, u1, _ = uc.jet(w)
            return float(payoff.derivative(w) * u - payoff.evaluate(w) * u1)

        return derivative_root_or_refine(
            numerator, lambda w: float(payoff.evaluate(w) / uc(w)), grid, values, index
        )

    def suprema(self, c: float) -> Tuple[Tuple[float, float], Tuple[float, float], UcRadial]:
        uc = UcRadial(self.f, c)
        return self.side_sup(uc, self.upper_grid, "upper"), self.side_sup(uc, self.lower_grid(c), "lower"), uc

    def gap(self, c: float) -> float:
        upper, lower, _ = self.suprema(c)
        self.logger.debug(f"D({c:.10g}) = {upper[1] - lower[1]:.3e}")
        return upper[1] - lower[1]


def _match_reference_point(matching: _Matching, xtol: float) -> float:
    K2 = matching.K2
    c_lo = 1e-8 * K2
    if matching.gap(c_lo) >= 0:
        raise BracketFailure("matching gap is not negative near the origin", {"c": c_lo})
    c_hi = K2
    for _ in range(64):
        if matching.gap(c_hi) > 0:
            break
        c_lo, c_hi = c_hi, 2.0 * c_hi
    else:
        raise BracketFailure("matching gap stays nonpositive", {"c_hi": c_hi})
    return float(optimize.brentq(matching.gap, c_lo, c_hi, xtol=xtol))


def solve_straddle(
    p: AmbiguityParams,
    K: float,
    fundamentals: Optional[RadialFundamentals] = None,
    xtol: float = 1e-8,
) -> StraddleSolution:
    """
    Optimal stopping of |√y − K| with the worst-case radial drift.

    Step 1 finds the single-boundary candidate y_K*; if the ratio
    Π_0(y_K*) scaled by ψ_1(0) reaches K the candidate is optimal.
    Otherwise the reference point c* equalizes the upper and lower ratio
    suprema seen from K².
    """
    if K <= 0:
        raise ParameterError("strike must be positive", {"K": K})
    f = fundamentals or build_fundamentals(p)
    payoff = Straddle(K=K)
    y0_tilde = straddle_stopping_bound(p, K)
    y_single, excess = _single_regime_excess(f, K)
    if y_single <= y0_tilde:
        logger.warning(f"single threshold {y_single:.6g} not above the generator bound {y0_tilde:.6g}")
    diagnostics = {"y_single": y_single, "y0_tilde": y0_tilde, "single_excess": excess}

    if excess >= 0:
        lam = (math.sqrt(y_single) - K) / f.psi1(y_single)
        continuation = ((0.0, y_single),)
        logger.info(f"straddle K={K}: single boundary at {y_single:.8g}")
        return StraddleSolution(
            regime=RadialRegime.SINGLE_UPPER_BOUNDARY,
            c_star=0.0,
            thresholds=(y_single,),
            lambda_star=lam,
            value=piecewise_value(payoff, lam, f.psi1, continuation),
            generator=GeneratorDescriptor(GeneratorKind.SIGN_SWITCH_RADIAL, kappa=p.kappa, c=0.0),
            payoff=payoff,
            continuation=continuation,
            diagnostics=diagnostics,
            K=K,
            y1_star=y_single,
            y2_star=None,
        )

    matching = _Matching(f, payoff, y_single)
    c_star = _match_reference_point(matching, xtol)
    (y1, lam), (y2, lam_lower), uc = matching.suprema(c_star)
    diagnostics["lambda_gap"] = lam - lam_lower
    continuation = ((y2, y1),)
    logger.info(f"straddle K={K}: two boundaries y2*={y2:.8g}, y1*={y1:.8g}, c*={c_star:.8g}")
    return StraddleSolution(
        regime=RadialRegime.TWO_BOUNDARY,
        c_star=c_star,
        thresholds=(y2, y1),
        lambda_star=lam,
        value=piecewise_value(payoff, lam, uc, continuation),
        generator=GeneratorDescriptor(GeneratorKind.SIGN_SWITCH_RADIAL, kappa=p.kappa, c=c_star),
        payoff=payoff,
        continuation=continuation,
        diagnostics=diagnostics,
        K=K,
        y1_star=y1,
        y2_star=y2,
    )


__all__ = [
    "straddle_stopping_bound", "straddle_single_threshold", "critical_strike",
    "straddle_zero_strike_threshold", "solve_straddle",
]
