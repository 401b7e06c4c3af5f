"""
Linear-combination payoffs F(x) = F̂(aᵀx): exponent constants, the U_c
family and the closed-form solvers for even, digital and periodic payoffs
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from ..models.problem import AmbiguityParams, BasePayoff, DigitalAsymmetric, EvenKink, PeriodicCosine
from ..models.solution import (
    GeneratorDescriptor, GeneratorKind, LinearRegime, Solution, piecewise_value,
)
from ..utils.errors import (
    BracketFailure, NoStationaryLaw, NotEven, NotUnimodal, ParameterError,
    SymmetryViolation, UnboundedRatio,
)
from ..utils.roots import bisect_root, derivative_root_or_refine, expand_bracket, local_maxima
from .base import ExcessiveFunction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Exponents:
    """
    Roots ψ > 0 > φ of ½‖a‖²β² − κ‖a‖β − r = 0 and their mirrored pair.

    Also carries the profile H(s) = wφ·e^(φs) + wψ·e^(ψs), so that
    h_1c(y) = H(y − c), h_2c(y) = H(c − y) and U_c(y) = H(|y − c|).
    """

    psi: float
    phi: float
    psi_hat: float
    phi_hat: float
    kappa: float
    r: float
    a_norm: float

    @property
    def w_phi(self) -> float:
        return self.psi / (self.psi - self.phi)

    @property
    def w_psi(self) -> float:
        return -self.phi / (self.psi - self.phi)

    @property
    def length_scale(self) -> float:
        return 1.0 / min(self.psi, -self.phi)

    def profile(self, s: np.ndarray, order: int = 0) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore"):
            return (self.w_phi * self.phi ** order * np.exp(self.phi * s)
                    + self.w_psi * self.psi ** order * np.exp(self.psi * s))


def compute_exponents(p: AmbiguityParams) -> Exponents:
    a = p.require_linear()
    root = math.sqrt(p.kappa ** 2 + 2.0 * p.r)
    psi = (p.kappa + root) / a
    phi = (p.kappa - root) / a
    return Exponents(psi=psi, phi=phi, psi_hat=-phi, phi_hat=-psi, kappa=p.kappa, r=p.r, a_norm=a)


class UcLinear(ExcessiveFunction):
    """U_c for the broken-drift Brownian motion; c may be ±inf."""

    def __init__(self, exponents: Exponents, c: float):
        self.exponents = exponents
        self.c = float(c)

    def h1(self, y: Any):
        return self._apply(lambda v: self.exponents.profile(v - self.c), y)

    def h2(self, y: Any):
        return self._apply(lambda v: self.exponents.profile(self.c - v), y)

    def _edge(self, y: np.ndarray, order: int) -> np.ndarray:
        rate = self.exponents.psi if self.c < 0 else self.exponents.phi_hat
        with np.errstate(over="ignore"):
            return rate ** order * np.exp(rate * y)

    def _value(self, y: np.ndarray) -> np.ndarray:
        if math.isinf(self.c):
            return self._edge(y, 0)
        return self.exponents.profile(np.abs(y - self.c))

    def _first(self, y: np.ndarray) -> np.ndarray:
        if math.isinf(self.c):
            return self._edge(y, 1)
        return np.sign(y - self.c) * self.exponents.profile(np.abs(y - self.c), 1)

    def _second(self, y: np.ndarray) -> np.ndarray:
        if math.isinf(self.c):
            return self._edge(y, 2)
        return self.exponents.profile(np.abs(y - self.c), 2)


def stationary_density_linear(p: AmbiguityParams, c: float, y: Any):
    """Laplace law (κ/‖a‖)·exp(−(2κ/‖a‖)|y − c|) of the worst-case process."""
    a = p.require_linear()
    if p.kappa == 0:
        raise NoStationaryLaw("driftless Brownian motion has no stationary law", {"kappa": 0.0})
    if not math.isfinite(c):
        raise ParameterError("stationary law needs a finite reference point", {"c": c})
    rate = p.kappa / a
    out = rate * np.exp(-2.0 * rate * np.abs(np.asarray(y, dtype=float) - c))
    return float(out) if np.ndim(y) == 0 else out


def _sign_switch(kappa: float, c: float) -> GeneratorDescriptor:
    return GeneratorDescriptor(GeneratorKind.SIGN_SWITCH_LINEAR, kappa=kappa, c=c)


def _check_even(payoff: BasePayoff, span: float) -> None:
    ys = np.linspace(span / 200.0, span, 200)
    left = np.asarray(payoff.evaluate(-ys))
    right = np.asarray(payoff.evaluate(ys))
    gap = np.abs(left - right)
    if np.any(gap > 1e-12 * (1.0 + np.abs(right))):
        worst = int(np.argmax(gap))
        raise NotEven("payoff is not even", {"y": float(ys[worst]), "gap": float(gap[worst])})


def _even_kink_threshold(e: Exponents) -> float:
    """Root of ψe^(φx)(1 − φx) − φe^(ψx)(1 − ψx) on (0, ∞)."""
    psi, phi = e.psi, e.phi

    def q(x: float) -> float:
        return psi * math.exp(phi * x) * (1 - phi * x) - phi * math.exp(psi * x) * (1 - psi * x)

    def dq(x: float) -> float:
        return -psi * phi ** 2 * x * math.exp(phi * x) + phi * psi ** 2 * x * math.exp(psi * x)

    lo, hi = expand_bracket(q, 0.0, 1.0 / psi, direction=1, label="even threshold")
    return bisect_root(q, lo, hi, xtol=1e-12, fprime=dq, label="even threshold")


def solve_even(p: AmbiguityParams, payoff: BasePayoff, n_grid: int = 4001) -> Solution:
    """
    Even payoffs: c* = 0 and a symmetric continuation interval (−x*, x*)
    where x* maximizes F̂/U_0 on (0, ∞).
    """
    e = compute_exponents(p)
    u0 = UcLinear(e, 0.0)
    center, half = payoff.support()
    span = abs(center) + half + 40.0 * e.length_scale
    _check_even(payoff, span)

    if isinstance(payoff, EvenKink):
        x_star = _even_kink_threshold(e)
    else:
        grid = np.geomspace(1e-6 * e.length_scale, span, n_grid)
        ratio = np.asarray(payoff.evaluate(grid)) / u0(grid)
        peaks = local_maxima(ratio)
        if len(peaks) > 1:
            raise NotUnimodal(
                "ratio of payoff to U_0 has several local maxima",
                {"maxima": [float(grid[i]) for i in peaks]},
            )
        index = int(np.argmax(ratio))
        if index == len(grid) - 1:
            raise UnboundedRatio("ratio of payoff to U_0 increases to the end of the grid",
                                 {"direction": "+inf", "edge": float(grid[-1])})
        numerator = None
        if payoff.has_derivative:
            def numerator(x):
                return payoff.derivative(x) * u0(x) - payoff.evaluate(x) * u0.derivative(x)
        x_star, _ = derivative_root_or_refine(
            numerator, lambda x: payoff.evaluate(x) / u0(x), grid, ratio, index
        )
        if index == 0:
            x_star = 0.0

    lam = float(payoff.evaluate(x_star) / u0(x_star)) if x_star > 0 else float(payoff.evaluate(0.0))
    continuation = ((-x_star, x_star),) if x_star > 0 else ()
    thresholds = (-x_star, x_star) if x_star > 0 else ()
    logger.info(f"even payoff: x*={x_star:.8g}, lambda*={lam:.8g}")
    return Solution(
        regime=LinearRegime.SYMMETRIC_TWO_SIDED,
        c_star=0.0,
        thresholds=thresholds,
        lambda_star=lam,
        value=piecewise_value(payoff, lam, u0, continuation),
        generator=_sign_switch(p.kappa, 0.0),
        payoff=payoff,
        continuation=continuation,
    )


class _DigitalProblem:
    """First-order conditions of the digital payoff for a given reference point."""

    def __init__(self, e: Exponents, payoff: DigitalAsymmetric):
        self.e = e
        self.k1, self.k2, self.k3 = payoff.k1, payoff.k2, payoff.k3
        self.step = 1.0 / e.psi
        self.logger = logging.getLogger(f"{__name__}.digital")

    def x1_star(self, c: float) -> float:
        """Maximizer of (k2·x + k3)/h_1c(x) on x > max(c, −k3/k2)."""
        k2, k3, H = self.k2, self.k3, self.e.profile

        def f1(x):
            return float(k2 * H(x - c) - (k2 * x + k3) * H(x - c, 1))

        def f1_prime(x):
            return float(-(k2 * x + k3) * H(x - c, 2))

        start = max(c, -k3 / k2)
        lo, hi = expand_bracket(f1, start, self.step, direction=1,
                                limit=start + 600.0 * self.step, label="x1*")
        return bisect_root(f1, lo, hi, xtol=1e-13, fprime=f1_prime, label="x1*")

    def x2_star(self, c: float) -> float:
        """Maximizer of −k1·x/h_2c(x) on x < min(c, 0)."""
        H = self.e.profile

        def f2(x):
            return float(-x * H(c - x, 1) - H(c - x))

        def f2_prime(x):
            return float(x * H(c - x, 2))

        start = min(c, 0.0)
        lo, hi = expand_bracket(f2, start, self.step, direction=-1,
                                limit=start - 600.0 * self.step, label="x2*")
        return bisect_root(f2, lo, hi, xtol=1e-13, fprime=f2_prime, label="x2*")

    def pi1(self, c: float, x1: Optional[float] = None) -> float:
        x1 = self.x1_star(c) if x1 is None else x1
        return float((self.k2 * x1 + self.k3) / self.e.profile(x1 - c))

    def pi2(self, c: float, x2: Optional[float] = None) -> float:
        x2 = self.x2_star(c) if x2 is None else x2
        return float(-self.k1 * x2 / self.e.profile(c - x2))

    def matching_gap(self, c: float) -> float:
        return self.pi1(c) - self.pi2(c)

    def kink_gap(self, c: float) -> float:
        return self.pi2(c) - self.k3 / float(self.e.profile(-c))


def solve_digital(p: AmbiguityParams, payoff: DigitalAsymmetric, xtol: float = 1e-12) -> Solution:
    """
    Asymmetric digital payoff. The smooth-fit regime matches the two ratio
    maxima at ĉ; when x_1*(ĉ) < 0 the right boundary sits at the jump.
    """
    if min(payoff.k1, payoff.k2, payoff.k3) <= 0:
        raise ParameterError("digital solver needs k1, k2, k3 > 0", payoff.model_dump())
    e = compute_exponents(p)
    problem = _DigitalProblem(e, payoff)

    gap0 = problem.matching_gap(0.0)
    direction = -1 if gap0 > 0 else 1
    lo, hi = expand_bracket(problem.matching_gap, 0.0, problem.step, direction=direction, label="c_hat")
    c_hat = bisect_root(problem.matching_gap, lo, hi, xtol=xtol, label="c_hat")
    x1_hat = problem.x1_star(c_hat)

    if x1_hat >= 0:
        c_star = c_hat
        x1, x2 = x1_hat, problem.x2_star(c_hat)
        lam = problem.pi1(c_hat, x1)
        regime = LinearRegime.DIGITAL_SMOOTH_FIT
        thresholds = (x2, x1)
    else:
        logger.info(f"x1*(c_hat)={x1_hat:.6g} < 0: boundary moves to the jump at 0")
        if c_hat >= 0:
            raise BracketFailure("kink regime needs c_hat < 0", {"c_hat": c_hat})
        c_star = bisect_root(problem.kink_gap, c_hat, 0.0, xtol=xtol, label="kink c*")
        x1, x2 = 0.0, problem.x2_star(c_star)
        lam = payoff.k3 / float(e.profile(-c_star))
        regime = LinearRegime.DIGITAL_KINK_AT_ZERO
        thresholds = (x2, 0.0)

    logger.info(f"digital: regime={regime.value}, c*={c_star:.8g}, x2*={x2:.8g}, x1*={x1:.8g}")
    uc = UcLinear(e, c_star)
    continuation = ((thresholds[0], thresholds[1]),)
    return Solution(
        regime=regime,
        c_star=c_star,
        thresholds=thresholds,
        lambda_star=lam,
        value=piecewise_value(payoff, lam, uc, continuation),
        generator=_sign_switch(p.kappa, c_star),
        payoff=payoff,
        continuation=continuation,
        diagnostics={"c_hat": c_hat, "x1_at_c_hat": x1_hat},
    )


def calibrate_digital_kappa(
    params: AmbiguityParams,
    payoff: DigitalAsymmetric,
    target_c_star: float,
    bounds: Tuple[float, float] = (0.0, 0.05),
    n_grid: int = 26,
    xtol: float = 1e-10,
) -> float:
    """
    Recover the ambiguity level that makes solve_digital return ``target_c_star``.

    The kappa of ``params`` is ignored.
    """

    def gap(kappa: float) -> float:
        return solve_digital(params.with_kappa(kappa), payoff).c_star - target_c_star

    kappas = np.linspace(bounds[0], bounds[1], n_grid)
    gaps = [gap(k) for k in kappas]
    for k_lo, k_hi, g_lo, g_hi in zip(kappas, kappas[1:], gaps, gaps[1:]):
        if g_lo == 0.0:
            return float(k_lo)
        if g_lo * g_hi < 0:
            kappa = optimize.brentq(gap, k_lo, k_hi, xtol=xtol)
            logger.info(f"calibrated kappa={kappa:.10g} for c*={target_c_star}")
            return float(kappa)
    raise BracketFailure(
        "c* does not cross the target inside the kappa bounds",
        {"bounds": list(bounds), "target": target_c_star, "gap_range": [min(gaps), max(gaps)]},
    )


def _periodic_solution(
    e: Exponents,
    payoff: BasePayoff,
    period: float,
    x0: float,
    half_width: float,
    lam: float,
    kappa: float,
) -> Solution:
    """Assemble a solution whose continuation set repeats around x0 + nP."""
    n_first = math.ceil((-period - x0) / period)
    centers = [x0 + n * period for n in range(n_first, n_first + 3) if x0 + n * period < period]
    c_star = centers[0]

    if half_width > 0:
        continuation = ((c_star - half_width, c_star + half_width),)
        thresholds = tuple(sorted(t for m in centers for t in (m - half_width, m + half_width)))
    else:
        continuation, thresholds = (), ()

    def excessive(t):
        return e.profile(np.abs(t))

    value = (piecewise_value(payoff, lam, excessive, continuation, period=period, center=c_star)
             if continuation else piecewise_value(payoff, lam, excessive, ()))
    generator = GeneratorDescriptor(
        GeneratorKind.PERIODIC_SWITCH, kappa=kappa, period=period,
        switch_points=(c_star, c_star + 0.5 * period),
    )
    return Solution(
        regime=LinearRegime.PERIODIC_MULTI_BOUNDARY,
        c_star=c_star,
        thresholds=thresholds,
        lambda_star=lam,
        value=value,
        generator=generator,
        payoff=payoff,
        continuation=continuation,
        period=period if continuation else None,
        diagnostics={"half_width": half_width, "centers": centers},
    )


def solve_periodic_cosine(p: AmbiguityParams) -> Solution:
    """
    F̂ = cos: the continuation set around each minimum x_n = (2n+1)π is
    (2x_n − z*, z*) shifted by multiples of 2π.
    """
    e = compute_exponents(p)
    H = e.profile
    x0 = math.pi

    def u(y: float) -> float:
        s = y - x0
        return float(-math.sin(y) * H(s) - math.cos(y) * H(s, 1))

    def u_prime(y: float) -> float:
        s = y - x0
        return float(-math.cos(y) * (H(s) + H(s, 2)))

    # u vanishes at x0 itself; the bracket starts strictly above x0 + π/2
    z_star = bisect_root(u, 1.5 * math.pi, 2.0 * math.pi, xtol=1e-12, fprime=u_prime, label="z*")
    half_width = z_star - x0
    lam = math.cos(z_star) / float(H(half_width))
    logger.info(f"periodic cosine: z*={z_star:.8g}, lambda*={lam:.8g}")
    return _periodic_solution(e, PeriodicCosine(), 2.0 * math.pi, x0, half_width, lam, p.kappa)


def solve_symmetric_periodic(
    p: AmbiguityParams,
    payoff: BasePayoff,
    period: float,
    x1: float,
    n_grid: int = 2001,
) -> Solution:
    """
    Periodic payoffs symmetric about x0 = x1 − P/2: the ratio F̂/U_x0 is
    maximized on [x0, x1] and the optimal set repeats with period P.
    """
    if period <= 0:
        raise ParameterError("period must be positive", {"period": period})
    e = compute_exponents(p)
    x0 = x1 - 0.5 * period

    probe = np.linspace(x0, x0 + period, 64)
    drift = np.abs(np.asarray(payoff.evaluate(probe + period)) - np.asarray(payoff.evaluate(probe)))
    if np.any(drift > 1e-10 * (1.0 + np.abs(np.asarray(payoff.evaluate(probe))))):
        raise SymmetryViolation("payoff is not periodic with the given period",
                                {"period": period, "max_gap": float(drift.max())})
    offsets = np.linspace(0.0, 0.5 * period, 65)
    mirror = np.abs(np.asarray(payoff.evaluate(x0 - offsets)) - np.asarray(payoff.evaluate(x0 + offsets)))
    if np.any(mirror > 1e-10 * (1.0 + np.abs(np.asarray(payoff.evaluate(x0 + offsets))))):
        raise SymmetryViolation("payoff is not symmetric about x1 - P/2",
                                {"x0": x0, "max_gap": float(mirror.max())})

    grid = np.linspace(x0, x1, n_grid)
    ratio = np.asarray(payoff.evaluate(grid)) / e.profile(grid - x0)
    peaks = local_maxima(ratio)
    if len(peaks) > 1:
        raise NotUnimodal("ratio has several local maxima on [x0, x1]",
                          {"maxima": [float(grid[i]) for i in peaks]})
    index = int(np.argmax(ratio))

    numerator = None
    if payoff.has_derivative:
        def numerator(y):
            return float(payoff.derivative(y) * e.profile(y - x0) - payoff.evaluate(y) * e.profile(y - x0, 1))
    x_star, _ = derivative_root_or_refine(
        numerator, lambda y: float(payoff.evaluate(y) / e.profile(y - x0)), grid, ratio, index
    )
    half_width = x_star - x0
    lam = float(payoff.evaluate(x_star) / e.profile(half_width))
    return _periodic_solution(e, payoff, period, x0, half_width, lam, p.kappa)


__all__ = [
    "Exponents", "compute_exponents", "UcLinear", "stationary_density_linear",
    "solve_even", "solve_digital", "calibrate_digital_kappa",
    "solve_periodic_cosine", "solve_symmetric_periodic",
]
