"""
Solution containers shared by the analytic solvers and the verification engines
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from .problem import BasePayoff

Interval = Tuple[float, float]


class LinearRegime(str, Enum):
    SYMMETRIC_TWO_SIDED = "SymmetricTwoSided"
    PERIODIC_MULTI_BOUNDARY = "PeriodicMultiBoundary"
    DIGITAL_SMOOTH_FIT = "DigitalSmoothFit"
    DIGITAL_KINK_AT_ZERO = "DigitalKinkAtZero"
    GENERIC_REPRESENTATION = "GenericRepresentation"


class RadialRegime(str, Enum):
    SINGLE_UPPER_BOUNDARY = "SingleUpperBoundary"
    TWO_BOUNDARY = "TwoBoundary"


class GeneratorKind(str, Enum):
    SIGN_SWITCH_LINEAR = "SignSwitchLinear"
    SIGN_SWITCH_RADIAL = "SignSwitchRadial"
    PERIODIC_SWITCH = "PeriodicSwitch"


@dataclass(frozen=True)
class GeneratorDescriptor:
    """
    Worst-case density generator as a function of the reduced state.

    The magnitude is always kappa; the sign refers to the direction a/‖a‖
    (linear case) or x/‖x‖ (radial case).
    """

    kind: GeneratorKind
    kappa: float
    c: float = 0.0
    period: Optional[float] = None
    switch_points: Tuple[float, ...] = ()

    def theta(self, y: Any):
        arr = np.asarray(y, dtype=float)
        if self.kind == GeneratorKind.PERIODIC_SWITCH:
            x0 = self.switch_points[0]
            phase = np.mod(arr - x0, self.period)
            sign = np.where(phase <= 0.5 * self.period, 1.0, -1.0)
        else:
            # ties at the reference point resolve to +kappa
            sign = np.where(arr >= self.c, 1.0, -1.0)
        out = self.kappa * sign
        return float(out) if np.ndim(y) == 0 else out

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value, "kappa": self.kappa}
        if self.kind == GeneratorKind.PERIODIC_SWITCH:
            data["period"] = self.period
            data["switch_points"] = list(self.switch_points)
        else:
            data["c"] = encode_extended(self.c)
        return data


def worst_case_theta(generator: GeneratorDescriptor, y: Any):
    """Signed magnitude of the worst-case generator at reduced state(s) ``y``."""
    return generator.theta(y)


def encode_extended(x: float):
    """JSON-safe form of an extended real: infinities become strings."""
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return x


def _reduce_periodic(y: np.ndarray, period: Optional[float], anchor: float) -> np.ndarray:
    if period is None:
        return y
    return anchor + np.mod(y - anchor, period)


@dataclass(frozen=True)
class Solution:
    """
    Output of an analytic solver.

    ``continuation`` lists the open continuation intervals. For periodic
    solutions it holds the intervals of one period starting at
    ``continuation[0][0]`` and ``period`` is set.
    """

    regime: Enum
    c_star: float
    thresholds: Tuple[float, ...]
    lambda_star: float
    value: Callable[[Any], Any]
    generator: GeneratorDescriptor
    payoff: BasePayoff
    continuation: Tuple[Interval, ...] = ()
    period: Optional[float] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def in_continuation(self, y: Any):
        arr = np.asarray(y, dtype=float)
        if not self.continuation:
            out = np.zeros(arr.shape, dtype=bool)
        else:
            reduced = _reduce_periodic(arr, self.period, self.continuation[0][0])
            out = np.zeros(arr.shape, dtype=bool)
            for lo, hi in self.continuation:
                out |= (reduced > lo) & (reduced < hi)
        return bool(out) if np.ndim(y) == 0 else out

    def in_stopping_set(self, y: Any):
        inside = self.in_continuation(y)
        return (not inside) if np.ndim(y) == 0 else ~inside

    def default_start(self) -> float:
        """A representative start point: c* when it is a continuation point."""
        if math.isfinite(self.c_star) and self.in_continuation(self.c_star):
            return float(self.c_star)
        if self.continuation:
            lo, hi = self.continuation[0]
            return 0.5 * (lo + hi)
        return float(self.payoff.support()[0])

    def summary(self) -> Dict[str, Any]:
        return {
            "regime": self.regime.value,
            "c_star": encode_extended(self.c_star),
            "thresholds": [float(t) for t in self.thresholds],
            "lambda_star": float(self.lambda_star),
            "generator": self.generator.to_dict(),
            "period": self.period,
        }


@dataclass(frozen=True)
class StraddleSolution(Solution):
    K: float = 0.0
    y1_star: float = 0.0
    y2_star: Optional[float] = None


def piecewise_value(
    payoff: BasePayoff,
    lam: float,
    excessive: Callable[[np.ndarray], np.ndarray],
    continuation: Tuple[Interval, ...],
    period: Optional[float] = None,
    center: Optional[float] = None,
) -> Callable[[Any], Any]:
    """
    Value closure λ·U(y) on the continuation intervals and F̂(y) elsewhere.

    For periodic problems ``excessive`` receives the offset from ``center``
    reduced to one period.
    """

    def value(y: Any):
        arr = np.asarray(y, dtype=float)
        out = np.array(payoff.evaluate(arr), dtype=float, copy=True)
        if period is None:
            mask = np.zeros(arr.shape, dtype=bool)
            for lo, hi in continuation:
                mask |= (arr > lo) & (arr < hi)
            if np.any(mask):
                out[mask] = lam * np.asarray(excessive(arr[mask]), dtype=float)
        else:
            offset = np.mod(arr - center + 0.5 * period, period) - 0.5 * period
            lo, hi = continuation[0]
            half = 0.5 * (hi - lo)
            mask = np.abs(offset) < half
            if np.any(mask):
                out[mask] = lam * np.asarray(excessive(offset[mask]), dtype=float)
        return float(out) if np.ndim(y) == 0 else out

    return value


__all__ = [
    "LinearRegime", "RadialRegime", "GeneratorKind", "GeneratorDescriptor",
    "worst_case_theta", "encode_extended", "Solution", "StraddleSolution",
    "piecewise_value", "Interval",
]
