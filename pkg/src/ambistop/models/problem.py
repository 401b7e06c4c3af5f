"""
Problem vocabulary: ambiguity parameters, the payoff catalog and the JSON
problem spec consumed by the CLI and the HTTP API
"""

import math
from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, ClassVar, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing_extensions import Annotated

from ..utils.errors import ParameterError, PayoffDomainError


class CaseKind(str, Enum):
    LINEAR = "linear"
    RADIAL = "radial"


class RadialChart(str, Enum):
    """State variable of the radial case: squared radius or radius."""
    SQUARED = "squared"
    RADIUS = "radius"


class PayoffKind(str, Enum):
    DIGITAL_ASYMMETRIC = "DigitalAsymmetric"
    EVEN_KINK = "EvenKink"
    PERIODIC_COSINE = "PeriodicCosine"
    STRADDLE = "Straddle"
    IDENTITY_RADIAL = "IdentityRadial"
    USER_TABLE = "UserTable"


class AmbiguityParams(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    kappa: float = Field(ge=0.0)
    r: float = Field(gt=0.0)
    a_norm: Optional[float] = Field(default=None, gt=0.0)
    dim: Optional[int] = Field(default=None, ge=2)
    chart: RadialChart = RadialChart.SQUARED

    @classmethod
    def from_weights(cls, kappa: float, r: float, weights: Sequence[float]) -> "AmbiguityParams":
        """Linear-case parameters from the weight vector a (only ‖a‖ matters)."""
        return cls(kappa=kappa, r=r, a_norm=math.hypot(*weights))

    def require_linear(self) -> float:
        if self.a_norm is None:
            raise ParameterError("linear case needs a_norm", {"params": self.model_dump()})
        return self.a_norm

    def require_radial(self) -> int:
        if self.dim is None:
            raise ParameterError("radial case needs dim", {"params": self.model_dump()})
        return self.dim

    def with_kappa(self, kappa: float) -> "AmbiguityParams":
        return AmbiguityParams(
            kappa=kappa, r=self.r, a_norm=self.a_norm, dim=self.dim, chart=self.chart
        )


def _as_array(y: Any) -> np.ndarray:
    return np.asarray(y, dtype=float)


def _like_input(y: Any, out: np.ndarray):
    if np.ndim(y) == 0:
        return float(out)
    return out


class BasePayoff(BaseModel, ABC):
    """
    Exercise payoff F̂ of the reduced state.

    ``evaluate`` and ``derivative`` accept scalars or numpy arrays and return
    the same shape.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    radial_only: ClassVar[bool] = False
    has_derivative: ClassVar[bool] = True

    @abstractmethod
    def _formula(self, y: np.ndarray) -> np.ndarray:
        pass

    def _slope(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{self.kind} has no closed-form derivative")

    def _check_domain(self, y: np.ndarray) -> None:
        if self.radial_only and np.any(y < 0):
            raise PayoffDomainError(
                f"{self.kind} is defined on y >= 0",
                {"min_y": float(np.min(y))},
            )

    def evaluate(self, y: Any):
        arr = _as_array(y)
        self._check_domain(arr)
        return _like_input(y, self._formula(arr))

    def derivative(self, y: Any):
        arr = _as_array(y)
        self._check_domain(arr)
        return _like_input(y, self._slope(arr))

    def breakpoints(self) -> Tuple[float, ...]:
        """Locations of kinks or jumps."""
        return ()

    def support(self) -> Tuple[float, float]:
        """(center, half width) of the region where the payoff has structure."""
        return 0.0, 1.0


class DigitalAsymmetric(BasePayoff):
    kind: Literal["DigitalAsymmetric"] = "DigitalAsymmetric"
    k1: float = Field(ge=0.0)
    k2: float = Field(ge=0.0)
    k3: float = Field(ge=0.0)

    def _formula(self, y: np.ndarray) -> np.ndarray:
        # right limit k3 at the jump
        return np.where(y >= 0.0, self.k2 * y + self.k3, -self.k1 * y)

    def _slope(self, y: np.ndarray) -> np.ndarray:
        return np.where(y >= 0.0, self.k2, -self.k1)

    def breakpoints(self) -> Tuple[float, ...]:
        return (0.0,)

    def support(self) -> Tuple[float, float]:
        scale = 1.0
        if self.k2 > 0:
            scale = max(scale, self.k3 / self.k2)
        return 0.0, scale


class EvenKink(BasePayoff):
    kind: Literal["EvenKink"] = "EvenKink"
    k1: float = Field(ge=0.0)

    def _formula(self, y: np.ndarray) -> np.ndarray:
        return self.k1 * np.abs(y)

    def _slope(self, y: np.ndarray) -> np.ndarray:
        return self.k1 * np.where(y >= 0.0, 1.0, -1.0)

    def breakpoints(self) -> Tuple[float, ...]:
        return (0.0,)


class PeriodicCosine(BasePayoff):
    kind: Literal["PeriodicCosine"] = "PeriodicCosine"

    def _formula(self, y: np.ndarray) -> np.ndarray:
        return np.cos(y)

    def _slope(self, y: np.ndarray) -> np.ndarray:
        return -np.sin(y)

    def support(self) -> Tuple[float, float]:
        return 0.0, math.pi


class Straddle(BasePayoff):
    kind: Literal["Straddle"] = "Straddle"
    K: float = Field(gt=0.0)

    radial_only: ClassVar[bool] = True

    def _formula(self, y: np.ndarray) -> np.ndarray:
        return np.abs(np.sqrt(y) - self.K)

    def _slope(self, y: np.ndarray) -> np.ndarray:
        root = np.sqrt(y)
        with np.errstate(divide="ignore"):
            return np.where(root >= self.K, 1.0, -1.0) / (2.0 * root)

    def breakpoints(self) -> Tuple[float, ...]:
        return (self.K ** 2,)

    def support(self) -> Tuple[float, float]:
        return self.K ** 2, max(self.K ** 2, 1.0)


class IdentityRadial(BasePayoff):
    kind: Literal["IdentityRadial"] = "IdentityRadial"

    radial_only: ClassVar[bool] = True

    def _formula(self, y: np.ndarray) -> np.ndarray:
        return np.array(y, dtype=float, copy=True)

    def _slope(self, y: np.ndarray) -> np.ndarray:
        return np.ones_like(y)


class UserTable(BasePayoff):
    """Piecewise-linear payoff through the samples, constant outside the hull."""

    kind: Literal["UserTable"] = "UserTable"
    samples: List[Tuple[float, float]] = Field(min_length=2)

    has_derivative: ClassVar[bool] = False

    @field_validator("samples")
    @classmethod
    def _strictly_increasing(cls, samples: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        ys = [point[0] for point in samples]
        if any(b <= a for a, b in zip(ys, ys[1:])):
            raise ValueError("sample abscissae must be strictly increasing")
        return samples

    @property
    def nodes(self) -> np.ndarray:
        return np.array([point[0] for point in self.samples], dtype=float)

    @property
    def levels(self) -> np.ndarray:
        return np.array([point[1] for point in self.samples], dtype=float)

    def _formula(self, y: np.ndarray) -> np.ndarray:
        return np.interp(y, self.nodes, self.levels)

    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(float(x) for x in self.nodes)

    def support(self) -> Tuple[float, float]:
        nodes = self.nodes
        center = 0.5 * (nodes[0] + nodes[-1])
        return float(center), float(max(0.5 * (nodes[-1] - nodes[0]), 1.0))


Payoff = Annotated[
    Union[DigitalAsymmetric, EvenKink, PeriodicCosine, Straddle, IdentityRadial, UserTable],
    Field(discriminator="kind"),
]

LINEAR_KINDS = {
    PayoffKind.DIGITAL_ASYMMETRIC, PayoffKind.EVEN_KINK,
    PayoffKind.PERIODIC_COSINE, PayoffKind.USER_TABLE,
}
RADIAL_KINDS = {PayoffKind.STRADDLE, PayoffKind.IDENTITY_RADIAL, PayoffKind.USER_TABLE}


def evaluate_payoff(p: BasePayoff, y: Any):
    """F̂(y) for a payoff of any kind; PayoffDomainError for y < 0 on radial kinds."""
    return p.evaluate(y)


class RunOptions(BaseModel):
    """Optional per-run overrides carried by a problem spec."""

    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    y0: Optional[float] = None
    y_ref: Optional[float] = None
    mc_paths: Optional[int] = Field(default=None, ge=100)
    dt: Optional[float] = Field(default=None, gt=0.0)
    horizon: Optional[float] = Field(default=None, gt=0.0)
    seed: Optional[int] = Field(default=None, ge=0)
    workers: Optional[int] = Field(default=None, ge=1)
    antithetic: Optional[bool] = None
    grid_n: Optional[int] = Field(default=None, ge=101)
    grid_lo: Optional[float] = None
    grid_hi: Optional[float] = None


class ProblemSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    case: CaseKind
    kappa: float = Field(ge=0.0)
    r: float = Field(gt=0.0)
    a_norm: Optional[float] = Field(default=None, gt=0.0)
    dim: Optional[int] = Field(default=None, ge=2)
    chart: RadialChart = RadialChart.SQUARED
    payoff: Payoff
    options: RunOptions = Field(default_factory=RunOptions)

    @model_validator(mode="after")
    def _check_case(self) -> "ProblemSpec":
        kind = PayoffKind(self.payoff.kind)
        if self.case == CaseKind.LINEAR:
            if self.a_norm is None:
                raise ValueError("a_norm is required for case 'linear'")
            if kind not in LINEAR_KINDS:
                raise ValueError(f"payoff kind {kind.value} is not available in the linear case")
        else:
            if self.dim is None:
                raise ValueError("dim is required for case 'radial'")
            if kind not in RADIAL_KINDS:
                raise ValueError(f"payoff kind {kind.value} is not available in the radial case")
        return self

    @property
    def params(self) -> AmbiguityParams:
        if self.case == CaseKind.LINEAR:
            return AmbiguityParams(kappa=self.kappa, r=self.r, a_norm=self.a_norm)
        return AmbiguityParams(kappa=self.kappa, r=self.r, dim=self.dim, chart=self.chart)

    def with_parameter(self, name: str, value: float) -> "ProblemSpec":
        """Copy of the spec with one sweepable parameter replaced (validated)."""
        data = self.model_dump(mode="json")
        if name in ("kappa", "r", "a_norm"):
            data[name] = value
        elif name == "K":
            if self.payoff.kind != PayoffKind.STRADDLE:
                raise ParameterError("parameter K needs a Straddle payoff", {"kind": self.payoff.kind})
            data["payoff"]["K"] = value
        else:
            raise ParameterError(f"unknown sweep parameter {name}", {"allowed": ["kappa", "r", "K", "a_norm"]})
        return ProblemSpec.model_validate(data)


__all__ = [
    "CaseKind", "RadialChart", "PayoffKind", "AmbiguityParams", "BasePayoff",
    "DigitalAsymmetric", "EvenKink", "PeriodicCosine", "Straddle",
    "IdentityRadial", "UserTable", "Payoff", "evaluate_payoff",
    "RunOptions", "ProblemSpec", "LINEAR_KINDS", "RADIAL_KINDS",
]
