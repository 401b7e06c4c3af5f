"""
Euclidean ambiguity with radial payoffs F(x) = F̂(‖x‖² or ‖x‖)

Fundamental solutions are the Whittaker forms u_{±κ}, v_{±κ}, written as
(2γ)^{n/2}·e^{(±κ−γ)ρ}·M(α, n, 2γρ) and the U counterpart in the radius
variable ρ with n = d − 1 and γ = √(κ² + 2r). The state chart decides
whether callers see y = ρ² or y = ρ.
"""

import logging
import math
from functools import lru_cache
from typing import Any, Optional, Tuple

import numpy as np
from scipy import integrate, special

from ..models.problem import AmbiguityParams, BasePayoff, RadialChart
from ..models.solution import (
    GeneratorDescriptor, GeneratorKind, RadialRegime, Solution, piecewise_value,
)
from ..specfun import DEFAULT_CONFIG, SpecFunConfig, gamma_upper, kummer_m, tricomi_u
from ..utils.errors import NoStationaryLaw, NotUnimodal, ParameterError, UnboundedRatio
from ..utils.roots import derivative_root_or_refine, local_maxima
from .base import ExcessiveFunction

logger = logging.getLogger(__name__)

Jet = Tuple[float, float, float]

_EXP_LIMIT = 709.0


def _exp(x: float) -> float:
    return math.inf if x > _EXP_LIMIT else math.exp(x)


def radial_coefficients(p: AmbiguityParams, y: Any, theta: Any) -> Tuple[Any, Any]:
    """
    (diffusion, drift) of the reduced radial state when the density
    generator points along x/‖x‖ with signed magnitude ``theta``.
    """
    d = p.require_radial()
    y = np.asarray(y, dtype=float)
    if p.chart == RadialChart.SQUARED:
        return 2.0 * y, d - 2.0 * theta * np.sqrt(y)
    with np.errstate(divide="ignore"):
        return np.full_like(y, 0.5), (d - 1) / (2.0 * y) - theta


class Fundamental:
    """
    One fundamental solution of ½v'' + (n/(2ρ) − σκ)v' = rv in the radius
    variable, reported in the state chart.

    ``kind`` is "M" for the increasing solution and "U" for the decreasing one.
    """

    def __init__(
        self,
        name: str,
        kind: str,
        sigma: int,
        kappa: float,
        gamma: float,
        n: int,
        chart: RadialChart,
        config: SpecFunConfig = DEFAULT_CONFIG,
        numeric: bool = False,
    ):
        self.name = name
        self.kind = kind
        self.sigma = sigma
        self.gamma = gamma
        self.n = n
        self.chart = chart
        self.config = config
        self.numeric = numeric
        self.s = sigma * kappa - gamma
        self.alpha = 0.5 * n * (1.0 - sigma * kappa / gamma)
        self.log_scale = 0.5 * n * math.log(2.0 * gamma)
        self._radius_jet = lru_cache(maxsize=None)(self._compute_radius_jet)
        self._state_jet = lru_cache(maxsize=None)(self._compute_state_jet)

    def _radius_value(self, rho: float) -> float:
        return self._radius_jet(rho)[0]

    def _compute_radius_jet(self, rho: float) -> Jet:
        a, n, g, s, z = self.alpha, self.n, self.gamma, self.s, 2.0 * self.gamma * rho
        if self.kind == "M":
            f0 = kummer_m(a, n, z, self.config, scaled=True)
            f1 = a / n * kummer_m(a + 1, n + 1, z, self.config, scaled=True)
            f2 = a * (a + 1) / (n * (n + 1)) * kummer_m(a + 2, n + 2, z, self.config, scaled=True)
            pref = _exp(self.log_scale + (s + 2.0 * g) * rho)
        else:
            if rho <= 0:
                return math.inf, -math.inf, math.inf
            f0 = tricomi_u(a, n, z, self.config)
            f1 = -a * tricomi_u(a + 1, n + 1, z, self.config)
            f2 = a * (a + 1) * tricomi_u(a + 2, n + 2, z, self.config)
            pref = _exp(self.log_scale + s * rho)
        return (
            pref * f0,
            pref * (s * f0 + 2.0 * g * f1),
            pref * (s * s * f0 + 4.0 * s * g * f1 + 4.0 * g * g * f2),
        )

    def _compute_state_jet(self, y: float) -> Jet:
        if self.numeric:
            return self._numeric_jet(y)
        if self.chart == RadialChart.RADIUS:
            return self._radius_jet(y)
        rho = math.sqrt(y)
        v, v1, v2 = self._radius_jet(rho)
        if rho == 0:
            return v, 0.5 * v2, math.nan
        return v, v1 / (2.0 * rho), (v2 - v1 / rho) / (4.0 * rho * rho)

    def _numeric_jet(self, y: float) -> Jet:
        h = 1e-5 * max(1.0, y)
        h = min(h, 0.5 * y) if y > 0 else h

        def value(x: float) -> float:
            return self._radius_value(math.sqrt(x) if self.chart == RadialChart.SQUARED else x)

        f2p, f1p, f0, f1m, f2m = value(y + 2 * h), value(y + h), value(y), value(y - h), value(y - 2 * h)
        first = (-f2p + 8 * f1p - 8 * f1m + f2m) / (12 * h)
        second = (-f2p + 16 * f1p - 30 * f0 + 16 * f1m - f2m) / (12 * h * h)
        return f0, first, second

    def jet(self, y: float) -> Jet:
        """(f, f', f'') at a single state."""
        if y < 0:
            raise ParameterError(f"{self.name} needs a nonnegative state", {"y": y})
        return self._state_jet(float(y))

    def _vectorized(self, y: Any, order: int):
        arr = np.asarray(y, dtype=float)
        out = np.array([self.jet(v)[order] for v in arr.ravel()]).reshape(arr.shape)
        return float(out) if np.ndim(y) == 0 else out

    def __call__(self, y: Any):
        return self._vectorized(y, 0)

    def derivative(self, y: Any):
        return self._vectorized(y, 1)

    def second_derivative(self, y: Any):
        return self._vectorized(y, 2)


class RadialFundamentals:
    """
    ψ_i increasing and φ_i decreasing solutions of the inward-drift (i = 1,
    used above the reference point) and outward-drift (i = 2) generators,
    with their Wronskian constants and scale/speed densities.
    """

    def __init__(self, p: AmbiguityParams, config: SpecFunConfig = DEFAULT_CONFIG, numeric: bool = False):
        self.dim = p.require_radial()
        self.kappa = p.kappa
        self.r = p.r
        self.chart = p.chart
        self.numeric_derivatives = numeric
        n = self.dim - 1
        self.gamma = math.sqrt(p.kappa ** 2 + 2.0 * p.r)
        self.a_kappa_plus = p.kappa * n / (2.0 * self.gamma)
        self.a_kappa_minus = -self.a_kappa_plus
        self.b = 0.5 * self.dim - 1.0

        def make(name: str, kind: str, sigma: int) -> Fundamental:
            return Fundamental(name, kind, sigma, p.kappa, self.gamma, n, p.chart, config, numeric)

        self.psi1 = make("psi1", "M", 1)
        self.phi1 = make("phi1", "U", 1)
        self.psi2 = make("psi2", "M", -1)
        self.phi2 = make("phi2", "U", -1)

        factor = 2.0 if p.chart == RadialChart.RADIUS else 1.0
        self.B1 = factor * self.gamma * math.exp(special.gammaln(n) - special.gammaln(self.psi1.alpha))
        self.B2 = factor * self.gamma * math.exp(special.gammaln(n) - special.gammaln(self.psi2.alpha))

    @property
    def entrance_value(self) -> float:
        """lim ψ_1 at the origin."""
        return (2.0 * self.gamma) ** (0.5 * (self.dim - 1))

    def _scale_density(self, y: Any, sigma: int):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            if self.chart == RadialChart.SQUARED:
                return y ** (-0.5 * self.dim) * np.exp(2.0 * sigma * self.kappa * np.sqrt(y))
            return y ** (1.0 - self.dim) * np.exp(2.0 * sigma * self.kappa * y)

    def S1_prime(self, y: Any):
        return self._scale_density(y, 1)

    def S2_prime(self, y: Any):
        return self._scale_density(y, -1)

    def _speed_density(self, y: Any, sigma: int):
        y = np.asarray(y, dtype=float)
        if self.chart == RadialChart.SQUARED:
            return 1.0 / (2.0 * y * self._scale_density(y, sigma))
        return 2.0 / self._scale_density(y, sigma)

    def m1_prime(self, y: Any):
        return self._speed_density(y, 1)

    def m2_prime(self, y: Any):
        return self._speed_density(y, -1)

    def wronskian_ratio(self, side: int, y: float) -> float:
        """(ψ_i'φ_i − φ_i'ψ_i)/S_i' at y; constant and equal to B_i."""
        psi, phi = (self.psi1, self.phi1) if side == 1 else (self.psi2, self.phi2)
        p0, p1, _ = psi.jet(y)
        f0, f1, _ = phi.jet(y)
        scale = self.S1_prime(y) if side == 1 else self.S2_prime(y)
        return float((p1 * f0 - f1 * p0) / scale)

    def wronskian_deviation(self, points) -> float:
        worst = 0.0
        for y in points:
            worst = max(worst, abs(self.wronskian_ratio(1, y) / self.B1 - 1.0),
                        abs(self.wronskian_ratio(2, y) / self.B2 - 1.0))
        return worst

    def length_scale(self) -> float:
        """Natural state scale: 1/(κ + γ) in the radius, squared in the squared chart."""
        s = 1.0 / (self.kappa + self.gamma)
        return s * s if self.chart == RadialChart.SQUARED else s


def build_fundamentals(p: AmbiguityParams, config: SpecFunConfig = DEFAULT_CONFIG) -> RadialFundamentals:
    """
    Analytic Whittaker derivatives by default; falls back to five-point
    differences when the Wronskian check loses four digits.
    """
    f = RadialFundamentals(p, config)
    scale = f.length_scale()
    deviation = f.wronskian_deviation([0.5 * scale, 2.0 * scale, 8.0 * scale])
    if deviation > 1e-4:
        logger.warning(f"analytic Whittaker derivatives lost accuracy (wronskian deviation {deviation:.2e}); "
                       f"switching to central differences")
        f = RadialFundamentals(p, config, numeric=True)
    return f


class UcRadial(ExcessiveFunction):
    """
    U_c(y) = ĥ_1c(y) for y ≥ c and ĥ_2c(y) for y < c; U_0 = ψ_1, U_∞ = φ_2.
    """

    def __init__(self, fundamentals: RadialFundamentals, c: float):
        if c < 0:
            raise ParameterError("reference point must be nonnegative", {"c": c})
        self.f = fundamentals
        self.c = float(c)
        if 0 < self.c < math.inf:
            self._coef1 = self._coefficients(fundamentals.psi1, fundamentals.phi1)
            self._coef2 = self._coefficients(fundamentals.psi2, fundamentals.phi2)

    def _coefficients(self, psi: Fundamental, phi: Fundamental) -> Tuple[float, float]:
        p0, p1, _ = psi.jet(self.c)
        f0, f1, _ = phi.jet(self.c)
        w = p1 * f0 - f1 * p0
        # ĥ = (ψ'(c)·φ − φ'(c)·ψ)/W
        return p1 / w, -f1 / w

    def _h_jet(self, side: int, y: float) -> Jet:
        psi, phi = (self.f.psi1, self.f.phi1) if side == 1 else (self.f.psi2, self.f.phi2)
        a_phi, a_psi = self._coef1 if side == 1 else self._coef2
        f = phi.jet(y)
        g = psi.jet(y)
        return tuple(a_phi * fi + a_psi * gi for fi, gi in zip(f, g))

    def jet(self, y: float) -> Jet:
        if self.c == 0:
            return self.f.psi1.jet(y)
        if math.isinf(self.c):
            return self.f.phi2.jet(y)
        return self._h_jet(1 if y >= self.c else 2, y)

    def h1(self, y: Any):
        return self._apply(lambda a: np.array([self._h_jet(1, v)[0] for v in a.ravel()]).reshape(a.shape), y)

    def h2(self, y: Any):
        return self._apply(lambda a: np.array([self._h_jet(2, v)[0] for v in a.ravel()]).reshape(a.shape), y)

    def _order(self, y: np.ndarray, order: int) -> np.ndarray:
        return np.array([self.jet(v)[order] for v in y.ravel()]).reshape(y.shape)

    def _value(self, y: np.ndarray) -> np.ndarray:
        return self._order(y, 0)

    def _first(self, y: np.ndarray) -> np.ndarray:
        return self._order(y, 1)

    def _second(self, y: np.ndarray) -> np.ndarray:
        return self._order(y, 2)


def build_uc_radial(f: RadialFundamentals, c: float) -> UcRadial:
    return UcRadial(f, c)


def _lower_incomplete_exp_moment(d: int, u: float) -> float:
    value, _ = integrate.quad(lambda t: t ** (d - 1) * math.exp(t - u), 0.0, u, epsabs=1e-14, epsrel=1e-12)
    return value


def stationary_density_radial(p: AmbiguityParams, c: float, y: Any):
    """
    Stationary law of the worst-case radial process pulled toward c.

    Squared chart: ½y^{d/2−1}e^{−2κ|√y−√c|}; radius chart: s^{d−1}e^{−2κ|s−c|};
    both normalized in closed form.
    """
    d = p.require_radial()
    if p.kappa == 0:
        raise NoStationaryLaw("no stationary law without ambiguity", {"kappa": 0.0})
    if c <= 0 or not math.isfinite(c):
        raise ParameterError("stationary law needs 0 < c < inf", {"c": c})
    k = p.kappa
    root_c = math.sqrt(c) if p.chart == RadialChart.SQUARED else c
    u = 2.0 * k * root_c
    norm = (2.0 * k) ** (-d) * (math.exp(u) * gamma_upper(d, u) + _lower_incomplete_exp_moment(d, u))

    arr = np.asarray(y, dtype=float)
    if p.chart == RadialChart.SQUARED:
        with np.errstate(divide="ignore"):
            out = 0.5 * arr ** (0.5 * d - 1.0) * np.exp(-2.0 * k * np.abs(np.sqrt(arr) - root_c)) / norm
    else:
        out = arr ** (d - 1.0) * np.exp(-2.0 * k * np.abs(arr - root_c)) / norm
    return float(out) if np.ndim(y) == 0 else out


def stationary_mode_radial(p: AmbiguityParams, c: float) -> float:
    d = p.require_radial()
    if p.kappa == 0:
        raise NoStationaryLaw("no stationary law without ambiguity", {"kappa": 0.0})
    if p.chart == RadialChart.SQUARED:
        return max(c, ((0.5 * d - 1.0) / p.kappa) ** 2)
    return max(c, (d - 1.0) / (2.0 * p.kappa))


def _radial_sign_switch(kappa: float, c: float) -> GeneratorDescriptor:
    return GeneratorDescriptor(GeneratorKind.SIGN_SWITCH_RADIAL, kappa=kappa, c=c)


def solve_radial_single_boundary(
    p: AmbiguityParams,
    payoff: BasePayoff,
    fundamentals: Optional[RadialFundamentals] = None,
    n_grid: int = 2001,
) -> Solution:
    """
    Ratio method with U_0 = ψ_1: stop above the maximizer of F̂/ψ_1 on (0, ∞).
    Requires the ratio to be unimodal.
    """
    f = fundamentals or build_fundamentals(p)
    psi1 = f.psi1
    center, half = payoff.support()
    top = max(60.0 * f.length_scale(), 4.0 * (center + half))
    grid = np.geomspace(1e-6 * top, top, n_grid)
    with np.errstate(over="ignore", invalid="ignore"):
        ratio = np.nan_to_num(np.asarray(payoff.evaluate(grid)) / psi1(grid), nan=0.0)

    peaks = local_maxima(ratio)
    if len(peaks) > 1:
        raise NotUnimodal("ratio of payoff to psi1 has several local maxima",
                          {"maxima": [float(grid[i]) for i in peaks]})
    index = int(np.argmax(ratio))
    if index == len(grid) - 1:
        raise UnboundedRatio("ratio of payoff to psi1 increases to the end of the grid",
                             {"direction": "+inf", "edge": float(grid[-1])})

    if index == 0:
        y_star = 0.0
        lam = float(payoff.evaluate(0.0)) / f.entrance_value
        continuation = ()
    else:
        numerator = None
        if payoff.has_derivative:
            def numerator(y):
                v, v1, _ = psi1.jet(y)
                return float(payoff.derivative(y) * v - payoff.evaluate(y) * v1)
        y_star, lam = derivative_root_or_refine(
            numerator, lambda y: float(payoff.evaluate(y) / psi1(y)), grid, ratio, index
        )
        continuation = ((0.0, float(y_star)),)

    logger.info(f"radial single boundary: y*={y_star:.8g}, lambda*={lam:.8g}")
    return Solution(
        regime=RadialRegime.SINGLE_UPPER_BOUNDARY,
        c_star=0.0,
        thresholds=(float(y_star),) if continuation else (),
        lambda_star=float(lam),
        value=piecewise_value(payoff, float(lam), psi1, continuation),
        generator=_radial_sign_switch(p.kappa, 0.0),
        payoff=payoff,
        continuation=continuation,
    )


__all__ = [
    "radial_coefficients", "Fundamental", "RadialFundamentals", "build_fundamentals",
    "UcRadial", "build_uc_radial", "stationary_density_radial", "stationary_mode_radial",
    "solve_radial_single_boundary",
]
