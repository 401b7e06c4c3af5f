"""
Confluent hypergeometric functions M (Kummer) and U (Tricomi) and the
Whittaker functions built from them. Real arguments only.
"""

import logging
import math
import warnings

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate, special

from ..utils.errors import NoConvergence, ParameterError

logger = logging.getLogger(__name__)


class SpecFunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    series_tol: float = Field(default=1e-14, gt=0.0)
    max_terms: int = Field(default=500, ge=50)
    quad_points: int = Field(default=200, ge=10)
    # switch from the power series to the asymptotic expansion of M above this z
    large_z: float = Field(default=50.0, gt=0.0)


DEFAULT_CONFIG = SpecFunConfig()


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def _kummer_series(a: float, b: float, z: float, cfg: SpecFunConfig) -> float:
    term = 1.0
    total = 1.0
    for n in range(cfg.max_terms):
        term *= (a + n) * z / ((b + n) * (n + 1))
        total += term
        if term == 0.0:
            return total
        # only stop once the terms are past their peak
        if abs(term) <= cfg.series_tol * abs(total) and n + 1 > z:
            return total
    raise NoConvergence(
        "Kummer series did not converge",
        {"a": a, "b": b, "z": z, "max_terms": cfg.max_terms},
    )


def _kummer_asymptotic_log(a: float, b: float, z: float, cfg: SpecFunConfig):
    """(log|prefactor·sum|, sign) of Γ(b)/Γ(a)·e^z·z^(a−b)·Σ (b−a)_k(1−a)_k/(k! z^k)."""
    term = 1.0
    total = 1.0
    previous = math.inf
    for k in range(cfg.max_terms):
        term *= (b - a + k) * (1.0 - a + k) / ((k + 1) * z)
        if term == 0.0:
            break
        if abs(term) > previous:
            # divergent tail: truncate at the smallest term
            break
        previous = abs(term)
        total += term
        if abs(term) <= cfg.series_tol * abs(total):
            break
    log_pref = special.gammaln(b) - special.gammaln(a) + z + (a - b) * math.log(z)
    sign = special.gammasgn(b) * special.gammasgn(a) * np.sign(total)
    return log_pref + math.log(abs(total)), sign


def kummer_m(a: float, b: float, z: float, config: SpecFunConfig = DEFAULT_CONFIG,
             scaled: bool = False) -> float:
    """
    Kummer's function M(a, b, z) for real a, b and z ≥ 0.

    With ``scaled=True`` returns e^(−z)·M(a, b, z), which stays finite for
    large z.
    """
    if _is_nonpositive_integer(b):
        raise ParameterError("kummer_m: b must not be a nonpositive integer", {"b": b})
    if z < 0:
        raise ParameterError("kummer_m: z must be nonnegative", {"z": z})
    if z == 0.0:
        return 1.0

    if z <= config.large_z or _is_nonpositive_integer(a):
        value = _kummer_series(a, b, z, config)
        return value * math.exp(-z) if scaled else value

    log_abs, sign = _kummer_asymptotic_log(a, b, z, config)
    if scaled:
        log_abs -= z
    with np.errstate(over="ignore"):
        return float(sign * np.exp(log_abs))


def _tricomi_integral(a: float, b: float, z: float, cfg: SpecFunConfig) -> float:
    """∫_0^∞ e^(−s) s^(a−1) (1 + s/z)^(b−a−1) ds split at the scales of the integrand."""
    e = b - a - 1.0
    opts = dict(epsabs=0.0, epsrel=1e-12, limit=cfg.quad_points)

    def tail(s):
        return math.exp(-s) * s ** (a - 1.0) * (1.0 + s / z) ** e

    upper, _ = integrate.quad(tail, 1.0, np.inf, **opts)
    if z >= 1.0:
        lower, _ = integrate.quad(
            lambda s: math.exp(-s) * (1.0 + s / z) ** e,
            0.0, 1.0, weight="alg", wvar=(a - 1.0, 0.0), **opts,
        )
        return lower + upper

    # s = z·u on [0, z], log variable on [z, 1]
    near, _ = integrate.quad(
        lambda u: math.exp(-z * u) * (1.0 + u) ** e,
        0.0, 1.0, weight="alg", wvar=(a - 1.0, 0.0), **opts,
    )
    middle, _ = integrate.quad(
        lambda v: math.exp(a * v - math.exp(v)) * (1.0 + math.exp(v) / z) ** e,
        math.log(z), 0.0, **opts,
    )
    return z ** a * near + middle + upper


def tricomi_u(a: float, b: float, z: float, config: SpecFunConfig = DEFAULT_CONFIG) -> float:
    """
    Tricomi's function U(a, b, z) for a > 0 and z > 0 from its integral
    representation, valid for every real b including integers.
    """
    if a <= 0:
        raise ParameterError("tricomi_u: a must be positive", {"a": a})
    if z <= 0:
        raise ParameterError("tricomi_u: z must be positive", {"z": z})

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        integral = _tricomi_integral(a, b, z, config)
    log_scale = -a * math.log(z) - special.gammaln(a)
    return float(integral * math.exp(log_scale))


def whittaker_m(kappa: float, mu: float, z: float, config: SpecFunConfig = DEFAULT_CONFIG) -> float:
    """Whittaker M_{κ,μ}(z) = e^(−z/2) z^(μ+1/2) M(μ−κ+1/2, 1+2μ, z)."""
    if z <= 0:
        raise ParameterError("whittaker_m: z must be positive", {"z": z})
    scaled = kummer_m(mu - kappa + 0.5, 1.0 + 2.0 * mu, z, config, scaled=True)
    return float(math.exp(0.5 * z + (mu + 0.5) * math.log(z)) * scaled)


def whittaker_w(kappa: float, mu: float, z: float, config: SpecFunConfig = DEFAULT_CONFIG) -> float:
    """Whittaker W_{κ,μ}(z) = e^(−z/2) z^(μ+1/2) U(μ−κ+1/2, 1+2μ, z)."""
    if z <= 0:
        raise ParameterError("whittaker_w: z must be positive", {"z": z})
    u = tricomi_u(mu - kappa + 0.5, 1.0 + 2.0 * mu, z, config)
    return float(math.exp(-0.5 * z + (mu + 0.5) * math.log(z)) * u)
