"""
Euler–Maruyama simulation of the reduced state under admissible priors,
Monte Carlo estimates of discounted stopped payoffs and the supermartingale
check of the excessive functions
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config.settings import Settings, get_settings
from ..models.problem import AmbiguityParams, BasePayoff, RadialChart
from ..models.solution import GeneratorDescriptor, GeneratorKind, Interval, Solution
from ..utils.errors import ConfigError, ParameterError

logger = logging.getLogger(__name__)

MAX_STEPS = 10_000_000


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    dt: float = 1e-3
    n_paths: int = 100_000
    horizon: float = 200.0
    seed: int = 20240601
    antithetic: bool = True
    workers: int = 1
    block: int = 8192

    @model_validator(mode="after")
    def _check(self) -> "SimConfig":
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError("dt must be positive", {"dt": self.dt})
        if self.n_paths < 100:
            raise ConfigError("at least 100 paths are required", {"n_paths": self.n_paths})
        if not self.horizon > 0:
            raise ConfigError("horizon must be positive", {"horizon": self.horizon})
        if self.horizon / self.dt > MAX_STEPS:
            raise ConfigError("too many time steps", {"steps": self.horizon / self.dt, "max": MAX_STEPS})
        if self.workers < 1 or self.block < 2:
            raise ConfigError("workers >= 1 and block >= 2 required", {"workers": self.workers, "block": self.block})
        return self

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None, **overrides: Any) -> "SimConfig":
        s = settings or get_settings()
        data = {
            "dt": s.mc_dt, "n_paths": s.mc_paths, "horizon": s.mc_horizon, "seed": s.seed,
            "workers": s.mc_workers, "block": s.mc_block,
        }
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)


class PriorKind(str, Enum):
    WORST_CASE_LINEAR = "WorstCaseLinear"
    WORST_CASE_RADIAL = "WorstCaseRadial"
    WORST_CASE_PERIODIC = "WorstCasePeriodic"
    CONSTANT_DIRECTION = "ConstantDirection"
    NULL = "Null"


@dataclass(frozen=True)
class PriorStrategy:
    """
    An admissible density generator θ.

    Worst-case kinds point along a/‖a‖ (linear) or x/‖x‖ (radial) with the
    sign of the excessive function's slope. ``theta`` is the vector of a
    ConstantDirection prior; in the linear case its first component lies
    along a/‖a‖.
    """

    kind: PriorKind
    c: float = 0.0
    theta: Tuple[float, ...] = ()
    generator: Optional[GeneratorDescriptor] = None

    @classmethod
    def worst_case_linear(cls, c: float) -> "PriorStrategy":
        return cls(PriorKind.WORST_CASE_LINEAR, c=c)

    @classmethod
    def worst_case_radial(cls, c: float) -> "PriorStrategy":
        return cls(PriorKind.WORST_CASE_RADIAL, c=c)

    @classmethod
    def constant_direction(cls, theta: Sequence[float]) -> "PriorStrategy":
        return cls(PriorKind.CONSTANT_DIRECTION, theta=tuple(float(t) for t in theta))

    @classmethod
    def null(cls) -> "PriorStrategy":
        return cls(PriorKind.NULL)

    @classmethod
    def from_solution(cls, sol: Solution) -> "PriorStrategy":
        g = sol.generator
        if g.kind == GeneratorKind.PERIODIC_SWITCH:
            return cls(PriorKind.WORST_CASE_PERIODIC, generator=g)
        if g.kind == GeneratorKind.SIGN_SWITCH_RADIAL:
            return cls.worst_case_radial(g.c)
        return cls.worst_case_linear(g.c)

    def along(self, y: np.ndarray, kappa: float) -> np.ndarray:
        """Signed magnitude of θ along the reduced direction at reduced states y."""
        if self.kind in (PriorKind.WORST_CASE_LINEAR, PriorKind.WORST_CASE_RADIAL):
            return np.where(y >= self.c, kappa, -kappa)
        if self.kind == PriorKind.WORST_CASE_PERIODIC:
            return np.asarray(self.generator.theta(y), dtype=float)
        if self.kind == PriorKind.CONSTANT_DIRECTION:
            return np.full_like(y, self.theta[0])
        return np.zeros_like(y)


class MCEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: float
    std_error: float = Field(ge=0.0)
    n_effective: int
    fraction_stopped: float = Field(ge=0.0, le=1.0)
    cap_bias_bound: float = 0.0


@dataclass(frozen=True)
class StoppingRule:
    """First exit from the union of open continuation intervals (periodic when ``period`` is set)."""

    intervals: Tuple[Interval, ...]
    period: Optional[float] = None

    @classmethod
    def from_solution(cls, sol: Solution) -> "StoppingRule":
        return cls(tuple(sol.continuation), sol.period)

    def continue_mask(self, y: np.ndarray) -> np.ndarray:
        out = np.zeros(y.shape, dtype=bool)
        if not self.intervals:
            return out
        if self.period is not None:
            anchor = self.intervals[0][0]
            y = anchor + np.mod(y - anchor, self.period)
        for lo, hi in self.intervals:
            out |= (y > lo) & (y < hi)
        return out


def _unit_values(values: np.ndarray, antithetic: bool) -> np.ndarray:
    return 0.5 * (values[0::2] + values[1::2]) if antithetic else values


def _estimate(values: np.ndarray, antithetic: bool, fraction_stopped: float, cap_bias: float = 0.0) -> MCEstimate:
    units = _unit_values(values, antithetic)
    n = units.size
    if np.ptp(units) == 0:
        mean, se = float(units[0]), 0.0
    else:
        mean, se = float(np.mean(units)), float(np.std(units, ddof=1) / math.sqrt(n))
    return MCEstimate(mean=mean, std_error=se, n_effective=n, fraction_stopped=fraction_stopped,
                      cap_bias_bound=cap_bias)


@dataclass
class PathBatch:
    """
    Reduced states of all simulated paths at the requested record times.

    Paths are stored pairwise (path 2i and its antithetic partner 2i+1)
    when ``antithetic`` is set.
    """

    times: Tuple[float, ...]
    snapshots: Dict[float, np.ndarray]
    theta_max: float
    antithetic: bool
    n_paths: int = 0
    min_radius: float = math.inf

    def at(self, t: float) -> np.ndarray:
        key = min(self.snapshots, key=lambda s: abs(s - t))
        return self.snapshots[key]

    def mean_at(self, t: float, fn: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> MCEstimate:
        y = self.at(t)
        values = np.asarray(fn(y) if fn is not None else y, dtype=float)
        return _estimate(values, self.antithetic, 1.0)


class _Dynamics:
    """State update of one model; ``state`` is (n,) or (n, d) for full-state runs."""

    noise_dim = 1

    def __init__(self, p: AmbiguityParams, prior: PriorStrategy):
        self.p = p
        self.prior = prior

    def initial(self, y0: float, n: int) -> np.ndarray:
        raise NotImplementedError

    def reduced(self, state: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def theta_norm(self, state: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def step(self, state: np.ndarray, noise: np.ndarray, dt: float) -> np.ndarray:
        raise NotImplementedError


class _LinearDynamics(_Dynamics):
    """dY = −‖a‖·θ_a dt + ‖a‖ dW with θ_a the component of θ along a/‖a‖."""

    def __init__(self, p: AmbiguityParams, prior: PriorStrategy):
        super().__init__(p, prior)
        self.a = p.require_linear()
        if prior.kind == PriorKind.WORST_CASE_RADIAL:
            raise ParameterError("radial prior in the linear case", {"prior": prior.kind.value})

    def initial(self, y0: float, n: int) -> np.ndarray:
        return np.full(n, float(y0))

    def reduced(self, state: np.ndarray) -> np.ndarray:
        return state

    def theta_norm(self, state: np.ndarray) -> np.ndarray:
        if self.prior.kind == PriorKind.CONSTANT_DIRECTION:
            return np.full(state.shape, float(np.linalg.norm(self.prior.theta)))
        return np.abs(self.prior.along(state, self.p.kappa))

    def step(self, state: np.ndarray, noise: np.ndarray, dt: float) -> np.ndarray:
        drift = -self.a * self.prior.along(state, self.p.kappa)
        return state + drift * dt + self.a * math.sqrt(dt) * noise


class _RadiusDynamics(_Dynamics):
    """
    The squared radius Q = ‖X‖², dQ = (d − 2θ_r√Q)dt + 2√Q dW, stepped with
    the reflected Euler scheme Q ← |Q + ...|. The drift stays bounded near the
    origin, unlike the (d − 1)/(2Z) drift of the radius itself.
    """

    def __init__(self, p: AmbiguityParams, prior: PriorStrategy):
        super().__init__(p, prior)
        self.d = p.require_radial()
        self.squared = p.chart == RadialChart.SQUARED

    def initial(self, y0: float, n: int) -> np.ndarray:
        return np.full(n, float(y0) if self.squared else float(y0) ** 2)

    def reduced(self, state: np.ndarray) -> np.ndarray:
        return state if self.squared else np.sqrt(state)

    def radius(self, state: np.ndarray) -> np.ndarray:
        return np.sqrt(state)

    def theta_norm(self, state: np.ndarray) -> np.ndarray:
        return np.abs(self.prior.along(self.reduced(state), self.p.kappa))

    def step(self, state: np.ndarray, noise: np.ndarray, dt: float) -> np.ndarray:
        theta = self.prior.along(self.reduced(state), self.p.kappa)
        root = np.sqrt(state)
        return np.abs(state + (self.d - 2.0 * theta * root) * dt + 2.0 * root * math.sqrt(dt) * noise)


class _FullStateDynamics(_Dynamics):
    """dX = −θ dt + dW in R^d for constant-direction priors in the radial case."""

    def __init__(self, p: AmbiguityParams, prior: PriorStrategy):
        super().__init__(p, prior)
        self.d = p.require_radial()
        self.squared = p.chart == RadialChart.SQUARED
        if len(prior.theta) != self.d:
            raise ParameterError("constant direction needs a d-dimensional theta",
                                 {"dim": self.d, "theta": list(prior.theta)})
        self.theta = np.asarray(prior.theta, dtype=float)
        self.noise_dim = self.d

    def initial(self, y0: float, n: int) -> np.ndarray:
        state = np.zeros((n, self.d))
        state[:, 0] = math.sqrt(y0) if self.squared else y0
        return state

    def reduced(self, state: np.ndarray) -> np.ndarray:
        sq = np.einsum("ij,ij->i", state, state)
        return sq if self.squared else np.sqrt(sq)

    def theta_norm(self, state: np.ndarray) -> np.ndarray:
        return np.full(state.shape[0], float(np.linalg.norm(self.theta)))

    def step(self, state: np.ndarray, noise: np.ndarray, dt: float) -> np.ndarray:
        return state - self.theta * dt + math.sqrt(dt) * noise


def _make_dynamics(p: AmbiguityParams, prior: PriorStrategy) -> _Dynamics:
    if prior.kind == PriorKind.CONSTANT_DIRECTION:
        norm = float(np.linalg.norm(prior.theta))
        if norm > p.kappa + 1e-12:
            raise ParameterError("constant direction exceeds the ambiguity radius",
                                 {"norm": norm, "kappa": p.kappa})
    if p.a_norm is not None:
        return _LinearDynamics(p, prior)
    if prior.kind == PriorKind.CONSTANT_DIRECTION:
        return _FullStateDynamics(p, prior)
    if prior.kind in (PriorKind.WORST_CASE_LINEAR, PriorKind.WORST_CASE_PERIODIC):
        raise ParameterError("linear prior in the radial case", {"prior": prior.kind.value})
    return _RadiusDynamics(p, prior)


@dataclass
class _BlockResult:
    values: np.ndarray
    stopped: np.ndarray
    snapshots: Dict[int, np.ndarray] = field(default_factory=dict)
    theta_max: float = 0.0
    y_min: float = math.inf
    y_max: float = -math.inf
    min_radius: float = math.inf


class _BlockRunner:
    """Runs the blocks of one simulation; block b draws from SeedSequence(seed, spawn_key=(b,))."""

    def __init__(
        self,
        dynamics: _Dynamics,
        cfg: SimConfig,
        y0: float,
        rule: Optional[StoppingRule] = None,
        payoff: Optional[BasePayoff] = None,
        record_steps: Sequence[int] = (),
    ):
        self.dynamics = dynamics
        self.cfg = cfg
        self.y0 = y0
        self.rule = rule
        self.payoff = payoff
        self.record_steps = sorted(set(record_steps))
        self.r = dynamics.p.r
        self.logger = logging.getLogger(f"{__name__}.blocks")

    def block_sizes(self) -> List[int]:
        total = self.cfg.n_paths + (self.cfg.n_paths % 2 if self.cfg.antithetic else 0)
        size = self.cfg.block - (self.cfg.block % 2)
        sizes = [size] * (total // size)
        if total % size:
            sizes.append(total % size)
        return sizes

    def _noise(self, rng: np.random.Generator, active: np.ndarray) -> np.ndarray:
        dim = self.dynamics.noise_dim
        shape = (active.size,) if dim == 1 else (active.size, dim)
        noise = np.zeros(shape)
        if self.cfg.antithetic:
            pair_active = active[0::2] | active[1::2]
            k = int(pair_active.sum())
            draws = rng.standard_normal(k if dim == 1 else (k, dim))
            base_idx = 2 * np.flatnonzero(pair_active)
            noise[base_idx] = draws
            noise[base_idx + 1] = -draws
        else:
            k = int(active.sum())
            noise[active] = rng.standard_normal(k if dim == 1 else (k, dim))
        return noise

    def run_block(self, index: int, n: int) -> _BlockResult:
        rng = np.random.default_rng(np.random.SeedSequence(self.cfg.seed, spawn_key=(index,)))
        dyn, dt, n_steps = self.dynamics, self.cfg.dt, self.cfg.n_steps
        state = dyn.initial(self.y0, n)
        values = np.zeros(n)
        active = np.ones(n, dtype=bool)
        result = _BlockResult(values=values, stopped=np.zeros(n, dtype=bool))
        pending = list(self.record_steps)

        for k in range(n_steps + 1):
            y = dyn.reduced(state)
            if pending and pending[0] == k:
                result.snapshots[k] = y.copy()
                pending.pop(0)
            if self.rule is not None:
                exit_now = active & ~self.rule.continue_mask(y)
                if np.any(exit_now):
                    values[exit_now] = math.exp(-self.r * k * dt) * np.asarray(
                        self.payoff.evaluate(y[exit_now]), dtype=float)
                    result.stopped |= exit_now
                    active &= ~exit_now
            live = y[active]
            if live.size:
                result.y_min = min(result.y_min, float(live.min()))
                result.y_max = max(result.y_max, float(live.max()))
            running = np.any(active) if self.rule is not None else False
            if k == n_steps or not (running or pending):
                break
            step_mask = active if self.rule is not None else np.ones(n, dtype=bool)
            result.theta_max = max(result.theta_max, float(np.max(dyn.theta_norm(state[step_mask]), initial=0.0)))
            noise = self._noise(rng, step_mask)
            state[step_mask] = dyn.step(state[step_mask], noise[step_mask], dt)
            if isinstance(dyn, _RadiusDynamics):
                result.min_radius = min(result.min_radius, float(dyn.radius(state).min(initial=math.inf)))
        return result

    def run(self) -> List[_BlockResult]:
        sizes = self.block_sizes()
        self.logger.debug(f"{len(sizes)} block(s), {self.cfg.workers} worker(s)")
        if self.cfg.workers == 1 or len(sizes) == 1:
            return [self.run_block(i, n) for i, n in enumerate(sizes)]
        with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
            return list(pool.map(lambda args: self.run_block(*args), enumerate(sizes)))


def _simulate(p: AmbiguityParams, prior: PriorStrategy, y0: float, cfg: SimConfig,
              record_times: Optional[Sequence[float]]) -> PathBatch:
    times = tuple(record_times) if record_times else (cfg.horizon,)
    steps = {t: int(round(t / cfg.dt)) for t in times}
    if any(s < 0 or s > cfg.n_steps for s in steps.values()):
        raise ConfigError("record times must lie in [0, horizon]", {"times": list(times)})
    runner = _BlockRunner(_make_dynamics(p, prior), cfg, y0, record_steps=list(steps.values()))
    blocks = runner.run()
    snapshots = {t: np.concatenate([b.snapshots[s] for b in blocks]) for t, s in steps.items()}
    return PathBatch(
        times=times,
        snapshots=snapshots,
        theta_max=max(b.theta_max for b in blocks),
        antithetic=cfg.antithetic,
        n_paths=int(sum(b.values.size for b in blocks)),
        min_radius=min(b.min_radius for b in blocks),
    )


def simulate_linear(p: AmbiguityParams, prior: PriorStrategy, y0: float, cfg: SimConfig,
                    record_times: Optional[Sequence[float]] = None) -> PathBatch:
    """Paths of Y = aᵀX under the prior, recorded at ``record_times`` (default: the horizon)."""
    p.require_linear()
    return _simulate(p, prior, y0, cfg, record_times)


def simulate_radial(p: AmbiguityParams, prior: PriorStrategy, y0: float, cfg: SimConfig,
                    record_times: Optional[Sequence[float]] = None) -> PathBatch:
    """Paths of the reduced radial state, simulated in the radius and reported in the state chart."""
    p.require_radial()
    if y0 <= 0:
        raise ParameterError("radial start must be positive", {"y0": y0})
    return _simulate(p, prior, y0, cfg, record_times)


def estimate_stopped_value(
    p: AmbiguityParams,
    prior: PriorStrategy,
    y0: float,
    rule: StoppingRule,
    payoff: BasePayoff,
    cfg: SimConfig,
) -> MCEstimate:
    """
    E[e^{−rτ}F̂(Y_τ); τ < horizon] for the first grid exit τ from the
    continuation set. Paths still running at the horizon contribute 0.
    """
    if p.dim is not None and p.a_norm is None and y0 <= 0:
        raise ParameterError("radial start must be positive", {"y0": y0})
    runner = _BlockRunner(_make_dynamics(p, prior), cfg, y0, rule=rule, payoff=payoff)
    blocks = runner.run()
    values = np.concatenate([b.values for b in blocks])
    stopped = np.concatenate([b.stopped for b in blocks])
    fraction = float(stopped.mean())

    cap_bias = 0.0
    if not stopped.all():
        lo = min(b.y_min for b in blocks)
        hi = max(b.y_max for b in blocks)
        visited = np.linspace(lo, hi, 257) if hi > lo else np.array([lo])
        cap_bias = math.exp(-p.r * cfg.horizon) * float(np.max(np.abs(payoff.evaluate(visited))))
    estimate = _estimate(values, cfg.antithetic, fraction, cap_bias)
    logger.info(f"stopped value {estimate.mean:.6g} +- {estimate.std_error:.2g} "
                f"({fraction:.4f} stopped, cap bias <= {cap_bias:.2g})")
    return estimate


def supermartingale_check(
    p: AmbiguityParams,
    excessive: Callable[[np.ndarray], np.ndarray],
    prior: PriorStrategy,
    y0: float,
    t_check: float,
    cfg: SimConfig,
) -> Tuple[MCEstimate, float]:
    """
    (E[e^{−rt}U_c(Y_t)], U_c(y0)). The expectation is at least U_c(y0) for
    every admissible prior, with equality for the matching worst case.
    """
    if not 0 < t_check <= cfg.horizon:
        raise ConfigError("t_check must lie in (0, horizon]", {"t_check": t_check})
    batch = _simulate(p, prior, y0, cfg, (t_check,))
    discount = math.exp(-p.r * t_check)
    lhs = batch.mean_at(t_check, lambda y: discount * np.asarray(excessive(y), dtype=float))
    return lhs, float(excessive(y0))


__all__ = [
    "SimConfig", "PriorKind", "PriorStrategy", "MCEstimate", "StoppingRule", "PathBatch",
    "simulate_linear", "simulate_radial", "estimate_stopped_value", "supermartingale_check",
]
