"""
Finite-difference oracle for the one-dimensional robust stopping problem

    max( min_{s=±1} [D v'' + (b − s·m) v' − r v],  F̂ − v ) = 0

solved by policy iteration on the drift sign s with an exact obstacle solve
for each policy.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.linalg import solve_banded

from ..models.problem import AmbiguityParams, BasePayoff
from ..solvers.radial import radial_coefficients
from ..utils.errors import ConfigError, NoConvergence, ParameterError

logger = logging.getLogger(__name__)


class Grid1D(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    lo: float
    hi: float
    n: int = 4001

    @model_validator(mode="after")
    def _check(self) -> "Grid1D":
        if not self.lo < self.hi:
            raise ConfigError("grid needs lo < hi", {"lo": self.lo, "hi": self.hi})
        if self.n < 101:
            raise ConfigError("grid needs at least 101 nodes", {"n": self.n})
        return self

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    def refine(self, factor: int = 2) -> "Grid1D":
        return Grid1D(lo=self.lo, hi=self.hi, n=factor * (self.n - 1) + 1)


@dataclass
class GridSolution:
    nodes: np.ndarray
    values: np.ndarray
    payoff_values: np.ndarray
    stopping_mask: np.ndarray
    detected_thresholds: Tuple[float, ...]
    drift_sign: np.ndarray
    h: float
    iterations: int = 0
    warnings: Tuple[str, ...] = ()
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def value_at(self, y: Any):
        out = np.interp(np.asarray(y, dtype=float), self.nodes, self.values)
        return float(out) if np.ndim(y) == 0 else out

    def sup_gap(self, reference: Callable[[np.ndarray], np.ndarray], stride: int = 1) -> float:
        """max |values − reference| over every ``stride``-th node."""
        nodes = self.nodes[::stride]
        return float(np.max(np.abs(self.values[::stride] - np.asarray(reference(nodes), dtype=float))))


def _transitions(nodes: np.ndarray, mask: np.ndarray) -> Tuple[float, ...]:
    flips = np.flatnonzero(mask[1:] != mask[:-1])
    return tuple(float(0.5 * (nodes[i] + nodes[i + 1])) for i in flips)


class _Scheme:
    """
    Tridiagonal generator for each drift sign. A node uses central
    differences when |b| + m ≤ 2D/h and upwind differences otherwise, so
    every off-diagonal entry is nonnegative for both signs.
    """

    def __init__(self, diffusion: np.ndarray, base_drift: np.ndarray, ambiguity: np.ndarray,
                 r: float, h: float, entrance: bool):
        self.n = diffusion.size
        self.r = r
        self.h = h
        self.central = np.abs(base_drift) + ambiguity <= 2.0 * diffusion / h
        self.coef = {s: self._assemble(diffusion, base_drift - s * ambiguity, entrance) for s in (1, -1)}

    def _assemble(self, D: np.ndarray, mu: np.ndarray, entrance: bool):
        h, r = self.h, self.r
        low = np.where(self.central, D / h ** 2 - mu / (2 * h), D / h ** 2 + np.maximum(-mu, 0.0) / h)
        up = np.where(self.central, D / h ** 2 + mu / (2 * h), D / h ** 2 + np.maximum(mu, 0.0) / h)
        diag = -low - up - r
        if entrance:
            # reflected ghost node for the diffusion, forward difference for the drift
            up[0] = 2.0 * D[0] / h ** 2 + mu[0] / h
            diag[0] = -up[0] - r
        low[0] = 0.0
        up[-1] = 0.0
        return low, diag, up

    def policy(self, s: np.ndarray):
        plus, minus = self.coef[1], self.coef[-1]
        return tuple(np.where(s > 0, a, b) for a, b in zip(plus, minus))

    @staticmethod
    def apply(coef, v: np.ndarray) -> np.ndarray:
        low, diag, up = coef
        out = diag * v
        out[1:] += low[1:] * v[:-1]
        out[:-1] += up[:-1] * v[1:]
        return out

    def improve(self, v: np.ndarray) -> np.ndarray:
        """Minimizing drift sign of the discrete Hamiltonian; ties resolve to +1."""
        plus = self.apply(self.coef[1], v)
        minus = self.apply(self.coef[-1], v)
        return np.where(minus < plus, -1, 1)


class VariationalInequality:
    """Obstacle problem on one grid with the drift control chosen per node."""

    def __init__(
        self,
        payoff_values: np.ndarray,
        scheme: _Scheme,
        fixed: np.ndarray,
        tol: float = 1e-10,
        max_policy: int = 200,
        max_sweeps: int = 100_000,
        omega: float = 1.5,
    ):
        self.F = payoff_values
        self.scheme = scheme
        self.fixed = fixed
        self.tol = tol
        self.max_policy = max_policy
        self.max_sweeps = max_sweeps
        self.omega = omega
        self.logger = logging.getLogger(f"{__name__}.vi")

    def _solve_linear(self, coef, stop: np.ndarray) -> np.ndarray:
        low, diag, up = coef
        n = self.F.size
        ab = np.zeros((3, n))
        ab[0, 1:] = np.where(stop[:-1], 0.0, up[:-1])
        ab[1] = np.where(stop, 1.0, diag)
        ab[2, :-1] = np.where(stop[1:], 0.0, low[1:])
        rhs = np.where(stop, self.F, 0.0)
        return solve_banded((1, 1), ab, rhs)

    def _howard(self, coef, stop: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        stop = stop | self.fixed
        for _ in range(self.F.size + 2):
            v = self._solve_linear(coef, stop)
            new_stop = ((self.F - v) > self.scheme.apply(coef, v)) | self.fixed
            if np.array_equal(new_stop, stop):
                return v, stop
            stop = new_stop
        raise NoConvergence("obstacle iteration did not settle", {"nodes": int(self.F.size)})

    def _psor(self, coef, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        low, diag, up = coef
        F, fixed, omega = self.F, self.fixed, self.omega
        v = np.maximum(v, F)
        v[fixed] = F[fixed]
        n = v.size
        for sweep in range(self.max_sweeps):
            change = 0.0
            for i in range(n):
                if fixed[i]:
                    continue
                neighbors = (low[i] * v[i - 1] if i > 0 else 0.0) + (up[i] * v[i + 1] if i < n - 1 else 0.0)
                target = -neighbors / diag[i]
                new = max(F[i], v[i] + omega * (target - v[i]))
                change = max(change, abs(new - v[i]))
                v[i] = new
            if change < self.tol:
                self.logger.debug(f"PSOR converged after {sweep + 1} sweeps")
                return v, (v <= F) | fixed
        raise NoConvergence("PSOR did not converge", {"sweeps": self.max_sweeps})

    def solve(self, method: str = "policy") -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
        if method not in ("policy", "psor"):
            raise ParameterError("unknown method", {"method": method})
        s = self.scheme.improve(self.F)
        v, stop = self.F.copy(), self.fixed.copy()
        for it in range(1, self.max_policy + 1):
            coef = self.scheme.policy(s)
            if method == "policy":
                v_new, stop = self._howard(coef, stop)
            else:
                v_new, stop = self._psor(coef, v)
            s_new = self.scheme.improve(v_new)
            change = float(np.max(np.abs(v_new - v)))
            v = v_new
            self.logger.debug(f"policy iteration {it}: |dv| = {change:.3e}, {int(np.sum(s_new != s))} sign flips")
            if np.array_equal(s_new, s) or change < self.tol:
                return v, stop, s_new, it
            s = s_new
        raise NoConvergence("drift policy did not settle", {"iterations": self.max_policy})


def _finish(
    nodes: np.ndarray,
    F: np.ndarray,
    vi: VariationalInequality,
    method: str,
    check_lo: bool,
    h: float,
) -> GridSolution:
    values, stop, sign, iterations = vi.solve(method)
    warnings = []
    if check_lo and not stop[1]:
        warnings.append("continuation set reaches the lower grid end")
    if not stop[-2]:
        warnings.append("continuation set reaches the upper grid end")
    for message in warnings:
        logger.warning(message)
    thresholds = _transitions(nodes, stop)
    logger.info(f"grid solve ({nodes.size} nodes, {iterations} policy iterations): thresholds {thresholds}")
    return GridSolution(
        nodes=nodes,
        values=values,
        payoff_values=F,
        stopping_mask=stop,
        detected_thresholds=thresholds,
        drift_sign=sign,
        h=h,
        iterations=iterations,
        warnings=tuple(warnings),
        diagnostics={"central_fraction": float(np.mean(vi.scheme.central)), "method": method},
    )


def solve_vi_linear(p: AmbiguityParams, payoff: BasePayoff, g: Grid1D, method: str = "policy",
                    tol: float = 1e-10, max_sweeps: int = 100_000) -> GridSolution:
    """Robust stopping of F̂(Y) for dY = −κ‖a‖s dt + ‖a‖dW; the payoff is imposed at both grid ends."""
    a = p.require_linear()
    nodes = g.nodes
    F = np.asarray(payoff.evaluate(nodes), dtype=float)
    n = nodes.size
    scheme = _Scheme(np.full(n, 0.5 * a * a), np.zeros(n), np.full(n, p.kappa * a), p.r, g.h, entrance=False)
    fixed = np.zeros(n, dtype=bool)
    fixed[[0, -1]] = True
    vi = VariationalInequality(F, scheme, fixed, tol=tol, max_sweeps=max_sweeps)
    return _finish(nodes, F, vi, method, check_lo=True, h=g.h)


def solve_vi_radial(p: AmbiguityParams, payoff: BasePayoff, g: Grid1D, method: str = "policy",
                    tol: float = 1e-10, max_sweeps: int = 100_000) -> GridSolution:
    """
    Radial operator in the state chart of ``p``. The lower end is an
    entrance closure and may stop; the payoff is imposed at the upper end.
    """
    p.require_radial()
    if g.lo <= 0:
        raise ParameterError("radial grid must start above 0", {"lo": g.lo})
    nodes = g.nodes
    F = np.asarray(payoff.evaluate(nodes), dtype=float)
    diffusion, base = radial_coefficients(p, nodes, 0.0)
    _, worst = radial_coefficients(p, nodes, p.kappa)
    scheme = _Scheme(np.asarray(diffusion, dtype=float), np.asarray(base, dtype=float),
                     np.asarray(base - worst, dtype=float), p.r, g.h, entrance=True)
    fixed = np.zeros(nodes.size, dtype=bool)
    fixed[-1] = True
    vi = VariationalInequality(F, scheme, fixed, tol=tol, max_sweeps=max_sweeps)
    return _finish(nodes, F, vi, method, check_lo=False, h=g.h)


__all__ = ["Grid1D", "GridSolution", "VariationalInequality", "solve_vi_linear", "solve_vi_radial"]
