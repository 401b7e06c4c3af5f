"""
Solver Service
Dispatches a problem spec to the matching analytic solver and runs the
Monte Carlo and finite-difference cross-checks and parameter sweeps
"""

import logging
import math
import time
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config.settings import Settings, get_settings
from ..models.problem import CaseKind, PayoffKind, ProblemSpec, RadialChart
from ..models.report import McCheck, PdeCheck, RunInfo, RunReport, SolutionSummary, SweepBlock, SweepRow
from ..models.solution import Solution, encode_extended
from ..pde.oracle import Grid1D, GridSolution, solve_vi_linear, solve_vi_radial
from ..simulation.engine import PriorStrategy, SimConfig, StoppingRule, estimate_stopped_value
from ..solvers.linear import solve_digital, solve_even, solve_periodic_cosine
from ..solvers.radial import solve_radial_single_boundary
from ..solvers.representation import solve_representation
from ..solvers.straddle import solve_straddle

# below these the Monte Carlo check only reports
MIN_CONCLUSIVE_PATHS = 1000
MAX_RELATIVE_SE = 0.05

# expected overshoot of a discretely monitored exit, in units of sigma*sqrt(dt)
OVERSHOOT = 0.5826

TABLE_POINTS = 2001


def solve_problem(spec: ProblemSpec) -> Solution:
    """Route a validated spec to the analytic solver for its payoff kind."""
    p = spec.params
    kind = PayoffKind(spec.payoff.kind)
    if spec.case == CaseKind.LINEAR:
        if kind == PayoffKind.DIGITAL_ASYMMETRIC:
            return solve_digital(p, spec.payoff)
        if kind == PayoffKind.EVEN_KINK:
            return solve_even(p, spec.payoff)
        if kind == PayoffKind.PERIODIC_COSINE:
            return solve_periodic_cosine(p)
        return solve_representation(p, spec.payoff)
    if kind == PayoffKind.STRADDLE:
        return solve_straddle(p, spec.payoff.K)
    return solve_radial_single_boundary(p, spec.payoff)


def _continuation_span(spec: ProblemSpec, sol: Solution) -> Tuple[float, float]:
    if sol.continuation:
        lo = min(a for a, _ in sol.continuation)
        hi = max(b for _, b in sol.continuation)
        return lo, hi
    center, half = sol.payoff.support()
    return center - half, center + half


def _periodic_thresholds(sol: Solution, lo: float, hi: float) -> List[float]:
    P = sol.period
    found = []
    for a, b in sol.continuation:
        for edge in (a, b):
            k_lo, k_hi = math.ceil((lo - edge) / P), math.floor((hi - edge) / P)
            found.extend(edge + k * P for k in range(k_lo, k_hi + 1))
    return sorted(t for t in found if lo < t < hi)


class SolverService:
    """
    Solve, verify and sweep problem specs
    Shared by the command line and the HTTP API
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.logger = logging.getLogger("ambistop.solver_service")

    # ------------------------------------------------------------------ solve

    def reference_point(self, spec: ProblemSpec, sol: Solution) -> float:
        if spec.options.y_ref is not None:
            return spec.options.y_ref
        return sol.default_start()

    def summarize(self, spec: ProblemSpec, sol: Solution) -> SolutionSummary:
        y_ref = self.reference_point(spec, sol)
        return SolutionSummary(
            **sol.summary(),
            y_ref=y_ref,
            value_at_ref=float(sol.value(y_ref)),
        )

    def _report(self, command: str, spec: ProblemSpec, **fields: Any) -> RunReport:
        return RunReport(command=command, problem=spec.model_dump(mode="json"), **fields)

    def solve(self, spec: ProblemSpec) -> Tuple[RunReport, Solution]:
        started = time.perf_counter()
        sol = solve_problem(spec)
        elapsed = time.perf_counter() - started
        self.logger.info(f"solved {spec.payoff.kind} ({sol.regime.value}) in {elapsed:.3f}s")
        report = self._report(
            "solve", spec,
            seed=spec.options.seed,
            solution=self.summarize(spec, sol),
            run_info=RunInfo(timing={"solve": elapsed}),
        )
        return report, sol

    def sample_table(self, spec: ProblemSpec, sol: Solution, n: int = TABLE_POINTS) -> pd.DataFrame:
        """Payoff and value on points spanning the continuation set padded by 50% on each side."""
        lo, hi = _continuation_span(spec, sol)
        pad = 0.5 * (hi - lo)
        lo, hi = lo - pad, hi + pad
        if spec.case == CaseKind.RADIAL:
            lo = max(lo, 0.0)
        y = np.linspace(lo, hi, n)
        return pd.DataFrame({
            "y": y,
            "payoff": np.asarray(sol.payoff.evaluate(y), dtype=float),
            "value": np.asarray(sol.value(y), dtype=float),
            "in_stopping_set": np.asarray(sol.in_stopping_set(y), dtype=bool),
        })

    # ----------------------------------------------------------------- verify

    def sim_config(self, spec: ProblemSpec, paths: Optional[int] = None, seed: Optional[int] = None) -> SimConfig:
        o = spec.options
        return SimConfig.from_settings(
            self.settings,
            n_paths=paths or o.mc_paths,
            seed=seed if seed is not None else o.seed,
            dt=o.dt,
            horizon=o.horizon,
            antithetic=o.antithetic,
            workers=o.workers,
        )

    def _monitoring_allowance(self, spec: ProblemSpec, sol: Solution, dt: float) -> float:
        if not sol.thresholds:
            return 0.0
        edges = np.asarray(sol.thresholds, dtype=float)
        if sol.payoff.has_derivative:
            slopes = np.abs(np.asarray(sol.payoff.derivative(edges), dtype=float))
        else:
            step = 1e-6 * np.maximum(np.abs(edges), 1.0)
            slopes = np.abs(sol.payoff.evaluate(edges + step) - sol.payoff.evaluate(edges - step)) / (2 * step)
        p = spec.params
        if spec.case == CaseKind.LINEAR:
            sigma = np.full(edges.shape, p.a_norm)
        elif p.chart == RadialChart.SQUARED:
            sigma = 2.0 * np.sqrt(edges)
        else:
            sigma = np.ones(edges.shape)
        slopes = np.where(np.isfinite(slopes), slopes, 0.0)
        return float(2.0 * OVERSHOOT * math.sqrt(dt) * np.max(sigma * slopes))

    def check_mc(self, spec: ProblemSpec, sol: Solution, paths: Optional[int] = None,
                 seed: Optional[int] = None) -> Tuple[McCheck, SimConfig]:
        cfg = self.sim_config(spec, paths, seed)
        y0 = spec.options.y0 if spec.options.y0 is not None else sol.default_start()
        estimate = estimate_stopped_value(
            spec.params, PriorStrategy.from_solution(sol), y0,
            StoppingRule.from_solution(sol), sol.payoff, cfg,
        )
        analytic = float(sol.value(y0))
        error = abs(estimate.mean - analytic)
        tolerance = (3.0 * estimate.std_error + estimate.cap_bias_bound
                     + self._monitoring_allowance(spec, sol, cfg.dt))
        conclusive = (cfg.n_paths >= MIN_CONCLUSIVE_PATHS
                      and estimate.std_error <= MAX_RELATIVE_SE * max(abs(analytic), 1e-12))
        note = None
        passed: Optional[bool] = error <= tolerance
        if not conclusive:
            note = f"standard error {estimate.std_error:.3g} too large for a conclusive check"
            self.logger.warning(note)
            passed = None
        check = McCheck(
            y0=y0, n_paths=cfg.n_paths, dt=cfg.dt, horizon=cfg.horizon,
            mean=estimate.mean, std_error=estimate.std_error,
            fraction_stopped=estimate.fraction_stopped, cap_bias_bound=estimate.cap_bias_bound,
            analytic=analytic, abs_error=error, tolerance=tolerance,
            conclusive=conclusive, passed=passed, note=note,
        )
        return check, cfg

    def pde_grid(self, spec: ProblemSpec, sol: Solution, n: Optional[int] = None) -> Grid1D:
        o = spec.options
        n = n or o.grid_n or self.settings.grid_n
        lo, hi = _continuation_span(spec, sol)
        if spec.case == CaseKind.RADIAL:
            auto_lo, auto_hi = 1e-4, 3.0 * max(hi, 1e-3)
        elif sol.period is not None:
            width = hi - lo
            middle = hi + 0.5 * (sol.period - width)
            middle -= sol.period * round(middle / sol.period)
            auto_lo, auto_hi = middle - sol.period, middle + sol.period
        else:
            pad = max(hi - lo, 1e-3)
            auto_lo, auto_hi = lo - pad, hi + pad
        return Grid1D(
            lo=o.grid_lo if o.grid_lo is not None else auto_lo,
            hi=o.grid_hi if o.grid_hi is not None else auto_hi,
            n=n,
        )

    def run_pde(self, spec: ProblemSpec, g: Grid1D) -> GridSolution:
        if spec.case == CaseKind.LINEAR:
            return solve_vi_linear(spec.params, spec.payoff, g)
        return solve_vi_radial(spec.params, spec.payoff, g)

    def check_pde(self, spec: ProblemSpec, sol: Solution, grid: Optional[int] = None) -> Tuple[PdeCheck, List[str]]:
        g = self.pde_grid(spec, sol, grid)
        grid_sol = self.run_pde(spec, g)
        if sol.period is not None:
            expected = _periodic_thresholds(sol, g.lo, g.hi)
        else:
            expected = [t for t in sol.thresholds if g.lo < t < g.hi]
        detected = list(grid_sol.detected_thresholds)
        deltas = [abs(a - b) for a, b in zip(detected, expected)] if len(detected) == len(expected) else []
        passed = len(detected) == len(expected) and all(dlt <= 2.0 * g.h for dlt in deltas)
        stride = max(1, g.n // 400)
        check = PdeCheck(
            grid_n=g.n, lo=g.lo, hi=g.hi, spacing=g.h,
            detected_thresholds=detected, analytic_thresholds=expected,
            threshold_deltas=deltas, max_value_gap=grid_sol.sup_gap(sol.value, stride=stride),
            passed=passed,
        )
        if not passed:
            self.logger.error(f"grid thresholds {detected} do not match {expected} within two spacings")
        return check, list(grid_sol.warnings)

    def verify(
        self,
        spec: ProblemSpec,
        mc: bool = False,
        pde: bool = False,
        paths: Optional[int] = None,
        grid: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> RunReport:
        timing: Dict[str, float] = {}
        started = time.perf_counter()
        sol = solve_problem(spec)
        timing["solve"] = time.perf_counter() - started

        warnings: List[str] = []
        mc_check = pde_check = None
        used_seed = seed if seed is not None else spec.options.seed
        if mc:
            started = time.perf_counter()
            mc_check, cfg = self.check_mc(spec, sol, paths, seed)
            timing["mc"] = time.perf_counter() - started
            used_seed = cfg.seed
            if mc_check.note:
                warnings.append(mc_check.note)
        if pde:
            started = time.perf_counter()
            pde_check, grid_warnings = self.check_pde(spec, sol, grid)
            timing["pde"] = time.perf_counter() - started
            warnings.extend(grid_warnings)

        verdicts = [c.passed for c in (mc_check, pde_check) if c is not None and c.passed is not None]
        return self._report(
            "verify", spec,
            seed=used_seed,
            solution=self.summarize(spec, sol),
            mc=mc_check,
            pde=pde_check,
            passed=all(verdicts) if verdicts else None,
            warnings=warnings,
            run_info=RunInfo(timing=timing),
        )

    # ------------------------------------------------------------------ sweep

    def sweep(self, spec: ProblemSpec, param: str, values: Sequence[float]) -> Tuple[RunReport, pd.DataFrame]:
        """
        Re-solve the spec for each parameter value. Values at a fixed
        reference point are compared row by row for kappa sweeps, where they
        must not increase.
        """
        started = time.perf_counter()
        specs = [spec.with_parameter(param, v) for v in values]
        solutions = [solve_problem(s) for s in specs]
        y_ref = spec.options.y_ref if spec.options.y_ref is not None else solutions[0].default_start()

        rows: List[SweepRow] = []
        previous: Optional[float] = None
        for v, sol in zip(values, solutions):
            value = float(sol.value(y_ref))
            monotone = None
            if param == "kappa":
                monotone = previous is None or value <= previous + 1e-12
            rows.append(SweepRow(
                param_value=float(v), regime=sol.regime.value, c_star=encode_extended(sol.c_star),
                thresholds=[float(t) for t in sol.thresholds], value_at_ref=value, monotone=monotone,
            ))
            previous = value

        block = SweepBlock(
            param=param, y_ref=y_ref, rows=rows,
            monotone=all(r.monotone for r in rows) if param == "kappa" else None,
        )
        if block.monotone is False:
            self.logger.warning(f"value at {y_ref} increases along the kappa sweep")
        report = self._report(
            "sweep", spec, seed=spec.options.seed, sweep=block,
            run_info=RunInfo(timing={"sweep": time.perf_counter() - started}),
        )
        return report, sweep_table(block)


def sweep_table(block: SweepBlock) -> pd.DataFrame:
    width = max((len(r.thresholds) for r in block.rows), default=0)
    records = []
    for r in block.rows:
        record: Dict[str, Any] = {block.param: r.param_value, "regime": r.regime, "c_star": r.c_star}
        for i in range(width):
            record[f"threshold_{i + 1}"] = r.thresholds[i] if i < len(r.thresholds) else np.nan
        record["value_at_ref"] = r.value_at_ref
        if r.monotone is not None:
            record["monotone"] = r.monotone
        records.append(record)
    return pd.DataFrame.from_records(records)


__all__ = ["SolverService", "solve_problem", "sweep_table"]
