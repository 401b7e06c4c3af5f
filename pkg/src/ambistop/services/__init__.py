from .solver_service import SolverService, solve_problem, sweep_table

__all__ = ["SolverService", "solve_problem", "sweep_table"]
