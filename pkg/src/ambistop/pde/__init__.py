"""Finite-difference oracle"""

from .oracle import Grid1D, GridSolution, VariationalInequality, solve_vi_linear, solve_vi_radial

__all__ = ["Grid1D", "GridSolution", "VariationalInequality", "solve_vi_linear", "solve_vi_radial"]
