"""
ambistop

Optimal stopping of multidimensional Brownian motion under drift ambiguity:
closed-form solvers for linear-combination and radially symmetric payoffs,
plus Monte Carlo and finite-difference verification engines.
"""

__version__ = "1.0.0"
