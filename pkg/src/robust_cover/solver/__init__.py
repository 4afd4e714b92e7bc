"""MILP solving: bounded simplex, branch-and-bound and a brute-force reference."""
from .bnb import LPRelaxation, MalformedModel, SolverOptions, solve, solve_lp_relaxation
from .exhaustive import MAX_SITES, exhaustive_solve
from .simplex import BoundedSimplex, LPResult, solve_lp

__all__ = [
    "BoundedSimplex", "LPRelaxation", "LPResult", "MAX_SITES", "MalformedModel",
    "SolverOptions", "exhaustive_solve", "solve", "solve_lp", "solve_lp_relaxation",
]
