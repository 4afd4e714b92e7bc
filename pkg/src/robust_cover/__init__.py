"""Robust two-level cooperative set covering: models, solver and verification."""
from .core import (DEFAULT_ALPHAS, DEFAULT_BETAS, ConfigError, Instance, RobustConfig, Solution,
                   VerificationReport, make_instance, read_instance, read_solution, validate,
                   write_instance, write_solution)
from .generator import GeneratorConfig, generate, generate_suite, table1_config
from .linearization import TangentFamily, build_family, sample_gap, tangency_delta
from .milp import build_gutlcscp_la, build_rutlcscp_la_rc, build_tlcscp
from .oracle import coverage, dual_value, verify, worst_case_miss
from .solver import SolverOptions, exhaustive_solve, solve, solve_lp_relaxation

__all__ = [
    "DEFAULT_ALPHAS", "DEFAULT_BETAS", "ConfigError", "GeneratorConfig", "Instance",
    "RobustConfig", "Solution", "SolverOptions", "TangentFamily", "VerificationReport",
    "build_family", "build_gutlcscp_la", "build_rutlcscp_la_rc", "build_tlcscp", "coverage",
    "dual_value", "exhaustive_solve", "generate", "generate_suite", "make_instance",
    "read_instance", "read_solution", "sample_gap", "solve", "solve_lp_relaxation",
    "table1_config", "tangency_delta", "validate", "verify", "worst_case_miss",
    "write_instance", "write_solution",
]
