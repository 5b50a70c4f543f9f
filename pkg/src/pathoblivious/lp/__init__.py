"""Steady-state linear programs for swap rates, with a self-contained simplex kernel."""

from .model import Constraint, LpModel, LpSolution, Variable, export_lp_text, solution_csv
from .rates import (
    RateProblem,
    balance_residuals,
    build_balance_model,
    c_name,
    g_name,
    lexicographic,
    max_alpha_model,
    max_min_consumption_model,
    max_total_consumption_model,
    min_max_generation_model,
    min_total_generation_model,
    sigma_name,
    solve_lexicographic,
    solve_max_alpha,
    solve_max_min_consumption,
    solve_max_total_consumption,
    solve_min_max_generation,
    solve_min_total_generation,
)
from .simplex import simplex_solve

__all__ = [
    "Constraint", "LpModel", "LpSolution", "Variable", "export_lp_text", "solution_csv",
    "RateProblem", "balance_residuals", "build_balance_model", "c_name", "g_name", "sigma_name",
    "lexicographic", "max_alpha_model", "max_min_consumption_model", "max_total_consumption_model",
    "min_max_generation_model", "min_total_generation_model",
    "solve_lexicographic", "solve_max_alpha", "solve_max_min_consumption",
    "solve_max_total_consumption", "solve_min_max_generation", "solve_min_total_generation",
    "simplex_solve",
]
