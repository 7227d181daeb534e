"""Self-contained mixed-integer linear programming core.

Kept deliberately generic: nothing in here knows about waste scenarios
beyond the oracle helper, which lives here because it shares the
solver's role of producing certified optima for tiny instances.
"""

from .problem import (FEASIBLE_TIME_LIMIT, INFEASIBLE, NO_SOLUTION_FOUND,
                      OPTIMAL, UNBOUNDED, MilpProblem, MilpResult, SolveStats,
                      max_row_violation, problem_to_lp_text, row_activity)
from .simplex import LpResult, solve_lp
from .branch_bound import SolveOptions, solve_milp
from .oracle import OracleEntry, enumerate_oracle, front_objectives

__all__ = [
    "FEASIBLE_TIME_LIMIT",
    "INFEASIBLE",
    "NO_SOLUTION_FOUND",
    "OPTIMAL",
    "UNBOUNDED",
    "MilpProblem",
    "MilpResult",
    "SolveStats",
    "LpResult",
    "SolveOptions",
    "OracleEntry",
    "enumerate_oracle",
    "front_objectives",
    "max_row_violation",
    "problem_to_lp_text",
    "row_activity",
    "solve_lp",
    "solve_milp",
]
