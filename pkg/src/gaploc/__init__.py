"""Bin placement at garbage accumulation points.

Exact side: a linearized tri-objective integer model solved by
branch and bound, range estimation by scalarization, and an
epsilon-constraint front sweep. Heuristic side: PageRank over the
site graph feeding greedy constructive policies. Shared: deviation
metrics and a baseline comparison protocol.
"""

from .augmecon import (FrontEntry, GridSpec, ParetoFront, augmecon2,
                       scalarize)
from .errors import (CoincidentSitesWarning, DegenerateRange, EmptyPool,
                     ExportWithoutCoordinates, GaplocError,
                     InfeasibleWarmStart, InstanceTooLarge,
                     MissingSiteDistances, ParseError, SchemaError,
                     StageFailed, UnknownId, UnknownPolicy, ValidationError,
                     ZeroRangeWarning)
from .metrics import (DeviationRow, compare_to_baseline, delta, dominates,
                      l2, pareto_filter)
from .milp import (MilpProblem, MilpResult, OracleEntry, SolveOptions,
                   SolveStats, enumerate_oracle, front_objectives, solve_lp,
                   solve_milp)
from .model import (UNSET, LinearModel, ObjectiveVector, Solution,
                    build_linear_model, canonical_solution, check_feasible,
                    decode_solution, encode_solution, eval_objectives,
                    min_cost_bins, solution_from_dict, solution_to_dict)
from .pagerank import (POLICIES, HeuristicSolution, HeuristicSummary,
                       RankVector, SiteGraph, build_graph, construct,
                       evaluate_heuristic, pagerank)
from .ranges import (LEX, LEX_WARM, OBJECTIVES, SINGLE, WEIGHTED,
                     MethodReport, ObjectiveRange, StageRecord, build_ranges,
                     flag_dominance, lexicographic, payoff_from_single_runs,
                     run_all_methods, single_objective, weighted_sum)
from .scenario import (BinType, FrequencyPattern, GeneratorGroup, Scenario,
                       Site, load_fixture, load_scenario, random_scenario,
                       save_scenario, scenario_to_dict)

__version__ = "0.1.0"

__all__ = [
    "FrontEntry", "GridSpec", "ParetoFront", "augmecon2", "scalarize",
    "CoincidentSitesWarning", "DegenerateRange", "EmptyPool",
    "ExportWithoutCoordinates", "GaplocError", "InfeasibleWarmStart",
    "InstanceTooLarge", "MissingSiteDistances", "ParseError", "SchemaError",
    "StageFailed", "UnknownId", "UnknownPolicy", "ValidationError",
    "ZeroRangeWarning",
    "DeviationRow", "compare_to_baseline", "delta", "dominates", "l2",
    "pareto_filter",
    "MilpProblem", "MilpResult", "OracleEntry", "SolveOptions", "SolveStats",
    "enumerate_oracle", "front_objectives", "solve_lp", "solve_milp",
    "UNSET", "LinearModel", "ObjectiveVector", "Solution",
    "build_linear_model",
    "canonical_solution", "check_feasible", "decode_solution",
    "encode_solution", "eval_objectives", "min_cost_bins",
    "solution_from_dict", "solution_to_dict",
    "POLICIES", "HeuristicSolution", "HeuristicSummary", "RankVector",
    "SiteGraph", "build_graph", "construct", "evaluate_heuristic",
    "pagerank",
    "LEX", "LEX_WARM", "OBJECTIVES", "SINGLE", "WEIGHTED",
    "MethodReport", "ObjectiveRange", "StageRecord", "build_ranges",
    "flag_dominance", "lexicographic", "payoff_from_single_runs",
    "run_all_methods", "single_objective", "weighted_sum",
    "BinType", "FrequencyPattern", "GeneratorGroup", "Scenario", "Site",
    "load_fixture", "load_scenario", "random_scenario", "save_scenario",
    "scenario_to_dict",
    "__version__",
]
