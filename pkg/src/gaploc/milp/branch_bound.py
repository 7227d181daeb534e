"""Best-bound branch and bound over the bounded-variable simplex.

Nodes are ordered by their parent relaxation bound, so the tree is
explored best-first; among equal bounds a node on the warm-start path
wins, then older nodes. Branching picks the most fractional integer
column (ties to the lowest index) and splits on floor/ceil bounds.

A warm start plays two roles. Its objective seeds the incumbent, which
prunes from the first node, and its values mark the branch that agrees
with it so the first dive retraces the warm solution. Invalid warm
starts are rejected loudly instead of being repaired.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

import numpy as np

from ..errors import InfeasibleWarmStart
from .problem import (FEASIBLE_TIME_LIMIT, INFEASIBLE, NO_SOLUTION_FOUND,
                      OPTIMAL, UNBOUNDED, MilpProblem, MilpResult, SolveStats,
                      max_row_violation)
from .simplex import (LP_INFEASIBLE, LP_ITERATION_LIMIT, LP_OPTIMAL,
                      LP_UNBOUNDED, solve_lp)

_WARM_TOL = 1e-6


@dataclass
class SolveOptions:
    """Knobs shared by every exact solve in the package."""

    time_limit_s: float | None = None
    node_limit: int | None = None
    integer_tolerance: float = 1e-6
    relative_gap: float = 1e-6


def _check_warm_start(problem: MilpProblem, warm: np.ndarray) -> np.ndarray:
    snapped = np.array(warm, dtype=float)
    ints = problem.integer
    drift = np.abs(snapped[ints] - np.round(snapped[ints]))
    if drift.size and float(drift.max()) > _WARM_TOL:
        raise InfeasibleWarmStart(
            "warm start has fractional integer variables")
    snapped[ints] = np.round(snapped[ints])
    violation = max_row_violation(problem, snapped)
    if violation > _WARM_TOL:
        raise InfeasibleWarmStart(
            "warm start violates constraints by %.3g" % violation)
    return snapped


def solve_milp(problem: MilpProblem, options: SolveOptions | None = None,
               ) -> MilpResult:
    """Solve a minimization MILP; see module docstring for the strategy."""
    options = options or SolveOptions()
    problem.validate()
    started = time.monotonic()
    int_cols = np.flatnonzero(problem.integer)
    c = problem.c

    incumbent_x = None
    incumbent_obj = math.inf
    warm = None
    if problem.warm_start is not None:
        warm = _check_warm_start(problem, problem.warm_start)
        incumbent_x = warm
        incumbent_obj = float(c @ warm)

    def gap_slack():
        if not math.isfinite(incumbent_obj):
            return 0.0
        return options.relative_gap * max(1.0, abs(incumbent_obj))

    nodes = 0
    lp_iterations = 0
    history = []
    heap = []
    seq = 0
    root_rank = 0 if warm is not None else 1
    heapq.heappush(heap, (-math.inf, root_rank, seq,
                          problem.lower.copy(), problem.upper.copy()))
    status = None
    final_bound = None

    while heap:
        bound, rank, _, lo, hi = heapq.heappop(heap)
        if bound >= incumbent_obj - gap_slack():
            # everything left is at least as bad
            final_bound = bound
            break
        if options.node_limit is not None and nodes >= options.node_limit:
            status = "limit"
            final_bound = bound
            break
        if options.time_limit_s is not None and \
                time.monotonic() - started > options.time_limit_s:
            status = "limit"
            final_bound = bound
            break

        res = solve_lp(c, problem.a, problem.senses, problem.rhs, lo, hi)
        nodes += 1
        lp_iterations += res.iterations
        if res.status == LP_INFEASIBLE:
            continue
        if res.status == LP_UNBOUNDED:
            return MilpResult(
                UNBOUNDED, None, None, -math.inf,
                SolveStats(nodes, lp_iterations,
                           time.monotonic() - started, tuple(history)))
        if res.status == LP_ITERATION_LIMIT:
            raise ArithmeticError("simplex iteration limit in search node")
        assert res.status == LP_OPTIMAL
        node_bound = res.objective
        if node_bound >= incumbent_obj - gap_slack():
            continue

        values = res.x
        frac = np.abs(values[int_cols] - np.round(values[int_cols]))
        if not frac.size or float(frac.max()) <= options.integer_tolerance:
            candidate = values.copy()
            candidate[int_cols] = np.round(candidate[int_cols])
            obj = float(c @ candidate)
            if obj < incumbent_obj:
                incumbent_obj = obj
                incumbent_x = candidate
                history.append((nodes, node_bound, obj))
            continue

        away = np.abs(frac - 0.5)
        away[frac <= options.integer_tolerance] = math.inf
        branch_col = int(int_cols[int(np.argmin(away))])
        v = float(values[branch_col])
        if nodes % 64 == 0:
            history.append((nodes, node_bound,
                            None if incumbent_x is None else incumbent_obj))

        down_hi = lo.copy(), hi.copy()
        down_hi[1][branch_col] = math.floor(v)
        up_lo = lo.copy(), hi.copy()
        up_lo[0][branch_col] = math.ceil(v)
        for child_lo, child_hi in (down_hi, up_lo):
            if child_lo[branch_col] > child_hi[branch_col]:
                continue
            child_rank = 1
            if rank == 0 and warm is not None:
                wv = warm[branch_col]
                if child_lo[branch_col] - _WARM_TOL <= wv \
                        <= child_hi[branch_col] + _WARM_TOL:
                    child_rank = 0
            seq += 1
            heapq.heappush(heap, (node_bound, child_rank, seq,
                                  child_lo, child_hi))

    wall = time.monotonic() - started
    if status == "limit":
        if incumbent_x is None:
            return MilpResult(NO_SOLUTION_FOUND, None, None, final_bound,
                              SolveStats(nodes, lp_iterations, wall,
                                         tuple(history)))
        return MilpResult(FEASIBLE_TIME_LIMIT, incumbent_x, incumbent_obj,
                          final_bound,
                          SolveStats(nodes, lp_iterations, wall,
                                     tuple(history)))
    if incumbent_x is None:
        return MilpResult(INFEASIBLE, None, None, math.inf,
                          SolveStats(nodes, lp_iterations, wall,
                                     tuple(history)))
    if final_bound is None or not math.isfinite(final_bound):
        final_bound = incumbent_obj
    final_bound = min(final_bound, incumbent_obj)
    history.append((nodes, final_bound, incumbent_obj))
    return MilpResult(OPTIMAL, incumbent_x, incumbent_obj, final_bound,
                      SolveStats(nodes, lp_iterations, wall, tuple(history)))
