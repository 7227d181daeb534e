"""Objective range estimation, the first phase of the exact pipeline.

Four scalarization methods probe the efficient set: plain single
objective runs, an unbalanced weighted sum, and lexicographic stacks
with and without warm starts. Their reports are pooled, dominated ones
discarded, and the survivors define each objective's ideal and nadir.
The grid search of the second phase consumes exactly that summary.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import (DegenerateRange, EmptyPool, StageFailed,
                     ZeroRangeWarning)
from .metrics import dominates
from .milp import (FEASIBLE_TIME_LIMIT, OPTIMAL, MilpProblem, SolveOptions,
                   solve_milp)
from .model import (LinearModel, ObjectiveVector, Row, Solution,
                    build_linear_model, canonical_solution, decode_solution,
                    encode_solution, eval_objectives)
from .scenario import Scenario

OBJECTIVES = (1, 2, 3)

SINGLE = "single-objective"
WEIGHTED = "weighted-sum"
LEX = "lexicographic"
LEX_WARM = "lexicographic-warm"

# heavy-to-light weight ratio for the weighted-sum probe
UNBALANCED_WEIGHT = 1000.0

# per-stage wall clock when the caller does not say otherwise
DEFAULT_STAGE_SECONDS = 60.0

# slack granted when an earlier stage's value becomes a bound row
_STAGE_BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class ObjectiveRange:
    ideal: float
    nadir: float

    @property
    def width(self) -> float:
        return self.nadir - self.ideal


@dataclass(frozen=True)
class StageRecord:
    """One lexicographic stage: which objective, what it achieved."""

    objective: int
    value: float
    solution: Solution


@dataclass(frozen=True)
class MethodReport:
    """One scalarization run: what was optimized and what came out."""

    method: str
    order: tuple                 # objective indexes in optimization order
    solution: Solution
    objectives: ObjectiveVector
    wall_seconds: float
    dominated: bool | None = None     # meaningful only after pooling
    stages: tuple = ()                # StageRecords, lexicographic only


def _default_options(opts: SolveOptions | None) -> SolveOptions:
    if opts is not None:
        return opts
    return SolveOptions(time_limit_s=DEFAULT_STAGE_SECONDS)


def _objective_bound_row(lm: LinearModel, k: int, bound: float) -> Row:
    c = lm.objectives[k - 1]
    nz = np.flatnonzero(c)
    return Row(
        columns=tuple(int(j) for j in nz),
        coefficients=tuple(float(c[j]) for j in nz),
        sense="<=",
        rhs=bound,
        label="stage-bound[f%d]" % k,
    )


def _assemble(lm: LinearModel, cost: np.ndarray, extra_rows=(),
              warm: np.ndarray | None = None) -> MilpProblem:
    rows = list(lm.rows) + list(extra_rows)
    integer = np.array([kind != "continuous" for kind in lm.kinds])
    return MilpProblem.from_rows(
        cost, rows, lm.lower, lm.upper, integer,
        names=lm.names, warm_start=warm,
    )


def _run_stage(s: Scenario, lm: LinearModel, cost, extra_rows, warm_solution,
               opts: SolveOptions):
    """One MILP solve returning (canonical solution, result) or (None, result)."""
    warm = None
    if warm_solution is not None:
        warm = encode_solution(lm, warm_solution)
    problem = _assemble(lm, cost, extra_rows, warm)
    result = solve_milp(problem, opts)
    if result.status not in (OPTIMAL, FEASIBLE_TIME_LIMIT) \
            or result.values is None:
        return None, result
    decoded = decode_solution(lm, s, result.values)
    sol = canonical_solution(s, decoded.assignment, decoded.frequency_choice)
    return sol, result


def single_objective(s: Scenario, k: int, opts: SolveOptions | None = None,
                     ) -> MethodReport:
    """Minimize one objective alone; the report still carries all three."""
    if k not in OBJECTIVES:
        raise ValueError("objective index must be 1, 2 or 3, not %r" % (k,))
    opts = _default_options(opts)
    lm = build_linear_model(s)
    started = time.monotonic()
    sol, result = _run_stage(s, lm, lm.objectives[k - 1], (), None, opts)
    if sol is None:
        raise StageFailed(1, k, result.status)
    return MethodReport(
        method=SINGLE,
        order=(k,),
        solution=sol,
        objectives=eval_objectives(s, sol),
        wall_seconds=time.monotonic() - started,
    )


def payoff_from_single_runs(s: Scenario, opts: SolveOptions | None = None):
    """Best/worst per objective over the three single-objective solutions."""
    reports = [single_objective(s, k, opts) for k in OBJECTIVES]
    table = np.array([tuple(r.objectives) for r in reports])
    return tuple(
        ObjectiveRange(float(table[:, k].min()), float(table[:, k].max()))
        for k in range(3)
    )


def weighted_sum(s: Scenario, k_prime: int, weights=None, payoff=None,
                 opts: SolveOptions | None = None) -> MethodReport:
    """Minimize a normalized weighted sum dominated by objective k_prime.

    Each objective is shifted to its payoff best and scaled by its
    payoff width; zero-width objectives drop out of the sum with a
    warning since they are constant over the feasible set anyway.
    """
    if k_prime not in OBJECTIVES:
        raise ValueError("objective index must be 1, 2 or 3, not %r"
                         % (k_prime,))
    opts = _default_options(opts)
    if weights is None:
        weights = tuple(
            UNBALANCED_WEIGHT if k == k_prime else 1.0 for k in OBJECTIVES
        )
    if payoff is None:
        payoff = payoff_from_single_runs(s, opts)
    payoff = tuple(
        p if isinstance(p, ObjectiveRange) else ObjectiveRange(*p)
        for p in payoff
    )

    lm = build_linear_model(s)
    cost = np.zeros(lm.n_cols)
    dropped = 0
    for k in OBJECTIVES:
        width = payoff[k - 1].width
        if width <= 0.0:
            dropped += 1
            warnings.warn(
                "objective %d has a zero payoff range; dropped from the "
                "weighted sum" % k, ZeroRangeWarning, stacklevel=2)
            continue
        cost += (weights[k - 1] / width) * lm.objectives[k - 1]
    if dropped == len(OBJECTIVES):
        raise DegenerateRange(
            "all payoff ranges are zero; the weighted sum is constant")

    started = time.monotonic()
    sol, result = _run_stage(s, lm, cost, (), None, opts)
    if sol is None:
        raise StageFailed(1, k_prime, result.status)
    return MethodReport(
        method=WEIGHTED,
        order=(k_prime,),
        solution=sol,
        objectives=eval_objectives(s, sol),
        wall_seconds=time.monotonic() - started,
    )


def lexicographic(s: Scenario, order, warm: bool,
                  opts: SolveOptions | None = None) -> MethodReport:
    """Stagewise minimization along ``order``.

    Stage m minimizes its objective subject to every earlier stage
    keeping its achieved value (up to a relative epsilon). With
    ``warm`` the previous stage's solution seeds the next incumbent,
    which is always feasible there by construction.
    """
    order = tuple(order)
    if not order or len(set(order)) != len(order) \
            or any(k not in OBJECTIVES for k in order):
        raise ValueError("order must be distinct objective indexes, not %r"
                         % (order,))
    opts = _default_options(opts)
    lm = build_linear_model(s)

    started = time.monotonic()
    bound_rows = []
    stages = []
    previous = None
    for m, k in enumerate(order, start=1):
        warm_solution = previous if warm else None
        sol, result = _run_stage(
            s, lm, lm.objectives[k - 1], tuple(bound_rows), warm_solution,
            opts)
        if sol is None:
            raise StageFailed(m, k, result.status)
        achieved = eval_objectives(s, sol)[k - 1]
        bound_rows.append(_objective_bound_row(
            lm, k, achieved + _STAGE_BOUND_SLACK * max(1.0, abs(achieved))))
        stages.append(StageRecord(objective=k, value=achieved, solution=sol))
        previous = sol
    return MethodReport(
        method=LEX_WARM if warm else LEX,
        order=order,
        solution=previous,
        objectives=eval_objectives(s, previous),
        wall_seconds=time.monotonic() - started,
        stages=tuple(stages),
    )


def run_all_methods(s: Scenario, opts: SolveOptions | None = None,
                    methods=(SINGLE, WEIGHTED, LEX, LEX_WARM)):
    """The full phase-1 sweep as pooled, dominance-flagged reports.

    Lexicographic methods run every permutation of the three
    objectives, mirroring the way the range tables enumerate orders.
    """
    opts = _default_options(opts)
    reports = []
    payoff = None
    for method in methods:
        if method == SINGLE:
            for k in OBJECTIVES:
                reports.append(single_objective(s, k, opts))
        elif method == WEIGHTED:
            if payoff is None:
                payoff = payoff_from_single_runs(s, opts)
            for k in OBJECTIVES:
                reports.append(weighted_sum(s, k, None, payoff, opts))
        elif method in (LEX, LEX_WARM):
            for order in _permutations_123():
                reports.append(lexicographic(s, order, method == LEX_WARM,
                                             opts))
        else:
            raise ValueError("unknown method %r" % (method,))
    return flag_dominance(reports)


def _permutations_123():
    from itertools import permutations
    return tuple(permutations(OBJECTIVES))


def flag_dominance(reports):
    """Recompute every report's dominated flag against the whole pool."""
    vecs = [tuple(r.objectives) for r in reports]
    flagged = []
    for idx, r in enumerate(reports):
        dominated = any(
            k != idx and dominates(vecs[k], vecs[idx])
            for k in range(len(vecs))
        )
        flagged.append(replace(r, dominated=dominated))
    return tuple(flagged)


def build_ranges(reports) -> tuple:
    """Ideal and nadir per objective over the non-dominated reports."""
    reports = list(reports)
    if not reports:
        raise EmptyPool("no method reports to build ranges from")
    flagged = flag_dominance(reports)
    pool = [r for r in flagged if not r.dominated]
    if not pool:
        raise EmptyPool("every pooled report is dominated")
    table = np.array([tuple(r.objectives) for r in pool])
    return tuple(
        ObjectiveRange(float(table[:, k].min()), float(table[:, k].max()))
        for k in range(3)
    )
