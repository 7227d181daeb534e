"""Epsilon-constraint grid search over the phase-1 ranges.

The main objective stays in the cost row; the other two become equality
rows with explicit surplus columns, and the surplus is rewarded by a
small augmentation term so every cell optimum is non-dominated among
that cell's optima. The grid walks each constrained objective from its
nadir toward its ideal, which makes two accelerations sound: a cell's
surplus tells how many of the following (tighter) cells the same
solution already answers, and an infeasible cell proves the rest of its
lane infeasible.

Cells are independent work items. With GAPLOC_THREADS > 1 they are
solved concurrently and merged in cell order; the bypass bookkeeping is
inherently sequential, so the parallel mode trades those skips away.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ZeroRangeWarning
from .metrics import pareto_filter
from .milp import (FEASIBLE_TIME_LIMIT, INFEASIBLE, NO_SOLUTION_FOUND,
                   OPTIMAL, MilpProblem, SolveOptions, SolveStats, solve_milp)
from .model import (LinearModel, ObjectiveVector, Row, build_linear_model,
                    canonical_solution, decode_solution, encode_solution,
                    eval_objectives)
from .ranges import ObjectiveRange
from .scenario import Scenario

THREADS_ENV = "GAPLOC_THREADS"


@dataclass(frozen=True)
class GridSpec:
    """Grid density and augmentation for one front computation."""

    gridpoints: int = 2
    main_objective: int = 1
    augmentation_delta: float = 1e-3

    def __post_init__(self):
        if self.gridpoints < 1:
            raise ValueError("gridpoints must be at least 1")
        if self.main_objective not in (1, 2, 3):
            raise ValueError("main objective must be 1, 2 or 3")
        if not 0.0 < self.augmentation_delta <= 1e-2:
            raise ValueError("augmentation delta must lie in (0, 1e-2]")

    @property
    def constrained(self) -> tuple:
        """The two constrained objectives, ascending; first is inner."""
        return tuple(k for k in (1, 2, 3) if k != self.main_objective)


@dataclass(frozen=True)
class FrontEntry:
    solution: object
    objectives: ObjectiveVector
    cell: tuple                 # (epsilon_a, epsilon_b), a < b
    status: str
    stats: SolveStats


@dataclass(frozen=True)
class ParetoFront:
    entries: tuple
    solve_calls: int
    run_bound: int
    skipped: tuple = ()         # cells abandoned without a solution


def _epsilon_levels(rng: ObjectiveRange, g: int, k: int):
    """nadir-to-ideal ladder with g+1 rungs; collapses on a zero range."""
    if rng.width <= 0.0:
        warnings.warn(
            "objective %d has a zero range; its epsilon loop collapses "
            "to a single point" % k, ZeroRangeWarning, stacklevel=3)
        return [float(rng.ideal)], 0.0
    step = rng.width / g
    levels = [rng.nadir - n * step for n in range(g + 1)]
    levels[-1] = float(rng.ideal)
    return levels, step


def _scalarized_problem(lm: LinearModel, ranges, grid: GridSpec,
                        cell, warm=None) -> MilpProblem:
    a_k, b_k = grid.constrained
    eps_a, eps_b = cell
    n = lm.n_cols
    cost = np.zeros(n + 2)
    cost[:n] = lm.objectives[grid.main_objective - 1]
    delta = grid.augmentation_delta
    for offset, (k, eps, weight) in enumerate(
            ((a_k, eps_a, 1.0), (b_k, eps_b, 0.1))):
        width = ranges[k - 1].nadir - ranges[k - 1].ideal
        if width > 0.0:
            cost[n + offset] = -delta * weight / width
        else:
            warnings.warn(
                "objective %d has a zero range; its surplus is not "
                "rewarded" % k, ZeroRangeWarning, stacklevel=3)

    rows = list(lm.rows)
    for offset, (k, eps) in enumerate(((a_k, eps_a), (b_k, eps_b))):
        c = lm.objectives[k - 1]
        nz = np.flatnonzero(c)
        rows.append(Row(
            columns=tuple(int(j) for j in nz) + (n + offset,),
            coefficients=tuple(float(c[j]) for j in nz) + (1.0,),
            sense="=",
            rhs=float(eps),
            label="epsilon[f%d]" % k,
        ))
    lower = np.concatenate([lm.lower, [0.0, 0.0]])
    upper = np.concatenate([lm.upper, [np.inf, np.inf]])
    integer = np.array([kind != "continuous" for kind in lm.kinds]
                       + [False, False])
    names = lm.names + ("surplus[f%d]" % a_k, "surplus[f%d]" % b_k)
    return MilpProblem.from_rows(cost, rows, lower, upper, integer,
                                 names=names, warm_start=warm)


def scalarize(s: Scenario, ranges, grid: GridSpec, cell) -> MilpProblem:
    """The single-cell problem: main objective plus rewarded surplus."""
    return _scalarized_problem(build_linear_model(s), ranges, grid, cell)


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _warm_vector(pool, cell, cost):
    """Best already-known solution that satisfies this cell's epsilons."""
    eps_a, eps_b = cell
    best = None
    best_score = math.inf
    for _sol, (obj_a, obj_b), enc in pool:
        if obj_a > eps_a or obj_b > eps_b:
            continue
        full = np.concatenate([enc, [eps_a - obj_a, eps_b - obj_b]])
        score = float(cost @ full)
        if score < best_score:
            best, best_score = full, score
    return best


def augmecon2(s: Scenario, ranges, grid: GridSpec,
              opts: SolveOptions | None = None) -> ParetoFront:
    """Sweep the epsilon grid and return the filtered front.

    ``ranges`` is the per-objective ideal/nadir triple from phase 1.
    Solutions found earlier in the sweep seed later cells as warm
    starts, the surplus-driven bypass skips grid cells that cannot hold
    anything new, and an infeasible cell ends its inner lane.
    """
    opts = opts or SolveOptions()
    a_k, b_k = grid.constrained
    g = grid.gridpoints
    lm = build_linear_model(s)
    levels_a, step_a = _epsilon_levels(ranges[a_k - 1], g, a_k)
    levels_b, _ = _epsilon_levels(ranges[b_k - 1], g, b_k)
    run_bound = (g + 1) ** 2

    entries = []
    skipped = []
    solve_calls = 0

    def record(cell, result):
        if result.status in (OPTIMAL, FEASIBLE_TIME_LIMIT) \
                and result.values is not None:
            decoded = decode_solution(lm, s, result.values)
            sol = canonical_solution(
                s, decoded.assignment, decoded.frequency_choice)
            vec = eval_objectives(s, sol)
            entries.append(FrontEntry(sol, vec, cell, result.status,
                                      result.stats))
            return sol, vec
        if result.status == NO_SOLUTION_FOUND:
            skipped.append(cell)
        return None, None

    if _thread_count() > 1:
        cells = [(eps_a, eps_b) for eps_b in levels_b for eps_a in levels_a]
        problems = [_scalarized_problem(lm, ranges, grid, cell)
                    for cell in cells]
        with ThreadPoolExecutor(max_workers=_thread_count()) as executor:
            results = list(executor.map(
                lambda p: solve_milp(p, opts), problems))
        solve_calls = len(cells)
        for cell, result in zip(cells, results):
            record(cell, result)
    else:
        # inner lane over the first constrained objective, with bypass
        pool = []      # (solution, (obj_a, obj_b), encoded model columns)
        for eps_b in levels_b:
            n_a = 0
            while n_a < len(levels_a):
                eps_a = levels_a[n_a]
                cell = (eps_a, eps_b)
                problem = _scalarized_problem(lm, ranges, grid, cell)
                warm = _warm_vector(pool, cell, problem.c)
                if warm is not None:
                    problem = replace(problem, warm_start=warm)
                result = solve_milp(problem, opts)
                solve_calls += 1
                if result.status == INFEASIBLE:
                    break             # tighter epsilon stays infeasible
                sol, vec = record(cell, result)
                if sol is None:
                    n_a += 1
                    continue
                key = (vec[a_k - 1], vec[b_k - 1])
                if all(enc_vec != key for _x, enc_vec, _e in pool):
                    pool.append((sol, key, encode_solution(lm, sol)))
                if step_a > 0.0:
                    surplus = eps_a - vec[a_k - 1]
                    n_a += 1 + int(math.floor(surplus / step_a + 1e-12))
                else:
                    n_a += 1

    # dedupe exact repeats, then keep the non-dominated subset
    seen = set()
    unique = []
    for e in entries:
        key = tuple(e.objectives)
        if key in seen:
            continue
        seen.add(key)
        unique.append(e)
    front_vecs = set(pareto_filter([tuple(e.objectives) for e in unique]))
    kept = tuple(e for e in unique if tuple(e.objectives) in front_vecs)
    return ParetoFront(
        entries=kept,
        solve_calls=solve_calls,
        run_bound=run_bound,
        skipped=tuple(skipped),
    )
