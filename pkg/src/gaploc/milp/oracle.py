"""Exhaustive ground truth for tiny instances.

Walks every in-range assignment and every frequency choice on the
occupied cells, completes each with the cheapest feasible bin cover,
and marks the non-dominated subset. Intended for fixtures with a few
generators and sites; the cap guards against accidental explosions.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from itertools import product

from ..errors import InstanceTooLarge
from ..metrics import dominates
from ..model import (UNSET, ObjectiveVector, Solution, canonical_solution,
                     eval_objectives)
from ..scenario import Scenario


class OracleEntry(NamedTuple):
    solution: Solution
    objectives: ObjectiveVector
    non_dominated: bool


def enumerate_oracle(s: Scenario, cap: int = 10 ** 7) -> tuple:
    """Every feasible solution of a tiny scenario, front entries marked."""
    n_i, n_h, n_y = len(s.sites), len(s.fractions), len(s.frequencies)
    mask = s.reachable_mask()
    choices = [np.flatnonzero(mask[p]) for p in range(len(s.generators))]
    n_assign = math.prod(len(c) for c in choices)
    total = n_assign * n_y ** (n_h * n_i)
    if total > cap:
        raise InstanceTooLarge(
            "%d assignment/frequency combinations exceed the cap of %d"
            % (total, cap))
    if n_assign == 0:
        return ()

    raw = []
    for assignment in product(*(tuple(int(i) for i in c) for c in choices)):
        occupied = sorted(set(assignment))
        cells = [(h, i) for i in occupied for h in range(n_h)]
        for ys in product(range(n_y), repeat=len(cells)):
            freq = [[UNSET] * n_i for _ in range(n_h)]
            for (h, i), y in zip(cells, ys):
                freq[h][i] = y
            sol = canonical_solution(s, assignment, freq)
            if sol is None:
                continue
            raw.append((sol, eval_objectives(s, sol)))

    # mark dominance over the distinct objective vectors only; the raw
    # list repeats vectors far more often than it varies them
    distinct = {}
    for _sol, vec in raw:
        distinct[tuple(vec)] = True
    keys = list(distinct)
    for k in keys:
        distinct[k] = not any(
            other != k and dominates(other, k) for other in keys
        )
    return tuple(
        OracleEntry(sol, vec, distinct[tuple(vec)]) for sol, vec in raw
    )


def front_objectives(entries) -> tuple:
    """Sorted distinct objective vectors of the marked front."""
    seen = {}
    for e in entries:
        if e.non_dominated:
            seen[tuple(e.objectives)] = e.objectives
    return tuple(seen[k] for k in sorted(seen))
