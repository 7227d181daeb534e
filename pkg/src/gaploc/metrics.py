"""Deviation metrics, dominance tests and baseline comparison.

Deviations are percentages of the objective's ideal-to-nadir span, so
values below the ideal legitimately come out negative; nothing here
clamps them. Dominance uses a small absolute slack so that solver noise
around ties never flips a verdict.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import ZeroRangeWarning
from .model import ObjectiveVector, Solution, eval_objectives
from .scenario import Scenario

_SLACK = 1e-9


def delta(value: float, ideal: float, nadir: float) -> float:
    """Relative deviation of ``value`` inside [ideal, nadir], in percent."""
    span = nadir - ideal
    if span == 0.0:
        warnings.warn("ideal equals nadir; deviation fixed at 0",
                      ZeroRangeWarning, stacklevel=2)
        return 0.0
    return (value - ideal) / span * 100.0


def l2(deltas) -> float:
    """Euclidean norm of a deviation vector, itself in percent."""
    return math.sqrt(sum(float(d) ** 2 for d in deltas))


def dominates(a, b) -> bool:
    """True when ``a`` is at least as good everywhere and better somewhere."""
    a = tuple(a)
    b = tuple(b)
    better = False
    for av, bv in zip(a, b):
        if av > bv + _SLACK:
            return False
        if av < bv - _SLACK:
            better = True
    return better


def pareto_filter(vectors):
    """Non-dominated subset of ``vectors`` in first-seen order.

    Exact duplicates survive together (neither strictly improves on the
    other); callers wanting a set should deduplicate first.
    """
    pool = [tuple(v) for v in vectors]
    kept = []
    for idx, v in enumerate(pool):
        if any(dominates(w, v) for k, w in enumerate(pool) if k != idx):
            continue
        kept.append(v)
    return tuple(kept)


@dataclass(frozen=True)
class DeviationRow:
    """Relative change of a candidate against an evaluated baseline."""

    candidate: ObjectiveVector
    baseline: ObjectiveVector
    improvement: tuple     # percent per objective; negative is better
    unreachable: tuple     # generator ids with no open baseline site in range


def _relative(cand: float, base: float) -> float:
    if base == 0.0:
        if cand == 0.0:
            return 0.0
        return math.copysign(math.inf, cand)
    return (cand - base) / base * 100.0


def compare_to_baseline(s: Scenario, candidate: ObjectiveVector,
                        baseline_layout: Solution) -> DeviationRow:
    """Score ``candidate`` against an existing bin layout.

    The layout's own assignment field is ignored: generators walk to the
    nearest site that actually holds bins (ties to the lowest site
    index). Generators with no open site within the walking limit are
    reported and left out of the distance average; the comparison still
    proceeds on the rest.
    """
    n_h = len(s.fractions)
    open_sites = [
        i for i in range(len(s.sites))
        if any(baseline_layout.bin_counts[j][h][i] > 0
               for j in range(len(s.bins)) for h in range(n_h))
    ]
    assignment = []
    unreachable = []
    for p, gen in enumerate(s.generators):
        best = None
        for i in open_sites:
            d = float(s.distances[p, i])
            if d > s.max_distance:
                continue
            if best is None or d < s.distances[p, best]:
                best = i
        if best is None:
            unreachable.append(gen.id)
            assignment.append(-1)
        else:
            assignment.append(best)

    served = [p for p, i in enumerate(assignment) if i >= 0]
    if unreachable:
        # only f1 and f3 are read off the shadow; f2 is averaged below
        # over the generators that still have an open site in range
        shadow = Solution(
            assignment=(0,) * len(assignment),
            frequency_choice=baseline_layout.frequency_choice,
            bin_counts=baseline_layout.bin_counts,
        )
        full = eval_objectives(s, shadow)
        f2 = (
            sum(float(s.distances[p, assignment[p]]) for p in served)
            / len(served)
        ) if served else 0.0
        base = ObjectiveVector(full.f1, f2, full.f3)
    else:
        base = eval_objectives(s, Solution(
            assignment=tuple(assignment),
            frequency_choice=baseline_layout.frequency_choice,
            bin_counts=baseline_layout.bin_counts,
        ))

    improvement = tuple(
        _relative(c, b) for c, b in zip(candidate, base)
    )
    return DeviationRow(
        candidate=ObjectiveVector(*candidate),
        baseline=base,
        improvement=improvement,
        unreachable=tuple(unreachable),
    )
