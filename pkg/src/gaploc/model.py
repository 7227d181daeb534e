"""Integer-programming view of bin placement.

The decision structure: each generator group is assigned to exactly one
site within walking range (binary x per reachable pair), each (fraction,
site) pair may adopt at most one collection frequency (binary f), and
each site holds a non-negative integer count of each bin type per
fraction (integer t). The three objectives are the average adopted
collection frequency, the average walking distance, and the total bin
purchase cost.

The capacity constraint couples x and f through a product; the emitted
linear system replaces each product with a bounded continuous variable
pinned by three inequality rows, so a generic MILP solver can consume
it. ``check_feasible`` evaluates the original nonlinear form directly
and is the ground truth the linear encoding is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import UnknownId
from .scenario import Scenario


class ObjectiveVector(NamedTuple):
    f1: float   # average collection frequency, dimensionless
    f2: float   # average walking distance, meters
    f3: float   # total installation cost, monetary units


UNSET = -1  # frequency_choice entry for "no frequency adopted"


@dataclass(frozen=True)
class Solution:
    """Index-based encoding of one placement decision.

    ``assignment[p]`` is the site index of generator p,
    ``frequency_choice[h][i]`` the frequency index adopted at (h, i) or
    ``UNSET``, and ``bin_counts[j][h][i]`` the installed bin count.
    """

    assignment: tuple[int, ...]
    frequency_choice: tuple[tuple[int, ...], ...]
    bin_counts: tuple[tuple[tuple[int, ...], ...], ...]


@dataclass(frozen=True)
class Violation:
    family: str           # constraint family, e.g. "capacity"
    where: tuple          # offending ids
    detail: str

    def __str__(self):
        return "%s at %s: %s" % (self.family, "/".join(map(str, self.where)),
                                 self.detail)


@dataclass(frozen=True)
class Row:
    """One sparse constraint row: coeffs . values  <sense>  rhs."""

    columns: tuple[int, ...]
    coefficients: tuple[float, ...]
    sense: str            # "<=" | "=" | ">="
    rhs: float
    label: str


@dataclass(frozen=True)
class LinearModel:
    """The full linear constraint system plus three objective rows.

    Solver-agnostic: pair it with one of ``objectives`` (or any linear
    combination of them) to obtain a single-objective MILP.
    """

    n_cols: int
    names: tuple[str, ...]
    kinds: tuple[str, ...]                  # "binary" | "integer" | "continuous"
    lower: np.ndarray
    upper: np.ndarray
    rows: tuple[Row, ...]
    objectives: tuple[np.ndarray, np.ndarray, np.ndarray]
    x_col: dict        # (p, i) -> column, reachable pairs only
    f_col: dict        # (h, i, y) -> column
    t_col: dict        # (j, h, i) -> column
    u_col: dict        # (p, h, i, y) -> column


# ---------------------------------------------------------------------------
# Objective evaluation and feasibility
# ---------------------------------------------------------------------------

def eval_objectives(s: Scenario, sol: Solution) -> ObjectiveVector:
    n_i, n_h = len(s.sites), len(s.fractions)
    a = s.periods

    f1 = 0.0
    for h in range(n_h):
        for i in range(n_i):
            y = sol.frequency_choice[h][i]
            if y != UNSET:
                f1 += 1.0 / a[y]
    f1 /= n_i * n_h

    f2 = float(
        sum(s.distances[p, i] for p, i in enumerate(sol.assignment))
    ) / len(s.generators)

    f3 = 0.0
    for j, b in enumerate(s.bins):
        for h in range(n_h):
            for i in range(n_i):
                f3 += sol.bin_counts[j][h][i] * b.cost
    return ObjectiveVector(f1, f2, f3)


def check_feasible(s: Scenario, sol: Solution, tol: float = 1e-9) -> list[Violation]:
    """All constraint violations of a solution; empty means feasible.

    The capacity constraint is evaluated in its original nonlinear form:
    volume accumulated between visits at (h, i) must fit the installed
    capacity.
    """
    out = []
    n_i, n_h, n_y = len(s.sites), len(s.fractions), len(s.frequencies)
    b = s.rates_matrix
    a = s.periods

    for p, gen in enumerate(s.generators):
        i = sol.assignment[p]
        if not 0 <= i < n_i:
            out.append(Violation("assignment", (gen.id,), "no site assigned"))
            continue
        d = s.distances[p, i]
        if d > s.max_distance + tol:
            out.append(Violation(
                "radius", (gen.id, s.sites[i].id),
                "distance %g exceeds %g" % (d, s.max_distance),
            ))

    for i, site in enumerate(s.sites):
        used = sum(
            sol.bin_counts[j][h][i] * s.bins[j].footprint
            for j in range(len(s.bins)) for h in range(n_h)
        )
        if used > site.space + tol:
            out.append(Violation(
                "footprint", (site.id,),
                "bins need %g m2 of %g m2" % (used, site.space),
            ))

    for h in range(n_h):
        for i in range(n_i):
            y = sol.frequency_choice[h][i]
            if y != UNSET and not 0 <= y < n_y:
                out.append(Violation(
                    "single-frequency", (s.fractions[h], s.sites[i].id),
                    "frequency index %r out of range" % (y,),
                ))
                continue
            assigned = [p for p in range(len(s.generators))
                        if sol.assignment[p] == i]
            if assigned and y == UNSET:
                out.append(Violation(
                    "frequency-required", (s.fractions[h], s.sites[i].id),
                    "generators assigned but no frequency adopted",
                ))
                continue
            if y == UNSET:
                continue
            demand = float(sum(b[p, h] for p in assigned)) * a[y]
            capacity = sum(
                sol.bin_counts[j][h][i] * s.bins[j].capacity
                for j in range(len(s.bins))
            )
            if demand > capacity + tol:
                out.append(Violation(
                    "capacity", (s.fractions[h], s.sites[i].id),
                    "accumulated %g m3 exceeds capacity %g m3"
                    % (demand, capacity),
                ))

    for j in range(len(s.bins)):
        for h in range(n_h):
            for i in range(n_i):
                if sol.bin_counts[j][h][i] < 0:
                    out.append(Violation(
                        "bin-count",
                        (s.bins[j].id, s.fractions[h], s.sites[i].id),
                        "negative count",
                    ))
    return out


# ---------------------------------------------------------------------------
# Linear model
# ---------------------------------------------------------------------------

def build_linear_model(s: Scenario) -> LinearModel:
    """Emit the linearized constraint system and the objective rows.

    Assignment variables for pairs beyond walking range are omitted
    entirely (the radius constraint becomes structural). Bin-count
    variables carry the upper bound floor(space/footprint) implied by
    the site space row, which keeps branch-and-bound domains finite.
    Each (generator, fraction, site, frequency) tuple gets a continuous
    helper variable in [0, 1] standing in for the assignment-frequency
    product; three rows pin it to the product value at binary points.
    """
    n_p, n_i = len(s.generators), len(s.sites)
    n_h, n_y, n_j = len(s.fractions), len(s.frequencies), len(s.bins)
    b = s.rates_matrix
    a = s.periods
    reach = s.reachable_mask()

    names, kinds, lower, upper = [], [], [], []

    def add_col(name, kind, lo, hi):
        names.append(name)
        kinds.append(kind)
        lower.append(lo)
        upper.append(hi)
        return len(names) - 1

    x_col = {}
    for p in range(n_p):
        for i in range(n_i):
            if reach[p, i]:
                x_col[p, i] = add_col(
                    "x[%s,%s]" % (s.generators[p].id, s.sites[i].id),
                    "binary", 0.0, 1.0)
    f_col = {}
    for h in range(n_h):
        for i in range(n_i):
            for y in range(n_y):
                f_col[h, i, y] = add_col(
                    "f[%s,%s,%s]" % (s.fractions[h], s.sites[i].id,
                                     s.frequencies[y].id),
                    "binary", 0.0, 1.0)
    t_col = {}
    for j in range(n_j):
        for h in range(n_h):
            for i in range(n_i):
                t_max = int(np.floor(s.sites[i].space / s.bins[j].footprint))
                t_col[j, h, i] = add_col(
                    "t[%s,%s,%s]" % (s.bins[j].id, s.fractions[h],
                                     s.sites[i].id),
                    "integer", 0.0, float(t_max))
    u_col = {}
    for p in range(n_p):
        for h in range(n_h):
            for i in range(n_i):
                for y in range(n_y):
                    u_col[p, h, i, y] = add_col(
                        "u[%s,%s,%s,%s]" % (s.generators[p].id, s.fractions[h],
                                            s.sites[i].id, s.frequencies[y].id),
                        "continuous", 0.0, 1.0)

    rows = []

    def add_row(cols, coefs, sense, rhs, label):
        rows.append(Row(tuple(cols), tuple(float(c) for c in coefs),
                        sense, float(rhs), label))

    # each generator assigned to exactly one reachable site
    for p in range(n_p):
        cols = [x_col[p, i] for i in range(n_i) if (p, i) in x_col]
        add_row(cols, [1.0] * len(cols), "=", 1.0,
                "assign[%s]" % s.generators[p].id)

    # site space
    for i in range(n_i):
        cols = [t_col[j, h, i] for j in range(n_j) for h in range(n_h)]
        coefs = [s.bins[j].footprint for j in range(n_j) for _ in range(n_h)]
        add_row(cols, coefs, "<=", s.sites[i].space,
                "space[%s]" % s.sites[i].id)

    # at most one frequency per (fraction, site)
    for h in range(n_h):
        for i in range(n_i):
            cols = [f_col[h, i, y] for y in range(n_y)]
            add_row(cols, [1.0] * n_y, "<=", 1.0,
                    "one-freq[%s,%s]" % (s.fractions[h], s.sites[i].id))

    # a used site must adopt a frequency for every fraction
    # (big-M form with M = number of generators)
    for h in range(n_h):
        for i in range(n_i):
            cols = [f_col[h, i, y] for y in range(n_y)]
            coefs = [float(n_p)] * n_y
            for p in range(n_p):
                if (p, i) in x_col:
                    cols.append(x_col[p, i])
                    coefs.append(-1.0)
            add_row(cols, coefs, ">=", 0.0,
                    "freq-open[%s,%s]" % (s.fractions[h], s.sites[i].id))

    # capacity, linearized: the product x*f is represented by
    # u + f - 1 + x with u pinned by the three product rows below
    total_rate = b.sum(axis=0)                   # per fraction
    period_sum = float(a.sum())
    for h in range(n_h):
        for i in range(n_i):
            cols, coefs = [], []
            for p in range(n_p):
                for y in range(n_y):
                    cols.append(u_col[p, h, i, y])
                    coefs.append(b[p, h] * a[y])
            for y in range(n_y):
                cols.append(f_col[h, i, y])
                coefs.append(total_rate[h] * a[y])
            for p in range(n_p):
                if (p, i) in x_col and b[p, h] != 0.0:
                    cols.append(x_col[p, i])
                    coefs.append(b[p, h] * period_sum)
            for j in range(n_j):
                cols.append(t_col[j, h, i])
                coefs.append(-s.bins[j].capacity)
            add_row(cols, coefs, "<=", total_rate[h] * period_sum,
                    "capacity[%s,%s]" % (s.fractions[h], s.sites[i].id))

    # product rows: u >= 1 - x - f, u <= 1 - f, u <= 1 - x
    for p in range(n_p):
        for h in range(n_h):
            for i in range(n_i):
                for y in range(n_y):
                    u = u_col[p, h, i, y]
                    f = f_col[h, i, y]
                    tag = "%s,%s,%s,%s" % (
                        s.generators[p].id, s.fractions[h], s.sites[i].id,
                        s.frequencies[y].id)
                    if (p, i) in x_col:
                        x = x_col[p, i]
                        add_row([u, x, f], [1.0, 1.0, 1.0], ">=", 1.0,
                                "product-lo[%s]" % tag)
                        add_row([u, f], [1.0, 1.0], "<=", 1.0,
                                "product-hi-f[%s]" % tag)
                        add_row([u, x], [1.0, 1.0], "<=", 1.0,
                                "product-hi-x[%s]" % tag)
                    else:
                        add_row([u, f], [1.0, 1.0], ">=", 1.0,
                                "product-lo[%s]" % tag)
                        add_row([u, f], [1.0, 1.0], "<=", 1.0,
                                "product-hi-f[%s]" % tag)
                        add_row([u], [1.0], "<=", 1.0,
                                "product-hi-x[%s]" % tag)

    n_cols = len(names)
    c1 = np.zeros(n_cols)
    for (h, i, y), col in f_col.items():
        c1[col] = 1.0 / (a[y] * n_i * n_h)
    c2 = np.zeros(n_cols)
    for (p, i), col in x_col.items():
        c2[col] = s.distances[p, i] / n_p
    c3 = np.zeros(n_cols)
    for (j, h, i), col in t_col.items():
        c3[col] = s.bins[j].cost

    return LinearModel(
        n_cols=n_cols,
        names=tuple(names),
        kinds=tuple(kinds),
        lower=np.array(lower),
        upper=np.array(upper),
        rows=tuple(rows),
        objectives=(c1, c2, c3),
        x_col=x_col,
        f_col=f_col,
        t_col=t_col,
        u_col=u_col,
    )


def encode_solution(lm: LinearModel, sol: Solution) -> np.ndarray:
    """Column vector of a solution, product helpers at their pinned values."""
    v = np.zeros(lm.n_cols)
    for (p, i), col in lm.x_col.items():
        v[col] = 1.0 if sol.assignment[p] == i else 0.0
    for (h, i, y), col in lm.f_col.items():
        v[col] = 1.0 if sol.frequency_choice[h][i] == y else 0.0
    for (j, h, i), col in lm.t_col.items():
        v[col] = float(sol.bin_counts[j][h][i])
    for (p, h, i, y), col in lm.u_col.items():
        x = v[lm.x_col[p, i]] if (p, i) in lm.x_col else 0.0
        f = v[lm.f_col[h, i, y]]
        v[col] = max(0.0, 1.0 - x - f)
    return v


def decode_solution(lm: LinearModel, s: Scenario, values: np.ndarray) -> Solution:
    """Recover a Solution from solver column values (rounded)."""
    n_i, n_h = len(s.sites), len(s.fractions)
    assignment = []
    for p in range(len(s.generators)):
        best, best_val = 0, -1.0
        for i in range(n_i):
            col = lm.x_col.get((p, i))
            if col is not None and values[col] > best_val:
                best, best_val = i, values[col]
        assignment.append(best)
    freq = [[UNSET] * n_i for _ in range(n_h)]
    for (h, i, y), col in lm.f_col.items():
        if values[col] > 0.5:
            freq[h][i] = y
    binc = [
        [[0] * n_i for _ in range(n_h)] for _ in range(len(s.bins))
    ]
    for (j, h, i), col in lm.t_col.items():
        binc[j][h][i] = int(round(values[col]))
    return Solution(
        assignment=tuple(assignment),
        frequency_choice=tuple(tuple(r) for r in freq),
        bin_counts=tuple(tuple(tuple(r) for r in plane) for plane in binc),
    )


# ---------------------------------------------------------------------------
# Covering sub-problem
# ---------------------------------------------------------------------------

def min_cost_bins(s: Scenario, site: str, demand: dict):
    """Cheapest bin multiset covering per-fraction demand at one site.

    ``demand`` maps fraction id to accumulated volume (m3). Exhaustive
    over all per-(bin, fraction) count vectors within the site space;
    ties go to the lexicographically smallest count matrix. Returns
    ``(counts, cost)`` with ``counts[j][h]``, or None when nothing fits.
    """
    i = s.site_index.get(site)
    if i is None:
        raise UnknownId("unknown site id %r" % site)
    for h in demand:
        if h not in s.fraction_index:
            raise UnknownId("unknown fraction id %r" % h)
    space = s.sites[i].space
    need = [float(demand.get(h, 0.0)) for h in s.fractions]
    n_j, n_h = len(s.bins), len(s.fractions)

    cells = [(j, h) for j in range(n_j) for h in range(n_h)]
    best = None

    def recurse(k, counts, cost, used):
        nonlocal best
        if best is not None and cost > best[1]:
            return
        if k == len(cells):
            covered = all(
                sum(counts[j * n_h + h] * s.bins[j].capacity
                    for j in range(n_j)) >= need[h] - 1e-9
                for h in range(n_h)
            )
            if covered and (best is None or cost < best[1]):
                best = (list(counts), cost)
            return
        j, _h = cells[k]
        limit = int(np.floor((space - used) / s.bins[j].footprint + 1e-9))
        for n in range(limit + 1):
            recurse(k + 1, counts + [n], cost + n * s.bins[j].cost,
                    used + n * s.bins[j].footprint)

    recurse(0, [], 0.0, 0.0)
    if best is None:
        return None
    counts = tuple(
        tuple(best[0][j * n_h + h] for h in range(n_h)) for j in range(n_j)
    )
    return counts, best[1]


def canonical_solution(s: Scenario, assignment, frequency_choice):
    """Minimal representative of an (assignment, frequency) decision.

    Frequencies at sites without assigned generators are dropped, every
    occupied site keeps one frequency per fraction (required even for
    zero demand), and bins are replaced by the cheapest feasible cover.
    Returns None when some site cannot host the load it was given.
    """
    n_i, n_h = len(s.sites), len(s.fractions)
    occupied = set(assignment)
    freq = [[UNSET] * n_i for _ in range(n_h)]
    for i in occupied:
        for h in range(n_h):
            y = frequency_choice[h][i]
            if y == UNSET:
                raise ValueError(
                    "occupied site %r lacks a frequency for fraction %r"
                    % (s.sites[i].id, s.fractions[h]))
            freq[h][i] = y

    binc = [[[0] * n_i for _ in range(n_h)] for _ in range(len(s.bins))]
    rates = s.rates_matrix
    for i in occupied:
        assigned = [p for p, site in enumerate(assignment) if site == i]
        demand = {}
        for h in range(n_h):
            load = float(sum(rates[p, h] for p in assigned))
            demand[s.fractions[h]] = load * s.periods[freq[h][i]]
        found = min_cost_bins(s, s.sites[i].id, demand)
        if found is None:
            return None
        counts, _cost = found
        for j in range(len(s.bins)):
            for h in range(n_h):
                binc[j][h][i] = counts[j][h]
    return Solution(
        assignment=tuple(assignment),
        frequency_choice=tuple(tuple(r) for r in freq),
        bin_counts=tuple(tuple(tuple(r) for r in plane) for plane in binc),
    )


# ---------------------------------------------------------------------------
# Solution JSON form
# ---------------------------------------------------------------------------

def solution_to_dict(s: Scenario, sol: Solution) -> dict:
    obj = eval_objectives(s, sol)
    doc = {
        "assignment": {
            s.generators[p].id: s.sites[i].id
            for p, i in enumerate(sol.assignment)
        },
        "frequencies": {},
        "bins": {},
        "objectives": {"f1": obj.f1, "f2": obj.f2, "f3": obj.f3},
    }
    for h, row in enumerate(sol.frequency_choice):
        for i, y in enumerate(row):
            if y != UNSET:
                key = "%s@%s" % (s.fractions[h], s.sites[i].id)
                doc["frequencies"][key] = s.frequencies[y].id
    for j, plane in enumerate(sol.bin_counts):
        for h, row in enumerate(plane):
            for i, n in enumerate(row):
                if n:
                    key = "%s@%s@%s" % (s.bins[j].id, s.fractions[h],
                                        s.sites[i].id)
                    doc["bins"][key] = int(n)
    return doc


def solution_from_dict(s: Scenario, doc: dict) -> Solution:
    def site(i):
        if i not in s.site_index:
            raise UnknownId("unknown site id %r" % i)
        return s.site_index[i]

    assignment = [UNSET] * len(s.generators)
    for gid, iid in doc.get("assignment", {}).items():
        if gid not in s.generator_index:
            raise UnknownId("unknown generator id %r" % gid)
        assignment[s.generator_index[gid]] = site(iid)

    freq = [[UNSET] * len(s.sites) for _ in s.fractions]
    for key, yid in doc.get("frequencies", {}).items():
        hid, _, iid = key.partition("@")
        if hid not in s.fraction_index:
            raise UnknownId("unknown fraction id %r" % hid)
        if yid not in s.frequency_index:
            raise UnknownId("unknown frequency id %r" % yid)
        freq[s.fraction_index[hid]][site(iid)] = s.frequency_index[yid]

    binc = [
        [[0] * len(s.sites) for _ in s.fractions] for _ in s.bins
    ]
    for key, n in doc.get("bins", {}).items():
        jid, hid, iid = key.split("@")
        if jid not in s.bin_index:
            raise UnknownId("unknown bin id %r" % jid)
        if hid not in s.fraction_index:
            raise UnknownId("unknown fraction id %r" % hid)
        binc[s.bin_index[jid]][s.fraction_index[hid]][site(iid)] = int(n)

    return Solution(
        assignment=tuple(assignment),
        frequency_choice=tuple(tuple(r) for r in freq),
        bin_counts=tuple(tuple(tuple(r) for r in plane) for plane in binc),
    )
