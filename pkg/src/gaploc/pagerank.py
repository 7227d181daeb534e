"""Rank-and-construct heuristics over the candidate site graph.

Sites form a fully connected graph whose edge weights blend the waste
mass gravitating to both endpoints with the distance between them. A
weighted PageRank orders the sites, and a single constructive pass
walks that order installing bins under one of three selection policies.
The heuristic lane works on merged fractions and daily collection, so
its solutions live in a simpler space than the exact model's.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (CoincidentSitesWarning, MissingSiteDistances,
                     UnknownId, UnknownPolicy)
from .scenario import Scenario, euclidean_distances

POLICY_VOL = "vol"
POLICY_DIST = "dist"
POLICY_COST = "cost"
POLICIES = (POLICY_VOL, POLICY_DIST, POLICY_COST)

UNASSIGNED = -1

# distance floor for coincident sites; keeps weights finite
_MIN_EDGE_M = 1.0


@dataclass(frozen=True)
class SiteGraph:
    vertices: tuple              # site ids, scenario order
    weights: np.ndarray          # symmetric, zero diagonal
    masses: tuple                # waste mass pulled to each site, m3/day


@dataclass(frozen=True)
class RankVector:
    values: dict                 # site id -> rank
    iterations: int
    residual: float

    def ranked_sites(self) -> tuple:
        """Site ids by descending rank; ties fall back to the id."""
        return tuple(sorted(self.values, key=lambda v: (-self.values[v], v)))


def build_graph(s: Scenario) -> SiteGraph:
    """Site graph with w = (mass_j + mass_k) / distance_jk.

    Each generator's full production (all fractions) is attributed to
    its nearest candidate site, ties to the lowest site index.
    Inter-site distances come from the scenario's site-site matrix when
    present, otherwise from site coordinates.
    """
    n_i = len(s.sites)
    if n_i < 2:
        raise MissingSiteDistances(
            "site graph needs at least two candidate sites")
    if s.site_distances is not None:
        dist = np.asarray(s.site_distances, dtype=float)
    else:
        coords = [site.lonlat for site in s.sites]
        if any(c is None for c in coords):
            raise MissingSiteDistances(
                "no site-site distances and not every site has coordinates")
        pts = np.asarray(coords, dtype=float)
        dist = euclidean_distances(pts, pts)

    masses = np.zeros(n_i)
    for p, gen in enumerate(s.generators):
        nearest = int(np.argmin(s.distances[p]))
        masses[nearest] += gen.total_rate

    weights = np.zeros((n_i, n_i))
    warned = False
    for j in range(n_i):
        for k in range(j + 1, n_i):
            d = float(dist[j, k])
            if d <= 0.0:
                if not warned:
                    warnings.warn(
                        "coincident candidate sites; edge distances "
                        "floored at %g m" % _MIN_EDGE_M,
                        CoincidentSitesWarning, stacklevel=2)
                    warned = True
                d = _MIN_EDGE_M
            w = (masses[j] + masses[k]) / d
            weights[j, k] = weights[k, j] = w
    return SiteGraph(
        vertices=tuple(site.id for site in s.sites),
        weights=weights,
        masses=tuple(float(m) for m in masses),
    )


def pagerank(g: SiteGraph, d: float = 0.85, tol: float = 1e-8,
             max_iter: int = 200) -> RankVector:
    """Unnormalized weighted PageRank, started at the damping value.

    Every vertex votes its current rank, split across its outgoing
    weights. There is no 1/N term, so the symmetric fixed point is 1.
    Non-convergence is not an error; the last iterate is returned with
    its residual.
    """
    n = len(g.vertices)
    w = g.weights
    out = w.sum(axis=1)
    # a vertex with no outgoing weight votes nothing
    share = np.divide(w, out[:, None], out=np.zeros_like(w),
                      where=out[:, None] > 0.0)
    pr = np.full(n, d)
    residual = float("inf")
    iterations = 0
    for iterations in range(1, max_iter + 1):
        nxt = (1.0 - d) + d * (share.T @ pr)
        residual = float(np.max(np.abs(nxt - pr))) if n else 0.0
        pr = nxt
        if residual <= tol:
            break
    return RankVector(
        values={g.vertices[i]: float(pr[i]) for i in range(n)},
        iterations=iterations,
        residual=residual,
    )


@dataclass(frozen=True)
class HeuristicSolution:
    """Constructive result: open sites, their bins, who walks where."""

    policy: str
    bin_counts: tuple            # [site][bin type], fractions merged
    assignment: tuple            # generator -> site index, UNASSIGNED if not
    collected_m3: float
    total_cost: float
    average_distance: float      # over served generators
    skipped_sites: tuple = ()    # ids where no configuration could cover


@dataclass(frozen=True)
class HeuristicSummary:
    average_distance: float
    total_cost: float
    collected_fraction: float


def _site_configs(s: Scenario, i: int, cap_volume: float):
    """Distinct useful bin loads at a site: (volume, cost, counts).

    Volume keys are capped at ``cap_volume``, so configs that differ
    only in surplus beyond the cap collapse to the cheapest one. The
    covering policies cap at the waste left to collect; the volume
    policy passes infinity and enumerates every distinct load.
    """
    space = s.sites[i].space
    n_j = len(s.bins)
    best = {}

    def visit(j, counts, used, volume, cost):
        key = min(volume, cap_volume)
        prev = best.get(key)
        if prev is None or (cost, counts) < prev:
            best[key] = (cost, counts)
        if volume >= cap_volume:
            return
        for jj in range(j, n_j):
            b = s.bins[jj]
            if used + b.footprint <= space + 1e-9:
                bumped = tuple(
                    c + (1 if idx == jj else 0)
                    for idx, c in enumerate(counts)
                )
                visit(jj, bumped, used + b.footprint,
                      volume + b.capacity, cost + b.cost)

    visit(0, (0,) * n_j, 0.0, 0.0, 0.0)
    return sorted(
        (vol, cost, counts) for vol, (cost, counts) in best.items()
    )


def _greedy_fill(cands, rates, volume):
    """First-fit assignment in distance order; generators never split."""
    served = []
    room = volume
    for dist_pi, p in cands:
        if rates[p] <= room + 1e-9:
            served.append((dist_pi, p))
            room -= rates[p]
    return served


def construct(s: Scenario, ranks: RankVector, policy: str,
              ) -> HeuristicSolution:
    """One pass over the ranked sites, installing bins per policy.

    Collection is daily here, so a generator's burden is its plain
    rate. Sites that cannot cover their nearest unserved candidate are
    recorded and skipped under the covering policies.
    """
    if policy not in POLICIES:
        raise UnknownPolicy(
            "policy must be one of %s, not %r" % (", ".join(POLICIES), policy))
    order = ranks.ranked_sites()
    missing = [site.id for site in s.sites if site.id not in ranks.values]
    if missing:
        raise UnknownId("rank vector misses sites: %s" % ", ".join(missing))
    rates = [gen.total_rate for gen in s.generators]
    n_p = len(s.generators)

    unserved = set(range(n_p))
    remaining = sum(rates)
    assignment = [UNASSIGNED] * n_p
    bin_counts = [[0] * len(s.bins) for _ in s.sites]
    skipped = []
    total_cost = 0.0
    collected = 0.0

    for site_id in order:
        if remaining <= 1e-12:
            break
        i = s.site_index.get(site_id)
        if i is None:
            raise UnknownId("rank vector names unknown site %r" % site_id)
        cands = sorted(
            (float(s.distances[p, i]), p)
            for p in unserved if s.distances[p, i] <= s.max_distance
        )
        if not cands:
            continue

        if policy == POLICY_VOL:
            # largest installed volume, then cheapest; deliberate
            # surplus capacity is the point of this policy
            configs = _site_configs(s, i, math.inf)
            choice = min(configs, key=lambda c: (-c[0], c[1], c[2]))
            if choice[0] <= 0.0:
                continue
        else:
            configs = _site_configs(s, i, remaining)
            nearest_waste = rates[cands[0][1]]
            covering = [c for c in configs
                        if c[0] >= nearest_waste - 1e-9]
            if not covering:
                skipped.append(site_id)
                continue
            if policy == POLICY_COST:
                choice = min(covering, key=lambda c: (c[1], -c[0], c[2]))
            else:
                def mean_distance(c):
                    served = _greedy_fill(cands, rates, c[0])
                    return sum(d for d, _p in served) / len(served)
                choice = min(covering,
                             key=lambda c: (mean_distance(c), -c[0],
                                            c[1], c[2]))

        volume, cost, counts = choice
        served = _greedy_fill(cands, rates, volume)
        if not served:
            continue
        bin_counts[i] = list(counts)
        total_cost += cost
        for _d, p in served:
            assignment[p] = i
            unserved.discard(p)
            remaining -= rates[p]
            collected += rates[p]

    served_idx = [p for p in range(n_p) if assignment[p] != UNASSIGNED]
    avg = (
        sum(float(s.distances[p, assignment[p]]) for p in served_idx)
        / len(served_idx)
    ) if served_idx else 0.0
    return HeuristicSolution(
        policy=policy,
        bin_counts=tuple(tuple(row) for row in bin_counts),
        assignment=tuple(assignment),
        collected_m3=collected,
        total_cost=total_cost,
        average_distance=avg,
        skipped_sites=tuple(skipped),
    )


def evaluate_heuristic(s: Scenario, h: HeuristicSolution,
                       ) -> HeuristicSummary:
    """Distance, cost and coverage summary of a constructive solution."""
    total = sum(gen.total_rate for gen in s.generators)
    fraction = h.collected_m3 / total if total > 0 else 0.0
    return HeuristicSummary(
        average_distance=h.average_distance,
        total_cost=h.total_cost,
        collected_fraction=fraction,
    )
