"""Command line frontend.

Every subcommand reads one scenario file, writes machine-readable
outputs into --out, and drops a manifest next to them recording the
command, the scenario content hash, the options and the wall time.
Outputs are deterministic for fixed inputs and options; the manifest
(and the seconds columns, which report wall time) are the only parts
that vary between identical runs.

Exit codes: 0 success, 2 parse failure, 3 validation or precondition
failure, 4 solver budget exhausted, 5 internal error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from itertools import permutations

from . import __version__
from .augmecon import GridSpec, ParetoFront, augmecon2
from .errors import (DegenerateRange, EmptyPool, ExportWithoutCoordinates,
                     GaplocError, InstanceTooLarge, MissingSiteDistances,
                     ParseError, SchemaError, StageFailed, UnknownId,
                     UnknownPolicy, ValidationError)
from .figures import render_front_png, render_policy_png
from .metrics import compare_to_baseline, delta, l2
from .milp import SolveOptions, enumerate_oracle
from .model import eval_objectives, solution_from_dict, solution_to_dict
from .pagerank import (POLICIES, build_graph, construct, evaluate_heuristic,
                       pagerank)
from .ranges import (LEX, LEX_WARM, OBJECTIVES, SINGLE, WEIGHTED,
                     ObjectiveRange, build_ranges, flag_dominance,
                     lexicographic, single_objective, weighted_sum)
from .scenario import load_scenario

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_BUDGET = 4
EXIT_INTERNAL = 5


def _fmt(x) -> str:
    return "%.10g" % float(x)


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: str, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _write_manifest(out_dir: str, command: str, scenario_path: str,
                    options: dict, seed: int, wall: float) -> None:
    doc = {
        "command": command,
        "scenario": {
            "path": os.path.abspath(scenario_path),
            "sha256": _sha256(scenario_path),
        },
        "options": options,
        "seed": seed,
        "version": __version__,
        "wall_seconds": round(wall, 3),
    }
    _write_json(os.path.join(out_dir, command + ".manifest.json"), doc)


def _out_dir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _order_label(order) -> str:
    return ">".join("f%d" % k for k in order)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    s = load_scenario(args.scenario)
    print("scenario ok: %d sites, %d generators, %d fractions, %d bin "
          "types, %d frequencies"
          % (len(s.sites), len(s.generators), len(s.fractions),
             len(s.bins), len(s.frequencies)))
    return EXIT_OK


_RANGES_HEADER = (
    "method", "order", "status",
    "Obj_1", "DObj_1_pct", "Obj_2", "DObj_2_pct", "Obj_3", "DObj_3_pct",
    "L2_pct", "seconds", "dominance",
)


def cmd_ranges(args) -> int:
    s = load_scenario(args.scenario)
    opts = SolveOptions(time_limit_s=args.budget)
    wanted = args.methods.split(",") if args.methods != "all" \
        else [SINGLE, WEIGHTED, LEX, LEX_WARM]

    schedule = []
    for method in wanted:
        if method == SINGLE:
            schedule += [(SINGLE, (k,)) for k in OBJECTIVES]
        elif method == WEIGHTED:
            schedule += [(WEIGHTED, (k,)) for k in OBJECTIVES]
        elif method in (LEX, LEX_WARM):
            schedule += [(method, order)
                         for order in permutations(OBJECTIVES)]
        else:
            raise ValidationError("unknown ranges method %r" % method)

    started = time.monotonic()
    outcomes = []
    payoff = None
    failures = 0
    for method, order in schedule:
        try:
            if method == SINGLE:
                report = single_objective(s, order[0], opts)
            elif method == WEIGHTED:
                report = weighted_sum(s, order[0], None, payoff, opts)
            else:
                report = lexicographic(s, order, method == LEX_WARM, opts)
            outcomes.append((method, order, report))
        except (StageFailed, DegenerateRange):
            failures += 1
            outcomes.append((method, order, None))
        if method == SINGLE and payoff is None:
            singles = [r for m, _o, r in outcomes if m == SINGLE and r]
            if len(singles) == 3:
                vecs = [tuple(r.objectives) for r in singles]
                payoff = tuple(
                    ObjectiveRange(min(v[k] for v in vecs),
                                   max(v[k] for v in vecs))
                    for k in range(3)
                )

    pool = [r for _m, _o, r in outcomes if r is not None]
    flagged = {id(r): f for r, f in zip(pool, flag_dominance(pool))}
    ranges = build_ranges(pool) if pool else None

    rows = []
    for method, order, report in outcomes:
        if report is None:
            rows.append([method, _order_label(order), "no solution"]
                        + [""] * 8 + [""])
            continue
        f = flagged[id(report)]
        cells = [method, _order_label(order), "ok"]
        deltas = []
        for k in OBJECTIVES:
            value = report.objectives[k - 1]
            cells.append(_fmt(value))
            if ranges is not None and ranges[k - 1].width > 0:
                d = delta(value, ranges[k - 1].ideal, ranges[k - 1].nadir)
            else:
                d = 0.0
            deltas.append(d)
            cells.append("%.2f" % d)
        cells.append("%.2f" % l2(deltas))
        cells.append("%.2f" % report.wall_seconds)
        cells.append("D" if f.dominated else "ND")
        rows.append(cells)
    if ranges is not None:
        for label, pick in (("ideal", lambda r: r.ideal),
                            ("nadir", lambda r: r.nadir)):
            rows.append(
                [label, "", ""]
                + [cell for k in OBJECTIVES
                   for cell in (_fmt(pick(ranges[k - 1])), "")]
                + ["", "", ""])

    out = _out_dir(args)
    _write_csv(os.path.join(out, "ranges.csv"), _RANGES_HEADER, rows)
    _write_manifest(out, "ranges", args.scenario,
                    {"methods": args.methods, "budget": args.budget},
                    args.seed, time.monotonic() - started)
    return EXIT_BUDGET if failures else EXIT_OK


_PARETO_HEADER = (
    "solution", "Obj_1", "DObj_1_pct", "Obj_2", "DObj_2_pct",
    "Obj_3", "DObj_3_pct", "L2_pct", "status", "dominance",
)


def _load_ranges_json(path: str):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError("ranges file %s: %s" % (path, exc)) from exc
    try:
        return tuple(ObjectiveRange(float(lo), float(hi)) for lo, hi in doc)
    except (TypeError, ValueError) as exc:
        raise SchemaError(
            "ranges file must be three [ideal, nadir] pairs") from exc


def cmd_pareto(args) -> int:
    s = load_scenario(args.scenario)
    opts = SolveOptions(time_limit_s=args.time_limit)
    started = time.monotonic()
    if args.ranges_json:
        ranges = _load_ranges_json(args.ranges_json)
    else:
        reports = []
        for k in OBJECTIVES:
            reports.append(single_objective(s, k, opts))
        for order in permutations(OBJECTIVES):
            reports.append(lexicographic(s, order, True, opts))
        ranges = build_ranges(reports)
    grid = GridSpec(gridpoints=args.grid, main_objective=args.main,
                    augmentation_delta=args.delta)
    front = augmecon2(s, ranges, grid, opts)

    rows = []
    front_doc = []
    for n, entry in enumerate(front.entries, start=1):
        cells = ["%d" % n]
        deltas = []
        for k in OBJECTIVES:
            value = entry.objectives[k - 1]
            cells.append(_fmt(value))
            if ranges[k - 1].width > 0:
                d = delta(value, ranges[k - 1].ideal, ranges[k - 1].nadir)
            else:
                d = 0.0
            deltas.append(d)
            cells.append("%.2f" % d)
        cells.append("%.2f" % l2(deltas))
        cells.append(entry.status)
        cells.append("ND")
        rows.append(cells)
        front_doc.append({
            "objectives": {"f1": entry.objectives.f1,
                           "f2": entry.objectives.f2,
                           "f3": entry.objectives.f3},
            "cell": list(entry.cell),
            "status": entry.status,
            "solution": solution_to_dict(s, entry.solution),
        })

    out = _out_dir(args)
    _write_csv(os.path.join(out, "pareto.csv"), _PARETO_HEADER, rows)
    _write_json(os.path.join(out, "pareto.json"), {
        "ranges": [{"ideal": r.ideal, "nadir": r.nadir} for r in ranges],
        "grid": {"gridpoints": grid.gridpoints,
                 "main_objective": grid.main_objective,
                 "augmentation_delta": grid.augmentation_delta},
        "solve_calls": front.solve_calls,
        "run_bound": front.run_bound,
        "skipped_cells": [list(cell) for cell in front.skipped],
        "front": front_doc,
    })
    render_front_png(front.entries, os.path.join(out, "pareto.png"))
    _write_manifest(out, "pareto", args.scenario,
                    {"grid": args.grid, "main": args.main,
                     "delta": args.delta, "time_limit": args.time_limit,
                     "ranges_json": args.ranges_json},
                    args.seed, time.monotonic() - started)
    return EXIT_OK


def cmd_heuristic(args) -> int:
    s = load_scenario(args.scenario)
    started = time.monotonic()
    graph = build_graph(s)
    ranks = pagerank(graph, d=args.damping, tol=args.tol)
    policies = POLICIES if args.policy == "all" else (args.policy,)

    rows = []
    solutions = {}
    bars = []
    for policy in policies:
        t0 = time.monotonic()
        sol = construct(s, ranks, policy)
        seconds = time.monotonic() - t0
        summary = evaluate_heuristic(s, sol)
        rows.append([policy, _fmt(summary.average_distance),
                     _fmt(summary.total_cost), "%.2f" % seconds])
        bars.append((policy, summary.average_distance, summary.total_cost))
        solutions[policy] = {
            "bins": {
                s.sites[i].id: {
                    s.bins[j].id: n
                    for j, n in enumerate(counts) if n
                }
                for i, counts in enumerate(sol.bin_counts) if any(counts)
            },
            "assignment": {
                s.generators[p].id:
                    (s.sites[i].id if i >= 0 else None)
                for p, i in enumerate(sol.assignment)
            },
            "collected_m3": sol.collected_m3,
            "collected_fraction": summary.collected_fraction,
            "average_distance_m": summary.average_distance,
            "total_cost": summary.total_cost,
            "skipped_sites": list(sol.skipped_sites),
        }

    out = _out_dir(args)
    _write_csv(os.path.join(out, "heuristic.csv"),
               ("policy", "Obj_2", "Obj_3", "seconds"), rows)
    _write_json(os.path.join(out, "heuristic.json"), {
        "damping": args.damping,
        "tolerance": args.tol,
        "iterations": ranks.iterations,
        "residual": ranks.residual,
        "ranks": {v: ranks.values[v] for v in sorted(ranks.values)},
        "solutions": solutions,
    })
    render_policy_png(bars, os.path.join(out, "heuristic.png"))
    _write_manifest(out, "heuristic", args.scenario,
                    {"policy": args.policy, "damping": args.damping,
                     "tol": args.tol},
                    args.seed, time.monotonic() - started)
    return EXIT_OK


def cmd_oracle(args) -> int:
    s = load_scenario(args.scenario)
    started = time.monotonic()
    entries = enumerate_oracle(s, cap=args.cap)
    rows = [
        [_fmt(e.objectives.f1), _fmt(e.objectives.f2),
         _fmt(e.objectives.f3), "ND" if e.non_dominated else "D"]
        for e in entries
    ]
    front = sorted({
        tuple(e.objectives) for e in entries if e.non_dominated
    })
    out = _out_dir(args)
    _write_csv(os.path.join(out, "oracle.csv"),
               ("Obj_1", "Obj_2", "Obj_3", "dominance"), rows)
    _write_json(os.path.join(out, "oracle.json"), {
        "feasible_count": len(entries),
        "front": [list(v) for v in front],
    })
    _write_manifest(out, "oracle", args.scenario, {"cap": args.cap},
                    args.seed, time.monotonic() - started)
    return EXIT_OK


def _load_solution(s, path: str):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError("solution file %s: %s" % (path, exc)) from exc
    return solution_from_dict(s, doc)


def cmd_compare(args) -> int:
    s = load_scenario(args.scenario)
    started = time.monotonic()
    candidate = _load_solution(s, args.candidate)
    baseline = _load_solution(s, args.baseline)
    row = compare_to_baseline(s, eval_objectives(s, candidate), baseline)

    rows = []
    for k in OBJECTIVES:
        rows.append(["Obj_%d" % k,
                     _fmt(row.candidate[k - 1]),
                     _fmt(row.baseline[k - 1]),
                     "%.2f" % row.improvement[k - 1]])
    out = _out_dir(args)
    _write_csv(os.path.join(out, "compare.csv"),
               ("objective", "candidate", "baseline", "change_pct"), rows)
    for gid in row.unreachable:
        print("generator %s has no open baseline site within range"
              % gid, file=sys.stderr)
    _write_manifest(out, "compare", args.scenario,
                    {"candidate": os.path.abspath(args.candidate),
                     "baseline": os.path.abspath(args.baseline),
                     "unreachable": list(row.unreachable)},
                    args.seed, time.monotonic() - started)
    return EXIT_OK


def cmd_export(args) -> int:
    s = load_scenario(args.scenario)
    started = time.monotonic()
    sol = _load_solution(s, args.solution)
    n_h = len(s.fractions)

    open_sites = [
        i for i in range(len(s.sites))
        if any(sol.bin_counts[j][h][i]
               for j in range(len(s.bins)) for h in range(n_h))
    ]
    out = _out_dir(args)
    if args.format == "geojson":
        features = []
        for i in open_sites:
            site = s.sites[i]
            if site.lonlat is None:
                raise ExportWithoutCoordinates(
                    "site %r has no coordinates; GeoJSON export needs "
                    "lonlat on every open site" % site.id)
            bins = {}
            for j in range(len(s.bins)):
                for h in range(n_h):
                    n = sol.bin_counts[j][h][i]
                    if n:
                        bins["%s@%s" % (s.bins[j].id, s.fractions[h])] = n
            freqs = {
                s.fractions[h]: s.frequencies[sol.frequency_choice[h][i]].id
                for h in range(n_h)
                if sol.frequency_choice[h][i] >= 0
            }
            served = [
                s.generators[p].id
                for p, site_of in enumerate(sol.assignment) if site_of == i
            ]
            features.append({
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [site.lonlat[0], site.lonlat[1]],
                },
                "properties": {
                    "site": site.id,
                    "bins": bins,
                    "frequencies": freqs,
                    "generators": served,
                },
            })
        _write_json(os.path.join(out, "export.geojson"), {
            "type": "FeatureCollection",
            "features": features,
        })
    else:
        rows = []
        for i in open_sites:
            for j in range(len(s.bins)):
                for h in range(n_h):
                    n = sol.bin_counts[j][h][i]
                    if not n:
                        continue
                    y = sol.frequency_choice[h][i]
                    rows.append([
                        s.sites[i].id, s.bins[j].id, s.fractions[h],
                        "%d" % n,
                        s.frequencies[y].id if y >= 0 else "",
                    ])
        _write_csv(os.path.join(out, "export.csv"),
                   ("site", "bin", "fraction", "count", "frequency"), rows)
    _write_manifest(out, "export", args.scenario,
                    {"solution": os.path.abspath(args.solution),
                     "format": args.format},
                    args.seed, time.monotonic() - started)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaploc",
        description="Place municipal waste bins: exact tri-objective "
                    "optimization and ranked constructive heuristics.",
    )
    parser.add_argument("--version", action="version",
                        version="gaploc " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("scenario", help="scenario JSON file")
        p.add_argument("--out", default=".",
                       help="directory for outputs (default: .)")
        p.add_argument("--seed", type=int, default=42,
                       help="seed recorded in the manifest (default: 42)")

    p = sub.add_parser("validate", help="load and validate a scenario")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ranges", help="phase 1: objective range estimation")
    common(p)
    p.add_argument("--methods", default="all",
                   help="comma list of single-objective, weighted-sum, "
                        "lexicographic, lexicographic-warm (default: all)")
    p.add_argument("--budget", type=float, default=60.0,
                   help="seconds per solve (default: 60)")
    p.set_defaults(func=cmd_ranges)

    p = sub.add_parser("pareto", help="phase 2: epsilon-constraint front")
    common(p)
    p.add_argument("--grid", type=int, default=2,
                   help="gridpoints per constrained objective (default: 2)")
    p.add_argument("--main", type=int, default=1, choices=(1, 2, 3),
                   help="objective kept in the cost row (default: 1)")
    p.add_argument("--delta", type=float, default=1e-3,
                   help="augmentation weight (default: 1e-3)")
    p.add_argument("--time-limit", type=float, default=60.0,
                   help="seconds per solve (default: 60)")
    p.add_argument("--ranges-json", default=None,
                   help="JSON file with three [ideal, nadir] pairs; "
                        "otherwise phase 1 runs inline")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("heuristic", help="rank sites and construct greedily")
    common(p)
    p.add_argument("--policy", default="all",
                   choices=POLICIES + ("all",),
                   help="selection policy (default: all)")
    p.add_argument("--damping", type=float, default=0.85,
                   help="PageRank damping (default: 0.85)")
    p.add_argument("--tol", type=float, default=1e-8,
                   help="PageRank residual tolerance (default: 1e-8)")
    p.set_defaults(func=cmd_heuristic)

    p = sub.add_parser("oracle", help="exhaustive front for tiny scenarios")
    common(p)
    p.add_argument("--cap", type=int, default=10 ** 7,
                   help="combination cap (default: 10^7)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="candidate vs baseline layout")
    common(p)
    p.add_argument("--candidate", required=True, help="solution JSON")
    p.add_argument("--baseline", required=True, help="solution JSON")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export", help="solution as GeoJSON or CSV")
    common(p)
    p.add_argument("--solution", required=True, help="solution JSON")
    p.add_argument("--format", default="geojson",
                   choices=("geojson", "csv"))
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, SchemaError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        for problem in exc.problems:
            print("invalid: %s" % problem, file=sys.stderr)
        return EXIT_VALIDATION
    except (InstanceTooLarge, ExportWithoutCoordinates, MissingSiteDistances,
            UnknownId, UnknownPolicy, DegenerateRange) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except (StageFailed, EmptyPool) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET
    except GaplocError as exc:
        print("internal error: %s" % exc, file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
