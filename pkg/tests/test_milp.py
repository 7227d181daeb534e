"""Solver core: bounded simplex, branch and bound, problem plumbing.

The LP path is cross-checked against scipy.optimize.linprog (test-only
dependency) on a seeded random corpus; the integer path against exhaustive
enumeration of small integer grids. Neither oracle shares code with the
package solver.
"""

import math
from itertools import product
from typing import NamedTuple

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from gaploc.errors import InfeasibleWarmStart, MalformedProblem
from gaploc.milp import (FEASIBLE_TIME_LIMIT, INFEASIBLE, NO_SOLUTION_FOUND,
                         OPTIMAL, UNBOUNDED, MilpProblem, SolveOptions,
                         max_row_violation, problem_to_lp_text, row_activity,
                         solve_lp, solve_milp)
from gaploc.milp.simplex import (LP_INFEASIBLE, LP_ITERATION_LIMIT,
                                 LP_OPTIMAL, LP_UNBOUNDED)

INF = math.inf


def lp(c, a, senses, rhs, lower, upper, **kw):
    return solve_lp(np.array(c, float), np.array(a, float), tuple(senses),
                    np.array(rhs, float), np.array(lower, float),
                    np.array(upper, float), **kw)


def make_problem(c, a, senses, rhs, lower, upper, integer, warm=None):
    c = np.array(c, float)
    return MilpProblem(
        c=c,
        a=np.array(a, float).reshape(len(senses), c.shape[0]),
        senses=tuple(senses),
        rhs=np.array(rhs, float),
        lower=np.array(lower, float),
        upper=np.array(upper, float),
        integer=np.array(integer, bool),
        warm_start=None if warm is None else np.array(warm, float),
    )


# ---------------------------------------------------------------- simplex


class TestSimplex:
    def test_two_variable_optimum(self):
        # min -x - y, x + y <= 4, x <= 3 (as a bound)
        res = lp([-1, -1], [[1, 1]], ["<="], [4], [0, 0], [3, INF])
        assert res.status == LP_OPTIMAL
        assert res.objective == pytest.approx(-4.0)
        assert res.x[0] + res.x[1] == pytest.approx(4.0)

    def test_no_rows_runs_to_upper_bound(self):
        res = lp([-2], np.zeros((0, 1)), [], [], [0], [5])
        assert res.status == LP_OPTIMAL
        assert res.x[0] == pytest.approx(5.0)
        assert res.objective == pytest.approx(-10.0)

    def test_equality_rows(self):
        res = lp([1, 1], [[1, 1], [1, -1]], ["=", "="], [2, 0],
                 [0, 0], [INF, INF])
        assert res.status == LP_OPTIMAL
        assert res.x == pytest.approx([1.0, 1.0])

    def test_ge_row(self):
        res = lp([1], [[1]], [">="], [3], [0], [10])
        assert res.status == LP_OPTIMAL
        assert res.x[0] == pytest.approx(3.0)

    def test_nonzero_lower_bounds_shift(self):
        # min x + y with x >= 2, y >= 3 and a row keeping them together
        res = lp([1, 1], [[1, 1]], [">="], [6], [2, 3], [10, 10])
        assert res.status == LP_OPTIMAL
        assert res.objective == pytest.approx(6.0)

    def test_infeasible_box(self):
        res = lp([0, 0], [[1, 0], [1, 0]], ["<=", ">="], [1, 2],
                 [0, 0], [5, 5])
        assert res.status == LP_INFEASIBLE
        assert res.x is None and res.objective is None

    def test_unbounded_without_rows(self):
        res = lp([-1], np.zeros((0, 1)), [], [], [0], [INF])
        assert res.status == LP_UNBOUNDED

    def test_unbounded_ray_through_rows(self):
        res = lp([-1, -1], [[1, -1]], ["<="], [1], [0, 0], [INF, INF])
        assert res.status == LP_UNBOUNDED

    def test_iteration_limit_status(self):
        res = lp([-1, -1], [[1, 1]], ["<="], [4], [0, 0], [INF, INF],
                 max_iter=0)
        assert res.status == LP_ITERATION_LIMIT

    def test_degenerate_vertex(self):
        # redundant third row makes the optimum degenerate
        res = lp([-1, -1], [[1, 0], [0, 1], [1, 1]], ["<="] * 3, [1, 1, 2],
                 [0, 0], [INF, INF])
        assert res.status == LP_OPTIMAL
        assert res.objective == pytest.approx(-2.0)

    @pytest.mark.parametrize("bland_after", [None, 0])
    def test_cycling_prone_instance(self, bland_after):
        # the classic cycling example for steepest-cost pivoting; the
        # anti-cycling fallback must still reach the optimum of -1/20
        c = [-0.75, 150.0, -0.02, 6.0]
        a = [[0.25, -60.0, -1.0 / 25.0, 9.0],
             [0.5, -90.0, -1.0 / 50.0, 3.0],
             [0.0, 0.0, 1.0, 0.0]]
        kw = {} if bland_after is None else {"bland_after": bland_after}
        res = lp(c, a, ["<="] * 3, [0, 0, 1], [0] * 4, [INF] * 4, **kw)
        assert res.status == LP_OPTIMAL
        assert res.objective == pytest.approx(-0.05, abs=1e-9)

    def test_row_scaling_is_harmless(self):
        base = lp([-1, -2], [[1, 1], [1, 3]], ["<=", "<="], [4, 6],
                  [0, 0], [INF, INF])
        scaled = lp([-1, -2], [[1e6, 1e6], [1e-4, 3e-4]], ["<=", "<="],
                    [4e6, 6e-4], [0, 0], [INF, INF])
        assert scaled.status == LP_OPTIMAL
        assert scaled.objective == pytest.approx(base.objective)

    def test_fixed_variable(self):
        # lower == upper pins the column; it must never pivot
        res = lp([1, 1], [[1, 1]], [">="], [3], [2, 0], [2, 10])
        assert res.status == LP_OPTIMAL
        assert res.x == pytest.approx([2.0, 1.0])


def scipy_status(c, a, senses, rhs, lower, upper):
    """Independent answer: (status, objective) via linprog."""
    a = np.asarray(a, float)
    ub_rows = [r for r, s in enumerate(senses) if s != "="]
    eq_rows = [r for r, s in enumerate(senses) if s == "="]
    a_ub, b_ub = [], []
    for r in ub_rows:
        sign = 1.0 if senses[r] == "<=" else -1.0
        a_ub.append(sign * a[r])
        b_ub.append(sign * rhs[r])
    res = linprog(
        c,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=a[eq_rows] if eq_rows else None,
        b_eq=np.array(rhs, float)[eq_rows] if eq_rows else None,
        bounds=list(zip(lower, upper)),
        method="highs",
    )
    if res.status == 0:
        return LP_OPTIMAL, float(res.fun)
    if res.status == 2:
        return LP_INFEASIBLE, None
    if res.status == 3:
        return LP_UNBOUNDED, None
    raise AssertionError("oracle returned status %d" % res.status)


def random_lp(rng, n, m):
    c = rng.uniform(-5, 5, size=n).round(2)
    a = rng.uniform(-4, 4, size=(m, n)).round(2)
    a[rng.uniform(size=(m, n)) < 0.3] = 0.0
    senses = tuple(rng.choice(["<=", ">=", "="], p=[0.6, 0.25, 0.15])
                   for _ in range(m))
    x0 = rng.uniform(0, 3, size=n)
    rhs = a @ x0 + rng.uniform(-2, 2, size=m).round(2)
    lower = np.zeros(n)
    upper = rng.uniform(2, 8, size=n).round(2)
    return c, a, senses, rhs.round(2), lower, upper


class TestSimplexAgainstLinprog:
    def test_seeded_corpus_matches_oracle(self):
        rng = np.random.default_rng(20240917)
        n_optimal = n_infeasible = 0
        for trial in range(60):
            n = int(rng.integers(2, 7))
            m = int(rng.integers(1, 6))
            c, a, senses, rhs, lower, upper = random_lp(rng, n, m)
            want_status, want_obj = scipy_status(
                c, a, senses, rhs, lower, upper)
            got = lp(c, a, senses, rhs, lower, upper)
            assert got.status == want_status, \
                "trial %d: %s != %s" % (trial, got.status, want_status)
            if want_status == LP_OPTIMAL:
                n_optimal += 1
                tol = 1e-6 * max(1.0, abs(want_obj))
                assert abs(got.objective - want_obj) <= tol, \
                    "trial %d: %.12g vs %.12g" % (
                        trial, got.objective, want_obj)
                assert max_row_violation(
                    make_problem(c, a, senses, rhs, lower, upper,
                                 [False] * n), got.x) <= 1e-7
            else:
                n_infeasible += 1
        # the corpus has to exercise both outcomes to mean anything
        assert n_optimal >= 20 and n_infeasible >= 5

    def test_unbounded_corpus_matches_oracle(self):
        rng = np.random.default_rng(7)
        seen = 0
        for _ in range(10):
            n = int(rng.integers(2, 5))
            c, a, senses, rhs, lower, upper = random_lp(rng, n, 2)
            # open one column upward and make it attractive and unconstrained
            c = c.copy()
            a = a.copy()
            upper = upper.copy()
            c[0] = -1.0
            a[:, 0] = np.where(np.array(senses) == ">=", 1.0, -1.0) \
                * rng.uniform(0, 2, size=2)
            senses = tuple(s if s != "=" else "<=" for s in senses)
            upper[0] = INF
            want_status, _ = scipy_status(c, a, senses, rhs, lower, upper)
            got = lp(c, a, senses, rhs, lower, upper)
            assert got.status == want_status
            seen += want_status == LP_UNBOUNDED
        assert seen >= 5


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_lp_optimal_points_are_feasible(data):
    n = data.draw(st.integers(2, 5), label="cols")
    m = data.draw(st.integers(1, 4), label="rows")
    elem = st.integers(-6, 6).map(float)
    c = data.draw(st.lists(elem, min_size=n, max_size=n), label="c")
    a = [data.draw(st.lists(elem, min_size=n, max_size=n), label="row")
         for _ in range(m)]
    senses = [data.draw(st.sampled_from(["<=", ">=", "="]), label="sense")
              for _ in range(m)]
    rhs = data.draw(st.lists(st.integers(-9, 9).map(float),
                             min_size=m, max_size=m), label="rhs")
    upper = [data.draw(st.integers(1, 6)) for _ in range(n)]
    res = lp(c, a, senses, rhs, [0] * n, upper)
    if res.status == LP_OPTIMAL:
        prob = make_problem(c, a, senses, rhs, [0] * n, upper, [False] * n)
        assert max_row_violation(prob, res.x) <= 1e-7
        assert res.objective == pytest.approx(float(np.dot(c, res.x)))


# ----------------------------------------------------- branch and bound


def brute_force_integer(c, a, senses, rhs, lower, upper):
    """Exhaustive optimum over an all-integer box, None when infeasible."""
    a = np.asarray(a, float)
    best = None
    grids = [range(int(lo), int(hi) + 1) for lo, hi in zip(lower, upper)]
    for point in product(*grids):
        v = np.array(point, float)
        act = a @ v
        ok = True
        for r, s in enumerate(senses):
            if s == "<=" and act[r] > rhs[r] + 1e-9:
                ok = False
            elif s == ">=" and act[r] < rhs[r] - 1e-9:
                ok = False
            elif s == "=" and abs(act[r] - rhs[r]) > 1e-9:
                ok = False
        if ok:
            obj = float(np.dot(c, v))
            if best is None or obj < best:
                best = obj
    return best


class TestBranchBound:
    def test_binary_knapsack(self):
        # max 10a + 13b + 7c with 3a + 4b + 2c <= 6; best picks {b, c}
        p = make_problem([-10, -13, -7], [3, 4, 2], ["<="], [6],
                         [0, 0, 0], [1, 1, 1], [True] * 3)
        res = solve_milp(p)
        assert res.status == OPTIMAL
        assert res.objective == pytest.approx(-20.0)
        assert res.values == pytest.approx([0, 1, 1])

    def test_branching_required(self):
        # LP relaxation sits at (1.75, 1.75); integer optimum is (1, 2)
        p = make_problem([-1, -2], [[1, 3], [3, 1]], ["<=", "<="], [7, 7],
                         [0, 0], [10, 10], [True, True])
        res = solve_milp(p)
        assert res.status == OPTIMAL
        assert res.objective == pytest.approx(-5.0)
        assert res.values == pytest.approx([1, 2])
        assert res.stats.nodes > 1

    def test_integer_infeasible_but_lp_feasible(self):
        p = make_problem([1, 1], [2, 2], ["="], [1], [0, 0], [1, 1],
                         [True, True])
        res = solve_milp(p)
        assert res.status == INFEASIBLE
        assert res.values is None
        assert res.best_bound == math.inf

    def test_unbounded_relaxation(self):
        p = make_problem([-1], np.zeros((0, 1)), [], [], [0], [INF], [True])
        res = solve_milp(p)
        assert res.status == UNBOUNDED

    def test_bound_never_exceeds_objective(self):
        p = make_problem([-1, -2], [[1, 3], [3, 1]], ["<=", "<="], [7, 7],
                         [0, 0], [10, 10], [True, True])
        res = solve_milp(p)
        assert res.best_bound <= res.objective + 1e-9
        assert res.stats.bound_history[-1][2] == pytest.approx(res.objective)
        assert res.stats.wall_seconds >= 0.0

    def test_mixed_integer_columns(self):
        # integer a, continuous b: min -a - b, a + b <= 2.5, a <= 1.7
        p = make_problem([-1, -1], [[1, 1], [1, 0]], ["<=", "<="],
                         [2.5, 1.7], [0, 0], [10, 10], [True, False])
        res = solve_milp(p)
        assert res.status == OPTIMAL
        assert res.values[0] == pytest.approx(1.0)
        assert res.values[1] == pytest.approx(1.5)

    def test_seeded_corpus_matches_enumeration(self):
        rng = np.random.default_rng(424242)
        n_opt = n_inf = 0
        for trial in range(25):
            n = int(rng.integers(2, 5))
            m = int(rng.integers(1, 4))
            c = rng.integers(-6, 7, size=n).astype(float)
            a = rng.integers(-4, 5, size=(m, n)).astype(float)
            senses = tuple(rng.choice(["<=", ">=", "="], p=[0.7, 0.2, 0.1])
                           for _ in range(m))
            rhs = (a @ rng.integers(0, 3, size=n) +
                   rng.integers(-2, 3, size=m)).astype(float)
            lower = np.zeros(n)
            upper = np.full(n, 3.0)
            want = brute_force_integer(c, a, senses, rhs, lower, upper)
            res = solve_milp(make_problem(c, a, senses, rhs, lower, upper,
                                          [True] * n))
            if want is None:
                n_inf += 1
                assert res.status == INFEASIBLE, "trial %d" % trial
            else:
                n_opt += 1
                assert res.status == OPTIMAL, "trial %d" % trial
                assert res.objective == pytest.approx(want, abs=1e-6), \
                    "trial %d" % trial
        assert n_opt >= 15 and n_inf >= 2

    def test_seeded_mixed_corpus_matches_grid_plus_lp(self):
        # enumerate the integer grid, let the oracle LP fill in the
        # continuous columns, and compare optima
        rng = np.random.default_rng(90125)
        checked = 0
        for trial in range(12):
            c = rng.integers(-5, 6, size=4).astype(float)
            a = rng.integers(-3, 4, size=(2, 4)).astype(float)
            senses = ("<=", "<=")
            rhs = (a @ rng.uniform(0, 2, size=4)).round(1)
            lower = np.zeros(4)
            upper = np.array([3.0, 3.0, 5.0, 5.0])
            integer = [True, True, False, False]
            best = None
            for g in product(range(4), repeat=2):
                fixed = np.array(g, float)
                status, obj = scipy_status(
                    c[2:], a[:, 2:], senses, rhs - a[:, :2] @ fixed,
                    lower[2:], upper[2:])
                if status == LP_OPTIMAL:
                    total = obj + float(c[:2] @ fixed)
                    if best is None or total < best:
                        best = total
            res = solve_milp(make_problem(c, a, senses, rhs, lower, upper,
                                          integer))
            if best is None:
                assert res.status == INFEASIBLE, "trial %d" % trial
            else:
                checked += 1
                assert res.status == OPTIMAL, "trial %d" % trial
                assert res.objective == pytest.approx(best, abs=1e-6), \
                    "trial %d" % trial
        assert checked >= 8

    def test_relative_gap_allows_early_stop(self):
        p = make_problem([-1, -2], [[1, 3], [3, 1]], ["<=", "<="], [7, 7],
                         [0, 0], [10, 10], [True, True])
        res = solve_milp(p, SolveOptions(relative_gap=0.5))
        assert res.status == OPTIMAL
        # within the declared gap of the true optimum -5
        assert res.objective <= -5.0 + 0.5 * 5.0 + 1e-9


class TestWarmStarts:
    def problem(self, warm=None):
        return make_problem([-1, -2], [[1, 3], [3, 1]], ["<=", "<="], [7, 7],
                            [0, 0], [10, 10], [True, True], warm=warm)

    def test_feasible_warm_accepted(self):
        res = solve_milp(self.problem(warm=[1, 1]))
        assert res.status == OPTIMAL
        assert res.objective == pytest.approx(-5.0)

    def test_optimal_warm_accepted(self):
        res = solve_milp(self.problem(warm=[1, 2]))
        assert res.status == OPTIMAL
        assert res.objective == pytest.approx(-5.0)

    def test_fractional_warm_rejected(self):
        with pytest.raises(InfeasibleWarmStart, match="fractional"):
            solve_milp(self.problem(warm=[0.5, 1]))

    def test_violating_warm_rejected(self):
        with pytest.raises(InfeasibleWarmStart, match="violates"):
            solve_milp(self.problem(warm=[10, 10]))

    def test_warm_survives_zero_node_budget(self):
        res = solve_milp(self.problem(warm=[1, 1]),
                         SolveOptions(node_limit=0))
        assert res.status == FEASIBLE_TIME_LIMIT
        assert res.values == pytest.approx([1, 1])
        assert res.objective == pytest.approx(-3.0)

    def test_zero_node_budget_without_warm(self):
        res = solve_milp(self.problem(), SolveOptions(node_limit=0))
        assert res.status == NO_SOLUTION_FOUND
        assert res.values is None

    def test_zero_time_budget_without_warm(self):
        res = solve_milp(self.problem(), SolveOptions(time_limit_s=0.0))
        assert res.status == NO_SOLUTION_FOUND


# ------------------------------------------------------ problem plumbing


class _SparseRow(NamedTuple):
    columns: tuple
    coefficients: tuple
    sense: str
    rhs: float


class TestProblemContainer:
    def test_from_rows_accepts_tuples_and_row_objects(self):
        rows = [
            _SparseRow((0, 2), (1.0, 2.0), "<=", 4.0),
            ((1,), (3.0,), ">=", 1.0),
        ]
        p = MilpProblem.from_rows([1, 1, 1], rows, [0] * 3, [5] * 3,
                                  [True, False, True], names=("a", "b", "c"))
        assert p.n_cols == 3 and p.n_rows == 2
        assert p.a[0].tolist() == [1.0, 0.0, 2.0]
        assert p.a[1].tolist() == [0.0, 3.0, 0.0]
        assert p.senses == ("<=", ">=")
        p.validate()

    def test_row_activity_and_violation(self):
        p = make_problem([0, 0], [[1, 1], [1, -1]], ["<=", ">="], [3, 0],
                         [0, 0], [5, 5], [False, False])
        good = np.array([2.0, 1.0])
        assert row_activity(p, good).tolist() == [3.0, 1.0]
        assert max_row_violation(p, good) == 0.0
        bad = np.array([1.0, 4.0])
        # row 1 misses by 2, row 2 by 3, bounds are fine
        assert max_row_violation(p, bad) == pytest.approx(3.0)
        outside = np.array([6.0, 0.0])
        assert max_row_violation(p, outside) >= 1.0

    @pytest.mark.parametrize("mangle, fragment", [
        (lambda p: p.__class__(**{**vars(p), "a": p.a[:, :1]}),
         "matrix is"),
        (lambda p: p.__class__(**{**vars(p), "lower": p.lower[:1]}),
         "lower bounds"),
        (lambda p: p.__class__(**{**vars(p), "integer": p.integer[:1]}),
         "integer mask"),
        (lambda p: p.__class__(**{**vars(p), "senses": ("<=", "<>")}),
         "row sense"),
        (lambda p: p.__class__(**{**vars(p), "senses": ("<=",)}),
         "senses for"),
        (lambda p: p.__class__(**{**vars(p),
                                  "rhs": np.array([np.nan, 1.0])}),
         "finite"),
        (lambda p: p.__class__(**{**vars(p),
                                  "c": np.array([np.inf, 0.0])}),
         "objective must be finite"),
        (lambda p: p.__class__(**{**vars(p),
                                  "lower": np.array([0.0, np.nan])}),
         "NaN"),
        (lambda p: p.__class__(**{**vars(p),
                                  "lower": np.array([-np.inf, 0.0])}),
         "free variables"),
        (lambda p: p.__class__(**{**vars(p),
                                  "lower": np.array([3.0, 0.0])}),
         "lower bound above"),
        (lambda p: p.__class__(**{**vars(p),
                                  "warm_start": np.array([1.0])}),
         "warm start"),
    ])
    def test_validate_rejects_malformed(self, mangle, fragment):
        base = make_problem([0, 0], [[1, 1], [1, -1]], ["<=", ">="], [3, 0],
                            [0, 0], [2, 2], [False, False])
        with pytest.raises(MalformedProblem, match=fragment):
            mangle(base).validate()

    def test_lp_text_rendering(self):
        p = make_problem([1, -2], [[1, 1]], ["<="], [3], [0, 0], [2, 4],
                         [True, False])
        text = problem_to_lp_text(p)
        assert text.startswith("minimize: +1 v0 -2 v1\n")
        assert "st r0: +1 v0 +1 v1 <= 3" in text
        assert "bounds: 0 <= v0 <= 2" in text
        assert text.rstrip().endswith("integer: v0")

    def test_lp_text_zero_objective(self):
        p = make_problem([0, 0], [[1, 1]], ["<="], [3], [0, 0], [2, 4],
                         [False, False])
        assert problem_to_lp_text(p).startswith("minimize: 0\n")
