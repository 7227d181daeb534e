"""Problem and result containers for the MILP core."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import MalformedProblem

# result statuses
OPTIMAL = "Optimal"
FEASIBLE_TIME_LIMIT = "FeasibleTimeLimit"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
NO_SOLUTION_FOUND = "NoSolutionFound"

SENSES = ("<=", "=", ">=")


@dataclass(frozen=True)
class MilpProblem:
    """minimize c . v  subject to  a v (sense) rhs,  lower <= v <= upper.

    ``integer`` marks columns required to take integral values (binaries
    are integer columns with bounds [0, 1]). ``warm_start``, when given,
    must satisfy every row and the integrality requirements.
    """

    c: np.ndarray
    a: np.ndarray
    senses: tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integer: np.ndarray                   # bool per column
    names: tuple[str, ...] | None = None
    warm_start: np.ndarray | None = None

    @property
    def n_cols(self) -> int:
        return self.c.shape[0]

    @property
    def n_rows(self) -> int:
        return self.rhs.shape[0]

    @staticmethod
    def from_rows(c, rows, lower, upper, integer, names=None, warm_start=None):
        """Assemble from sparse rows of (columns, coefficients, sense, rhs)."""
        c = np.asarray(c, dtype=float)
        n = c.shape[0]
        a = np.zeros((len(rows), n))
        senses, rhs = [], []
        for r, row in enumerate(rows):
            cols, coefs, sense, b = (
                row.columns, row.coefficients, row.sense, row.rhs
            ) if hasattr(row, "columns") else row
            a[r, list(cols)] = coefs
            senses.append(sense)
            rhs.append(b)
        return MilpProblem(
            c=c,
            a=a,
            senses=tuple(senses),
            rhs=np.array(rhs, dtype=float),
            lower=np.asarray(lower, dtype=float),
            upper=np.asarray(upper, dtype=float),
            integer=np.asarray(integer, dtype=bool),
            names=tuple(names) if names is not None else None,
            warm_start=None if warm_start is None
            else np.asarray(warm_start, dtype=float),
        )

    def validate(self) -> None:
        n = self.n_cols
        m = self.n_rows
        if self.a.shape != (m, n):
            raise MalformedProblem(
                "matrix is %s, expected %s" % (self.a.shape, (m, n)))
        for arr, label in ((self.lower, "lower"), (self.upper, "upper")):
            if arr.shape != (n,):
                raise MalformedProblem("%s bounds have shape %s" % (label, arr.shape))
        if self.integer.shape != (n,):
            raise MalformedProblem("integer mask has wrong shape")
        if len(self.senses) != m:
            raise MalformedProblem("%d senses for %d rows" % (len(self.senses), m))
        if any(s not in SENSES for s in self.senses):
            raise MalformedProblem("row sense must be one of %s" % (SENSES,))
        if not np.all(np.isfinite(self.a)) or not np.all(np.isfinite(self.rhs)):
            raise MalformedProblem("matrix and rhs must be finite")
        if not np.all(np.isfinite(self.c)):
            raise MalformedProblem("objective must be finite")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise MalformedProblem("bounds must not be NaN")
        if np.any(self.lower == -np.inf):
            raise MalformedProblem("free variables are not supported; "
                                   "give every column a finite lower bound")
        if np.any(self.lower > self.upper):
            raise MalformedProblem("lower bound above upper bound")
        if self.warm_start is not None and self.warm_start.shape != (n,):
            raise MalformedProblem("warm start has wrong shape")


@dataclass
class SolveStats:
    nodes: int = 0
    lp_iterations: int = 0
    wall_seconds: float = 0.0
    # dual-bound trace of processed nodes, for diagnostics
    bound_history: tuple = ()


@dataclass
class MilpResult:
    status: str
    values: np.ndarray | None
    objective: float | None
    best_bound: float
    stats: SolveStats = field(default_factory=SolveStats)


def row_activity(p: MilpProblem, v: np.ndarray) -> np.ndarray:
    return p.a @ v


def max_row_violation(p: MilpProblem, v: np.ndarray) -> float:
    """Largest constraint violation of a point (0 when feasible)."""
    act = row_activity(p, v)
    worst = 0.0
    for r, sense in enumerate(p.senses):
        if sense == "<=":
            worst = max(worst, act[r] - p.rhs[r])
        elif sense == ">=":
            worst = max(worst, p.rhs[r] - act[r])
        else:
            worst = max(worst, abs(act[r] - p.rhs[r]))
    worst = max(worst, float(np.max(p.lower - v, initial=0.0)))
    worst = max(worst, float(np.max(v - p.upper, initial=0.0)))
    return worst


def problem_to_lp_text(p: MilpProblem) -> str:
    """Render a problem in a plain-text LP-style format (write-only).

    Grammar, one item per line::

        minimize: <term> [<term> ...]
        st <label>: <term> [<term> ...] (<=|=|>=) <rhs>
        bounds: <lo> <= <name> <= <hi>
        integer: <name> [<name> ...]

    where ``<term>`` is ``<+|-><coef> <name>``. Intended for debugging;
    there is no reader.
    """
    names = p.names or tuple("v%d" % k for k in range(p.n_cols))

    def terms(vec):
        out = []
        for k, coef in enumerate(vec):
            if coef != 0.0:
                out.append("%+g %s" % (coef, names[k]))
        return " ".join(out) if out else "0"

    lines = ["minimize: %s" % terms(p.c)]
    for r in range(p.n_rows):
        lines.append("st r%d: %s %s %g"
                     % (r, terms(p.a[r]), p.senses[r], p.rhs[r]))
    for k in range(p.n_cols):
        lines.append("bounds: %g <= %s <= %g"
                     % (p.lower[k], names[k], p.upper[k]))
    ints = [names[k] for k in range(p.n_cols) if p.integer[k]]
    if ints:
        lines.append("integer: %s" % " ".join(ints))
    return "\n".join(lines) + "\n"
