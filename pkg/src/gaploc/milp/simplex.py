"""Dense bounded-variable primal simplex with a two-phase start.

The working form is built per call: general rows are turned into
``<=``/``=`` rows, variables are shifted so every lower bound is zero,
slack columns absorb ``<=`` rows and artificial columns make the initial
basis feasible where slacks cannot. Phase 1 minimizes the artificial
mass; phase 2 the real objective. Nonbasic variables rest at either of
their bounds, so binaries and bin-count upper bounds never become rows.

Pivoting uses Dantzig's rule with a documented anti-cycling fallback:
after ``bland_after`` consecutive degenerate steps the entering choice
switches to Bland's smallest-index rule, which guarantees termination.
Rows are equilibrated (scaled to unit max coefficient) before anything
else; no further scaling is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LP_OPTIMAL = "optimal"
LP_INFEASIBLE = "infeasible"
LP_UNBOUNDED = "unbounded"
LP_ITERATION_LIMIT = "iteration_limit"

_COST_TOL = 1e-9        # reduced-cost optimality threshold
_PIVOT_TOL = 1e-9       # minimum pivot magnitude in the ratio test
_DEG_TOL = 1e-9         # step sizes at or below this count as degenerate
_FEAS_TOL = 1e-7        # allowed residual artificial mass after phase 1


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None
    objective: float | None
    iterations: int


def solve_lp(c, a, senses, rhs, lower, upper, *, bland_after=None,
             max_iter=None) -> LpResult:
    """Minimize c.x subject to a x (senses) rhs and lower <= x <= upper."""
    c = np.asarray(c, dtype=float)
    a = np.asarray(a, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    m, n = a.shape

    # canonical rows: <= and = only
    a_w = a.copy()
    b_w = rhs.copy()
    eq = np.zeros(m, dtype=bool)
    for r, sense in enumerate(senses):
        if sense == ">=":
            a_w[r] = -a_w[r]
            b_w[r] = -b_w[r]
        elif sense == "=":
            eq[r] = True

    # row equilibration
    scale = np.maximum(np.abs(a_w).max(axis=1), 1e-12)
    a_w /= scale[:, None]
    b_w /= scale

    # shift variables to zero lower bounds
    b_w = b_w - a_w @ lower
    room = upper - lower                      # may be +inf

    # columns: structurals, slacks for <= rows, artificials as needed
    slack_of = np.full(m, -1, dtype=int)
    art_cols = []
    cols = [a_w.T]                            # transposed stacking buffer
    col_room = [room]
    n_total = n
    for r in range(m):
        if not eq[r]:
            unit = np.zeros(m)
            unit[r] = 1.0
            cols.append(unit[None, :])
            col_room.append([np.inf])
            slack_of[r] = n_total
            n_total += 1
    for r in range(m):
        needs_art = eq[r] or b_w[r] < 0.0
        if needs_art:
            unit = np.zeros(m)
            unit[r] = 1.0 if b_w[r] >= 0.0 else -1.0
            cols.append(unit[None, :])
            col_room.append([np.inf])
            art_cols.append(n_total)
            n_total += 1
    w = np.vstack(cols).T                     # m x n_total
    room_w = np.concatenate([np.asarray(x, dtype=float) for x in col_room])
    art_cols = np.array(art_cols, dtype=int)
    is_art = np.zeros(n_total, dtype=bool)
    is_art[art_cols] = True

    # initial basis: slack where feasible, artificial otherwise
    basis = np.empty(m, dtype=int)
    art_iter = iter(art_cols)
    for r in range(m):
        if eq[r] or b_w[r] < 0.0:
            basis[r] = next(art_iter)
        else:
            basis[r] = slack_of[r]
    state = np.full(n_total, -1, dtype=np.int8)   # -1 lower, +1 upper, 0 basic
    state[basis] = 0

    t = w.copy()
    xb = b_w.copy()
    neg = xb < 0.0
    if np.any(neg):
        # artificial columns of negative rows carry coefficient -1
        t[neg] *= -1.0
        xb[neg] *= -1.0

    if bland_after is None:
        bland_after = 10 * m
    if max_iter is None:
        max_iter = 2000 + 200 * (m + n_total)

    iters = 0

    def run_phase(cost, movable):
        """Pivot until optimal for ``cost``; returns status."""
        nonlocal iters, t, xb
        z = cost - cost[basis] @ t
        bland = False
        consecutive_degenerate = 0
        while True:
            if iters >= max_iter:
                return LP_ITERATION_LIMIT
            viol = np.where(state == -1, -z, np.where(state == 1, z, 0.0))
            viol[~movable] = 0.0
            if bland:
                eligible = np.flatnonzero(viol > _COST_TOL)
                if eligible.size == 0:
                    return LP_OPTIMAL
                j_e = int(eligible[0])
            else:
                j_e = int(np.argmax(viol))
                if viol[j_e] <= _COST_TOL:
                    return LP_OPTIMAL
            direction = 1.0 if state[j_e] == -1 else -1.0
            y = direction * t[:, j_e]

            lo_b = np.where(y > _PIVOT_TOL, xb / np.where(
                y > _PIVOT_TOL, y, 1.0), np.inf)
            basic_room = room_w[basis]
            hi_b = np.where(y < -_PIVOT_TOL, (basic_room - xb) / np.where(
                y < -_PIVOT_TOL, -y, 1.0), np.inf)
            # drifted basic values can yield tiny negative ratios; a
            # clamped zero step keeps the pivot degenerate instead
            theta_rows = np.maximum(np.minimum(lo_b, hi_b), 0.0)
            theta_basic = float(theta_rows.min()) if m else np.inf
            theta_flip = room_w[j_e]

            if theta_flip <= theta_basic:
                if not np.isfinite(theta_flip):
                    return LP_UNBOUNDED
                xb -= theta_flip * y
                state[j_e] = -state[j_e]
                iters += 1
                continue
            if not np.isfinite(theta_basic):
                return LP_UNBOUNDED

            near = np.flatnonzero(theta_rows <= theta_basic + 1e-7)
            if bland:
                r = int(near[np.argmin(basis[near])])
            else:
                r = int(near[np.argmax(np.abs(y[near]))])
            theta = float(theta_rows[r])

            xb -= theta * y
            leaving = basis[r]
            state[leaving] = -1 if y[r] > 0 else 1
            entering_from_upper = state[j_e] == 1
            basis[r] = j_e
            state[j_e] = 0
            xb[r] = (room_w[j_e] if entering_from_upper else 0.0) \
                + direction * theta

            piv = t[r, j_e]
            t[r] = t[r] / piv
            col = t[:, j_e].copy()
            col[r] = 0.0
            t -= col[:, None] * t[r][None, :]
            z = z - z[j_e] * t[r]
            iters += 1
            if theta <= _DEG_TOL:
                consecutive_degenerate += 1
                if consecutive_degenerate > bland_after:
                    bland = True
            else:
                consecutive_degenerate = 0
                bland = False

    # phase 1: drive out the artificial mass
    if art_cols.size:
        cost1 = np.zeros(n_total)
        cost1[art_cols] = 1.0
        movable = room_w > 0.0
        status = run_phase(cost1, movable)
        if status != LP_OPTIMAL:
            if status == LP_UNBOUNDED:      # cannot happen: cost >= 0
                status = LP_ITERATION_LIMIT
            return LpResult(status, None, None, iters)
        art_mass = float(np.abs(xb[np.isin(basis, art_cols)]).sum()) if m \
            else 0.0
        if art_mass > _FEAS_TOL:
            return LpResult(LP_INFEASIBLE, None, None, iters)
        room_w[art_cols] = 0.0              # pin artificials for phase 2

    cost2 = np.zeros(n_total)
    cost2[:n] = c
    movable = (room_w > 0.0) & ~is_art
    status = run_phase(cost2, movable)
    if status != LP_OPTIMAL:
        return LpResult(status, None, None, iters)

    # refresh basic values from a fresh factorization to cap pivot drift
    values = np.where(state == 1, room_w, 0.0)
    values[basis] = 0.0
    try:
        xb = np.linalg.solve(w[:, basis], b_w - w @ values)
    except np.linalg.LinAlgError:
        xb = xb  # singular refresh; keep iterated values
    values[basis] = xb
    x = np.clip(values[:n] + lower, lower, upper)
    return LpResult(LP_OPTIMAL, x, float(c @ x), iters)
