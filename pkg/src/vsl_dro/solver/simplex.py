"""Bounded-variable revised primal simplex.

Every row gets a slack column (``<=`` rows: slack in [0, inf), ``>=``:
(-inf, 0], ``=``: [0, 0]) so the slack basis is always a valid start.
Infeasible starts are repaired by a composite phase 1 that minimizes the
sum of bound violations of the basic variables; phase 2 then optimizes the
real objective from the same basis. The basis is kept as a dense LU factor
plus a product-form eta file, refactorized every ``REFACTOR_EVERY`` pivots.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import lu_factor, lu_solve

from vsl_dro.core.models import SolveStatus
from vsl_dro.solver.problem import Basis, LpProblem, Sense, Solution

logger = logging.getLogger(__name__)

FEAS_TOL = 1e-7
OPT_TOL = 1e-7
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 50
BLAND_AFTER = 500

_BASIC, _AT_LB, _AT_UB, _FREE = 0, 1, 2, 3


class _SingularBasis(Exception):
    pass


@dataclass
class CompiledLp:
    """Scaled equality form: a @ x = b with slack columns appended after the n structurals.

    Costs are for minimization and normalized to max |cost| = 1.
    """

    a: sp.csc_matrix
    at: sp.csr_matrix
    b: np.ndarray
    cost: np.ndarray
    slack_lb: np.ndarray
    slack_ub: np.ndarray
    col_scale: np.ndarray
    row_scale: np.ndarray
    n: int
    m: int
    sign: float  # -1 when the original problem maximizes
    cost_scale: float
    objective: np.ndarray
    trivially_infeasible: bool = False

    def scaled_bounds(self, lower: np.ndarray, upper: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lb = np.concatenate([lower / self.col_scale, self.slack_lb])
        ub = np.concatenate([upper / self.col_scale, self.slack_ub])
        return lb, ub

    def column(self, j: int) -> np.ndarray:
        col = np.zeros(self.m)
        start, end = self.a.indptr[j], self.a.indptr[j + 1]
        col[self.a.indices[start:end]] = self.a.data[start:end]
        return col


def compile_lp(p: LpProblem) -> CompiledLp:
    """Build the scaled sparse form; empty rows are checked and dropped."""
    n = p.n_vars
    data: list[float] = []
    rows_idx: list[int] = []
    cols_idx: list[int] = []
    rhs: list[float] = []
    slack_lb: list[float] = []
    slack_ub: list[float] = []
    infeasible = False
    for row in p.rows:
        items = [(j, v) for j, v in row.coeffs.items() if v != 0.0]
        if not items:
            if (row.sense == Sense.LE and row.rhs < -FEAS_TOL) or (row.sense == Sense.GE and row.rhs > FEAS_TOL) or (
                row.sense == Sense.EQ and abs(row.rhs) > FEAS_TOL
            ):
                infeasible = True
            continue
        i = len(rhs)
        for j, v in items:
            rows_idx.append(i)
            cols_idx.append(j)
            data.append(v)
        rhs.append(row.rhs)
        if row.sense == Sense.LE:
            slack_lb.append(0.0)
            slack_ub.append(math.inf)
        elif row.sense == Sense.GE:
            slack_lb.append(-math.inf)
            slack_ub.append(0.0)
        else:
            slack_lb.append(0.0)
            slack_ub.append(0.0)
    m = len(rhs)
    a = sp.csr_matrix((data, (rows_idx, cols_idx)), shape=(m, n), dtype=float)
    a.sum_duplicates()

    abs_a = abs(a)
    row_max = np.asarray(abs_a.max(axis=1).todense()).reshape(-1) if m else np.zeros(0)
    row_scale = np.where(row_max > 0, 1.0 / np.where(row_max > 0, row_max, 1.0), 1.0)
    a = sp.diags(row_scale) @ a if m else a
    col_max = np.asarray(abs(a).max(axis=0).todense()).reshape(-1) if m else np.zeros(n)
    col_scale = np.where(col_max > 0, 1.0 / np.where(col_max > 0, col_max, 1.0), 1.0)
    a = a @ sp.diags(col_scale) if n else a

    full = sp.hstack([a, sp.identity(m, format="csr")], format="csc") if m else sp.csc_matrix((0, n))
    sign = -1.0 if p.maximize else 1.0
    cost = np.concatenate([sign * np.asarray(p.objective, dtype=float) * col_scale, np.zeros(m)])
    cost_scale = float(np.max(np.abs(cost), initial=0.0)) or 1.0
    return CompiledLp(
        a=full,
        at=full.T.tocsr(),
        b=np.asarray(rhs, dtype=float) * row_scale,
        cost=cost / cost_scale,
        slack_lb=np.asarray(slack_lb, dtype=float),
        slack_ub=np.asarray(slack_ub, dtype=float),
        col_scale=col_scale,
        row_scale=row_scale,
        n=n,
        m=m,
        sign=sign,
        cost_scale=cost_scale,
        objective=np.asarray(p.objective, dtype=float),
        trivially_infeasible=infeasible,
    )


class _Factor:
    """Dense LU of the basis with product-form updates."""

    def __init__(self, cp: CompiledLp, basic: np.ndarray) -> None:
        self.cp = cp
        self.refactor(basic)

    def refactor(self, basic: np.ndarray) -> None:
        dense = self.cp.a[:, basic].toarray() if self.cp.m else np.zeros((0, 0))
        if self.cp.m:
            lu, piv = lu_factor(dense, check_finite=False)
            diag = np.abs(np.diag(lu))
            if diag.min() <= 1e-11 * max(1.0, diag.max()):
                raise _SingularBasis()
            self.lu = (lu, piv)
        self.etas: list[tuple[int, np.ndarray]] = []

    def ftran(self, v: np.ndarray) -> np.ndarray:
        if not self.cp.m:
            return v.copy()
        x = lu_solve(self.lu, v, check_finite=False)
        for r, w in self.etas:
            xr = x[r] / w[r]
            x -= w * xr
            x[r] = xr
        return x

    def btran(self, c: np.ndarray) -> np.ndarray:
        if not self.cp.m:
            return c.copy()
        y = c.copy()
        for r, w in reversed(self.etas):
            y[r] = (y[r] - (np.dot(w, y) - w[r] * y[r])) / w[r]
        return lu_solve(self.lu, y, trans=1, check_finite=False)

    def update(self, r: int, w: np.ndarray) -> None:
        self.etas.append((r, w.copy()))


def _slack_start(cp: CompiledLp, lb: np.ndarray, ub: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    basic = np.arange(cp.n, cp.n + cp.m)
    status = np.empty(cp.n + cp.m, dtype=np.int8)
    status[cp.n:] = _BASIC
    structural = slice(0, cp.n)
    status[structural] = np.where(
        np.isfinite(lb[structural]), _AT_LB, np.where(np.isfinite(ub[structural]), _AT_UB, _FREE)
    )
    return basic, status


def _warm_start(cp: CompiledLp, basis: Basis | None, lb: np.ndarray, ub: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if basis is None or basis.n != cp.n or basis.m > cp.m:
        return _slack_start(cp, lb, ub)
    extra = np.arange(cp.n + basis.m, cp.n + cp.m)
    basic = np.concatenate([basis.basic, extra]).astype(int)
    status = np.concatenate([basis.status, np.full(len(extra), _BASIC, dtype=np.int8)])
    return basic, status


def _place_nonbasic(status: np.ndarray, x: np.ndarray, lb: np.ndarray, ub: np.ndarray) -> None:
    """Move nonbasic variables onto a finite bound (or zero when free)."""
    nb = status != _BASIC
    lb_fin, ub_fin = np.isfinite(lb), np.isfinite(ub)
    want_ub = nb & (status == _AT_UB)
    status[want_ub & ~ub_fin] = _AT_LB
    want_lb = nb & (status == _AT_LB)
    status[want_lb & ~lb_fin] = np.where(ub_fin[want_lb & ~lb_fin], _AT_UB, _FREE)
    free = nb & (status == _FREE)
    status[free & lb_fin] = _AT_LB
    status[free & ~lb_fin & ub_fin] = _AT_UB
    x[status == _AT_LB] = lb[status == _AT_LB]
    x[status == _AT_UB] = ub[status == _AT_UB]
    x[status == _FREE] = 0.0


def _basic_values(cp: CompiledLp, factor: _Factor, basic: np.ndarray, x: np.ndarray) -> None:
    xn = x.copy()
    xn[basic] = 0.0
    x[basic] = factor.ftran(cp.b - cp.a @ xn)


@dataclass
class _Outcome:
    status: SolveStatus
    x: np.ndarray
    basic: np.ndarray
    nb_status: np.ndarray
    iterations: int
    message: str = ""


def _iterate(
    cp: CompiledLp,
    lb: np.ndarray,
    ub: np.ndarray,
    basic: np.ndarray,
    status: np.ndarray,
    deadline: float | None,
) -> _Outcome:
    total = cp.n + cp.m
    x = np.zeros(total)
    _place_nonbasic(status, x, lb, ub)
    try:
        factor = _Factor(cp, basic)
    except _SingularBasis:
        logger.debug("Warm basis singular; restarting from the slack basis")
        basic, status = _slack_start(cp, lb, ub)
        _place_nonbasic(status, x, lb, ub)
        factor = _Factor(cp, basic)
    _basic_values(cp, factor, basic, x)

    movable = ub > lb
    max_iter = 50 * (total + 10)
    degenerate = 0
    bland = False
    pivots = 0
    polished = False
    for it in range(max_iter):
        if deadline is not None and it % 16 == 0 and time.monotonic() > deadline:
            return _Outcome(SolveStatus.BUDGET_NO_INCUMBENT, x, basic, status, it, "time budget exhausted")
        xb = x[basic]
        lbb, ubb = lb[basic], ub[basic]
        below = xb < lbb - FEAS_TOL
        above = xb > ubb + FEAS_TOL
        phase1 = bool(below.any() or above.any())
        if phase1:
            y = factor.btran(np.where(below, -1.0, np.where(above, 1.0, 0.0)))
            d = -(cp.at @ y)
        else:
            y = factor.btran(cp.cost[basic])
            d = cp.cost - cp.at @ y
        d[basic] = 0.0
        can_inc = movable & ((status == _AT_LB) | (status == _FREE)) & (d < -OPT_TOL)
        can_dec = movable & ((status == _AT_UB) | (status == _FREE)) & (d > OPT_TOL)
        score = np.where(can_inc, -d, 0.0) + np.where(can_dec, d, 0.0)
        candidates = np.flatnonzero(score)
        if candidates.size == 0:
            if phase1:
                return _Outcome(SolveStatus.INFEASIBLE, x, basic, status, it)
            if not polished:
                # Refactor once at the optimum and re-check feasibility.
                polished = True
                try:
                    factor.refactor(basic)
                except _SingularBasis:
                    return _Outcome(SolveStatus.NUMERICAL, x, basic, status, it, "singular basis")
                _basic_values(cp, factor, basic, x)
                continue
            return _Outcome(SolveStatus.OPTIMAL, x, basic, status, it)
        q = int(candidates[0]) if bland else int(np.argmax(score))
        direction = 1.0 if can_inc[q] else -1.0
        w = factor.ftran(cp.column(q))
        alpha = -direction * w

        xb = x[basic]
        lbb, ubb = lb[basic], ub[basic]
        steps = np.full(cp.m, math.inf)
        hit_upper = np.zeros(cp.m, dtype=bool)
        dec = alpha < -PIVOT_TOL
        inc = alpha > PIVOT_TOL
        over = xb > ubb + FEAS_TOL
        under = xb < lbb - FEAS_TOL
        # decreasing basics: stop at ub when above it, else at lb unless already below
        m_over = dec & over
        steps[m_over] = (xb[m_over] - ubb[m_over]) / -alpha[m_over]
        hit_upper[m_over] = True
        m_dec = dec & ~over & ~under & np.isfinite(lbb)
        steps[m_dec] = (xb[m_dec] - lbb[m_dec]) / -alpha[m_dec]
        # increasing basics: stop at lb when below it, else at ub unless already above
        m_under = inc & under
        steps[m_under] = (lbb[m_under] - xb[m_under]) / alpha[m_under]
        m_inc = inc & ~under & ~over & np.isfinite(ubb)
        steps[m_inc] = (ubb[m_inc] - xb[m_inc]) / alpha[m_inc]
        hit_upper[m_inc] = True
        np.maximum(steps, 0.0, out=steps)

        flip = ub[q] - lb[q] if np.isfinite(lb[q]) and np.isfinite(ub[q]) else math.inf
        theta_row = float(steps.min()) if cp.m else math.inf
        if theta_row == math.inf and flip == math.inf:
            if phase1:
                return _Outcome(SolveStatus.NUMERICAL, x, basic, status, it, "unbounded phase-1 ray")
            return _Outcome(SolveStatus.UNBOUNDED, x, basic, status, it)

        if flip <= theta_row:
            theta = flip
            x[q] += direction * theta
            x[basic] += alpha * theta
            status[q] = _AT_UB if direction > 0 else _AT_LB
            x[q] = ub[q] if direction > 0 else lb[q]
        else:
            theta = theta_row
            ties = np.flatnonzero(steps <= theta + 1e-12)
            if bland:
                r = int(ties[np.argmin(basic[ties])])
            else:
                r = int(ties[np.argmax(np.abs(alpha[ties]))])
            leaving = int(basic[r])
            x[q] += direction * theta
            x[basic] += alpha * theta
            if hit_upper[r]:
                x[leaving] = ub[leaving]
                status[leaving] = _AT_UB
            else:
                x[leaving] = lb[leaving]
                status[leaving] = _AT_LB
            basic[r] = q
            status[q] = _BASIC
            pivots += 1
            if pivots % REFACTOR_EVERY == 0:
                try:
                    factor.refactor(basic)
                except _SingularBasis:
                    return _Outcome(SolveStatus.NUMERICAL, x, basic, status, it, "singular basis")
                _basic_values(cp, factor, basic, x)
            else:
                factor.update(r, w)
        polished = False

        if theta <= 1e-12:
            degenerate += 1
            if degenerate > BLAND_AFTER and not bland:
                logger.debug("Switching to Bland's rule after %d degenerate pivots", degenerate)
                bland = True
        else:
            degenerate = 0
            bland = False
    return _Outcome(SolveStatus.NUMERICAL, x, basic, status, max_iter, "iteration limit")


def solve_compiled(
    cp: CompiledLp,
    lower: np.ndarray,
    upper: np.ndarray,
    basis: Basis | None = None,
    deadline: float | None = None,
) -> Solution:
    """Solve a compiled LP under the given (unscaled) structural bounds."""
    if cp.trivially_infeasible:
        return Solution(SolveStatus.INFEASIBLE, message="empty row with violated right-hand side")
    if np.any(lower > upper + FEAS_TOL):
        return Solution(SolveStatus.INFEASIBLE, message="crossed variable bounds")
    lb, ub = cp.scaled_bounds(lower, upper)
    basic, status = _warm_start(cp, basis, lb, ub)
    out = _iterate(cp, lb, ub, basic.copy(), status.copy(), deadline)
    new_basis = Basis(basic=out.basic.copy(), status=out.nb_status.copy(), n=cp.n, m=cp.m)
    if out.status != SolveStatus.OPTIMAL:
        return Solution(out.status, iterations=out.iterations, message=out.message, basis=new_basis)
    x = out.x[: cp.n] * cp.col_scale
    x = np.clip(x, lower, upper)
    objective = float(np.dot(cp.objective, x))
    return Solution(
        SolveStatus.OPTIMAL,
        x=x,
        objective=objective,
        bound=objective,
        iterations=out.iterations,
        basis=new_basis,
    )


def solve_lp(p: LpProblem, deadline: float | None = None, basis: Basis | None = None) -> Solution:
    """Solve ``p`` to an optimal basic solution or an infeasible/unbounded status."""
    p.validate()
    cp = compile_lp(p)
    sol = solve_compiled(cp, np.asarray(p.lower, dtype=float), np.asarray(p.upper, dtype=float), basis, deadline)
    if sol.status == SolveStatus.OPTIMAL and sol.x is not None:
        sol.objective = p.evaluate(sol.x)
        sol.bound = sol.objective
        violation = p.max_violation(sol.x)
        if violation > 1e-5 * (1.0 + max((abs(r.rhs) for r in p.rows), default=0.0)):
            logger.warning("LP solution violates constraints by %.3g; reporting numerical status", violation)
            return Solution(SolveStatus.NUMERICAL, iterations=sol.iterations, message="residual check failed")
    logger.debug("LP %s after %d iterations", sol.status.value, sol.iterations)
    return sol
