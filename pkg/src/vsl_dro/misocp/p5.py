"""Cone reformulation with level-discretized theta, solved by outer approximation.

The bilinear reward nu * rho is replaced by theta**2 with theta**2 <= nu * rho
(nu, rho >= 0). theta takes one of K grid levels, so theta**2 is linear in
the level selectors. The cone is enforced lazily with AM-GM tangent cuts
``theta <= (a * nu + rho / a) / 2``, which are exact at rho / nu = a**2.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from vsl_dro.core.models import HighwayConfig, SolveStatus, SpeedSchedule
from vsl_dro.formulation.instance import InstanceData, VariableIndex
from vsl_dro.formulation.problems import set_dual_objective, sos_groups, structural_rows
from vsl_dro.formulation.rows import x_values
from vsl_dro.solver.milp import solve_with_lazy_cuts
from vsl_dro.solver.problem import LinearRow, MilpProblem, Sense, Solution

logger = logging.getLogger(__name__)

CONE_TOL = 1e-6
_A_RANGE = (1e-8, 1e8)


@dataclass(frozen=True)
class ThetaBound:
    theta_bar: float


def theta_bound(cfg: HighwayConfig, eta_bar: float, horizon: int | None = None) -> ThetaBound:
    """sqrt(max_e (u_free * rho_jam**2 * eta_bar + u_free * rho_jam / T))."""
    horizon = cfg.horizon if horizon is None else horizon
    if eta_bar < 0 or horizon < 1:
        raise ValueError(f"invalid theta bound inputs (eta_bar={eta_bar}, T={horizon})")
    per_edge = cfg.u_free * cfg.rho_jam ** 2 * eta_bar + cfg.u_free * cfg.rho_jam / horizon
    return ThetaBound(theta_bar=float(math.sqrt(float(per_edge.max()))))


@dataclass(frozen=True)
class LevelGrid:
    """Sorted nonnegative theta levels."""

    points: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("level grid needs at least one point")
        if any(p < 0 for p in self.points):
            raise ValueError("level grid points must be nonnegative")
        if any(b <= a for a, b in zip(self.points, self.points[1:])):
            raise ValueError("level grid must be strictly increasing")

    @classmethod
    def uniform(cls, theta_bar: float, size: int) -> LevelGrid:
        if size < 1:
            raise ValueError(f"grid size must be >= 1, got {size}")
        if size == 1:
            return cls((0.0,))
        return cls(tuple(float(v) for v in np.linspace(0.0, theta_bar, size)))

    def refined(self, extra: list[float]) -> LevelGrid:
        return LevelGrid(tuple(sorted(set(self.points) | {float(v) for v in extra})))

    @property
    def size(self) -> int:
        return len(self.points)


@dataclass
class P5Problem:
    milp: MilpProblem
    index: VariableIndex
    grid: LevelGrid
    theta_bar: float
    cones: list[tuple[int, int, int]]  # (theta, nu, rho) columns
    gamma: tuple[float, ...]


def build_p5(inst: InstanceData, grid: LevelGrid | int) -> P5Problem:
    """Level-discretized cone program over the structural rows of the reformulation."""
    cfg = inst.cfg
    bound = theta_bound(cfg, inst.eta_bar)
    if isinstance(grid, int):
        grid = LevelGrid.uniform(bound.theta_bar, grid)
    levels = np.asarray(grid.points)
    theta_cap = max(bound.theta_bar, float(levels[-1]))
    index = VariableIndex.build(inst.n_samples, cfg.horizon, cfg.n, cfg.m, with_s=False,
                                with_lambda=inst.include_radius, grid_size=grid.size)
    assert index.theta is not None and index.q is not None
    lp = inst.new_problem(index)
    set_dual_objective(inst, index, lp)
    for j in index.theta.reshape(-1):
        lp.lower[int(j)] = 0.0
        lp.upper[int(j)] = theta_cap
    for qs in index.q.reshape(-1, grid.size):
        for k, j in enumerate(qs):
            lp.lower[int(j)] = 0.0
            lp.upper[int(j)] = 1.0
            lp.objective[int(j)] = float(levels[k] ** 2) / inst.n_samples
    lp.add_rows(structural_rows(inst, index))
    rows: list[LinearRow] = []
    cones: list[tuple[int, int, int]] = []
    big_n, big_t, n = index.theta.shape
    for sample in range(big_n):
        for t in range(big_t):
            for e in range(n):
                tag = f"l{sample}_e{e + 1}_t{t}"
                theta = int(index.theta[sample, t, e])
                qs = [int(j) for j in index.q[sample, t, e]]
                rows.append(LinearRow({j: 1.0 for j in qs}, Sense.EQ, 1.0, f"level_pick_{tag}"))
                level = {j: -float(levels[k]) for k, j in enumerate(qs)}
                level[theta] = 1.0
                rows.append(LinearRow(level, Sense.EQ, 0.0, f"level_{tag}"))
                cones.append((theta, int(index.nu[sample, t, e]), int(index.rho[sample, t, e])))
    lp.add_rows(rows)
    q_groups = [[int(j) for j in qs] for qs in index.q.reshape(-1, grid.size)]
    binaries = [int(j) for j in index.x.reshape(-1)] + [j for g in q_groups for j in g]
    milp = MilpProblem(lp=lp, binaries=binaries, sos1=sos_groups(index) + q_groups)
    logger.debug("P5: %d variables, %d rows, %d cones, K=%d", lp.n_vars, lp.n_rows, len(cones), grid.size)
    return P5Problem(milp=milp, index=index, grid=grid, theta_bar=bound.theta_bar, cones=cones,
                     gamma=tuple(cfg.gamma))


def tangent_slope(theta0: float, nu0: float, rho0: float) -> float:
    """Slope ``a`` of the AM-GM cut that separates (theta0, nu0, rho0) from the cone."""
    if nu0 > 0 and rho0 > 0:
        a = math.sqrt(rho0 / nu0)
    elif rho0 > 0:
        a = rho0 / theta0
    elif nu0 > 0:
        a = theta0 / nu0
    else:
        a = 1.0
    return min(max(a, _A_RANGE[0]), _A_RANGE[1])


def cone_violation(x: np.ndarray, cone: tuple[int, int, int]) -> float:
    theta, nu, rho = (float(x[j]) for j in cone)
    return theta - math.sqrt(max(nu, 0.0) * max(rho, 0.0))


def cone_cuts(x: np.ndarray, cones: list[tuple[int, int, int]], tol: float = CONE_TOL) -> list[LinearRow]:
    """Tangent cuts for every cone violated by more than ``tol``."""
    cuts: list[LinearRow] = []
    for theta, nu, rho in cones:
        t0, v0, r0 = float(x[theta]), max(float(x[nu]), 0.0), max(float(x[rho]), 0.0)
        if t0 - math.sqrt(v0 * r0) <= tol * max(1.0, t0):
            continue
        a = tangent_slope(t0, v0, r0)
        cuts.append(LinearRow({theta: 1.0, nu: -0.5 * a, rho: -0.5 / a}, Sense.LE, 0.0, f"oa_{theta}_{len(cuts)}"))
    return cuts


@dataclass
class P5Report:
    status: SolveStatus
    objective: float | None
    certified_objective: float | None
    bound: float | None
    schedule: SpeedSchedule | None
    grid: list[float]
    theta_bar: float
    cuts: int
    rounds: int
    max_violation: float
    examined: list[SpeedSchedule] = field(default_factory=list)
    solution: Solution | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status.value,
            "objective": self.objective,
            "certified_objective": self.certified_objective,
            "bound": self.bound,
            "u": self.schedule.u.tolist() if self.schedule is not None else None,
            "grid": list(self.grid),
            "theta_bar": self.theta_bar,
            "cuts": self.cuts,
            "rounds": self.rounds,
            "max_violation": self.max_violation,
            "examined_candidates": len(self.examined),
        }


def solve_p5(
    problem: P5Problem,
    budget_s: float | None = 60.0,
    tol: float = CONE_TOL,
    max_rounds: int = 200,
    gap_tol: float = 1e-9,
) -> P5Report:
    """Outer-approximation loop until every cone holds within ``tol``."""
    examined: dict[tuple[int, ...], SpeedSchedule] = {}
    n_samples = problem.index.rho.shape[0]

    def oracle(x: np.ndarray) -> list[LinearRow]:
        sched = _schedule(problem, x)
        if sched is not None:
            examined.setdefault(sched.key(), sched)
        return cone_cuts(x, problem.cones, tol)

    sol = solve_with_lazy_cuts(problem.milp, oracle, budget_s=budget_s, gap_tol=gap_tol, max_rounds=max_rounds)
    cuts = int(sol.info.get("cuts", 0))
    rounds = int(sol.info.get("rounds", 0))
    if sol.x is None or sol.objective is None:
        return P5Report(sol.status, None, None, sol.bound, None, list(problem.grid.points), problem.theta_bar,
                        cuts, rounds, math.inf, list(examined.values()), sol)
    excess = 0.0
    worst = 0.0
    for cone in problem.cones:
        theta, nu, rho = (float(sol.x[j]) for j in cone)
        excess += max(theta * theta - max(nu, 0.0) * max(rho, 0.0), 0.0)
        worst = max(worst, cone_violation(sol.x, cone))
    schedule = _schedule(problem, sol.x)
    report = P5Report(
        status=sol.status,
        objective=sol.objective,
        certified_objective=sol.objective - excess / n_samples,
        bound=sol.bound,
        schedule=schedule,
        grid=list(problem.grid.points),
        theta_bar=problem.theta_bar,
        cuts=cuts,
        rounds=rounds,
        max_violation=worst,
        examined=list(examined.values()),
        solution=sol,
    )
    logger.info("P5 %s: objective %.9g, bound %s, %d cuts in %d rounds, max cone violation %.3g",
                sol.status.value, sol.objective, sol.bound, cuts, rounds, worst)
    return report


def _schedule(problem: P5Problem, x: np.ndarray) -> SpeedSchedule | None:
    gamma = problem.gamma
    try:
        return SpeedSchedule.from_binary(gamma, x_values(problem.index, x))
    except ValueError:
        return None
