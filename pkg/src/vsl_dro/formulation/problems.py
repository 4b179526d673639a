"""Builders for the upper-bounding MILP and the fixed-candidate LPs."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from vsl_dro.core.models import DensityTrajectory, SpeedSchedule
from vsl_dro.formulation.instance import InstanceData, VariableIndex
from vsl_dro.formulation.rows import (
    CutSet,
    cut_rows,
    dual_rows,
    glover_rows,
    mccormick_rows,
    speed_rows,
    trajectory_rows,
)
from vsl_dro.highway.fundamental import critical_densities
from vsl_dro.solver.problem import INF, LinearRow, LpProblem, MilpProblem, Sense

logger = logging.getLogger(__name__)


@dataclass
class UbpProblem:
    milp: MilpProblem
    index: VariableIndex


@dataclass
class LbpProblem:
    """Fixed-candidate LP; ``mu``/``nu``/``eta`` have shape (N, T, n)."""

    lp: LpProblem
    mu: np.ndarray
    nu: np.ndarray
    eta: np.ndarray
    lam: int | None


def structural_rows(inst: InstanceData, index: VariableIndex) -> list[LinearRow]:
    rows = speed_rows(inst, index)
    rows += glover_rows(inst, index)
    rows += trajectory_rows(inst, index)
    rows += dual_rows(inst, index)
    return rows


def set_dual_objective(inst: InstanceData, index: VariableIndex, lp: LpProblem) -> None:
    """-eps * lam - (1/N) * sum f_cap * rho_jam * eta (the common part of every objective)."""
    cfg = inst.cfg
    weight = np.broadcast_to((cfg.f_cap * cfg.rho_jam)[None, None, :], index.eta.shape)
    for j, w in zip(index.eta.reshape(-1), weight.reshape(-1)):
        lp.objective[int(j)] = -float(w) / inst.n_samples
    if index.lam is not None:
        lp.objective[index.lam] = -inst.epsilon


def sos_groups(index: VariableIndex) -> list[list[int]]:
    big_t, n, _ = index.x.shape
    return [[int(j) for j in index.x[t, e]] for t in range(big_t) for e in range(n)]


def build_ubp(inst: InstanceData, cuts: CutSet | None = None) -> UbpProblem:
    """Upper-bounding MILP: McCormick relaxation of nu * rho plus one cut per examined candidate."""
    cfg = inst.cfg
    index = VariableIndex.build(inst.n_samples, cfg.horizon, cfg.n, cfg.m,
                                with_s=True, with_lambda=inst.include_radius)
    lp = inst.new_problem(index)
    set_dual_objective(inst, index, lp)
    assert index.s is not None
    for j in index.s.reshape(-1):
        lp.objective[int(j)] = 1.0 / inst.n_samples
    lp.add_rows(structural_rows(inst, index))
    lp.add_rows(mccormick_rows(inst, index))
    if cuts:
        lp.add_rows(cut_rows(index, cuts))
    milp = MilpProblem(lp=lp, binaries=[int(j) for j in index.x.reshape(-1)], sos1=sos_groups(index))
    logger.debug("UBP: %d variables, %d rows, %d cuts", lp.n_vars, lp.n_rows, len(cuts) if cuts else 0)
    return UbpProblem(milp=milp, index=index)


def _check_trajectories(inst: InstanceData, trajs: list[DensityTrajectory]) -> np.ndarray:
    if len(trajs) != inst.n_samples:
        raise ValueError(f"expected {inst.n_samples} trajectories, got {len(trajs)}")
    for i, traj in enumerate(trajs):
        if not traj.admissible:
            raise ValueError(f"trajectory {i} is inadmissible; the fixed-candidate problem needs admissible inputs")
    horizon = inst.cfg.horizon
    # (N, T, n) in the instance's sample-time-edge order
    return np.stack([traj.rho[:, :horizon].T for traj in trajs])


def build_lbp(inst: InstanceData, schedule: SpeedSchedule, trajs: list[DensityTrajectory]) -> LbpProblem:
    """Fixed-candidate LP in (lam, mu, nu, eta) with z = x * eta eliminated."""
    inst.check_schedule(schedule)
    rho_hat = _check_trajectories(inst, trajs)
    cfg = inst.cfg
    big_n, big_t, n = rho_hat.shape
    u = schedule.u.T  # (T, n)
    a = inst.dual_coefficient(schedule.u).T  # (T, n)
    lp = LpProblem(maximize=True)
    mu = np.empty((big_n, big_t, n), dtype=int)
    nu = np.empty_like(mu)
    eta = np.empty_like(mu)
    for sample in range(big_n):
        for t in range(big_t):
            for e in range(n):
                tag = f"l{sample},e{e + 1},t{t}"
                mu[sample, t, e] = lp.add_var(f"mu[{tag}]", -INF, INF)
                nu[sample, t, e] = lp.add_var(f"nu[{tag}]", -INF, INF, float(rho_hat[sample, t, e]) / big_n)
                eta[sample, t, e] = lp.add_var(
                    f"eta[{tag}]", 0.0, inst.eta_bar, -float(cfg.f_cap[e] * cfg.rho_jam[e]) / big_n
                )
    lam = lp.add_var("lambda", 0.0, INF, -inst.epsilon) if inst.include_radius else None
    for sample in range(big_n):
        for t in range(big_t):
            for e in range(n):
                tag = f"l{sample}_e{e + 1}_t{t}"
                m_j, n_j, e_j = int(mu[sample, t, e]), int(nu[sample, t, e]), int(eta[sample, t, e])
                lp.add_row({e_j: float(a[t, e]), m_j: -1.0}, Sense.GE, 0.0, f"pen_{tag}")
                lp.add_row({n_j: 1.0, m_j: -1.0}, Sense.EQ, float(u[t, e]) / big_t, f"shift_{tag}")
                if lam is not None:
                    lp.add_row({n_j: 1.0, lam: -1.0}, Sense.LE, 0.0, f"norm_ub_{tag}")
                    lp.add_row({n_j: 1.0, lam: 1.0}, Sense.GE, 0.0, f"norm_lb_{tag}")
    return LbpProblem(lp=lp, mu=mu, nu=nu, eta=eta, lam=lam)


def build_lbp_dual(inst: InstanceData, schedule: SpeedSchedule, trajs: list[DensityTrajectory]) -> LpProblem:
    """min (1/(N T)) sum u * rho over the box [0, rho_c(u)] within 1-norm budget N * eps of rho_hat."""
    inst.check_schedule(schedule)
    rho_hat = _check_trajectories(inst, trajs)
    big_n, big_t, n = rho_hat.shape
    u = schedule.u.T
    crit = critical_densities(inst.cfg, schedule.u).T  # (T, n)
    lp = LpProblem(maximize=False)
    budget: dict[int, float] = {}
    for sample in range(big_n):
        for t in range(big_t):
            for e in range(n):
                tag = f"l{sample},e{e + 1},t{t}"
                r = lp.add_var(f"rho[{tag}]", 0.0, float(crit[t, e]), float(u[t, e]) / (big_n * big_t))
                d = lp.add_var(f"d[{tag}]", 0.0, INF, 0.0)
                hat = float(rho_hat[sample, t, e])
                lp.add_row({d: 1.0, r: -1.0}, Sense.GE, -hat, f"dev_lo_{tag}")
                lp.add_row({d: 1.0, r: 1.0}, Sense.GE, hat, f"dev_hi_{tag}")
                budget[d] = 1.0
    lp.add_row(budget, Sense.LE, big_n * inst.epsilon, "budget")
    return lp


def box_distance(inst: InstanceData, schedule: SpeedSchedule, trajs: list[DensityTrajectory]) -> float:
    """Total 1-norm distance of the sample trajectories to the box [0, rho_c(u)]."""
    horizon = inst.cfg.horizon
    crit = critical_densities(inst.cfg, schedule.u)
    total = 0.0
    for traj in trajs:
        rho = traj.rho[:, :horizon]
        total += float(np.sum(np.maximum(rho - crit, 0.0) + np.maximum(-rho, 0.0)))
    return total


def solve_lbp_dual_greedy(
    inst: InstanceData,
    schedule: SpeedSchedule,
    trajs: list[DensityTrajectory],
) -> float | None:
    """Exact optimum of the dual LP, or None when it is infeasible.

    Project every entry onto its box, then spend the remaining budget
    lowering densities on the entries with the largest speed first.
    """
    rho_hat = _check_trajectories(inst, trajs)  # (N, T, n)
    big_n, big_t, _ = rho_hat.shape
    u = np.broadcast_to(schedule.u.T[None], rho_hat.shape)
    crit = np.broadcast_to(critical_densities(inst.cfg, schedule.u).T[None], rho_hat.shape)
    rho = np.clip(rho_hat, 0.0, crit)
    budget = big_n * inst.epsilon - float(np.sum(np.abs(rho - rho_hat)))
    if budget < -1e-9 * max(1.0, big_n * inst.epsilon):
        return None
    budget = max(budget, 0.0)
    flat_u = u.reshape(-1)
    flat_rho = rho.reshape(-1).copy()
    for j in np.argsort(-flat_u, kind="stable"):
        if budget <= 0:
            break
        cut = min(flat_rho[j], budget)
        flat_rho[j] -= cut
        budget -= cut
    return float(np.dot(flat_u, flat_rho) / (big_n * big_t))
