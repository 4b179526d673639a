"""Performance certificate J(u): worst-case expected average flow over the ambiguity ball."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from vsl_dro.core.models import Certificate, CertificateStatus, DensityTrajectory, SolveStatus, SpeedSchedule
from vsl_dro.formulation.instance import InstanceData
from vsl_dro.formulation.problems import box_distance, build_lbp, build_lbp_dual, solve_lbp_dual_greedy
from vsl_dro.solver.problem import Solution
from vsl_dro.solver.simplex import solve_lp
from vsl_dro.traffic.ctm import average_flow, propagate

logger = logging.getLogger(__name__)

METHODS = ("greedy", "lp")
MAX_DOUBLINGS = 20


def propagate_all(inst: InstanceData, schedule: SpeedSchedule) -> list[DensityTrajectory]:
    return [propagate(inst.cfg, schedule, sample) for sample in inst.samples]


def empirical_flow(schedule: SpeedSchedule, trajs: list[DensityTrajectory]) -> float:
    """Sample-average flow (1/N) * sum_l H(u; rho_l)."""
    return float(np.mean([average_flow(schedule, traj) for traj in trajs]))


def _infeasible(inst: InstanceData, reason: str) -> Certificate:
    return Certificate(value=None, epsilon=inst.epsilon, status=CertificateStatus.INFEASIBLE, reason=reason)


def admissibility_reason(trajs: list[DensityTrajectory]) -> str | None:
    for i, traj in enumerate(trajs):
        if not traj.admissible:
            v = traj.first_violation
            where = f"edge {v.edge}, t={v.t}, {v.constraint}" if v is not None else "unknown"
            return f"sample {i} inadmissible ({where})"
    return None


def certificate(
    inst: InstanceData,
    schedule: SpeedSchedule,
    method: str = "greedy",
    trajs: list[DensityTrajectory] | None = None,
) -> Certificate:
    """Evaluate J(u) for one candidate.

    Infeasible when a propagated sample is inadmissible or when the samples
    lie farther than N * epsilon (1-norm) from the uncongested box of u.

    ``method="greedy"`` (the default) is the closed-form optimum of the dual:
    after clipping into the box, the remaining budget lowers the densities
    with the highest speeds first. It returns the same value as
    ``method="lp"``, which solves the dual with the simplex and is kept as a
    cross-check; the greedy form needs no LP per candidate.
    """
    if method not in METHODS:
        raise ValueError(f"unknown certificate method {method!r}; expected one of {METHODS}")
    inst.check_schedule(schedule)
    if trajs is None:
        trajs = propagate_all(inst, schedule)
    reason = admissibility_reason(trajs)
    if reason is not None:
        return _infeasible(inst, reason)
    budget = inst.n_samples * inst.epsilon
    distance = box_distance(inst, schedule, trajs)
    if distance > budget * (1 + 1e-9) + 1e-9:
        return _infeasible(inst, f"distance {distance:.6g} to the uncongested box exceeds budget {budget:.6g}")
    empirical = empirical_flow(schedule, trajs)
    if method == "greedy":
        value = solve_lbp_dual_greedy(inst, schedule, trajs)
        if value is None:
            return _infeasible(inst, "budget exhausted")
    else:
        sol = solve_lp(build_lbp_dual(inst, schedule, trajs))
        if sol.status != SolveStatus.OPTIMAL or sol.objective is None:
            return _infeasible(inst, f"dual LP {sol.status.value}")
        value = max(sol.objective, 0.0)
    return Certificate(value=value, epsilon=inst.epsilon, status=CertificateStatus.FINITE, empirical=empirical)


@dataclass
class PrimalResult:
    solution: Solution
    eta_bar: float
    doublings: int

    @property
    def max_eta(self) -> float:
        return float(self.solution.info.get("max_eta", 0.0))


def solve_lbp_primal(
    inst: InstanceData,
    schedule: SpeedSchedule,
    trajs: list[DensityTrajectory],
    max_doublings: int = MAX_DOUBLINGS,
) -> PrimalResult:
    """Solve the fixed-candidate LP, doubling eta_bar while it binds.

    When eta_bar still binds after ``max_doublings`` the LP is reported
    unbounded, which matches an infeasible dual.
    """
    current = inst
    for doublings in range(max_doublings + 1):
        lbp = build_lbp(current, schedule, trajs)
        sol = solve_lp(lbp.lp)
        if sol.status != SolveStatus.OPTIMAL or sol.x is None:
            return PrimalResult(sol, current.eta_bar, doublings)
        max_eta = float(np.max(sol.x[lbp.eta])) if lbp.eta.size else 0.0
        sol.info["max_eta"] = max_eta
        if max_eta < 0.99 * current.eta_bar:
            return PrimalResult(sol, current.eta_bar, doublings)
        logger.warning("eta_bar %.6g binds (max eta %.6g); doubling", current.eta_bar, max_eta)
        current = current.with_eta_bar(2.0 * current.eta_bar)
    sol.status = SolveStatus.UNBOUNDED
    sol.message = f"eta_bar still binding after {max_doublings} doublings"
    return PrimalResult(sol, current.eta_bar, max_doublings)
