"""Integer solution search: alternate the upper-bounding MILP with fixed-candidate certificates.

Each iteration solves the McCormick relaxation with canonical cuts on every
examined candidate, certifies the new candidate, and cuts it off. The
best certificate found is the lower bound; the relaxation optimum bounds
every candidate not yet examined.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from vsl_dro.core.models import (
    Certificate,
    RegimeReport,
    SolveStatus,
    SpeedSchedule,
    TerminationReason,
)
from vsl_dro.dro.certificate import certificate
from vsl_dro.formulation.instance import InstanceData
from vsl_dro.formulation.problems import build_ubp
from vsl_dro.formulation.rows import CutSet, start_values, x_values
from vsl_dro.highway.fundamental import sufficient_eta_bar
from vsl_dro.issa.pool import CandidatePool
from vsl_dro.reports.writers import format_float, write_csv
from vsl_dro.solver.milp import solve_milp
from vsl_dro.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

_GAP_SLACK = 1e-9


@dataclass
class CandidateRecord:
    """One examined candidate; ``k`` is 0 for pool candidates."""

    k: int
    schedule: SpeedSchedule
    feasible: bool
    objective: float | None
    upper_bound: float | None
    lower_bound: float | None
    seconds: float
    source: str = "ubp"
    reason: str = ""


@dataclass
class IssaState:
    k: int = 0
    cuts: CutSet = field(default_factory=CutSet)
    best: SpeedSchedule | None = None
    best_value: float = -math.inf
    ub: float = math.inf
    relaxation_bound: float | None = None
    ub_history: list[float] = field(default_factory=list)
    lb_history: list[float] = field(default_factory=list)
    records: list[CandidateRecord] = field(default_factory=list)

    @property
    def lb(self) -> float:
        return self.best_value

    def offer(self, schedule: SpeedSchedule, cert: Certificate) -> None:
        # strict improvement only: the first candidate found wins ties
        if cert.finite and cert.value is not None and cert.value > self.best_value:
            self.best = schedule
            self.best_value = cert.value


@dataclass
class IssaReport:
    best: SpeedSchedule | None
    certificate: float | None
    epsilon: float
    eta_bar: float
    iterations: int
    feasible_count: int
    infeasible_count: int
    upper_bound: float | None
    lower_bound: float | None
    termination: TerminationReason
    seconds: float
    records: list[CandidateRecord] = field(default_factory=list)
    ub_history: list[float] = field(default_factory=list)
    lb_history: list[float] = field(default_factory=list)
    regime: RegimeReport | None = None

    @property
    def gap(self) -> float | None:
        if self.upper_bound is None or self.lower_bound is None:
            return None
        return self.upper_bound - self.lower_bound

    @property
    def found(self) -> bool:
        return self.best is not None

    def to_dict(self) -> dict[str, Any]:
        return {
            "best_u": self.best.u.tolist() if self.best is not None else None,
            "certificate": self.certificate,
            "epsilon": self.epsilon,
            "eta_bar": self.eta_bar,
            "iterations": self.iterations,
            "feasible_candidates": self.feasible_count,
            "infeasible_candidates": self.infeasible_count,
            "upper_bound": self.upper_bound,
            "lower_bound": self.lower_bound,
            "gap": self.gap,
            "termination": self.termination.value,
            "regime": self.regime.regime.value if self.regime is not None else None,
            "regime_notes": list(self.regime.notes) if self.regime is not None else [],
        }


def _finite(value: float) -> float | None:
    return value if math.isfinite(value) else None


def _pool_candidates(inst: InstanceData, pool: CandidatePool | None) -> list[SpeedSchedule]:
    if pool is None:
        return []
    out: list[SpeedSchedule] = []
    starts = set(inst.block_starts())
    for sched in pool.schedules():
        if sched.u.shape != (inst.cfg.n, inst.cfg.horizon) or tuple(sched.gamma) != tuple(inst.cfg.gamma):
            logger.debug("Skipping pool candidate with shape %s", sched.u.shape)
            continue
        idx = sched.indices
        if any(t not in starts and (idx[:, t] != idx[:, t - 1]).any() for t in range(1, inst.cfg.horizon)):
            logger.debug("Skipping pool candidate that breaks the hold blocks")
            continue
        out.append(sched)
    return out


def neighbours(inst: InstanceData, schedule: SpeedSchedule) -> list[SpeedSchedule]:
    """Schedules one menu step away from ``schedule`` on a single hold block of a single edge."""
    levels = len(inst.cfg.gamma)
    starts = inst.block_starts()
    ends = [*starts[1:], inst.cfg.horizon]
    out: list[SpeedSchedule] = []
    for e in range(inst.cfg.n):
        for a, b in zip(starts, ends):
            for step in (1, -1):
                level = int(schedule.indices[e, a]) + step
                if 0 <= level < levels:
                    idx = schedule.indices.copy()
                    idx[e, a:b] = level
                    out.append(SpeedSchedule.from_indices(inst.cfg.gamma, idx))
    return out


def _mip_start(inst: InstanceData, state: IssaState) -> SpeedSchedule | None:
    """First neighbour of the best candidate that no cut excludes yet."""
    if state.best is None:
        return None
    return next((s for s in neighbours(inst, state.best) if s not in state.cuts), None)


def _record(state: IssaState, k: int, sched: SpeedSchedule, cert: Certificate, seconds: float, source: str) -> None:
    state.records.append(CandidateRecord(
        k=k,
        schedule=sched,
        feasible=cert.finite,
        objective=cert.value if cert.finite else None,
        upper_bound=_finite(state.ub),
        lower_bound=_finite(state.lb),
        seconds=seconds,
        source=source,
        reason=cert.reason,
    ))


def _evaluate_pool(
    inst: InstanceData,
    state: IssaState,
    pool: CandidatePool | None,
    method: str,
    threads: int,
) -> None:
    candidates = [s for s in _pool_candidates(inst, pool) if s not in state.cuts]
    if not candidates:
        return

    def evaluate(sched: SpeedSchedule) -> tuple[Certificate, float]:
        started = time.monotonic()
        return certificate(inst, sched, method), time.monotonic() - started

    results = parallel_map(evaluate, candidates, threads)
    for sched, (cert, seconds) in zip(candidates, results):
        if not state.cuts.add(sched):
            continue
        state.offer(sched, cert)
        _record(state, 0, sched, cert, seconds, "pool")
    logger.info("Pool pre-evaluation: %d candidates, LB %s", len(candidates), format_float(state.lb))


def run(
    inst: InstanceData,
    budget_s: float | None = 60.0,
    gap_tol: float = 0.0,
    pool: CandidatePool | None = None,
    method: str = "greedy",
    threads: int = 1,
    milp_gap: float = 1e-9,
    regime: RegimeReport | None = None,
) -> IssaReport:
    """Search the schedule space until the bounds meet, the relaxation runs dry or the budget ends."""
    started = time.monotonic()
    deadline = None if budget_s is None else started + budget_s
    floor = sufficient_eta_bar(inst.cfg)
    if inst.eta_bar < floor:
        logger.info("Raising eta_bar from %.6g to the sufficient level %.6g", inst.eta_bar, floor)
        inst = inst.with_eta_bar(floor)

    state = IssaState()
    _evaluate_pool(inst, state, pool, method, threads)
    termination = TerminationReason.BUDGET
    while True:
        if deadline is not None and time.monotonic() >= deadline:
            termination = TerminationReason.BUDGET
            logger.warning("Search budget of %.3g s exhausted after %d iterations", budget_s, state.k)
            break
        state.k += 1
        k = state.k
        iter_start = time.monotonic()
        ubp = build_ubp(inst, state.cuts)
        start = _mip_start(inst, state)
        if start is not None:
            ubp.milp.start = start_values(ubp.index, start)
        sol = solve_milp(ubp.milp, gap_tol=milp_gap, deadline=deadline, bound_hint=state.relaxation_bound)
        if sol.status == SolveStatus.INFEASIBLE:
            termination = TerminationReason.UBP_INFEASIBLE
            state.ub = state.lb
            logger.info("k=%d: relaxation infeasible; every remaining candidate is excluded", k)
            break
        if sol.status == SolveStatus.BUDGET_NO_INCUMBENT:
            termination = TerminationReason.BUDGET
            if sol.bound is not None:
                state.ub = min(state.ub, max(sol.bound, state.lb))
            logger.warning("k=%d: budget exhausted inside the relaxation", k)
            break
        if not sol.has_solution or sol.x is None or sol.bound is None:
            termination = TerminationReason.NUMERICAL
            logger.warning("k=%d: relaxation returned %s (%s)", k, sol.status.value, sol.message)
            break
        state.relaxation_bound = sol.bound
        sched = SpeedSchedule.from_binary(inst.cfg.gamma, x_values(ubp.index, sol.x))
        if not state.cuts.add(sched):
            termination = TerminationReason.NUMERICAL
            logger.warning("k=%d: relaxation returned an examined candidate", k)
            break
        cert = certificate(inst, sched, method)
        state.offer(sched, cert)
        state.ub = min(state.ub, max(sol.bound, state.lb))
        state.ub_history.append(state.ub)
        state.lb_history.append(state.lb)
        _record(state, k, sched, cert, time.monotonic() - iter_start, "ubp")
        logger.info(
            "k=%d UB=%s obj=%s LB=%s", k, format_float(state.ub),
            format_float(cert.value) if cert.value is not None else "infeasible", format_float(state.lb),
        )
        if sol.status == SolveStatus.BUDGET_INCUMBENT:
            termination = TerminationReason.BUDGET
            break
        if math.isfinite(state.lb) and state.ub - state.lb <= gap_tol + _GAP_SLACK * max(1.0, abs(state.lb)):
            termination = TerminationReason.GAP_CLOSED
            break

    feasible = sum(1 for r in state.records if r.feasible)
    report = IssaReport(
        best=state.best,
        certificate=_finite(state.lb),
        epsilon=inst.epsilon,
        eta_bar=inst.eta_bar,
        iterations=state.k,
        feasible_count=feasible,
        infeasible_count=len(state.records) - feasible,
        upper_bound=_finite(state.ub),
        lower_bound=_finite(state.lb),
        termination=termination,
        seconds=time.monotonic() - started,
        records=state.records,
        ub_history=state.ub_history,
        lb_history=state.lb_history,
        regime=regime,
    )
    logger.info("Search finished (%s): %d feasible / %d infeasible candidates, LB %s, UB %s",
                termination.value, feasible, report.infeasible_count,
                format_float(state.lb), format_float(state.ub))
    return report


def export_iterations_csv(path: str | Path, report: IssaReport) -> Path:
    """Columns (k, UB_k, obj_k, LB_k, feasible, seconds); pool candidates carry k = 0."""
    rows: list[list[str]] = []
    for r in report.records:
        rows.append([
            str(r.k),
            format_float(r.upper_bound) if r.upper_bound is not None else "",
            format_float(r.objective) if r.objective is not None else "",
            format_float(r.lower_bound) if r.lower_bound is not None else "",
            "1" if r.feasible else "0",
            format_float(r.seconds),
        ])
    return write_csv(path, ["k", "ub", "obj", "lb", "feasible", "seconds"], rows)
