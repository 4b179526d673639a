"""Receding-horizon speed-limit control against the saturating plant."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from vsl_dro.core.models import HighwayConfig, SampleSpec, SpeedSchedule
from vsl_dro.formulation.instance import InstanceData
from vsl_dro.highway.fundamental import active_config, critical_densities, planning_config, sufficient_eta_bar
from vsl_dro.issa.pool import CandidatePool, update_pool
from vsl_dro.issa.search import IssaReport, run
from vsl_dro.reports.writers import format_float, write_csv
from vsl_dro.scenario.generator import generate_samples
from vsl_dro.traffic.ctm import plant_fluxes, propagate

logger = logging.getLogger(__name__)

RADIUS_MODES = ("given", "formula", "tuned")


@dataclass
class MpcConfig:
    """Closed-loop settings; ``epsilon`` is the radius already resolved for ``radius_mode``."""

    steps: int
    fallback: tuple[float, ...]
    epsilon: float
    n_samples: int = 3
    replan_every: int = 1
    budget_s: float = 60.0
    gap_tol: float = 0.0
    hold_slots: int = 1
    radius_mode: str = "given"
    eta_bar: float | None = None
    pool_capacity: int = 32
    threads: int = 1

    def validate(self, cfg: HighwayConfig) -> None:
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if not 1 <= self.replan_every <= cfg.horizon:
            raise ValueError(f"replan_every must lie in 1..{cfg.horizon}, got {self.replan_every}")
        if len(self.fallback) != cfg.n:
            raise ValueError(f"fallback needs one speed per edge ({cfg.n}), got {len(self.fallback)}")
        menu = set(cfg.gamma)
        bad = [u for u in self.fallback if u not in menu]
        if bad:
            raise ValueError(f"fallback speeds {bad} are not in the menu {list(cfg.gamma)}")
        if self.radius_mode not in RADIUS_MODES:
            raise ValueError(f"unknown radius mode {self.radius_mode!r}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")


@dataclass
class MpcTrace:
    """Closed-loop record; ``u`` and ``flows`` are (n, steps), ``rho`` is (n, steps + 1)."""

    u: np.ndarray
    rho: np.ndarray
    flows: np.ndarray
    fallback: np.ndarray
    congested: np.ndarray
    solve_slots: list[int] = field(default_factory=list)
    reports: list[IssaReport] = field(default_factory=list)
    planned: list[np.ndarray] = field(default_factory=list)
    certificates: list[float | None] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return int(self.u.shape[1])

    def to_dict(self) -> dict[str, Any]:
        return {
            "steps": self.steps,
            "fallback_slots": int(self.fallback.sum()),
            "congested_slots": int(self.congested.any(axis=0).sum()),
            "mean_flow": float(self.flows.sum(axis=0).mean()) if self.steps else 0.0,
            "solves": [
                {"slot": s, "certificate": c, **r.to_dict()}
                for s, c, r in zip(self.solve_slots, self.certificates, self.reports)
            ],
        }


def run_mpc(
    cfg: HighwayConfig,
    mpc_cfg: MpcConfig,
    training_spec: SampleSpec,
    plant_spec: SampleSpec,
    seed: int = 0,
    pool: CandidatePool | None = None,
    initial_state: np.ndarray | None = None,
) -> MpcTrace:
    """Replan every ``replan_every`` slots with samples anchored at the measured plant state.

    Each plan applies its first ``replan_every`` columns to the plant with a
    fresh disturbance draw; when no candidate is certified the fallback
    schedule is applied instead.
    """
    mpc_cfg.validate(cfg)
    train_seq, plant_seq = np.random.SeedSequence(seed).spawn(2)
    train_rng = np.random.default_rng(train_seq)
    plant_rng = np.random.default_rng(plant_seq)
    n, steps = cfg.n, mpc_cfg.steps
    pool = pool if pool is not None else CandidatePool(gamma=tuple(cfg.gamma), capacity=mpc_cfg.pool_capacity)
    fallback_sched = SpeedSchedule.constant(cfg.gamma, list(mpc_cfg.fallback), cfg.horizon)
    pool.add(fallback_sched)

    u = np.zeros((n, steps))
    rho = np.zeros((n, steps + 1))
    flows = np.zeros((n, steps))
    fallback = np.zeros(steps, dtype=bool)
    congested = np.zeros((n, steps), dtype=bool)
    if initial_state is None:
        initial_state = generate_samples(cfg, plant_spec, 1, rng=plant_rng)[0].rho0
    rho[:, 0] = np.clip(np.asarray(initial_state, dtype=float), 0.0, cfg.rho_jam)
    trace = MpcTrace(u=u, rho=rho, flows=flows, fallback=fallback, congested=congested)

    slot = 0
    while slot < steps:
        plan_cfg = planning_config(cfg, slot)
        state = np.minimum(rho[:, slot], plan_cfg.rho_jam)
        samples = [s.with_rho0(state) for s in
                   generate_samples(plan_cfg, training_spec, mpc_cfg.n_samples, rng=train_rng)]
        eta_bar = mpc_cfg.eta_bar if mpc_cfg.eta_bar is not None else sufficient_eta_bar(plan_cfg)
        inst = InstanceData(plan_cfg, samples, epsilon=mpc_cfg.epsilon, eta_bar=eta_bar,
                            hold_slots=mpc_cfg.hold_slots)
        report = run(inst, budget_s=mpc_cfg.budget_s, gap_tol=mpc_cfg.gap_tol, pool=pool, threads=mpc_cfg.threads)
        update_pool(pool, report)
        trace.solve_slots.append(slot)
        trace.reports.append(report)
        trace.certificates.append(report.certificate)
        if report.best is not None:
            schedule, used_fallback = report.best, False
            logger.info("Slot %d: certified schedule, J=%s", slot, format_float(report.certificate or 0.0))
        else:
            schedule, used_fallback = fallback_sched, True
            logger.warning("Slot %d: no certified candidate; applying the fallback schedule", slot)
        trace.planned.append(propagate(plan_cfg, schedule, samples[0]).rho)

        disturbance = generate_samples(plan_cfg, plant_spec, 1, rng=plant_rng)[0]
        for j in range(min(mpc_cfg.replan_every, steps - slot)):
            step_cfg = active_config(cfg, slot)
            u_now = schedule.u[:, j]
            now = np.minimum(rho[:, slot], step_cfg.rho_jam)
            inflow, outflow = plant_fluxes(step_cfg, u_now, now, float(disturbance.omega[j]),
                                           disturbance.r_in[:, j], disturbance.r_out[:, j])
            u[:, slot] = u_now
            flows[:, slot] = outflow
            fallback[slot] = used_fallback
            congested[:, slot] = now > critical_densities(step_cfg, u_now) * (1 + 1e-9)
            rho[:, slot + 1] = np.clip(now + step_cfg.h * (inflow - outflow), 0.0, step_cfg.rho_jam)
            slot += 1
    return trace


def export_trace_csv(path: str | Path, trace: MpcTrace) -> Path:
    """Columns (slot, edge, rho, u, flow, fallback)."""
    rows: list[list[str]] = []
    n = trace.u.shape[0]
    for t in range(trace.steps):
        for e in range(n):
            rows.append([
                str(t), str(e + 1), format_float(trace.rho[e, t]), format_float(trace.u[e, t]),
                format_float(trace.flows[e, t]), "1" if trace.fallback[t] else "0",
            ])
    return write_csv(path, ["slot", "edge", "rho", "u", "flow", "fallback"], rows)
