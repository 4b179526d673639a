"""Planner propagation, the saturating CTM plant, and the average-flow objective."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from vsl_dro.core.errors import SampleFormatError
from vsl_dro.core.models import DensityTrajectory, HighwayConfig, ScenarioSample, SpeedSchedule, Violation
from vsl_dro.highway.fundamental import active_config, critical_densities
from vsl_dro.reports.writers import format_float, write_csv

logger = logging.getLogger(__name__)

_TOL = 1e-9


@dataclass
class PlantRollout:
    """Plant densities (n, T+1), realized outflows (n, T) and congestion flags."""

    rho: np.ndarray
    flows: np.ndarray
    congested: bool
    congested_entries: int


def _check_dims(cfg: HighwayConfig, schedule: SpeedSchedule, sample: ScenarioSample) -> None:
    if schedule.n != cfg.n:
        raise SampleFormatError("schedule edge count", field="u", expected=cfg.n, actual=schedule.n)
    if schedule.horizon != cfg.horizon:
        raise SampleFormatError("schedule horizon", field="u", expected=cfg.horizon, actual=schedule.horizon)
    if sample.n != cfg.n:
        raise SampleFormatError("sample edge count", field="rho0", expected=cfg.n, actual=sample.n)
    if sample.horizon != cfg.horizon:
        raise SampleFormatError("sample horizon", field="omega", expected=cfg.horizon, actual=sample.horizon)


def junction_ratio(sample: ScenarioSample) -> np.ndarray:
    """(1 - r_out of the predecessor) / (1 - r_in of the edge), shape (n-1, T)."""
    return (1.0 - sample.r_out[:-1]) / (1.0 - sample.r_in[1:])


def _first_violation(cfg: HighwayConfig, rho: np.ndarray, demand: np.ndarray, t: int) -> Violation | None:
    supply_slope = cfg.tau * cfg.u_free
    for e in range(cfg.n):
        rj = cfg.rho_jam[e]
        if rho[e] < -_TOL * max(1.0, rj):
            return Violation(edge=e + 1, t=t, constraint="negative")
        if rho[e] > rj * (1 + _TOL):
            return Violation(edge=e + 1, t=t, constraint="jam")
        if e == 0:
            continue
        d = demand[e]
        if d > cfg.f_cap[e] * (1 + _TOL):
            return Violation(edge=e + 1, t=t, constraint="capacity")
        if d > supply_slope[e] * (rj - rho[e]) + _TOL * max(1.0, cfg.f_cap[e]):
            return Violation(edge=e + 1, t=t, constraint="supply")
    return None


def propagate(cfg: HighwayConfig, schedule: SpeedSchedule, sample: ScenarioSample) -> DensityTrajectory:
    """Planner trajectory of one sample under ``schedule`` (linear dynamics, no clamping).

    Admissibility (nonnegative, at most jam density, junction demand within
    downstream capacity and space) is checked for slots 0..T-1; propagation
    runs to the end even after the first violation.
    """
    _check_dims(cfg, schedule, sample)
    n, horizon = cfg.n, cfg.horizon
    h = cfg.h
    u = schedule.u
    ratio = junction_ratio(sample)
    rho = np.empty((n, horizon + 1))
    rho[:, 0] = sample.rho0
    violation: Violation | None = None
    inflow = np.empty(n)
    for t in range(horizon):
        current = rho[:, t]
        out = u[:, t] * current
        inflow[0] = sample.omega[t]
        inflow[1:] = ratio[:, t] * out[:-1]
        if violation is None:
            violation = _first_violation(cfg, current, inflow, t)
        rho[:, t + 1] = current + h * (inflow - out)
    if violation is not None:
        logger.debug("Trajectory inadmissible: edge %d, t=%d (%s)", violation.edge, violation.t, violation.constraint)
    return DensityTrajectory(rho=rho, admissible=violation is None, first_violation=violation)


def plant_fluxes(
    cfg: HighwayConfig,
    u_now: np.ndarray,
    state: np.ndarray,
    omega: float,
    r_in: np.ndarray,
    r_out: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Inflow and realized outflow per edge for one saturating step."""
    demand = u_now * np.minimum(state, critical_densities(cfg, u_now))
    supply = np.minimum(cfg.f_cap, cfg.tau * cfg.u_free * np.maximum(cfg.rho_jam - state, 0.0))
    inflow = np.empty(cfg.n)
    outflow = demand.copy()
    inflow[0] = min(omega, supply[0])
    for e in range(1, cfg.n):
        k = (1.0 - r_out[e - 1]) / (1.0 - r_in[e])
        sent = k * demand[e - 1]
        if sent <= supply[e]:
            inflow[e] = sent
        else:
            inflow[e] = supply[e]
            outflow[e - 1] = supply[e] / k
    return inflow, outflow


def plant_step(
    cfg: HighwayConfig,
    u_now: np.ndarray,
    state: np.ndarray,
    omega: float,
    r_in: np.ndarray,
    r_out: np.ndarray,
) -> np.ndarray:
    """One saturating CTM step; the result is clamped to [0, rho_jam]."""
    u_now = np.asarray(u_now, dtype=float)
    state = np.asarray(state, dtype=float)
    inflow, outflow = plant_fluxes(cfg, u_now, state, omega, np.asarray(r_in), np.asarray(r_out))
    return np.clip(state + cfg.h * (inflow - outflow), 0.0, cfg.rho_jam)


def simulate_plant(
    cfg: HighwayConfig,
    schedule: SpeedSchedule,
    sample: ScenarioSample,
    start_slot: int = 0,
) -> PlantRollout:
    """Roll the plant over the horizon, applying events by absolute slot."""
    _check_dims(cfg, schedule, sample)
    n, horizon = cfg.n, cfg.horizon
    rho = np.empty((n, horizon + 1))
    rho[:, 0] = np.clip(sample.rho0, 0.0, cfg.rho_jam)
    flows = np.empty((n, horizon))
    congested_entries = 0
    for t in range(horizon):
        slot_cfg = active_config(cfg, start_slot + t)
        u_now = schedule.u[:, t]
        state = np.minimum(rho[:, t], slot_cfg.rho_jam)
        congested_entries += int(np.sum(state > critical_densities(slot_cfg, u_now) * (1 + _TOL)))
        inflow, outflow = plant_fluxes(slot_cfg, u_now, state, sample.omega[t], sample.r_in[:, t], sample.r_out[:, t])
        flows[:, t] = outflow
        rho[:, t + 1] = np.clip(state + slot_cfg.h * (inflow - outflow), 0.0, slot_cfg.rho_jam)
    return PlantRollout(rho=rho, flows=flows, congested=congested_entries > 0, congested_entries=congested_entries)


def average_flow(schedule: SpeedSchedule, traj: DensityTrajectory | np.ndarray) -> float:
    """H(u; rho) = (1/T) * sum over edges and t = 0..T-1 of rho * u."""
    rho = traj.rho if isinstance(traj, DensityTrajectory) else np.asarray(traj)
    horizon = schedule.horizon
    if rho.shape[0] != schedule.n or rho.shape[1] < horizon:
        raise SampleFormatError("trajectory shape does not match the schedule", field="rho")
    return float(np.sum(rho[:, :horizon] * schedule.u) / horizon)


def export_trajectories_csv(
    path: str | Path,
    cfg: HighwayConfig,
    schedule: SpeedSchedule,
    trajs: list[DensityTrajectory],
) -> Path:
    """Columns (sample, edge, t, rho, u, rho_crit) over the planning slots."""
    crit = critical_densities(cfg, schedule.u)
    rows: list[list[str]] = []
    for i, traj in enumerate(trajs):
        for e in range(cfg.n):
            for t in range(cfg.horizon):
                rows.append([
                    str(i), str(e + 1), str(t),
                    format_float(traj.rho[e, t]), format_float(schedule.u[e, t]), format_float(crit[e, t]),
                ])
    return write_csv(path, ["sample", "edge", "t", "rho", "u", "rho_crit"], rows)
