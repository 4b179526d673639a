"""Fundamental-diagram quantities that depend on the speed limit."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from vsl_dro.core.errors import HighwayConfigError
from vsl_dro.core.models import EdgeParams, HighwayConfig


@dataclass(frozen=True)
class StabilityViolation:
    edge: int
    h: float
    limit: float  # 1 / gamma_max


@dataclass
class StabilityReport:
    violations: list[StabilityViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def tau(edge: EdgeParams) -> float:
    """Backward-wave ratio f_cap / (u_free * rho_jam - f_cap)."""
    denom = edge.u_free * edge.rho_jam - edge.f_cap
    if denom <= 0:
        raise HighwayConfigError(f"edge {edge.id}: u_free * rho_jam must exceed f_cap")
    return edge.f_cap / denom


def critical_density(edge: EdgeParams, u: float) -> float:
    """Density at which the flow peaks under speed limit ``u``."""
    if u <= 0:
        raise ValueError(f"speed must be positive, got {u}")
    t = tau(edge)
    return t * edge.rho_jam * edge.u_free / (t * edge.u_free + u)


def fd_flow(edge: EdgeParams, rho: float, u: float) -> float:
    """Piecewise-linear fundamental diagram under speed limit ``u``."""
    if not 0.0 <= rho <= edge.rho_jam:
        raise ValueError(f"edge {edge.id}: density {rho} outside [0, {edge.rho_jam}]")
    if not 0.0 < u <= edge.u_free:
        raise ValueError(f"edge {edge.id}: speed {u} outside (0, {edge.u_free}]")
    if rho <= critical_density(edge, u):
        return u * rho
    return tau(edge) * edge.u_free * (edge.rho_jam - rho)


def critical_densities(cfg: HighwayConfig, u: np.ndarray) -> np.ndarray:
    """Vectorized critical density for a speed array whose first axis is the edge."""
    u = np.asarray(u, dtype=float)
    shape = (-1,) + (1,) * (u.ndim - 1)
    t = cfg.tau.reshape(shape)
    rj = cfg.rho_jam.reshape(shape)
    uf = cfg.u_free.reshape(shape)
    return t * rj * uf / (t * uf + u)


def check_stability(cfg: HighwayConfig) -> StabilityReport:
    """Report every edge whose delta / length exceeds 1 / gamma_max."""
    limit = 1.0 / cfg.gamma[-1]
    report = StabilityReport()
    for edge, h in zip(cfg.edges, cfg.h):
        if h > limit * (1 + 1e-12):
            report.violations.append(StabilityViolation(edge=edge.id, h=float(h), limit=limit))
    return report


def active_config(cfg: HighwayConfig, slot: int) -> HighwayConfig:
    """Configuration with every event active at absolute ``slot`` applied."""
    active = [ev for ev in cfg.events if ev.active(slot)]
    if not active:
        return cfg
    edges = list(cfg.edges)
    for ev in active:
        e = edges[ev.edge - 1]
        edges[ev.edge - 1] = dataclasses.replace(
            e,
            f_cap=ev.f_cap if ev.f_cap is not None else e.f_cap * ev.cap_factor,
            rho_jam=ev.rho_jam if ev.rho_jam is not None else e.rho_jam * ev.jam_factor,
            u_free=ev.u_free if ev.u_free is not None else e.u_free,
        )
    return dataclasses.replace(cfg, edges=tuple(edges))


def planning_config(cfg: HighwayConfig, slot: int = 0) -> HighwayConfig:
    """Events active at ``slot`` frozen into the edges for a whole planning horizon."""
    if not cfg.events:
        return cfg
    return dataclasses.replace(active_config(cfg, slot), events=())


def max_critical_density(cfg: HighwayConfig) -> np.ndarray:
    """Per-edge critical density under the slowest menu speed."""
    return critical_densities(cfg, np.full(cfg.n, cfg.gamma[0]))


def sufficient_eta_bar(cfg: HighwayConfig) -> float:
    """Level of eta_bar that never binds in the fixed-candidate problem."""
    return cfg.gamma[-1] / (cfg.horizon * float(cfg.f_cap.min()))
