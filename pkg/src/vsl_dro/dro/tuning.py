"""Data-driven radius tuning: grow epsilon until the controller's certificate holds often enough."""
from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from vsl_dro.core.errors import RadiusTuningError
from vsl_dro.core.models import HighwayConfig, SampleSpec, SpeedSchedule
from vsl_dro.formulation.instance import InstanceData
from vsl_dro.highway.fundamental import sufficient_eta_bar
from vsl_dro.issa.search import run as run_search
from vsl_dro.scenario.generator import generate_samples, sample_streams, validation_rng
from vsl_dro.traffic.ctm import average_flow, simulate_plant
from vsl_dro.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

# (schedule, certificate) chosen from one training instance; (None, None) makes no claim
Controller = Callable[[InstanceData], tuple[SpeedSchedule | None, float | None]]


@dataclass
class TuningResult:
    """Per grid radius: replications that made a claim and the share of claims that held.

    ``rates[g]`` is None when no replication produced a certificate at ``grid[g]``.
    """

    epsilon: float
    grid: list[float]
    rates: list[float | None]
    claims: list[int]
    certificates: list[list[float | None]] = field(default_factory=list)  # [replication][grid point]
    truths: list[list[float | None]] = field(default_factory=list)

    def to_dict(self) -> dict[str, object]:
        return {
            "epsilon": self.epsilon,
            "grid": self.grid,
            "rates": self.rates,
            "claims": self.claims,
        }


def _holds(truth: float, value: float) -> bool:
    return truth >= value - 1e-9 * max(1.0, abs(value))


def radius_grid(lo: float, hi: float, points: int) -> list[float]:
    """Geometric grid from ``lo`` to ``hi`` inclusive."""
    if lo <= 0 or hi < lo or points < 1:
        raise ValueError(f"invalid radius grid ({lo}, {hi}, {points})")
    if points == 1:
        return [float(lo)]
    return [float(v) for v in np.geomspace(lo, hi, points)]


def true_flow(
    cfg: HighwayConfig,
    spec: SampleSpec,
    schedule: SpeedSchedule,
    n_val: int,
    threads: int = 1,
) -> float:
    """Mean plant flow of ``schedule`` over ``n_val`` validation draws."""
    samples = generate_samples(cfg, spec, n_val, rng=validation_rng(spec.seed))
    flows = parallel_map(lambda s: average_flow(schedule, simulate_plant(cfg, schedule, s).rho), samples, threads)
    return float(np.mean(flows))


def search_controller(budget_s: float | None = 10.0, method: str = "greedy") -> Controller:
    """The integer solution search with a per-solve budget, as a tuning controller."""

    def control(inst: InstanceData) -> tuple[SpeedSchedule | None, float | None]:
        report = run_search(inst, budget_s=budget_s, gap_tol=0.0, method=method)
        return report.best, report.certificate

    return control


def tune_radius(
    cfg: HighwayConfig,
    spec: SampleSpec,
    beta: float,
    trials: int,
    n_samples: int,
    grid: list[float],
    n_val: int = 1000,
    eta_bar: float | None = None,
    hold_slots: int = 1,
    threads: int = 1,
    controller: Controller | None = None,
) -> TuningResult:
    """Smallest grid radius at which the controller's certificate holds in >= 1 - beta of the claims.

    Every trial draws fresh training samples from its own stream and runs
    the controller once per grid radius. The truth of each returned
    schedule is its mean plant flow over shared validation draws. A trial
    without a certificate makes no claim and is left out of that radius's
    rate; a radius with no claims at all is never selected.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not grid:
        raise ValueError("radius grid is empty")
    grid = sorted(grid)
    control = controller if controller is not None else search_controller()
    eta = eta_bar if eta_bar is not None else sufficient_eta_bar(cfg)
    streams = sample_streams(spec.seed, trials)

    def replicate(rng: np.random.Generator) -> list[tuple[SpeedSchedule | None, float | None]]:
        samples = generate_samples(cfg, spec, n_samples, rng=rng)
        base = InstanceData(cfg, samples, epsilon=0.0, eta_bar=eta, hold_slots=hold_slots)
        return [control(base.with_epsilon(eps)) for eps in grid]

    outcomes = parallel_map(replicate, streams, threads)

    distinct: dict[tuple[int, ...], SpeedSchedule] = {}
    for row in outcomes:
        for sched, value in row:
            if sched is not None and value is not None:
                distinct.setdefault(sched.key(), sched)
    keys = list(distinct)
    flows = parallel_map(lambda k: true_flow(cfg, spec, distinct[k], n_val), keys, threads)
    truth_of = dict(zip(keys, flows))

    certificates: list[list[float | None]] = []
    truths: list[list[float | None]] = []
    for row in outcomes:
        certificates.append([value if sched is not None else None for sched, value in row])
        truths.append([
            truth_of[sched.key()] if sched is not None and value is not None else None for sched, value in row
        ])

    rates: list[float | None] = []
    claims: list[int] = []
    for g in range(len(grid)):
        pairs: list[tuple[float, float]] = []
        for t_row, c_row in zip(truths, certificates):
            t, c = t_row[g], c_row[g]
            if t is not None and c is not None:
                pairs.append((t, c))
        claims.append(len(pairs))
        rates.append(sum(1 for t, c in pairs if _holds(t, c)) / len(pairs) if pairs else None)
    logger.info("Radius tuning rates: %s",
                ", ".join("-" if r is None else f"{r:.3f}" for r in rates))
    for eps, rate, n_claims in zip(grid, rates, claims):
        if rate is not None and rate >= 1.0 - beta:
            logger.info("Tuned radius %.6g (rate %.3f over %d claims >= %.3f)", eps, rate, n_claims, 1.0 - beta)
            return TuningResult(epsilon=eps, grid=grid, rates=rates, claims=claims,
                                certificates=certificates, truths=truths)
    best = max((r for r in rates if r is not None), default=None)
    raise RadiusTuningError(
        f"no radius in [{grid[0]:.6g}, {grid[-1]:.6g}] reached rate {1.0 - beta:.3f} "
        f"(best {'none' if best is None else f'{best:.3f}'})"
    )
