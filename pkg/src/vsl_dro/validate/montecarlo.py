"""Monte Carlo checks of the out-of-sample guarantee and the sample-average comparison."""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from scipy import stats

from vsl_dro.core.models import HighwayConfig, SampleSpec, ScenarioSample, SpeedSchedule
from vsl_dro.formulation.instance import InstanceData
from vsl_dro.highway.fundamental import critical_densities, sufficient_eta_bar
from vsl_dro.issa.pool import CandidatePool
from vsl_dro.issa.search import IssaReport, run
from vsl_dro.reports.writers import format_float, write_csv
from vsl_dro.scenario.generator import generate_samples, sample_streams, validation_rng
from vsl_dro.traffic.ctm import PlantRollout, average_flow, simulate_plant
from vsl_dro.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

SIGNIFICANCE = 0.05


@dataclass
class RolloutStats:
    """Plant rollouts of one schedule over shared validation draws."""

    flows: np.ndarray  # (N_val,)
    congested: np.ndarray  # (N_val,) bool
    mean_rho: np.ndarray  # (n, T+1)
    first_rho: np.ndarray  # (n, T+1), rollout 0

    @property
    def mean_flow(self) -> float:
        return float(self.flows.mean())

    @property
    def congestion_rate(self) -> float:
        return float(self.congested.mean())


def evaluate_schedule(
    cfg: HighwayConfig,
    schedule: SpeedSchedule,
    samples: list[ScenarioSample],
    threads: int = 1,
) -> RolloutStats:
    rollouts: list[PlantRollout] = parallel_map(lambda s: simulate_plant(cfg, schedule, s), samples, threads)
    rhos = np.stack([r.rho for r in rollouts])
    return RolloutStats(
        flows=np.asarray([average_flow(schedule, r.rho) for r in rollouts]),
        congested=np.asarray([r.congested for r in rollouts], dtype=bool),
        mean_rho=rhos.mean(axis=0),
        first_rho=rhos[0],
    )


def binomial_slack(trials: int, beta: float, significance: float = SIGNIFICANCE) -> float:
    """Shortfall below 1 - beta that a one-sided binomial test at ``significance`` still accepts."""
    if trials < 1:
        return 0.0
    lowest = stats.binom.ppf(significance, trials, 1.0 - beta)
    return max(0.0, (1.0 - beta) - float(lowest) / trials)


@dataclass
class ReplicationResult:
    index: int
    certificate: float | None
    u: list[list[float]] | None
    validation_mean: float | None
    congestion_rate: float | None

    @property
    def holds(self) -> bool | None:
        """None when the replication produced no certificate and so made no claim."""
        if self.certificate is None or self.validation_mean is None:
            return None
        return self.validation_mean >= self.certificate - 1e-9 * max(1.0, abs(self.certificate))


@dataclass
class GuaranteeReport:
    """Replications without a certificate are counted apart and left out of the rate."""

    beta: float
    epsilon: float
    replications: list[ReplicationResult] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.replications)

    @property
    def claims(self) -> int:
        return sum(1 for r in self.replications if r.holds is not None)

    @property
    def no_claim_count(self) -> int:
        return self.count - self.claims

    @property
    def rate(self) -> float:
        if not self.claims:
            return 0.0
        return sum(1 for r in self.replications if r.holds) / self.claims

    @property
    def slack(self) -> float:
        return binomial_slack(self.claims, self.beta)

    @property
    def passed(self) -> bool:
        return self.claims > 0 and self.rate >= 1.0 - self.beta - self.slack

    def to_dict(self) -> dict[str, Any]:
        return {
            "beta": self.beta,
            "epsilon": self.epsilon,
            "replications": self.count,
            "claims": self.claims,
            "no_claim_count": self.no_claim_count,
            "rate": self.rate,
            "binomial_slack": self.slack,
            "passed": self.passed,
            "per_replication": [
                {
                    "index": r.index,
                    "certificate": r.certificate,
                    "validation_mean": r.validation_mean,
                    "congestion_rate": r.congestion_rate,
                    "holds": r.holds,
                    "u": r.u,
                }
                for r in self.replications
            ],
        }


def validate_guarantee(
    cfg: HighwayConfig,
    spec: SampleSpec,
    beta: float,
    epsilon: float,
    replications: int,
    n_samples: int,
    n_val: int,
    seed: int,
    budget_s: float | None = 60.0,
    hold_slots: int = 1,
    eta_bar: float | None = None,
    threads: int = 1,
) -> GuaranteeReport:
    """Independent train/solve/validate replications, each on its own pair of streams."""
    if replications < 1:
        raise ValueError(f"replications must be >= 1, got {replications}")
    eta = eta_bar if eta_bar is not None else sufficient_eta_bar(cfg)
    streams = sample_streams(seed, 2 * replications)

    def replicate(r: int) -> ReplicationResult:
        train = generate_samples(cfg, spec, n_samples, rng=streams[2 * r])
        inst = InstanceData(cfg, train, epsilon=epsilon, eta_bar=eta, hold_slots=hold_slots)
        report = run(inst, budget_s=budget_s, gap_tol=0.0)
        if report.best is None:
            logger.warning("Replication %d: no feasible candidate", r)
            return ReplicationResult(r, None, None, None, None)
        val = generate_samples(cfg, spec, n_val, rng=streams[2 * r + 1])
        rollouts = evaluate_schedule(cfg, report.best, val)
        return ReplicationResult(r, report.certificate, report.best.u.tolist(), rollouts.mean_flow,
                                 rollouts.congestion_rate)

    results = parallel_map(replicate, list(range(replications)), threads)
    report = GuaranteeReport(beta=beta, epsilon=epsilon, replications=results)
    logger.info("Guarantee rate %.3f over %d claims of %d replications (target %.3f, slack %.3f): %s",
                report.rate, report.claims, report.count, 1.0 - beta, report.slack, "pass" if report.passed else "fail")
    return report


def sample_average_search(
    inst: InstanceData,
    budget_s: float | None = 60.0,
    pool: CandidatePool | None = None,
    threads: int = 1,
) -> IssaReport:
    """The same search with the radius term and lambda removed."""
    saa = dataclasses.replace(inst, include_radius=False)
    return run(saa, budget_s=budget_s, gap_tol=0.0, pool=pool, threads=threads)


def sample_average_control(
    inst: InstanceData,
    budget_s: float | None = 60.0,
    pool: CandidatePool | None = None,
    threads: int = 1,
) -> SpeedSchedule | None:
    return sample_average_search(inst, budget_s, pool, threads).best


@dataclass
class ScheduleComparison:
    """Paired rollouts of the robust and the sample-average schedules."""

    dro: SpeedSchedule
    saa: SpeedSchedule
    dro_stats: RolloutStats
    saa_stats: RolloutStats

    def to_dict(self) -> dict[str, Any]:
        return {
            "dro": {"u": self.dro.u.tolist(), "mean_flow": self.dro_stats.mean_flow,
                    "congestion_rate": self.dro_stats.congestion_rate},
            "saa": {"u": self.saa.u.tolist(), "mean_flow": self.saa_stats.mean_flow,
                    "congestion_rate": self.saa_stats.congestion_rate},
            "rollouts": int(self.dro_stats.flows.size),
        }


def compare_schedules(
    cfg: HighwayConfig,
    spec: SampleSpec,
    dro: SpeedSchedule,
    saa: SpeedSchedule,
    n_val: int,
    threads: int = 1,
) -> ScheduleComparison:
    """Both schedules are rolled out on the same validation draws."""
    samples = generate_samples(cfg, spec, n_val, rng=validation_rng(spec.seed))
    return ScheduleComparison(
        dro=dro,
        saa=saa,
        dro_stats=evaluate_schedule(cfg, dro, samples, threads),
        saa_stats=evaluate_schedule(cfg, saa, samples, threads),
    )


def export_rollouts_csv(path: str | Path, comparison: ScheduleComparison) -> Path:
    """Columns (rollout, schedule, flow, congested)."""
    rows: list[list[str]] = []
    for label, st in (("dro", comparison.dro_stats), ("saa", comparison.saa_stats)):
        for i, (flow, cong) in enumerate(zip(st.flows, st.congested)):
            rows.append([str(i), label, format_float(flow), "1" if cong else "0"])
    return write_csv(path, ["rollout", "schedule", "flow", "congested"], rows)


def export_mean_trajectory_csv(path: str | Path, cfg: HighwayConfig, comparison: ScheduleComparison) -> Path:
    """Columns (schedule, edge, t, mean_rho, rollout0_rho, u, rho_crit) over the planning slots."""
    rows: list[list[str]] = []
    for label, sched, st in (("dro", comparison.dro, comparison.dro_stats),
                             ("saa", comparison.saa, comparison.saa_stats)):
        crit = critical_densities(cfg, sched.u)
        for e in range(cfg.n):
            for t in range(cfg.horizon):
                rows.append([
                    label, str(e + 1), str(t), format_float(st.mean_rho[e, t]), format_float(st.first_rho[e, t]),
                    format_float(sched.u[e, t]), format_float(crit[e, t]),
                ])
    return write_csv(path, ["schedule", "edge", "t", "mean_rho", "rollout0_rho", "u", "rho_crit"], rows)
