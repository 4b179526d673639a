"""Side-by-side run of the integer solution search and the cone analysis tool."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

from vsl_dro.dro.certificate import certificate
from vsl_dro.formulation.instance import InstanceData
from vsl_dro.issa.pool import CandidatePool
from vsl_dro.issa.search import IssaReport, run
from vsl_dro.misocp.p5 import LevelGrid, P5Report, build_p5, solve_p5

logger = logging.getLogger(__name__)


@dataclass
class ComparisonReport:
    issa: IssaReport
    p5: P5Report
    p5_feasible: int
    p5_infeasible: int
    p5_certificate: float | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "issa": {
                "feasible_candidates": self.issa.feasible_count,
                "infeasible_candidates": self.issa.infeasible_count,
                "lower_bound": self.issa.lower_bound,
                "upper_bound": self.issa.upper_bound,
                "seconds": self.issa.seconds,
                "termination": self.issa.termination.value,
            },
            "p5": {
                "feasible_candidates": self.p5_feasible,
                "infeasible_candidates": self.p5_infeasible,
                "lower_bound": self.p5.certified_objective,
                "upper_bound": self.p5.bound,
                "certificate": self.p5_certificate,
                **self.p5.to_dict(),
            },
        }


def compare_approaches(
    inst: InstanceData,
    budget_s: float,
    grid: LevelGrid | int = 5,
    pool: CandidatePool | None = None,
    threads: int = 1,
) -> ComparisonReport:
    """Same instance, same budget for both approaches."""
    issa_report = run(inst, budget_s=budget_s, gap_tol=0.0, pool=pool, threads=threads)
    p5_inst = inst.with_eta_bar(issa_report.eta_bar)
    p5_report = solve_p5(build_p5(p5_inst, grid), budget_s=budget_s)
    feasible = 0
    for sched in p5_report.examined:
        if certificate(p5_inst, sched).finite:
            feasible += 1
    p5_cert = None
    if p5_report.schedule is not None:
        cert = certificate(p5_inst, p5_report.schedule)
        p5_cert = cert.value if cert.finite else None
    logger.info("Comparison: search LB %s / UB %s, cone tool %s / %s",
                issa_report.lower_bound, issa_report.upper_bound, p5_report.certified_objective, p5_report.bound)
    return ComparisonReport(
        issa=issa_report,
        p5=p5_report,
        p5_feasible=feasible,
        p5_infeasible=len(p5_report.examined) - feasible,
        p5_certificate=p5_cert,
    )
