"""Terminal summaries of search, validation and closed-loop results."""
from __future__ import annotations

from typing import TYPE_CHECKING

from vsl_dro.reports.writers import format_float

if TYPE_CHECKING:
    from vsl_dro.issa.search import IssaReport
    from vsl_dro.misocp.compare import ComparisonReport
    from vsl_dro.mpc.driver import MpcTrace
    from vsl_dro.validate.montecarlo import GuaranteeReport, ScheduleComparison


def _num(value: float | None) -> str:
    return "-" if value is None else format_float(value)


def _speeds(u: list[float]) -> str:
    return "[" + ", ".join(f"{v:g}" for v in u) + "]"


def format_issa_report(report: IssaReport) -> str:
    """Format one search result for terminal display."""
    lines = [
        f"Search: {report.termination.value} after {report.iterations} iterations ({report.seconds:.2f} s)",
        f"  Candidates: {report.feasible_count} feasible / {report.infeasible_count} infeasible",
        f"  LB: {_num(report.lower_bound)} | UB: {_num(report.upper_bound)} | gap: {_num(report.gap)}",
        f"  epsilon: {format_float(report.epsilon)} | eta_bar: {format_float(report.eta_bar)}",
    ]
    if report.regime is not None:
        lines.append(f"  Regime: {report.regime.regime.value}")
        for note in report.regime.notes:
            lines.append(f"    - {note}")
    if report.best is None:
        lines.append("  No certified schedule.")
        return "\n".join(lines)
    lines.append(f"  Certificate J(u): {_num(report.certificate)} veh/h")
    u = report.best.u
    if (u == u[:, :1]).all():
        lines.append(f"  Speeds per edge: {_speeds(u[:, 0].tolist())} km/h")
    else:
        lines.append("  Speeds (edge x slot):")
        for e, row in enumerate(u, start=1):
            lines.append(f"    edge {e}: {_speeds(row.tolist())}")
    return "\n".join(lines)


def format_guarantee_report(report: GuaranteeReport) -> str:
    status = "PASS" if report.passed else "FAIL"
    lines = [
        f"Guarantee: {status} | rate {report.rate:.3f} over {report.claims} of {report.count} replications",
        f"  Target: {1.0 - report.beta:.3f} (binomial slack {report.slack:.3f})"
        f" | epsilon: {format_float(report.epsilon)}",
    ]
    if report.no_claim_count:
        lines.append(f"  Replications without a certified schedule (no claim): {report.no_claim_count}")
    return "\n".join(lines)


def format_schedule_comparison(comparison: ScheduleComparison) -> str:
    lines = [f"Paired rollouts: {comparison.dro_stats.flows.size}"]
    for label, st in (("DRO", comparison.dro_stats), ("SAA", comparison.saa_stats)):
        lines.append(
            f"  {label}: mean flow {format_float(st.mean_flow)} veh/h | congestion rate {st.congestion_rate:.3f}"
        )
    return "\n".join(lines)


def format_mpc_trace(trace: MpcTrace) -> str:
    summary = trace.to_dict()
    lines = [
        f"Closed loop: {trace.steps} slots, {len(trace.solve_slots)} solves",
        f"  Fallback slots: {summary['fallback_slots']} | congested slots: {summary['congested_slots']}",
        f"  Mean total outflow: {format_float(summary['mean_flow'])} veh/h",
    ]
    return "\n".join(lines)


def format_comparison(report: ComparisonReport) -> str:
    issa, p5 = report.issa, report.p5
    lines = [
        "Decomposition vs. cone relaxation (same budget):",
        f"  {'':10s} {'feasible':>9s} {'infeasible':>11s} {'LB':>15s} {'UB':>15s}",
        f"  {'search':10s} {issa.feasible_count:9d} {issa.infeasible_count:11d} "
        f"{_num(issa.lower_bound):>15s} {_num(issa.upper_bound):>15s}",
        f"  {'cone':10s} {report.p5_feasible:9d} {report.p5_infeasible:11d} "
        f"{_num(report.p5_certificate):>15s} {_num(p5.bound):>15s}",
        f"  cone status: {p5.status.value} | cuts: {p5.cuts} | rounds: {p5.rounds}",
    ]
    return "\n".join(lines)
