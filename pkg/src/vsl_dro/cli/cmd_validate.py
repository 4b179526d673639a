"""vsl-dro validate command: Monte Carlo guarantee check and sample-average comparison."""
from __future__ import annotations

import argparse
import logging

from vsl_dro.cli.common import load_run_config, output_dir, prepare
from vsl_dro.config.convert import build_instance, eta_bar_for
from vsl_dro.issa.search import run as run_search
from vsl_dro.reports.formatter import format_guarantee_report, format_schedule_comparison
from vsl_dro.reports.writers import write_json
from vsl_dro.validate.montecarlo import (
    compare_schedules,
    export_mean_trajectory_csv,
    export_rollouts_csv,
    sample_average_search,
    validate_guarantee,
)

logger = logging.getLogger(__name__)


def cmd_validate(args: argparse.Namespace) -> int:
    run = load_run_config(args, {
        "validation.replications": args.replications,
        "validation.n_val": args.n_val,
        "algorithm.budget_s": args.budget,
    })
    prepared = prepare(run)
    cfg, spec = prepared.cfg, prepared.spec
    algo, val = run.algorithm, run.validation

    report = validate_guarantee(
        cfg, spec, beta=run.radius.beta, epsilon=prepared.epsilon, replications=val.replications,
        n_samples=len(prepared.samples), n_val=val.n_val, seed=run.seed, budget_s=algo.budget_s,
        hold_slots=algo.hold_slots, eta_bar=eta_bar_for(run, cfg), threads=run.threads,
    )
    out = output_dir(run)
    write_json(out / "guarantee.json", {"seed": run.seed, "radius_mode": run.radius.mode, **report.to_dict()})
    print(format_guarantee_report(report))

    if args.compare:
        inst = build_instance(run, cfg, prepared.samples, prepared.epsilon)
        dro = run_search(inst, budget_s=algo.budget_s, gap_tol=algo.gap_tol, threads=run.threads)
        saa = sample_average_search(inst, budget_s=algo.budget_s, threads=run.threads)
        if dro.best is None or saa.best is None:
            logger.warning("Comparison skipped: %s schedule has no certificate",
                           "robust" if dro.best is None else "sample-average")
        else:
            comparison = compare_schedules(cfg, spec, dro.best, saa.best, val.n_val, run.threads)
            export_rollouts_csv(out / "rollouts.csv", comparison)
            export_mean_trajectory_csv(out / "mean_trajectory.csv", cfg, comparison)
            write_json(out / "comparison.json", comparison.to_dict())
            print(format_schedule_comparison(comparison))

    if report.claims == 0:
        return 1
    return 0
