"""vsl-dro analyze command: search and cone relaxation on the same instance."""
from __future__ import annotations

import argparse

from vsl_dro.cli.common import load_run_config, output_dir, prepare
from vsl_dro.config.convert import build_instance, build_pool
from vsl_dro.misocp.compare import compare_approaches
from vsl_dro.reports.formatter import format_comparison
from vsl_dro.reports.writers import write_json


def cmd_analyze(args: argparse.Namespace) -> int:
    run = load_run_config(args, {
        "analysis.grid_size": args.grid_size,
        "algorithm.budget_s": args.budget,
    })
    prepared = prepare(run)
    inst = build_instance(run, prepared.cfg, prepared.samples, prepared.epsilon)
    report = compare_approaches(inst, budget_s=run.algorithm.budget_s, grid=run.analysis.grid_size,
                                pool=build_pool(run, prepared.cfg), threads=run.threads)
    write_json(output_dir(run) / "p5_report.json", {"seed": run.seed, **report.to_dict()})
    print(format_comparison(report))
    if report.issa.best is None and report.p5_certificate is None:
        return 1
    return 0
