"""vsl-dro solve command: one search on the configured instance."""
from __future__ import annotations

import argparse
from pathlib import Path

from vsl_dro.cli.common import load_run_config, output_dir, prepare
from vsl_dro.config.convert import build_instance, build_pool
from vsl_dro.dro.certificate import propagate_all
from vsl_dro.dro.regime import diagnose_regime
from vsl_dro.formulation.problems import build_ubp
from vsl_dro.formulation.rows import CutSet
from vsl_dro.issa.pool import update_pool
from vsl_dro.issa.search import export_iterations_csv, run
from vsl_dro.reports.formatter import format_issa_report
from vsl_dro.reports.writers import write_json
from vsl_dro.solver.lpfile import write_lp_file
from vsl_dro.traffic.ctm import export_trajectories_csv


def cmd_solve(args: argparse.Namespace) -> int:
    cfg_run = load_run_config(args, {
        "algorithm.budget_s": args.budget,
        "algorithm.gap_tol": args.gap_tol,
        "algorithm.certificate_method": args.method,
        "pool.path": args.pool,
    })
    prepared = prepare(cfg_run)
    inst = build_instance(cfg_run, prepared.cfg, prepared.samples, prepared.epsilon)
    regime = diagnose_regime(inst)
    pool = build_pool(cfg_run, prepared.cfg)
    algo = cfg_run.algorithm
    report = run(inst, budget_s=algo.budget_s, gap_tol=algo.gap_tol, pool=pool, method=algo.certificate_method,
                 threads=cfg_run.threads, milp_gap=algo.milp_gap, regime=regime)
    update_pool(pool, report)
    if cfg_run.pool.path is not None:
        pool.save(Path(cfg_run.pool.path))

    out = output_dir(cfg_run)
    if args.dump_lp:
        ubp = build_ubp(inst.with_eta_bar(report.eta_bar), CutSet())
        write_lp_file(ubp.milp, out / "ubp.lp", title="vsl-dro upper-bounding problem")
    write_json(out / "report.json", {"radius_mode": cfg_run.radius.mode, "seed": cfg_run.seed,
                                     **report.to_dict()})
    export_iterations_csv(out / "iterations.csv", report)
    if report.best is not None:
        export_trajectories_csv(out / "trajectories.csv", inst.cfg, report.best,
                                propagate_all(inst, report.best))

    print(format_issa_report(report))
    return 0 if report.found else 1
