"""vsl-dro mpc command: receding-horizon loop against the plant."""
from __future__ import annotations

import argparse
from pathlib import Path

from vsl_dro.cli.common import load_run_config, output_dir
from vsl_dro.config.convert import build_highway, build_mpc_config, build_pool, build_sample_spec, resolve_epsilon
from vsl_dro.mpc.driver import export_trace_csv, run_mpc
from vsl_dro.reports.formatter import format_mpc_trace
from vsl_dro.reports.writers import write_json


def cmd_mpc(args: argparse.Namespace) -> int:
    run = load_run_config(args, {
        "mpc.steps": args.steps,
        "mpc.replan_every": args.replan_every,
        "algorithm.budget_s": args.budget,
    })
    cfg = build_highway(run)
    spec = build_sample_spec(run)
    n_samples = run.mpc.n_samples if run.mpc.n_samples is not None else run.samples.count
    epsilon = resolve_epsilon(run, cfg, spec, n_samples)
    mpc_cfg = build_mpc_config(run, cfg, epsilon)
    pool = build_pool(run, cfg)

    trace = run_mpc(cfg, mpc_cfg, training_spec=spec, plant_spec=spec, seed=run.seed, pool=pool)
    if run.pool.path is not None:
        pool.save(Path(run.pool.path))

    out = output_dir(run)
    export_trace_csv(out / "trace.csv", trace)
    write_json(out / "report.json", {"radius_mode": run.radius.mode, "epsilon": epsilon, "seed": run.seed,
                                     **trace.to_dict()})
    print(format_mpc_trace(trace))
    return 0
