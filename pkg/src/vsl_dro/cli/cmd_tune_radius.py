"""vsl-dro tune-radius command: Monte Carlo radius selection."""
from __future__ import annotations

import argparse
import sys

from vsl_dro.cli.common import load_run_config, output_dir
from vsl_dro.config.convert import build_highway, build_sample_spec, tune_for
from vsl_dro.core.errors import RadiusTuningError
from vsl_dro.reports.writers import write_json


def cmd_tune_radius(args: argparse.Namespace) -> int:
    run = load_run_config(args, {"radius.trials": args.trials, "radius.beta": args.beta})
    cfg = build_highway(run)
    spec = build_sample_spec(run)
    try:
        result = tune_for(run, cfg, spec)
    except RadiusTuningError as exc:
        print(f"Tuning failed: {exc}", file=sys.stderr)
        return 1
    write_json(output_dir(run) / "radius.json", {**result.to_dict(), "beta": run.radius.beta})
    g = result.grid.index(result.epsilon)
    print(f"Tuned radius: {result.epsilon:.6g} (rate {result.rates[g]:.3f} over {result.claims[g]} claims)")
    return 0
