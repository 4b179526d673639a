"""vsl-dro gen-samples command: draw training samples to JSON and CSV."""
from __future__ import annotations

import argparse
from pathlib import Path

from vsl_dro.cli.common import load_run_config, output_dir
from vsl_dro.config.convert import build_highway, build_sample_spec
from vsl_dro.core.errors import ConfigError, SampleFormatError
from vsl_dro.scenario.generator import generate_samples
from vsl_dro.scenario.io import export_samples_csv, save_samples


def cmd_gen_samples(args: argparse.Namespace) -> int:
    run = load_run_config(args, {"samples.count": args.count})
    cfg = build_highway(run)
    spec = build_sample_spec(run)
    try:
        samples = generate_samples(cfg, spec, run.samples.count)
    except SampleFormatError as err:
        raise ConfigError(str(err), path=f"samples.{err.field}" if err.field else "samples") from err
    path = Path(args.output) if args.output else output_dir(run) / "samples.json"
    save_samples(path, samples)
    export_samples_csv(path.with_suffix(".csv"), samples)
    print(f"Wrote {len(samples)} samples to {path}")
    return 0
