"""Shared plumbing for the vsl-dro subcommands."""
from __future__ import annotations

import argparse
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from vsl_dro.config.convert import build_highway, build_sample_spec, resolve_epsilon, training_samples
from vsl_dro.config.loader import load_config
from vsl_dro.config.schema import RunConfig
from vsl_dro.core.errors import ConfigError
from vsl_dro.core.models import HighwayConfig, SampleSpec, ScenarioSample

logger = logging.getLogger(__name__)


def parse_overrides(pairs: list[str]) -> dict[str, Any]:
    """``key=value`` pairs; values are read as YAML scalars or lists (``[60, 80]``)."""
    overrides: dict[str, Any] = {}
    for pair in pairs:
        key, sep, text = pair.partition("=")
        if not sep or not key:
            raise ConfigError(f"expected KEY=VALUE, got {pair!r}", path="--set")
        try:
            overrides[key.strip()] = yaml.safe_load(text)
        except yaml.YAMLError as err:
            raise ConfigError(f"cannot read value {text!r}", path=key.strip()) from err
    return overrides


def load_run_config(args: argparse.Namespace, flags: dict[str, Any] | None = None) -> RunConfig:
    """Config file, then ``--set`` pairs, then the explicit command-line flags."""
    overrides = parse_overrides(getattr(args, "overrides", None) or [])
    if getattr(args, "threads", None) is not None:
        overrides["threads"] = args.threads
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "output_dir", None) is not None:
        overrides["output.directory"] = args.output_dir
    for key, value in (flags or {}).items():
        if value is not None:
            overrides[key] = value
    path = Path(args.config) if getattr(args, "config", None) else None
    return load_config(path, overrides)


def output_dir(run: RunConfig) -> Path:
    path = Path(run.output.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


@dataclass
class Prepared:
    """Highway, sample spec, training samples and the resolved radius of one run."""

    run: RunConfig
    cfg: HighwayConfig
    spec: SampleSpec
    samples: list[ScenarioSample]
    epsilon: float


def prepare(run: RunConfig) -> Prepared:
    cfg = build_highway(run)
    spec = build_sample_spec(run)
    samples = training_samples(run, cfg, spec)
    epsilon = resolve_epsilon(run, cfg, spec, len(samples))
    logger.info("Highway: %d edges, T=%d, menu %s; %d samples, epsilon %.6g (%s)",
                cfg.n, cfg.horizon, list(cfg.gamma), len(samples), epsilon, run.radius.mode)
    return Prepared(run=run, cfg=cfg, spec=spec, samples=samples, epsilon=epsilon)
