"""vsl-dro init command: writes a config file from a built-in profile."""
from __future__ import annotations

import argparse
from pathlib import Path

from vsl_dro.config.defaults import ALIASES, DEFAULT_PROFILE, PROFILES, render_profile, resolve_profile
from vsl_dro.config.loader import DEFAULT_CONFIG_NAME


def cmd_init(args: argparse.Namespace) -> int:
    config_path = Path(args.config or DEFAULT_CONFIG_NAME)

    if config_path.exists():
        print(f"Config already exists: {config_path}")
        print("Delete it first if you want to regenerate.")
        return 1

    name = resolve_profile(args.profile or DEFAULT_PROFILE)
    if name not in PROFILES:
        print(f"Unknown profile: {args.profile}")
        print(f"Available profiles: {', '.join([*PROFILES, *ALIASES])}")
        return 1

    config_path.parent.mkdir(parents=True, exist_ok=True)
    config_path.write_text(render_profile(name), encoding="utf-8")
    print(f"Created {config_path} (profile {name})")
    return 0
