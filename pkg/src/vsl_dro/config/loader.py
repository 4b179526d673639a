"""Configuration loader for vsl-dro."""
from __future__ import annotations

import dataclasses
import logging
import os
from pathlib import Path
from typing import Any, TypeVar

import yaml

from vsl_dro.config.schema import (
    AlgorithmSection,
    AnalysisSection,
    EdgeConfig,
    EventConfig,
    HighwaySection,
    MpcSection,
    OutputSection,
    PoolSection,
    RadiusSection,
    RunConfig,
    SamplesSection,
    ValidationSection,
)
from vsl_dro.core.errors import ConfigError
from vsl_dro.dro.certificate import METHODS
from vsl_dro.mpc.driver import RADIUS_MODES

DEFAULT_CONFIG_NAME = "vsl-dro.json"


def _deep_merge(base: dict[str, Any], overlay: dict[str, Any]) -> dict[str, Any]:
    """Recursively merge overlay into base, returning a new dict."""
    result = dict(base)
    for key, value in overlay.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = value
    return result


def _load_yaml_file(path: Path) -> dict[str, Any]:
    """Load a YAML or JSON file and return its contents as a dict."""
    text = path.read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        where = f"{path}:{mark.line + 1}" if mark is not None else str(path)
        problem = getattr(err, "problem", None) or str(err)
        raise ConfigError(f"cannot parse config: {problem}", path=where) from err
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"expected a mapping at top level, got {type(data).__name__}", path=str(path))
    return data


def _apply_env_overrides(raw: dict[str, Any]) -> dict[str, Any]:
    """Overlay VSL_DRO_* environment variables onto the raw config dict."""
    env_mappings: list[tuple[str, list[str], type]] = [
        ("VSL_DRO_SEED", ["seed"], int),
        ("VSL_DRO_THREADS", ["threads"], int),
        ("VSL_DRO_OUTPUT_DIR", ["output", "directory"], str),
        ("VSL_DRO_BUDGET_S", ["algorithm", "budget_s"], float),
        ("VSL_DRO_RADIUS_MODE", ["radius", "mode"], str),
    ]

    for env_var, key_path, cast_type in env_mappings:
        value = os.environ.get(env_var)
        if value is None:
            continue
        try:
            cast = cast_type(value)
        except ValueError as err:
            raise ConfigError(f"cannot read {value!r} as {cast_type.__name__}", path=env_var) from err

        d = raw
        for part in key_path[:-1]:
            if part not in d or not isinstance(d[part], dict):
                d[part] = {}
            d = d[part]
        d[key_path[-1]] = cast

    return raw


def _apply_cli_overrides(raw: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    """Apply CLI overrides using dot-notation keys (e.g., 'radius.epsilon')."""
    for dotted_key, value in overrides.items():
        parts = dotted_key.split(".")
        d = raw
        for part in parts[:-1]:
            if part not in d or not isinstance(d[part], dict):
                d[part] = {}
            d = d[part]
        d[parts[-1]] = value
    return raw


def _coerce_field(value: Any, field_type_str: str) -> Any:
    """Best-effort coercion of a scalar value to match a dataclass field type string."""
    if value is None or isinstance(value, (list, dict)):
        return value
    if field_type_str.startswith("list"):
        return value
    if "bool" in field_type_str and not isinstance(value, bool):
        if isinstance(value, str):
            return value.lower() in ("true", "1", "yes")
        return bool(value)
    if "int" in field_type_str and not isinstance(value, int):
        try:
            return int(value)
        except (ValueError, TypeError):
            return value
    if "float" in field_type_str and not isinstance(value, (int, float)):
        try:
            return float(value)
        except (ValueError, TypeError):
            return value
    return value


_T = TypeVar("_T")


_log = logging.getLogger(__name__)


def _build_with_coercion(cls: type[_T], data: Any, path: str) -> _T:
    """Build a dataclass from a raw dict, coercing types and warning on unknowns."""
    if not isinstance(data, dict):
        raise ConfigError(f"expected a mapping, got {type(data).__name__}", path=path)
    known = {f.name: f for f in dataclasses.fields(cls)}  # type: ignore[arg-type]
    filtered: dict[str, Any] = {}
    for k, v in data.items():
        if k in known:
            ft = known[k].type
            type_str = ft if isinstance(ft, str) else getattr(ft, "__name__", str(ft))
            filtered[k] = _coerce_field(v, type_str)
        else:
            _log.warning(
                "Unknown config key '%s' in %s (known: %s), ignored",
                f"{path}.{k}", cls.__name__, ", ".join(sorted(known)),
            )
    return cls(**filtered)


def _build_list(cls: type[_T], data: Any, path: str) -> list[_T]:
    if not isinstance(data, list):
        raise ConfigError(f"expected a list, got {type(data).__name__}", path=path)
    return [_build_with_coercion(cls, item, f"{path}[{i}]") for i, item in enumerate(data)]


def _build_highway_section(data: Any) -> HighwaySection:
    if not isinstance(data, dict):
        raise ConfigError(f"expected a mapping, got {type(data).__name__}", path="highway")
    data = dict(data)
    edges = data.pop("edges", None)
    events = data.pop("events", None)
    section = _build_with_coercion(HighwaySection, data, "highway")
    if edges is not None:
        section.edges = _build_list(EdgeConfig, edges, "highway.edges")
    if events is not None:
        section.events = _build_list(EventConfig, events, "highway.events")
    return section


def _build_config(raw: dict[str, Any]) -> RunConfig:
    """Build a RunConfig from a raw dict."""
    top = {k: v for k, v in raw.items() if not isinstance(v, dict)}
    cfg = RunConfig(
        highway=_build_highway_section(raw.get("highway", {})),
        samples=_build_with_coercion(SamplesSection, raw.get("samples", {}), "samples"),
        radius=_build_with_coercion(RadiusSection, raw.get("radius", {}), "radius"),
        algorithm=_build_with_coercion(AlgorithmSection, raw.get("algorithm", {}), "algorithm"),
        pool=_build_with_coercion(PoolSection, raw.get("pool", {}), "pool"),
        mpc=_build_with_coercion(MpcSection, raw.get("mpc", {}), "mpc"),
        validation=_build_with_coercion(ValidationSection, raw.get("validation", {}), "validation"),
        analysis=_build_with_coercion(AnalysisSection, raw.get("analysis", {}), "analysis"),
        output=_build_with_coercion(OutputSection, raw.get("output", {}), "output"),
    )
    for key, value in top.items():
        if key in ("seed", "threads"):
            try:
                setattr(cfg, key, int(value))
            except (ValueError, TypeError) as err:
                raise ConfigError(f"expected an integer, got {value!r}", path=key) from err
        else:
            _log.warning("Unknown config key '%s' in RunConfig (known: seed, threads), ignored", key)
    return cfg


def _require(condition: bool, message: str, path: str) -> None:
    if not condition:
        raise ConfigError(message, path=path)


def _check_range(values: list[float], path: str) -> None:
    _require(isinstance(values, list) and len(values) == 2, "expected a [lo, hi] pair", path)
    _require(all(isinstance(v, (int, float)) for v in values), "range bounds must be numbers", path)


def validate_config(cfg: RunConfig) -> None:
    """Check section-level invariants; highway and sample invariants are checked when built."""
    _require(cfg.threads >= 1, f"must be >= 1, got {cfg.threads}", "threads")
    hw = cfg.highway
    _require(hw.delta_s > 0, f"must be positive, got {hw.delta_s}", "highway.delta_s")
    _require(hw.horizon >= 1, f"must be >= 1, got {hw.horizon}", "highway.horizon")
    _require(isinstance(hw.gamma, list) and len(hw.gamma) >= 1, "speed menu must be a nonempty list",
             "highway.gamma")
    _require(len(hw.edges) >= 1, "highway needs at least one edge", "highway.edges")

    s = cfg.samples
    _require(s.count >= 1, f"must be >= 1, got {s.count}", "samples.count")
    for name in ("omega", "rho0", "r_in", "r_out"):
        _check_range(getattr(s, name), f"samples.{name}")
    if s.file is not None:
        _require(Path(s.file).exists(), f"sample file not found: {s.file}", "samples.file")

    r = cfg.radius
    _require(r.mode in RADIUS_MODES, f"unknown mode {r.mode!r}; expected one of {RADIUS_MODES}", "radius.mode")
    _require(r.epsilon >= 0, f"must be >= 0, got {r.epsilon}", "radius.epsilon")
    _require(0.0 < r.beta < 1.0, f"must lie in (0, 1), got {r.beta}", "radius.beta")
    _require(r.trials >= 1, f"must be >= 1, got {r.trials}", "radius.trials")
    _require(r.n_val >= 1, f"must be >= 1, got {r.n_val}", "radius.n_val")
    _require(r.grid_points >= 1, f"must be >= 1, got {r.grid_points}", "radius.grid_points")
    _require(r.search_budget_s > 0, f"must be > 0, got {r.search_budget_s}", "radius.search_budget_s")
    _require(0 < r.grid_min <= r.grid_max, f"need 0 < grid_min <= grid_max, got ({r.grid_min}, {r.grid_max})",
             "radius.grid_min")

    a = cfg.algorithm
    _require(a.budget_s > 0, f"must be positive, got {a.budget_s}", "algorithm.budget_s")
    _require(a.gap_tol >= 0, f"must be >= 0, got {a.gap_tol}", "algorithm.gap_tol")
    _require(a.milp_gap >= 0, f"must be >= 0, got {a.milp_gap}", "algorithm.milp_gap")
    _require(a.eta_bar is None or a.eta_bar > 0, f"must be positive, got {a.eta_bar}", "algorithm.eta_bar")
    _require(a.hold_slots >= 1, f"must be >= 1, got {a.hold_slots}", "algorithm.hold_slots")
    _require(a.certificate_method in METHODS,
             f"unknown method {a.certificate_method!r}; expected one of {METHODS}", "algorithm.certificate_method")

    _require(cfg.pool.capacity >= 1, f"must be >= 1, got {cfg.pool.capacity}", "pool.capacity")
    m = cfg.mpc
    _require(m.steps >= 1, f"must be >= 1, got {m.steps}", "mpc.steps")
    _require(1 <= m.replan_every <= hw.horizon, f"must lie in 1..{hw.horizon}, got {m.replan_every}",
             "mpc.replan_every")
    _require(m.n_samples is None or m.n_samples >= 1, f"must be >= 1, got {m.n_samples}", "mpc.n_samples")
    _require(cfg.validation.replications >= 1, f"must be >= 1, got {cfg.validation.replications}",
             "validation.replications")
    _require(cfg.validation.n_val >= 1, f"must be >= 1, got {cfg.validation.n_val}", "validation.n_val")
    _require(cfg.analysis.grid_size >= 1, f"must be >= 1, got {cfg.analysis.grid_size}", "analysis.grid_size")


def load_config(
    config_path: Path | None = None,
    cli_overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """Load configuration from a JSON/YAML file, environment variables, and CLI overrides.

    Priority (highest to lowest):
        1. CLI overrides (dot-notation keys, e.g., ``radius.epsilon``)
        2. Environment variables (``VSL_DRO_*``)
        3. File values
        4. Dataclass defaults

    Args:
        config_path: Path to the configuration file.  If ``None``, the
            loader attempts ``vsl-dro.json`` in the current directory; if that
            does not exist, pure defaults are used.
        cli_overrides: Optional dict of dot-notation key/value overrides from
            the command line.

    Returns:
        A validated :class:`RunConfig` instance.  A relative ``samples.file``
        is resolved against the directory of the configuration file.

    Raises:
        ConfigError: The file does not parse or a value fails validation.
    """
    raw: dict[str, Any] = {}
    base_dir = Path.cwd()

    if config_path is not None:
        if not config_path.exists():
            raise ConfigError(f"config file not found: {config_path}")
        raw = _load_yaml_file(config_path)
        base_dir = config_path.parent
    else:
        default_path = Path(DEFAULT_CONFIG_NAME)
        if default_path.exists():
            raw = _load_yaml_file(default_path)

    raw = _apply_env_overrides(raw)

    if cli_overrides:
        raw = _apply_cli_overrides(raw, cli_overrides)

    cfg = _build_config(raw)
    if cfg.samples.file is not None and not Path(cfg.samples.file).is_absolute():
        cfg.samples.file = str(base_dir / cfg.samples.file)
    validate_config(cfg)
    return cfg


def merge_profile(profile: dict[str, Any], overlay: dict[str, Any]) -> dict[str, Any]:
    return _deep_merge(profile, overlay)
