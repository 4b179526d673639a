from vsl_dro.config.convert import (
    build_highway,
    build_instance,
    build_mpc_config,
    build_pool,
    build_sample_spec,
    eta_bar_for,
    fallback_schedule,
    resolve_epsilon,
    training_samples,
)
from vsl_dro.config.defaults import DEFAULT_PROFILE, PROFILES, profile, render_profile
from vsl_dro.config.loader import DEFAULT_CONFIG_NAME, load_config, validate_config
from vsl_dro.config.schema import RunConfig

__all__ = [
    "RunConfig", "load_config", "validate_config", "DEFAULT_CONFIG_NAME",
    "PROFILES", "DEFAULT_PROFILE", "profile", "render_profile",
    "build_highway", "build_sample_spec", "training_samples", "fallback_schedule", "resolve_epsilon",
    "eta_bar_for", "build_instance", "build_pool", "build_mpc_config",
]
