from vsl_dro.highway.fundamental import (
    StabilityReport,
    StabilityViolation,
    active_config,
    check_stability,
    critical_densities,
    critical_density,
    fd_flow,
    max_critical_density,
    planning_config,
    sufficient_eta_bar,
    tau,
)

__all__ = [
    "tau", "critical_density", "critical_densities", "fd_flow",
    "check_stability", "StabilityReport", "StabilityViolation",
    "active_config", "planning_config", "max_critical_density", "sufficient_eta_bar",
]
