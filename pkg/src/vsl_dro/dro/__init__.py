from vsl_dro.dro.certificate import (
    PrimalResult,
    admissibility_reason,
    certificate,
    empirical_flow,
    propagate_all,
    solve_lbp_primal,
)
from vsl_dro.dro.radius import RadiusParams, wasserstein_radius
from vsl_dro.dro.regime import diagnose_regime, sample_densities
from vsl_dro.dro.tuning import Controller, TuningResult, radius_grid, search_controller, true_flow, tune_radius

__all__ = [
    "RadiusParams", "wasserstein_radius",
    "certificate", "propagate_all", "empirical_flow", "admissibility_reason",
    "solve_lbp_primal", "PrimalResult",
    "diagnose_regime", "sample_densities",
    "tune_radius", "radius_grid", "true_flow", "TuningResult", "search_controller", "Controller",
]
