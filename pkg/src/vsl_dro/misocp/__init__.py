from vsl_dro.misocp.compare import ComparisonReport, compare_approaches
from vsl_dro.misocp.p5 import (
    CONE_TOL,
    LevelGrid,
    P5Problem,
    P5Report,
    ThetaBound,
    build_p5,
    cone_cuts,
    cone_violation,
    solve_p5,
    tangent_slope,
    theta_bound,
)

__all__ = [
    "ThetaBound", "theta_bound", "LevelGrid", "P5Problem", "P5Report",
    "build_p5", "solve_p5", "cone_cuts", "cone_violation", "tangent_slope", "CONE_TOL",
    "ComparisonReport", "compare_approaches",
]
