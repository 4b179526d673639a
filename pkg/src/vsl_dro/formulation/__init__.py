from vsl_dro.formulation.instance import InstanceData, VariableIndex
from vsl_dro.formulation.problems import (
    LbpProblem,
    UbpProblem,
    box_distance,
    build_lbp,
    build_lbp_dual,
    build_ubp,
    set_dual_objective,
    solve_lbp_dual_greedy,
    sos_groups,
    structural_rows,
)
from vsl_dro.formulation.rows import (
    CutSet,
    cut_row,
    cut_rows,
    dual_rows,
    glover_rows,
    mccormick_rows,
    speed_rows,
    start_values,
    trajectory_rows,
    x_values,
)

__all__ = [
    "InstanceData", "VariableIndex", "CutSet",
    "glover_rows", "speed_rows", "trajectory_rows", "dual_rows", "mccormick_rows",
    "cut_row", "cut_rows", "x_values", "start_values",
    "UbpProblem", "LbpProblem", "build_ubp", "build_lbp", "build_lbp_dual",
    "structural_rows", "set_dual_objective", "sos_groups",
    "box_distance", "solve_lbp_dual_greedy",
]
