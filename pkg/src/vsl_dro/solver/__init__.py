from vsl_dro.solver.lpfile import format_lp, write_lp_file
from vsl_dro.solver.milp import CutOracle, solve_milp, solve_with_lazy_cuts
from vsl_dro.solver.problem import INF, Basis, LinearRow, LpProblem, MilpProblem, Sense, Solution
from vsl_dro.solver.simplex import compile_lp, solve_compiled, solve_lp

__all__ = [
    "INF", "Sense", "LinearRow", "LpProblem", "MilpProblem", "Solution", "Basis",
    "solve_lp", "solve_compiled", "compile_lp", "solve_milp", "solve_with_lazy_cuts", "CutOracle",
    "format_lp", "write_lp_file",
]
