"""Tests for the level-discretized cone analysis tool."""
from __future__ import annotations

import math

import numpy as np
import pytest

from vsl_dro.core.models import EdgeParams, HighwayConfig, SolveStatus
from vsl_dro.formulation import InstanceData
from vsl_dro.issa import brute_force
from vsl_dro.misocp import (
    LevelGrid,
    build_p5,
    compare_approaches,
    cone_cuts,
    cone_violation,
    solve_p5,
    tangent_slope,
    theta_bound,
)
from vsl_dro.solver.milp import solve_with_lazy_cuts
from vsl_dro.solver.problem import LpProblem, MilpProblem

# micro instance: J(100) = 100 * (60 - 0.5) with nu = 100, so theta = sqrt(100 * 60)
THETA_STAR = math.sqrt(6000.0)


def test_theta_bound_reference_edge(ref_edge: EdgeParams) -> None:
    cfg = HighwayConfig(edges=(ref_edge,), delta=1.0 / 120.0, horizon=20, gamma=(40.0, 60.0, 80.0, 100.0, 120.0))
    assert theta_bound(cfg, eta_bar=1e-3).theta_bar == pytest.approx(402.12, abs=0.01)
    assert theta_bound(cfg, eta_bar=0.0, horizon=1).theta_bar == pytest.approx(math.sqrt(140.0 * 1050.0))
    with pytest.raises(ValueError, match="invalid theta bound"):
        theta_bound(cfg, eta_bar=-1.0)


def test_level_grid() -> None:
    assert LevelGrid.uniform(10.0, 1).points == (0.0,)
    assert LevelGrid.uniform(10.0, 3).points == pytest.approx((0.0, 5.0, 10.0))
    refined = LevelGrid.uniform(10.0, 3).refined([2.5, 5.0])
    assert refined.points == pytest.approx((0.0, 2.5, 5.0, 10.0))
    assert refined.size == 4
    for bad in ((), (-1.0, 2.0), (1.0, 1.0)):
        with pytest.raises(ValueError):
            LevelGrid(bad)
    with pytest.raises(ValueError, match="grid size"):
        LevelGrid.uniform(10.0, 0)


def test_tangent_slope_cases() -> None:
    assert tangent_slope(3.0, 1.0, 4.0) == pytest.approx(2.0)
    assert tangent_slope(2.0, 0.0, 4.0) == pytest.approx(2.0)
    assert tangent_slope(2.0, 4.0, 0.0) == pytest.approx(0.5)
    assert tangent_slope(2.0, 0.0, 0.0) == 1.0


def test_cone_cuts_skip_satisfied_points() -> None:
    x = np.array([2.0, 2.0, 2.0])
    assert cone_cuts(x, [(0, 1, 2)]) == []
    assert cone_violation(x, (0, 1, 2)) == pytest.approx(0.0)


def test_cone_cut_separates_and_stays_valid() -> None:
    x = np.array([3.0, 1.0, 4.0])
    (cut,) = cone_cuts(x, [(0, 1, 2)])
    assert cut.violation(x) == pytest.approx(1.0)
    rng = np.random.default_rng(13)
    for _ in range(200):
        nu, rho = rng.uniform(0.0, 50.0, size=2)
        inside = np.array([math.sqrt(nu * rho), nu, rho])
        assert cut.violation(inside) <= 1e-9


def _hyperbola(bound: float) -> tuple[MilpProblem, list[tuple[int, int, int]]]:
    """minimize nu + rho with theta = 2 and theta**2 <= nu * rho."""
    p = LpProblem(maximize=False)
    theta = p.add_var("theta", 2.0, 2.0)
    nu = p.add_var("nu", 0.0, bound, obj=1.0)
    rho = p.add_var("rho", 0.0, bound, obj=1.0)
    return MilpProblem(lp=p), [(theta, nu, rho)]


def test_outer_approximation_converges_on_hyperbola() -> None:
    milp, cones = _hyperbola(10.0)
    sol = solve_with_lazy_cuts(milp, lambda x: cone_cuts(x, cones))
    assert sol.info["oracle_satisfied"] == 1.0
    assert sol.info["cuts"] <= 40
    assert sol.objective == pytest.approx(4.0, abs=1e-4)
    assert sol.x is not None
    assert cone_violation(sol.x, cones[0]) <= 1e-5


def test_outer_approximation_detects_empty_cone_section() -> None:
    milp, cones = _hyperbola(1.0)
    sol = solve_with_lazy_cuts(milp, lambda x: cone_cuts(x, cones))
    assert sol.status == SolveStatus.INFEASIBLE


def test_p5_layout(micro_inst: InstanceData) -> None:
    problem = build_p5(micro_inst, 3)
    assert problem.theta_bar == pytest.approx(math.sqrt(84000.0))
    assert problem.grid.points == pytest.approx((0.0, problem.theta_bar / 2, problem.theta_bar))
    assert len(problem.cones) == 1
    # two speed binaries plus three level selectors
    assert len(problem.milp.binaries) == 5
    assert len(problem.milp.sos1) == 2


def test_p5_single_level_is_zero(micro_inst: InstanceData) -> None:
    report = solve_p5(build_p5(micro_inst, 1), budget_s=120.0)
    assert report.grid == [0.0]
    assert report.objective == pytest.approx(0.0, abs=1e-6)


def test_p5_with_optimal_level_recovers_certificate(micro_inst: InstanceData) -> None:
    best, cert = brute_force(micro_inst)
    assert cert is not None and cert.value == pytest.approx(5950.0)
    report = solve_p5(build_p5(micro_inst, LevelGrid((0.0, THETA_STAR))), budget_s=120.0)
    assert report.status == SolveStatus.OPTIMAL
    assert report.certified_objective == pytest.approx(5950.0, rel=1e-6)
    assert report.schedule is not None
    assert report.schedule.u.tolist() == [[100.0]]
    assert report.max_violation <= 1e-4 * THETA_STAR
    assert report.to_dict()["examined_candidates"] == len(report.examined)


def test_p5_uniform_grid_stays_below_brute_force(micro_inst: InstanceData) -> None:
    report = solve_p5(build_p5(micro_inst, 5), budget_s=120.0)
    assert report.certified_objective is not None
    assert 0.0 < report.certified_objective <= 5950.0 * (1 + 1e-6)
    assert report.schedule is not None
    assert report.schedule.u.tolist() == [[100.0]]


def test_p5_refinement_never_lowers_the_objective(micro_inst: InstanceData) -> None:
    coarse = LevelGrid.uniform(theta_bound(micro_inst.cfg, micro_inst.eta_bar).theta_bar, 3)
    fine = coarse.refined([THETA_STAR])
    low = solve_p5(build_p5(micro_inst, coarse), budget_s=120.0)
    high = solve_p5(build_p5(micro_inst, fine), budget_s=120.0)
    assert high.certified_objective >= low.certified_objective - 1e-6
    assert high.certified_objective == pytest.approx(5950.0, rel=1e-6)


def test_compare_approaches_on_micro_instance(micro_inst: InstanceData) -> None:
    report = compare_approaches(micro_inst, budget_s=120.0, grid=LevelGrid((0.0, THETA_STAR)))
    assert report.issa.lower_bound == pytest.approx(5950.0)
    assert report.p5_certificate == pytest.approx(5950.0)
    assert report.p5_feasible >= 1
    assert report.p5_feasible + report.p5_infeasible == len(report.p5.examined)
    data = report.to_dict()
    assert data["issa"]["termination"] in ("gap_closed", "ubp_infeasible")
    assert data["p5"]["certificate"] == pytest.approx(5950.0)
