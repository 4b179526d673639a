"""Tests for the performance certificate and the fixed-candidate primal."""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from tests.conftest import make_sample, tiny_edges
from vsl_dro.core.models import CertificateStatus, HighwayConfig, SolveStatus, SpeedSchedule
from vsl_dro.dro import certificate, empirical_flow, propagate_all, solve_lbp_primal
from vsl_dro.formulation import InstanceData
from vsl_dro.highway.fundamental import sufficient_eta_bar


def _tiny_schedules(inst: InstanceData) -> list[SpeedSchedule]:
    return [
        SpeedSchedule.from_indices(inst.cfg.gamma, np.array(bits).reshape(2, 3))
        for bits in itertools.product((0, 1), repeat=6)
    ]


def test_greedy_and_lp_agree_on_every_tiny_schedule(tiny_inst: InstanceData) -> None:
    finite = 0
    for sched in _tiny_schedules(tiny_inst):
        greedy = certificate(tiny_inst, sched, method="greedy")
        lp = certificate(tiny_inst, sched, method="lp")
        assert greedy.status == lp.status
        if greedy.finite:
            finite += 1
            assert lp.value == pytest.approx(greedy.value, rel=1e-9, abs=1e-9)
    assert finite > 0


@pytest.mark.parametrize("epsilon", [0.0, 0.5, 5.0, 40.0, 400.0])
def test_default_method_matches_the_lp_across_radii(tiny_inst: InstanceData, epsilon: float) -> None:
    # large budgets spill past the fastest entries into slower ones
    inst = tiny_inst.with_epsilon(epsilon)
    for sched in _tiny_schedules(inst):
        default = certificate(inst, sched)
        lp = certificate(inst, sched, method="lp")
        assert default.status == lp.status
        if default.finite:
            assert lp.value == pytest.approx(default.value, rel=1e-7, abs=1e-7)


def test_zero_radius_gives_empirical_flow(tiny_inst: InstanceData, all_fast: SpeedSchedule) -> None:
    cert = certificate(tiny_inst.with_epsilon(0.0), all_fast)
    assert cert.status == CertificateStatus.FINITE
    trajs = propagate_all(tiny_inst, all_fast)
    assert cert.value == pytest.approx(empirical_flow(all_fast, trajs))
    assert cert.empirical == pytest.approx(cert.value)


def test_radius_lowers_the_certificate_linearly(tiny_inst: InstanceData, all_fast: SpeedSchedule) -> None:
    # every speed is 100, so the budget N * eps = 1 removes 100 / (N * T) of flow
    cert = certificate(tiny_inst, all_fast)
    assert cert.empirical is not None
    assert cert.value == pytest.approx(cert.empirical - 0.5 * 100.0 / 3.0)
    assert cert.epsilon == 0.5


def test_sample_a_flow_is_steady(tiny_cfg: HighwayConfig, all_fast: SpeedSchedule) -> None:
    inst = InstanceData(tiny_cfg, [make_sample(6000.0, [60.0, 60.0], 3)], epsilon=0.0,
                        eta_bar=sufficient_eta_bar(tiny_cfg))
    assert certificate(inst, all_fast).value == pytest.approx(12000.0)


def test_empty_highway_certifies_zero(tiny_cfg: HighwayConfig, all_fast: SpeedSchedule) -> None:
    inst = InstanceData(tiny_cfg, [make_sample(0.0, [0.0, 0.0], 3)], epsilon=0.5,
                        eta_bar=sufficient_eta_bar(tiny_cfg))
    for method in ("greedy", "lp"):
        cert = certificate(inst, all_fast, method=method)
        assert cert.status == CertificateStatus.FINITE
        assert cert.value == pytest.approx(0.0, abs=1e-9)


def test_single_entry_worst_case() -> None:
    cfg = HighwayConfig(edges=tiny_edges(1), delta=30.0 / 3600.0, horizon=1, gamma=(100.0,))
    inst = InstanceData(cfg, [make_sample(0.0, [2.0], 1)], epsilon=1.0, eta_bar=sufficient_eta_bar(cfg))
    sched = SpeedSchedule.constant(cfg.gamma, [100.0], 1)
    # the adversary moves the density from 2 down to 1
    assert certificate(inst, sched).value == pytest.approx(100.0)
    assert certificate(inst, sched, method="lp").value == pytest.approx(100.0)


def test_inadmissible_sample_is_infeasible(tiny_inst: InstanceData) -> None:
    sched = SpeedSchedule.from_speeds(tiny_inst.cfg.gamma, [[60.0, 60.0, 100.0], [100.0, 100.0, 100.0]])
    cert = certificate(tiny_inst, sched)
    assert cert.status == CertificateStatus.INFEASIBLE
    assert cert.value is None
    assert not cert.finite
    assert cert.reason == "sample 0 inadmissible (edge 2, t=2, capacity)"


def test_distance_beyond_budget_is_infeasible(tiny_cfg: HighwayConfig, all_fast: SpeedSchedule) -> None:
    inst = InstanceData(tiny_cfg, [make_sample(6000.0, [80.0, 60.0], 3)], epsilon=1.0,
                        eta_bar=sufficient_eta_bar(tiny_cfg))
    cert = certificate(inst, all_fast)
    assert cert.status == CertificateStatus.INFEASIBLE
    assert "exceeds budget" in cert.reason
    assert certificate(inst.with_epsilon(7.0), all_fast).finite


def test_primal_unbounded_when_dual_is_infeasible(tiny_cfg: HighwayConfig, all_fast: SpeedSchedule) -> None:
    inst = InstanceData(tiny_cfg, [make_sample(6000.0, [80.0, 60.0], 3)], epsilon=1.0,
                        eta_bar=sufficient_eta_bar(tiny_cfg))
    result = solve_lbp_primal(inst, all_fast, propagate_all(inst, all_fast), max_doublings=3)
    assert result.solution.status == SolveStatus.UNBOUNDED
    assert result.doublings == 3
    assert result.eta_bar > inst.eta_bar


def test_primal_matches_certificate(tiny_inst: InstanceData) -> None:
    checked = 0
    for sched in _tiny_schedules(tiny_inst)[::5]:
        cert = certificate(tiny_inst, sched)
        if not cert.finite:
            continue
        result = solve_lbp_primal(tiny_inst, sched, propagate_all(tiny_inst, sched))
        assert result.solution.status == SolveStatus.OPTIMAL
        assert result.doublings == 0
        assert result.max_eta < tiny_inst.eta_bar
        assert result.solution.objective == pytest.approx(cert.value, rel=1e-7, abs=1e-7)
        checked += 1
    assert checked > 0


def test_unknown_method_rejected(tiny_inst: InstanceData, all_fast: SpeedSchedule) -> None:
    with pytest.raises(ValueError, match="unknown certificate method"):
        certificate(tiny_inst, all_fast, method="bisection")
