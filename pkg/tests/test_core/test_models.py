"""Tests for core data models."""
from __future__ import annotations

import numpy as np
import pytest

from vsl_dro.core.errors import ConfigError, HighwayConfigError, SampleFormatError, ScheduleError
from vsl_dro.core.models import (
    CertificateStatus,
    EdgeParams,
    HighwayConfig,
    Regime,
    SampleSpec,
    ScenarioSample,
    SolveStatus,
    SpeedSchedule,
    TerminationReason,
)


def test_status_enums() -> None:
    assert SolveStatus.OPTIMAL.value == "optimal"
    assert SolveStatus.BUDGET_NO_INCUMBENT.value == "budget_no_incumbent"
    assert CertificateStatus.INFEASIBLE.value == "infeasible"
    assert TerminationReason.UBP_INFEASIBLE.value == "ubp_infeasible"
    assert Regime.CONGESTED.value == "congested"


def test_edge_requires_positive_parameters() -> None:
    with pytest.raises(HighwayConfigError, match="length"):
        EdgeParams(id=1, length=0.0, f_cap=3.1e4, rho_jam=1050.0, u_free=140.0)


def test_edge_requires_capacity_below_jam_product() -> None:
    with pytest.raises(HighwayConfigError, match="must exceed f_cap"):
        EdgeParams(id=1, length=1.0, f_cap=1.5e5, rho_jam=1000.0, u_free=140.0)


def test_highway_rejects_unsorted_menu(tiny_cfg: HighwayConfig) -> None:
    with pytest.raises(HighwayConfigError, match="strictly increasing"):
        HighwayConfig(edges=tiny_cfg.edges, delta=tiny_cfg.delta, horizon=3, gamma=(100.0, 60.0))


def test_highway_rejects_speed_above_free_flow(tiny_cfg: HighwayConfig) -> None:
    with pytest.raises(HighwayConfigError, match="free-flow"):
        HighwayConfig(edges=tiny_cfg.edges, delta=tiny_cfg.delta, horizon=3, gamma=(60.0, 130.0))


def test_highway_rejects_out_of_order_ids(tiny_cfg: HighwayConfig) -> None:
    edges = tuple(reversed(tiny_cfg.edges))
    with pytest.raises(HighwayConfigError, match="edge ids"):
        HighwayConfig(edges=edges, delta=tiny_cfg.delta, horizon=3, gamma=tiny_cfg.gamma)


def test_highway_derived_arrays(tiny_cfg: HighwayConfig) -> None:
    assert tiny_cfg.n == 2
    assert tiny_cfg.m == 2
    np.testing.assert_allclose(tiny_cfg.h, [1.0 / 120.0, 1.0 / 120.0])
    np.testing.assert_allclose(tiny_cfg.tau, [0.5, 0.5])


def test_sample_dimension_mismatch_reports_lengths() -> None:
    with pytest.raises(SampleFormatError, match=r"expected 3, got 2"):
        ScenarioSample(omega=np.zeros(3), rho0=np.zeros(2), r_in=np.zeros((2, 2)), r_out=np.zeros((2, 3)))


def test_sample_spec_rejects_full_ramp_fraction() -> None:
    with pytest.raises(SampleFormatError, match="fraction must be < 1"):
        SampleSpec(omega=(0.0, 1.0), rho0=(0.0, 1.0), r_in=(0.0, 1.0))


def test_sample_spec_rejects_inverted_range() -> None:
    with pytest.raises(SampleFormatError) as exc:
        SampleSpec(omega=(2.0, 1.0), rho0=(0.0, 1.0))
    assert exc.value.field == "omega"


def test_schedule_from_speeds_and_binary() -> None:
    gamma = (60.0, 80.0, 100.0)
    sched = SpeedSchedule.from_speeds(gamma, [[60.0, 100.0], [80.0, 80.0]])
    np.testing.assert_array_equal(sched.indices, [[0, 2], [1, 1]])
    assert sched.x.shape == (2, 3, 2)
    back = SpeedSchedule.from_binary(gamma, sched.x)
    assert back.key() == sched.key()


def test_schedule_rejects_speed_outside_menu() -> None:
    with pytest.raises(ScheduleError, match="not in the menu"):
        SpeedSchedule.from_speeds((60.0, 100.0), [[70.0]])


def test_schedule_binary_needs_one_level() -> None:
    x = np.zeros((1, 2, 1))
    with pytest.raises(ScheduleError):
        SpeedSchedule.from_binary((60.0, 100.0), x)


def test_schedule_shift_repeats_last_column() -> None:
    sched = SpeedSchedule.from_indices((60.0, 100.0), np.array([[0, 1, 0]]))
    shifted = sched.shifted(1)
    np.testing.assert_array_equal(shifted.indices, [[1, 0, 0]])
    assert sched.shifted(0) is sched


def test_config_error_names_path() -> None:
    err = ConfigError("must be >= 1", path="mpc.steps")
    assert str(err) == "mpc.steps: must be >= 1"
    assert err.path == "mpc.steps"
