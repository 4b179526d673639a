"""Tests for the concentration radius, regime diagnosis and radius tuning."""
from __future__ import annotations

import math

import numpy as np
import pytest

from vsl_dro.core.errors import RadiusTuningError
from vsl_dro.core.models import HighwayConfig, Regime, SampleSpec, SpeedSchedule
from vsl_dro.dro import (
    Controller,
    RadiusParams,
    certificate,
    diagnose_regime,
    radius_grid,
    search_controller,
    true_flow,
    tune_radius,
    wasserstein_radius,
)
from vsl_dro.formulation import InstanceData


def test_radius_small_sample_ratio_uses_dimension() -> None:
    params = RadiusParams(beta=0.05, n_samples=100, ell=3, c1=2.0, c2=1.0)
    expected = (math.log(40.0) / 100.0) ** (1.0 / 3.0)
    assert wasserstein_radius(params) == pytest.approx(expected)
    assert wasserstein_radius(params) == pytest.approx(0.3329, abs=1e-4)


def test_radius_low_dimension_uses_square_root() -> None:
    params = RadiusParams(beta=0.05, n_samples=100, ell=1, c1=2.0, c2=1.0)
    assert wasserstein_radius(params) == pytest.approx(math.sqrt(math.log(40.0) / 100.0))


def test_radius_branches_meet_at_one() -> None:
    beta = 1.0 * math.exp(-0.5 * 4)
    params = RadiusParams(beta=beta, n_samples=4, ell=10, c1=1.0, c2=0.5)
    assert wasserstein_radius(params) == pytest.approx(1.0)


def test_radius_few_samples_uses_tail_exponent() -> None:
    params = RadiusParams(beta=math.exp(-4.0), n_samples=1, ell=5, a=2.0, c1=1.0, c2=1.0)
    assert wasserstein_radius(params) == pytest.approx(2.0)


def test_radius_shrinks_with_more_samples() -> None:
    radii = [wasserstein_radius(RadiusParams(beta=0.05, n_samples=n, ell=100)) for n in (10, 100, 1000)]
    assert radii[0] > radii[1] > radii[2]


@pytest.mark.parametrize(
    "kwargs, message",
    [
        ({"beta": 0.0}, "beta"),
        ({"beta": 1.0}, "beta"),
        ({"n_samples": 0}, "sample count"),
        ({"ell": 0}, "dimension"),
        ({"a": 1.0}, "exponent"),
        ({"c2": 0.0}, "constants"),
        ({"beta": 0.5, "c1": 0.4}, "below c1"),
    ],
)
def test_radius_params_validation(kwargs: dict, message: str) -> None:
    base = {"beta": 0.05, "n_samples": 10, "ell": 3}
    base.update(kwargs)
    with pytest.raises(ValueError, match=message):
        RadiusParams(**base)


def test_regime_tunable_for_light_samples(tiny_inst: InstanceData) -> None:
    report = diagnose_regime(tiny_inst)
    assert report.regime == Regime.TUNABLE
    assert report.max_critical == pytest.approx(100.0)
    assert report.max_density == pytest.approx(60.0)
    assert report.nontrivial
    assert report.notes == []


def test_regime_empty(tiny_inst: InstanceData) -> None:
    report = diagnose_regime(tiny_inst, densities=np.zeros((2, 2, 3)))
    assert report.regime == Regime.EMPTY
    assert not report.nontrivial
    assert report.notes == []


def test_regime_congested_names_the_entry(tiny_inst: InstanceData) -> None:
    rho = np.full((2, 2, 3), 50.0)
    rho[1, 1, 2] = 150.0
    report = diagnose_regime(tiny_inst, densities=rho)
    assert report.regime == Regime.CONGESTED
    assert report.max_density == 150.0
    assert report.notes == ["edge 2 at t=2 exceeds the largest critical density plus epsilon"]


def test_regime_flags_thin_densities(tiny_inst: InstanceData) -> None:
    rho = np.full((2, 2, 3), 50.0)
    rho[0, 0, 0] = 0.1
    report = diagnose_regime(tiny_inst, densities=rho)
    assert report.regime == Regime.TUNABLE
    assert not report.nontrivial
    assert len(report.notes) == 1


def test_radius_grid() -> None:
    assert radius_grid(0.1, 10.0, 3) == pytest.approx([0.1, 1.0, 10.0])
    assert radius_grid(0.5, 2.0, 1) == [0.5]
    with pytest.raises(ValueError, match="invalid radius grid"):
        radius_grid(0.0, 1.0, 3)
    with pytest.raises(ValueError, match="invalid radius grid"):
        radius_grid(2.0, 1.0, 3)


POINT_MASS = SampleSpec(omega=(6000.0, 6000.0), rho0=(60.0, 60.0), seed=5)


def test_true_flow_of_steady_state(tiny_cfg: HighwayConfig, all_fast: SpeedSchedule) -> None:
    assert true_flow(tiny_cfg, POINT_MASS, all_fast, n_val=4) == pytest.approx(12000.0)


def _fixed_controller(schedule: SpeedSchedule, claim_from: float) -> Controller:
    """Certifies ``schedule`` with its true certificate once epsilon reaches ``claim_from``."""

    def control(inst: InstanceData) -> tuple[SpeedSchedule | None, float | None]:
        if inst.epsilon < claim_from:
            return None, None
        return schedule, certificate(inst, schedule).value

    return control


def test_tuning_point_mass_picks_smallest_radius(tiny_cfg: HighwayConfig, all_fast: SpeedSchedule) -> None:
    result = tune_radius(tiny_cfg, POINT_MASS, beta=0.1, trials=3, n_samples=2, grid=[0.5, 0.1, 1.0], n_val=4,
                         controller=_fixed_controller(all_fast, 0.0))
    assert result.epsilon == pytest.approx(0.1)
    assert result.grid == [0.1, 0.5, 1.0]
    assert result.rates == [1.0, 1.0, 1.0]
    assert result.claims == [3, 3, 3]
    assert len(result.certificates) == 3
    first = result.certificates[0]
    assert first[0] == pytest.approx(12000.0 - 0.1 * 100.0 / 3.0)
    assert result.truths[0] == [pytest.approx(12000.0)] * 3


def test_tuning_skips_radii_without_claims(tiny_cfg: HighwayConfig, all_fast: SpeedSchedule) -> None:
    # no certificate below 0.5: those radii make no claim and cannot be selected
    result = tune_radius(tiny_cfg, POINT_MASS, beta=0.1, trials=2, n_samples=2, grid=[0.1, 0.5, 1.0], n_val=4,
                         controller=_fixed_controller(all_fast, 0.5))
    assert result.epsilon == pytest.approx(0.5)
    assert result.rates == [None, 1.0, 1.0]
    assert result.claims == [0, 2, 2]
    assert result.certificates[0][0] is None


def test_tuning_fails_when_nothing_is_ever_claimed(tiny_cfg: HighwayConfig, all_fast: SpeedSchedule) -> None:
    with pytest.raises(RadiusTuningError, match="best none"):
        tune_radius(tiny_cfg, POINT_MASS, beta=0.1, trials=2, n_samples=2, grid=[0.1, 0.2], n_val=2,
                    controller=_fixed_controller(all_fast, math.inf))


def test_tuning_rejects_radii_whose_certificate_overshoots(tiny_cfg: HighwayConfig,
                                                           all_fast: SpeedSchedule) -> None:
    def optimistic(inst: InstanceData) -> tuple[SpeedSchedule | None, float | None]:
        value = certificate(inst, all_fast).value
        assert value is not None
        return all_fast, value + (50.0 if inst.epsilon < 1.0 else 0.0)

    result = tune_radius(tiny_cfg, POINT_MASS, beta=0.1, trials=2, n_samples=2, grid=[0.1, 1.0], n_val=2,
                         controller=optimistic)
    assert result.rates == [0.0, 1.0]
    assert result.epsilon == pytest.approx(1.0)


def test_tuning_with_the_search_controller(tiny_cfg: HighwayConfig) -> None:
    result = tune_radius(tiny_cfg, POINT_MASS, beta=0.1, trials=2, n_samples=2, grid=[0.1, 1.0], n_val=3,
                         controller=search_controller(budget_s=30.0))
    assert result.epsilon == pytest.approx(0.1)
    assert result.claims == [2, 2]
    for certs, truths in zip(result.certificates, result.truths):
        for value, truth in zip(certs, truths):
            assert value is not None and truth is not None
            assert truth >= value - 1e-6


@pytest.mark.parametrize(
    "kwargs, message",
    [
        ({"beta": 1.0}, "beta"),
        ({"trials": 0}, "trials"),
        ({"grid": []}, "grid is empty"),
    ],
)
def test_tuning_argument_validation(tiny_cfg: HighwayConfig, all_fast: SpeedSchedule, kwargs: dict,
                                    message: str) -> None:
    args = {"beta": 0.1, "trials": 2, "grid": [0.1]}
    args.update(kwargs)
    with pytest.raises(ValueError, match=message):
        tune_radius(tiny_cfg, POINT_MASS, n_samples=2, n_val=2, controller=_fixed_controller(all_fast, 0.0), **args)
