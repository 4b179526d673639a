"""Shared fixtures for vsl-dro tests."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from vsl_dro.core.models import EdgeParams, HighwayConfig, ScenarioSample, SpeedSchedule
from vsl_dro.formulation.instance import InstanceData
from vsl_dro.highway.fundamental import sufficient_eta_bar

FIXTURES_DIR = Path(__file__).parent / "fixtures"
CONFIGS_DIR = Path(__file__).parent.parent / "configs"


def tiny_edges(count: int = 2) -> tuple[EdgeParams, ...]:
    # tau = 0.5, rho_c(60) = 100, rho_c(100) = 75
    return tuple(
        EdgeParams(id=i, length=1.0, f_cap=8000.0, rho_jam=200.0, u_free=120.0) for i in range(1, count + 1)
    )


def make_sample(omega: float, rho0: list[float], horizon: int) -> ScenarioSample:
    n = len(rho0)
    return ScenarioSample(
        omega=np.full(horizon, omega),
        rho0=np.asarray(rho0, dtype=float),
        r_in=np.zeros((n, horizon)),
        r_out=np.zeros((n, horizon)),
    )


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def configs_dir() -> Path:
    return CONFIGS_DIR


@pytest.fixture
def ref_edge() -> EdgeParams:
    return EdgeParams(id=1, length=2.0, f_cap=3.1e4, rho_jam=1050.0, u_free=140.0)


@pytest.fixture
def tiny_cfg() -> HighwayConfig:
    """Two 1 km edges, 30 s slots, T = 3, menu {60, 100}: 64 schedules."""
    return HighwayConfig(edges=tiny_edges(), delta=30.0 / 3600.0, horizon=3, gamma=(60.0, 100.0))


@pytest.fixture
def tiny_samples(tiny_cfg: HighwayConfig) -> list[ScenarioSample]:
    """Two ramp-free samples that stay uncongested under the all-100 schedule."""
    return [
        make_sample(6000.0, [60.0, 60.0], tiny_cfg.horizon),
        make_sample(5400.0, [50.0, 55.0], tiny_cfg.horizon),
    ]


@pytest.fixture
def tiny_inst(tiny_cfg: HighwayConfig, tiny_samples: list[ScenarioSample]) -> InstanceData:
    return InstanceData(tiny_cfg, tiny_samples, epsilon=0.5, eta_bar=sufficient_eta_bar(tiny_cfg))


@pytest.fixture
def all_fast(tiny_cfg: HighwayConfig) -> SpeedSchedule:
    return SpeedSchedule.constant(tiny_cfg.gamma, [100.0, 100.0], tiny_cfg.horizon)


@pytest.fixture
def micro_cfg() -> HighwayConfig:
    """One edge, one slot, menu {60, 100}."""
    return HighwayConfig(edges=tiny_edges(1), delta=30.0 / 3600.0, horizon=1, gamma=(60.0, 100.0))


@pytest.fixture
def micro_inst(micro_cfg: HighwayConfig) -> InstanceData:
    return InstanceData(micro_cfg, [make_sample(6000.0, [60.0], 1)], epsilon=0.5,
                        eta_bar=sufficient_eta_bar(micro_cfg))
