"""Tests for turning a loaded config into domain objects."""
from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np
import pytest

from vsl_dro.config import (
    build_highway,
    build_instance,
    build_mpc_config,
    build_pool,
    build_sample_spec,
    eta_bar_for,
    fallback_schedule,
    load_config,
    render_profile,
    resolve_epsilon,
    training_samples,
)
from vsl_dro.config.schema import RunConfig
from vsl_dro.core.errors import ConfigError
from vsl_dro.core.models import SpeedSchedule
from vsl_dro.dro.radius import RadiusParams, wasserstein_radius
from vsl_dro.highway.fundamental import sufficient_eta_bar
from vsl_dro.issa.pool import CandidatePool


def _tiny(tmp_path: Path, overrides: dict[str, Any] | None = None) -> RunConfig:
    path = tmp_path / "vsl-dro.json"
    path.write_text(render_profile("tiny"), encoding="utf-8")
    return load_config(path, overrides)


def test_build_highway(tmp_path: Path) -> None:
    cfg = build_highway(_tiny(tmp_path))
    assert cfg.n == 2
    assert cfg.horizon == 3
    assert cfg.delta == pytest.approx(30.0 / 3600.0)
    assert cfg.gamma == (60.0, 100.0)
    assert cfg.events == ()


@pytest.mark.parametrize(
    "overrides, path, message",
    [
        ({"highway.edges": [{"id": 1, "length": -1.0}]}, "highway.edges[0]", "length must be positive"),
        ({"highway.events": [{"edge": 9}]}, "highway.events[0].edge", "does not exist"),
        ({"highway.events": [{"edge": 1, "start_slot": 2, "end_slot": 1}]}, "highway.events[0]", "end_slot"),
        ({"highway.gamma": [100, 60]}, "highway", "strictly increasing"),
        ({"highway.delta_s": 60.0}, "highway.delta_s", "time step too long"),
    ],
)
def test_build_highway_errors(tmp_path: Path, overrides: dict, path: str, message: str) -> None:
    run = _tiny(tmp_path, overrides)
    with pytest.raises(ConfigError, match=message) as info:
        build_highway(run)
    assert info.value.path == path


def test_sample_spec_uses_top_level_seed(tmp_path: Path) -> None:
    spec = build_sample_spec(_tiny(tmp_path, {"seed": 17}))
    assert spec.seed == 17
    assert spec.omega == (5000.0, 7000.0)
    assert build_sample_spec(_tiny(tmp_path, {"seed": 17, "samples.seed": 4})).seed == 4


def test_sample_spec_error_names_the_range(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="exceeds upper bound") as info:
        build_sample_spec(_tiny(tmp_path, {"samples.rho0": [90.0, 10.0]}))
    assert info.value.path == "samples.rho0"


def test_training_samples_generated(tmp_path: Path) -> None:
    run = _tiny(tmp_path)
    cfg = build_highway(run)
    samples = training_samples(run, cfg)
    assert len(samples) == 2
    assert samples[0].omega.shape == (3,)
    again = training_samples(run, cfg)
    np.testing.assert_array_equal(samples[1].rho0, again[1].rho0)


def test_training_samples_from_file(fixtures_dir: Path) -> None:
    run = load_config(fixtures_dir / "tiny_config.yaml")
    samples = training_samples(run, build_highway(run))
    assert len(samples) == 2
    np.testing.assert_array_equal(samples[0].omega, [6000.0, 6000.0, 6000.0])
    np.testing.assert_array_equal(samples[1].rho0, [50.0, 55.0])


def test_training_samples_file_must_match_highway(fixtures_dir: Path) -> None:
    run = load_config(fixtures_dir / "tiny_config.yaml", {"highway.horizon": 4})
    with pytest.raises(ConfigError) as info:
        training_samples(run, build_highway(run))
    assert info.value.path == "samples.file"


def test_fallback_schedule(tmp_path: Path) -> None:
    run = _tiny(tmp_path)
    cfg = build_highway(run)
    sched = fallback_schedule(run, cfg)
    np.testing.assert_array_equal(sched.u, np.full((2, 3), 60.0))
    fast = fallback_schedule(_tiny(tmp_path, {"mpc.fallback": [100, 60]}), cfg)
    np.testing.assert_array_equal(fast.u[:, 0], [100.0, 60.0])


@pytest.mark.parametrize("fallback, message", [([60.0], "one speed per edge"), ([60.0, 80.0], "not in the menu")])
def test_fallback_schedule_errors(tmp_path: Path, fallback: list[float], message: str) -> None:
    run = _tiny(tmp_path, {"mpc.fallback": fallback})
    with pytest.raises(ConfigError, match=message) as info:
        fallback_schedule(run, build_highway(run))
    assert info.value.path == "mpc.fallback"


def test_resolve_epsilon_given_and_formula(tmp_path: Path) -> None:
    run = _tiny(tmp_path)
    cfg = build_highway(run)
    spec = build_sample_spec(run)
    assert resolve_epsilon(run, cfg, spec) == 0.5

    formula = _tiny(tmp_path, {"radius.mode": "formula", "radius.beta": 0.1})
    expected = wasserstein_radius(RadiusParams(beta=0.1, n_samples=5, ell=6))
    assert resolve_epsilon(formula, cfg, spec, n_samples=5) == pytest.approx(expected)



def test_resolve_epsilon_tuned_on_point_mass(tmp_path: Path) -> None:
    run = _tiny(tmp_path, {
        "radius.mode": "tuned", "radius.trials": 2, "radius.grid_min": 0.01, "radius.grid_max": 1.0,
        "radius.grid_points": 2, "radius.n_val": 2, "radius.search_budget_s": 20.0,
        "samples.omega": [6000, 6000], "samples.rho0": [60, 60], "samples.r_in": [0, 0], "samples.r_out": [0, 0],
    })
    cfg = build_highway(run)
    assert resolve_epsilon(run, cfg, build_sample_spec(run)) == pytest.approx(0.01)


def test_search_budget_must_be_positive(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="radius.search_budget_s"):
        _tiny(tmp_path, {"radius.search_budget_s": 0})

def test_resolve_epsilon_bad_formula_constants(tmp_path: Path) -> None:
    run = _tiny(tmp_path, {"radius.mode": "formula", "radius.a": 1.0})
    cfg = build_highway(run)
    with pytest.raises(ConfigError, match="light-tail exponent") as info:
        resolve_epsilon(run, cfg, build_sample_spec(run))
    assert info.value.path == "radius"


def test_eta_bar_and_instance(tmp_path: Path) -> None:
    run = _tiny(tmp_path, {"algorithm.hold_slots": 3})
    cfg = build_highway(run)
    assert eta_bar_for(run, cfg) == pytest.approx(sufficient_eta_bar(cfg))
    assert eta_bar_for(_tiny(tmp_path, {"algorithm.eta_bar": 0.01}), cfg) == 0.01
    inst = build_instance(run, cfg, training_samples(run, cfg), epsilon=0.5)
    assert inst.epsilon == 0.5
    assert inst.hold_slots == 3
    assert inst.eta_bar == pytest.approx(sufficient_eta_bar(cfg))


def test_build_pool_seeds_fallback_and_configured_speeds(tmp_path: Path) -> None:
    run = _tiny(tmp_path, {"pool.seed_speeds": [[100, 100], [60, 100]], "pool.capacity": 8})
    cfg = build_highway(run)
    pool = build_pool(run, cfg)
    assert pool.capacity == 8
    assert [s.u[:, 0].tolist() for s in pool.schedules()] == [[60.0, 60.0], [100.0, 100.0], [60.0, 100.0]]


def test_build_pool_reads_stored_file(tmp_path: Path) -> None:
    stored = CandidatePool(gamma=(60.0, 100.0))
    stored.add(SpeedSchedule.constant((60.0, 100.0), [100.0, 60.0], 3), 9000.0)
    path = stored.save(tmp_path / "pool.json")
    run = _tiny(tmp_path, {"pool.path": str(path)})
    pool = build_pool(run, build_highway(run))
    assert [s.u[:, 0].tolist() for s in pool.schedules()] == [[100.0, 60.0], [60.0, 60.0]]


def test_build_pool_rejects_bad_seed(tmp_path: Path) -> None:
    run = _tiny(tmp_path, {"pool.seed_speeds": [[100]]})
    with pytest.raises(ConfigError) as info:
        build_pool(run, build_highway(run))
    assert info.value.path == "pool.seed_speeds[0]"


def test_build_mpc_config(tmp_path: Path) -> None:
    run = _tiny(tmp_path, {"mpc.replan_every": 2, "algorithm.budget_s": 5.0})
    cfg = build_highway(run)
    mpc_cfg = build_mpc_config(run, cfg, epsilon=0.5)
    assert mpc_cfg.steps == 6
    assert mpc_cfg.fallback == (60.0, 60.0)
    assert mpc_cfg.n_samples == 2
    assert mpc_cfg.replan_every == 2
    assert mpc_cfg.budget_s == 5.0
    assert build_mpc_config(_tiny(tmp_path, {"mpc.n_samples": 4}), cfg, 0.5).n_samples == 4
