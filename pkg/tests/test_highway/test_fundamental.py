"""Tests for the fundamental diagram and stability checks."""
from __future__ import annotations

import numpy as np
import pytest

from vsl_dro.core.errors import HighwayConfigError
from vsl_dro.core.models import EdgeEvent, EdgeParams, HighwayConfig
from vsl_dro.highway.fundamental import (
    active_config,
    check_stability,
    critical_densities,
    critical_density,
    fd_flow,
    max_critical_density,
    planning_config,
    sufficient_eta_bar,
    tau,
)


def test_tau_for_five_segment_edge(ref_edge: EdgeParams) -> None:
    assert tau(ref_edge) == pytest.approx(31000.0 / 116000.0)
    assert tau(ref_edge) == pytest.approx(0.26724, abs=1e-5)


def test_tau_symmetric_split() -> None:
    edge = EdgeParams(id=1, length=1.0, f_cap=5000.0, rho_jam=100.0, u_free=100.0)
    assert tau(edge) == pytest.approx(1.0)


def test_critical_density_reference_values(ref_edge: EdgeParams) -> None:
    assert critical_density(ref_edge, 80.0) == pytest.approx(335.0, abs=1.0)
    assert critical_density(ref_edge, 60.0) == pytest.approx(403.0, abs=1.0)


def test_critical_density_at_free_flow(ref_edge: EdgeParams) -> None:
    rho_c = critical_density(ref_edge, ref_edge.u_free)
    assert rho_c == pytest.approx(31000.0 / 140.0)
    assert rho_c * ref_edge.u_free == pytest.approx(ref_edge.f_cap, rel=1e-9)


def test_critical_density_rejects_nonpositive_speed(ref_edge: EdgeParams) -> None:
    with pytest.raises(ValueError):
        critical_density(ref_edge, 0.0)


def test_critical_density_decreases_with_speed() -> None:
    rng = np.random.default_rng(7)
    for _ in range(200):
        u_free = rng.uniform(60.0, 160.0)
        rho_jam = rng.uniform(100.0, 1200.0)
        f_cap = rng.uniform(0.05, 0.95) * u_free * rho_jam
        edge = EdgeParams(id=1, length=1.0, f_cap=f_cap, rho_jam=rho_jam, u_free=u_free)
        u1, u2 = sorted(rng.uniform(1.0, u_free, size=2))
        if u2 - u1 < 1e-6:
            continue
        assert critical_density(edge, u1) > critical_density(edge, u2)


def test_fd_flow_free_branch(ref_edge: EdgeParams) -> None:
    assert critical_density(ref_edge, 120.0) == pytest.approx(249.6, abs=0.1)
    assert fd_flow(ref_edge, 100.0, 120.0) == pytest.approx(12000.0)


def test_fd_flow_zero_at_jam(ref_edge: EdgeParams) -> None:
    for u in (40.0, 80.0, 120.0):
        assert fd_flow(ref_edge, ref_edge.rho_jam, u) == pytest.approx(0.0, abs=1e-9)


def test_fd_flow_continuous_at_kink(ref_edge: EdgeParams) -> None:
    for u in (40.0, 80.0, 120.0):
        rho_c = critical_density(ref_edge, u)
        congested = tau(ref_edge) * ref_edge.u_free * (ref_edge.rho_jam - rho_c)
        assert fd_flow(ref_edge, rho_c, u) == pytest.approx(u * rho_c)
        assert congested == pytest.approx(u * rho_c, rel=1e-9)


def test_fd_flow_unimodal(ref_edge: EdgeParams) -> None:
    u = 80.0
    rho_c = critical_density(ref_edge, u)
    rising = [fd_flow(ref_edge, r, u) for r in np.linspace(0.0, rho_c, 50)]
    falling = [fd_flow(ref_edge, r, u) for r in np.linspace(rho_c, ref_edge.rho_jam, 50)]
    assert all(b >= a - 1e-9 for a, b in zip(rising, rising[1:]))
    assert all(b <= a + 1e-9 for a, b in zip(falling, falling[1:]))


def test_fd_flow_rejects_out_of_range(ref_edge: EdgeParams) -> None:
    with pytest.raises(ValueError):
        fd_flow(ref_edge, -1.0, 80.0)
    with pytest.raises(ValueError):
        fd_flow(ref_edge, 100.0, 150.0)


def test_vectorized_critical_densities_match_scalar(tiny_cfg: HighwayConfig) -> None:
    u = np.array([[60.0, 100.0, 60.0], [100.0, 100.0, 60.0]])
    crit = critical_densities(tiny_cfg, u)
    assert crit.shape == u.shape
    for e, edge in enumerate(tiny_cfg.edges):
        for t in range(3):
            assert crit[e, t] == pytest.approx(critical_density(edge, u[e, t]))
    np.testing.assert_allclose(max_critical_density(tiny_cfg), [100.0, 100.0])


def test_stability_ok_for_thirty_second_slots() -> None:
    edges = tuple(EdgeParams(id=i, length=2.0, f_cap=3.1e4, rho_jam=1050.0, u_free=140.0) for i in (1, 2))
    cfg = HighwayConfig(edges=edges, delta=1.0 / 120.0, horizon=20, gamma=(40.0, 120.0))
    assert check_stability(cfg).ok


def test_stability_violation_reports_edge() -> None:
    edge = EdgeParams(id=1, length=0.4, f_cap=3.1e4, rho_jam=1050.0, u_free=140.0)
    cfg = HighwayConfig(edges=(edge,), delta=1.0 / 60.0, horizon=5, gamma=(120.0,))
    report = check_stability(cfg)
    assert not report.ok
    assert report.violations[0].edge == 1
    assert report.violations[0].h == pytest.approx(1.0 / 24.0)
    assert report.violations[0].limit == pytest.approx(1.0 / 120.0)


def test_sufficient_eta_bar(tiny_cfg: HighwayConfig) -> None:
    assert sufficient_eta_bar(tiny_cfg) == pytest.approx(100.0 / (3 * 8000.0))


def test_event_applies_only_inside_window(tiny_cfg: HighwayConfig) -> None:
    event = EdgeEvent(edge=2, start_slot=2, end_slot=4, cap_factor=0.5, jam_factor=0.8)
    cfg = HighwayConfig(edges=tiny_cfg.edges, delta=tiny_cfg.delta, horizon=3, gamma=tiny_cfg.gamma,
                        events=(event,))
    assert active_config(cfg, 1) is cfg
    during = active_config(cfg, 3)
    assert during.edges[1].f_cap == pytest.approx(4000.0)
    assert during.edges[1].rho_jam == pytest.approx(160.0)
    assert during.edges[0].f_cap == pytest.approx(8000.0)
    assert active_config(cfg, 4) is cfg


def test_event_explicit_values_win(tiny_cfg: HighwayConfig) -> None:
    event = EdgeEvent(edge=1, cap_factor=0.5, f_cap=7000.0)
    cfg = HighwayConfig(edges=tiny_cfg.edges, delta=tiny_cfg.delta, horizon=3, gamma=tiny_cfg.gamma,
                        events=(event,))
    assert active_config(cfg, 0).edges[0].f_cap == pytest.approx(7000.0)


def test_planning_config_freezes_events(tiny_cfg: HighwayConfig) -> None:
    event = EdgeEvent(edge=1, start_slot=5, cap_factor=0.5)
    cfg = HighwayConfig(edges=tiny_cfg.edges, delta=tiny_cfg.delta, horizon=3, gamma=tiny_cfg.gamma,
                        events=(event,))
    before = planning_config(cfg, 0)
    after = planning_config(cfg, 5)
    assert before.events == () and after.events == ()
    assert before.edges[0].f_cap == pytest.approx(8000.0)
    assert after.edges[0].f_cap == pytest.approx(4000.0)
    assert planning_config(tiny_cfg) is tiny_cfg


def test_event_rejects_bad_window() -> None:
    with pytest.raises(HighwayConfigError):
        EdgeEvent(edge=1, start_slot=3, end_slot=3)
    with pytest.raises(HighwayConfigError):
        EdgeEvent(edge=1, cap_factor=0.0)
