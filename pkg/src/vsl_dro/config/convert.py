"""Turn a loaded RunConfig into highway, sample, radius and pool objects."""
from __future__ import annotations

import logging
from pathlib import Path

from vsl_dro.config.schema import RunConfig
from vsl_dro.core.errors import ConfigError, HighwayConfigError, SampleFormatError, ScheduleError
from vsl_dro.core.models import EdgeEvent, EdgeParams, HighwayConfig, SampleSpec, ScenarioSample, SpeedSchedule
from vsl_dro.dro.radius import RadiusParams, wasserstein_radius
from vsl_dro.dro.tuning import TuningResult, radius_grid, search_controller, tune_radius
from vsl_dro.formulation.instance import InstanceData
from vsl_dro.highway.fundamental import check_stability, sufficient_eta_bar
from vsl_dro.issa.pool import CandidatePool
from vsl_dro.mpc.driver import MpcConfig
from vsl_dro.scenario.generator import generate_samples
from vsl_dro.scenario.io import load_samples

logger = logging.getLogger(__name__)


def build_highway(run: RunConfig) -> HighwayConfig:
    """Highway with every module-level invariant checked, stability included."""
    hw = run.highway
    edges: list[EdgeParams] = []
    for i, e in enumerate(hw.edges):
        try:
            edges.append(EdgeParams(
                id=e.id, length=e.length, lanes=e.lanes, f_cap=e.f_cap, rho_jam=e.rho_jam, u_free=e.u_free,
                has_onramp=e.has_onramp, has_offramp=e.has_offramp,
            ))
        except HighwayConfigError as err:
            raise ConfigError(str(err), path=f"highway.edges[{i}]") from err
    events: list[EdgeEvent] = []
    for i, ev in enumerate(hw.events):
        if not 1 <= ev.edge <= len(edges):
            raise ConfigError(f"edge {ev.edge} does not exist", path=f"highway.events[{i}].edge")
        try:
            events.append(EdgeEvent(
                edge=ev.edge, start_slot=ev.start_slot, end_slot=ev.end_slot, cap_factor=ev.cap_factor,
                jam_factor=ev.jam_factor, f_cap=ev.f_cap, rho_jam=ev.rho_jam, u_free=ev.u_free,
            ))
        except HighwayConfigError as err:
            raise ConfigError(str(err), path=f"highway.events[{i}]") from err
    try:
        cfg = HighwayConfig(
            edges=tuple(edges),
            delta=hw.delta_s / 3600.0,
            horizon=hw.horizon,
            gamma=tuple(float(g) for g in hw.gamma),
            events=tuple(events),
        )
    except HighwayConfigError as err:
        raise ConfigError(str(err), path="highway") from err

    report = check_stability(cfg)
    if not report.ok:
        worst = ", ".join(f"edge {v.edge}: h={v.h:.6g} > {v.limit:.6g}" for v in report.violations)
        raise ConfigError(f"time step too long for the fastest speed ({worst})", path="highway.delta_s")
    return cfg


def build_sample_spec(run: RunConfig) -> SampleSpec:
    s = run.samples
    try:
        return SampleSpec(
            omega=(float(s.omega[0]), float(s.omega[1])),
            rho0=(float(s.rho0[0]), float(s.rho0[1])),
            r_in=(float(s.r_in[0]), float(s.r_in[1])),
            r_out=(float(s.r_out[0]), float(s.r_out[1])),
            seed=s.seed if s.seed is not None else run.seed,
        )
    except SampleFormatError as err:
        raise ConfigError(str(err), path=f"samples.{err.field}" if err.field else "samples") from err


def training_samples(run: RunConfig, cfg: HighwayConfig, spec: SampleSpec | None = None) -> list[ScenarioSample]:
    """Samples from ``samples.file`` when set, else ``samples.count`` generated draws."""
    if run.samples.file is not None:
        try:
            samples = load_samples(run.samples.file, cfg)
        except SampleFormatError as err:
            raise ConfigError(str(err), path="samples.file") from err
        logger.info("Loaded %d samples from %s", len(samples), run.samples.file)
        return samples
    spec = spec if spec is not None else build_sample_spec(run)
    try:
        return generate_samples(cfg, spec, run.samples.count)
    except SampleFormatError as err:
        raise ConfigError(str(err), path=f"samples.{err.field}" if err.field else "samples") from err


def fallback_schedule(run: RunConfig, cfg: HighwayConfig) -> SpeedSchedule:
    """Configured fallback speeds, or the slowest menu speed on every edge."""
    speeds = list(run.mpc.fallback) or [cfg.gamma[0]] * cfg.n
    if len(speeds) != cfg.n:
        raise ConfigError(f"needs one speed per edge ({cfg.n}), got {len(speeds)}", path="mpc.fallback")
    try:
        return SpeedSchedule.constant(cfg.gamma, speeds, cfg.horizon)
    except ScheduleError as err:
        raise ConfigError(str(err), path="mpc.fallback") from err


def eta_bar_for(run: RunConfig, cfg: HighwayConfig) -> float:
    return run.algorithm.eta_bar if run.algorithm.eta_bar is not None else sufficient_eta_bar(cfg)


def resolve_epsilon(run: RunConfig, cfg: HighwayConfig, spec: SampleSpec, n_samples: int | None = None) -> float:
    """Radius for ``radius.mode``: the given value, the concentration formula, or Monte Carlo tuning."""
    r = run.radius
    count = n_samples if n_samples is not None else run.samples.count
    if r.mode == "given":
        return r.epsilon
    if r.mode == "formula":
        try:
            params = RadiusParams(beta=r.beta, n_samples=count, ell=cfg.n * cfg.horizon, a=r.a, c1=r.c1, c2=r.c2)
        except ValueError as err:
            raise ConfigError(str(err), path="radius") from err
        eps = wasserstein_radius(params)
        logger.info("Radius from the concentration bound: %.6g (beta=%g, N=%d)", eps, r.beta, count)
        return eps
    return tune_for(run, cfg, spec, count).epsilon


def tune_for(run: RunConfig, cfg: HighwayConfig, spec: SampleSpec, n_samples: int | None = None) -> TuningResult:
    """Monte Carlo tuning with the configured grid, trials and per-trial search budget."""
    r = run.radius
    return tune_radius(
        cfg, spec, beta=r.beta, trials=r.trials,
        n_samples=n_samples if n_samples is not None else run.samples.count,
        grid=radius_grid(r.grid_min, r.grid_max, r.grid_points), n_val=r.n_val,
        eta_bar=run.algorithm.eta_bar, hold_slots=run.algorithm.hold_slots, threads=run.threads,
        controller=search_controller(r.search_budget_s, run.algorithm.certificate_method),
    )


def build_instance(run: RunConfig, cfg: HighwayConfig, samples: list[ScenarioSample], epsilon: float) -> InstanceData:
    return InstanceData(cfg, samples, epsilon=epsilon, eta_bar=eta_bar_for(run, cfg),
                        hold_slots=run.algorithm.hold_slots)


def build_pool(run: RunConfig, cfg: HighwayConfig) -> CandidatePool:
    """Stored pool (if any) plus the fallback and every configured seed schedule."""
    p = run.pool
    if p.path is not None:
        pool = CandidatePool.load(Path(p.path), cfg.gamma, capacity=p.capacity)
    else:
        pool = CandidatePool(gamma=cfg.gamma, capacity=p.capacity)
    pool.add(fallback_schedule(run, cfg))
    for i, speeds in enumerate(p.seed_speeds):
        if len(speeds) != cfg.n:
            raise ConfigError(f"needs one speed per edge ({cfg.n}), got {len(speeds)}", path=f"pool.seed_speeds[{i}]")
        try:
            pool.add(SpeedSchedule.constant(cfg.gamma, speeds, cfg.horizon))
        except ScheduleError as err:
            raise ConfigError(str(err), path=f"pool.seed_speeds[{i}]") from err
    return pool


def build_mpc_config(run: RunConfig, cfg: HighwayConfig, epsilon: float) -> MpcConfig:
    m = run.mpc
    mpc_cfg = MpcConfig(
        steps=m.steps,
        fallback=tuple(float(u) for u in fallback_schedule(run, cfg).u[:, 0]),
        epsilon=epsilon,
        n_samples=m.n_samples if m.n_samples is not None else run.samples.count,
        replan_every=m.replan_every,
        budget_s=run.algorithm.budget_s,
        gap_tol=run.algorithm.gap_tol,
        hold_slots=run.algorithm.hold_slots,
        radius_mode=run.radius.mode,
        eta_bar=run.algorithm.eta_bar,
        pool_capacity=run.pool.capacity,
        threads=run.threads,
    )
    try:
        mpc_cfg.validate(cfg)
    except ValueError as err:
        raise ConfigError(str(err), path="mpc") from err
    return mpc_cfg
