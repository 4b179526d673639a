"""Configuration schema dataclasses for vsl-dro."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class EdgeConfig:
    """One highway segment as written in the config file."""

    id: int = 1
    length: float = 2.0  # km
    lanes: int = 1
    f_cap: float = 3.1e4  # veh/h
    rho_jam: float = 1050.0  # veh/km
    u_free: float = 140.0  # km/h
    has_onramp: bool = True
    has_offramp: bool = True


@dataclass
class EventConfig:
    """Time-windowed parameter override of one edge."""

    edge: int = 1
    start_slot: int = 0
    end_slot: int | None = None
    cap_factor: float = 1.0
    jam_factor: float = 1.0
    f_cap: float | None = None
    rho_jam: float | None = None
    u_free: float | None = None


@dataclass
class HighwaySection:
    delta_s: float = 30.0  # seconds; converted to hours when the highway is built
    horizon: int = 20
    gamma: list[float] = field(default_factory=lambda: [40.0, 60.0, 80.0, 100.0, 120.0])
    edges: list[EdgeConfig] = field(default_factory=lambda: [EdgeConfig(id=i) for i in range(1, 6)])
    events: list[EventConfig] = field(default_factory=list)


@dataclass
class SamplesSection:
    """Uniform sampling ranges, or a sample file that replaces them."""

    count: int = 3
    omega: list[float] = field(default_factory=lambda: [2.0e4, 2.4e4])
    rho0: list[float] = field(default_factory=lambda: [260.0, 260.0])
    r_in: list[float] = field(default_factory=lambda: [0.0, 0.05])
    r_out: list[float] = field(default_factory=lambda: [0.0, 0.03])
    seed: int | None = None
    file: str | None = None


@dataclass
class RadiusSection:
    """Radius selection: ``given`` uses ``epsilon``; ``formula`` and ``tuned`` derive it."""

    mode: str = "given"
    epsilon: float = 0.985
    beta: float = 0.05
    a: float = 2.0
    c1: float = 1.0
    c2: float = 1.0
    grid_min: float = 1e-3
    grid_max: float = 100.0
    grid_points: int = 31
    trials: int = 20
    n_val: int = 1000
    search_budget_s: float = 10.0  # per search in each tuning trial


@dataclass
class AlgorithmSection:
    budget_s: float = 60.0
    gap_tol: float = 0.0
    milp_gap: float = 1e-9
    eta_bar: float | None = None  # None: the sufficient level
    hold_slots: int = 1
    certificate_method: str = "greedy"


@dataclass
class PoolSection:
    capacity: int = 32
    path: str | None = None
    seed_speeds: list[list[float]] = field(default_factory=list)  # per-edge constant schedules


@dataclass
class MpcSection:
    steps: int = 20
    replan_every: int = 1
    n_samples: int | None = None  # None: samples.count
    fallback: list[float] = field(default_factory=list)  # empty: the slowest menu speed on every edge


@dataclass
class ValidationSection:
    replications: int = 200
    n_val: int = 1000


@dataclass
class AnalysisSection:
    grid_size: int = 5


@dataclass
class OutputSection:
    directory: str = "vsl-dro-out"


@dataclass
class RunConfig:
    """Top-level configuration for every vsl-dro command."""

    highway: HighwaySection = field(default_factory=HighwaySection)
    samples: SamplesSection = field(default_factory=SamplesSection)
    radius: RadiusSection = field(default_factory=RadiusSection)
    algorithm: AlgorithmSection = field(default_factory=AlgorithmSection)
    pool: PoolSection = field(default_factory=PoolSection)
    mpc: MpcSection = field(default_factory=MpcSection)
    validation: ValidationSection = field(default_factory=ValidationSection)
    analysis: AnalysisSection = field(default_factory=AnalysisSection)
    output: OutputSection = field(default_factory=OutputSection)
    seed: int = 0
    threads: int = 1
