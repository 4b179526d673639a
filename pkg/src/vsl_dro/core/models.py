"""Core data models for vsl-dro.

Units are fixed repo-wide: km, hours, vehicles. Speeds are km/h, densities
veh/km, flows veh/h and the slot length ``delta`` is stored in hours.
Edge ids are 1-based in configuration and reports; array axes are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from vsl_dro.core.errors import HighwayConfigError, SampleFormatError, ScheduleError

# ---------------------------------------------------------------------------
# Status enums
# ---------------------------------------------------------------------------

class SolveStatus(Enum):
    """Outcome of an LP or MILP solve."""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    BUDGET_INCUMBENT = "budget_incumbent"
    BUDGET_NO_INCUMBENT = "budget_no_incumbent"
    NUMERICAL = "numerical"


class CertificateStatus(Enum):
    FINITE = "finite"
    INFEASIBLE = "infeasible"


class TerminationReason(Enum):
    """Why the integer solution search stopped."""

    GAP_CLOSED = "gap_closed"
    UBP_INFEASIBLE = "ubp_infeasible"
    BUDGET = "budget"
    NUMERICAL = "numerical"


class Regime(Enum):
    """Density regime of a sample set against the speed menu."""

    EMPTY = "empty"
    TUNABLE = "tunable"
    CONGESTED = "congested"


# ---------------------------------------------------------------------------
# Highway description
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeParams:
    """One highway segment."""

    id: int
    length: float  # km
    lanes: int = 1  # metadata only
    f_cap: float = 0.0  # veh/h
    rho_jam: float = 0.0  # veh/km
    u_free: float = 0.0  # km/h
    has_onramp: bool = True
    has_offramp: bool = True

    def __post_init__(self) -> None:
        for name in ("length", "f_cap", "rho_jam", "u_free"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise HighwayConfigError(f"edge {self.id}: {name} must be positive, got {value}")
        if self.u_free * self.rho_jam <= self.f_cap:
            raise HighwayConfigError(
                f"edge {self.id}: u_free * rho_jam ({self.u_free * self.rho_jam:g}) "
                f"must exceed f_cap ({self.f_cap:g})"
            )


@dataclass(frozen=True)
class EdgeEvent:
    """Time-windowed override of one edge's parameters (accident, lane closure).

    Active for absolute slots ``start_slot <= slot < end_slot``; ``end_slot``
    of ``None`` means open-ended. Explicit values win over factors.
    """

    edge: int
    start_slot: int = 0
    end_slot: int | None = None
    cap_factor: float = 1.0
    jam_factor: float = 1.0
    f_cap: float | None = None
    rho_jam: float | None = None
    u_free: float | None = None

    def __post_init__(self) -> None:
        if self.start_slot < 0:
            raise HighwayConfigError(f"event on edge {self.edge}: start_slot must be >= 0")
        if self.end_slot is not None and self.end_slot <= self.start_slot:
            raise HighwayConfigError(f"event on edge {self.edge}: end_slot must exceed start_slot")
        if self.cap_factor <= 0 or self.jam_factor <= 0:
            raise HighwayConfigError(f"event on edge {self.edge}: factors must be positive")

    def active(self, slot: int) -> bool:
        return self.start_slot <= slot and (self.end_slot is None or slot < self.end_slot)


@dataclass(frozen=True)
class HighwayConfig:
    """Ordered edges, time grid and speed-limit menu.

    ``horizon`` is the number of planning slots T; ``gamma`` the menu of
    admissible speed limits in strictly increasing order.
    """

    edges: tuple[EdgeParams, ...]
    delta: float  # hours
    horizon: int
    gamma: tuple[float, ...]
    events: tuple[EdgeEvent, ...] = ()

    def __post_init__(self) -> None:
        if not self.edges:
            raise HighwayConfigError("highway needs at least one edge")
        ids = [e.id for e in self.edges]
        if ids != list(range(1, len(ids) + 1)):
            raise HighwayConfigError(f"edge ids must be 1..n in order, got {ids}")
        if self.delta <= 0:
            raise HighwayConfigError(f"delta must be positive, got {self.delta}")
        if self.horizon < 1:
            raise HighwayConfigError(f"horizon must be >= 1, got {self.horizon}")
        if not self.gamma:
            raise HighwayConfigError("speed menu is empty")
        if any(g <= 0 for g in self.gamma):
            raise HighwayConfigError(f"speed menu entries must be positive: {self.gamma}")
        if any(b <= a for a, b in zip(self.gamma, self.gamma[1:])):
            raise HighwayConfigError(f"speed menu must be strictly increasing: {self.gamma}")
        slowest_free = min(e.u_free for e in self.edges)
        if self.gamma[-1] > slowest_free:
            raise HighwayConfigError(
                f"largest speed limit {self.gamma[-1]:g} exceeds the smallest free-flow speed {slowest_free:g}"
            )
        for event in self.events:
            if not 1 <= event.edge <= len(self.edges):
                raise HighwayConfigError(f"event references unknown edge {event.edge}")

    @property
    def n(self) -> int:
        return len(self.edges)

    @property
    def m(self) -> int:
        return len(self.gamma)

    @property
    def menu(self) -> np.ndarray:
        return np.asarray(self.gamma, dtype=float)

    @property
    def h(self) -> np.ndarray:
        """Per-edge ratio delta / length, in h/km."""
        return np.array([self.delta / e.length for e in self.edges])

    @property
    def f_cap(self) -> np.ndarray:
        return np.array([e.f_cap for e in self.edges])

    @property
    def rho_jam(self) -> np.ndarray:
        return np.array([e.rho_jam for e in self.edges])

    @property
    def u_free(self) -> np.ndarray:
        return np.array([e.u_free for e in self.edges])

    @property
    def tau(self) -> np.ndarray:
        f, rj, uf = self.f_cap, self.rho_jam, self.u_free
        return f / (uf * rj - f)


# ---------------------------------------------------------------------------
# Uncertain inputs
# ---------------------------------------------------------------------------

@dataclass
class ScenarioSample:
    """One realization of all random inputs over the horizon.

    ``omega`` has shape (T,), ``rho0`` (n,), ``r_in`` and ``r_out`` (n, T).
    """

    omega: np.ndarray
    rho0: np.ndarray
    r_in: np.ndarray
    r_out: np.ndarray

    def __post_init__(self) -> None:
        self.omega = np.asarray(self.omega, dtype=float).reshape(-1)
        self.rho0 = np.asarray(self.rho0, dtype=float).reshape(-1)
        self.r_in = np.atleast_2d(np.asarray(self.r_in, dtype=float))
        self.r_out = np.atleast_2d(np.asarray(self.r_out, dtype=float))
        n, t = len(self.rho0), len(self.omega)
        for name in ("r_in", "r_out"):
            arr = getattr(self, name)
            if arr.shape[0] != n:
                raise SampleFormatError(f"{name} edge count", field=name, expected=n, actual=arr.shape[0])
            if arr.shape[1] != t:
                raise SampleFormatError(f"{name} horizon length", field=name, expected=t, actual=arr.shape[1])

    @property
    def n(self) -> int:
        return len(self.rho0)

    @property
    def horizon(self) -> int:
        return len(self.omega)

    def with_rho0(self, rho0: np.ndarray) -> ScenarioSample:
        return ScenarioSample(self.omega.copy(), np.asarray(rho0, dtype=float).copy(), self.r_in.copy(),
                              self.r_out.copy())


@dataclass(frozen=True)
class SampleSpec:
    """Uniform ranges (lo, hi) for every random input plus an RNG seed."""

    omega: tuple[float, float]
    rho0: tuple[float, float]
    r_in: tuple[float, float] = (0.0, 0.0)
    r_out: tuple[float, float] = (0.0, 0.0)
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("omega", "rho0", "r_in", "r_out"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise SampleFormatError(f"{name}: lower bound {lo} exceeds upper bound {hi}", field=name)
            if lo < 0:
                raise SampleFormatError(f"{name}: values must be nonnegative, got {lo}", field=name)
        for name in ("r_in", "r_out"):
            if getattr(self, name)[1] >= 1.0:
                raise SampleFormatError(f"{name}: fraction must be < 1", field=name)


# ---------------------------------------------------------------------------
# Schedules and trajectories
# ---------------------------------------------------------------------------

@dataclass
class SpeedSchedule:
    """Speed limits u_e(t) with their menu indices.

    ``u`` and ``indices`` have shape (n, T); ``x`` derives the one-hot
    encoding of shape (n, m, T).
    """

    u: np.ndarray
    indices: np.ndarray
    gamma: tuple[float, ...]

    @classmethod
    def from_indices(cls, gamma: tuple[float, ...], indices: np.ndarray) -> SpeedSchedule:
        idx = np.asarray(indices, dtype=int)
        if idx.ndim != 2:
            raise ScheduleError(f"schedule must be 2-D (edges x slots), got shape {idx.shape}")
        if idx.size and (idx.min() < 0 or idx.max() >= len(gamma)):
            raise ScheduleError(f"menu index out of range 0..{len(gamma) - 1}")
        return cls(u=np.asarray(gamma, dtype=float)[idx], indices=idx, gamma=tuple(gamma))

    @classmethod
    def from_speeds(cls, gamma: tuple[float, ...], speeds: np.ndarray) -> SpeedSchedule:
        u = np.atleast_2d(np.asarray(speeds, dtype=float))
        menu = np.asarray(gamma, dtype=float)
        match = np.isclose(u[..., None], menu, rtol=0.0, atol=1e-9)
        if not match.any(axis=-1).all():
            bad = sorted({float(v) for v in u[~match.any(axis=-1)]})
            raise ScheduleError(f"speeds {bad} are not in the menu {list(gamma)}")
        return cls.from_indices(gamma, match.argmax(axis=-1))

    @classmethod
    def from_binary(cls, gamma: tuple[float, ...], x: np.ndarray) -> SpeedSchedule:
        """Decode x of shape (n, m, T); every (e, t) must select exactly one level."""
        xb = np.rint(np.asarray(x, dtype=float)).astype(int)
        if not np.all(xb.sum(axis=1) == 1):
            raise ScheduleError("binary encoding must select exactly one speed per (edge, slot)")
        return cls.from_indices(gamma, xb.argmax(axis=1))

    @classmethod
    def constant(cls, gamma: tuple[float, ...], per_edge: list[float] | np.ndarray, horizon: int) -> SpeedSchedule:
        speeds = np.repeat(np.asarray(per_edge, dtype=float)[:, None], horizon, axis=1)
        return cls.from_speeds(gamma, speeds)

    @property
    def n(self) -> int:
        return int(self.u.shape[0])

    @property
    def horizon(self) -> int:
        return int(self.u.shape[1])

    @property
    def x(self) -> np.ndarray:
        onehot = np.zeros((self.n, len(self.gamma), self.horizon), dtype=int)
        e_idx, t_idx = np.meshgrid(np.arange(self.n), np.arange(self.horizon), indexing="ij")
        onehot[e_idx, self.indices, t_idx] = 1
        return onehot

    def key(self) -> tuple[int, ...]:
        """Hashable identity of the binary assignment."""
        return tuple(int(v) for v in self.indices.reshape(-1))

    def shifted(self, slots: int, fill_last: bool = True) -> SpeedSchedule:
        """Drop the first ``slots`` columns, repeating the last column to keep T."""
        if slots <= 0:
            return self
        tail = self.indices[:, slots:]
        pad_col = self.indices[:, -1:] if fill_last else self.indices[:, :1]
        pad = np.repeat(pad_col, min(slots, self.horizon), axis=1)
        return SpeedSchedule.from_indices(self.gamma, np.concatenate([tail, pad], axis=1)[:, : self.horizon])


@dataclass(frozen=True)
class Violation:
    """First admissibility violation found while propagating a sample."""

    edge: int  # 1-based
    t: int
    constraint: str  # "capacity", "supply", "negative" or "jam"


@dataclass
class DensityTrajectory:
    """Densities of shape (n, T+1); column 0 is the sample's initial state."""

    rho: np.ndarray
    admissible: bool
    first_violation: Violation | None = None


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

@dataclass
class Certificate:
    """Worst-case expected average flow J(u) over the ambiguity ball."""

    value: float | None
    epsilon: float
    status: CertificateStatus
    reason: str = ""
    empirical: float | None = None  # sample-average flow, when admissible

    @property
    def finite(self) -> bool:
        return self.status == CertificateStatus.FINITE


@dataclass
class RegimeReport:
    regime: Regime
    max_density: float
    max_critical: float
    nontrivial: bool  # every density entry >= epsilon
    notes: list[str] = field(default_factory=list)
