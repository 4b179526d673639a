"""Warm-start pool of previously feasible candidates, persisted as JSON."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from vsl_dro.core.errors import ScheduleError
from vsl_dro.core.models import SpeedSchedule

if TYPE_CHECKING:
    from vsl_dro.issa.search import IssaReport

logger = logging.getLogger(__name__)


@dataclass
class PoolEntry:
    schedule: SpeedSchedule
    objective: float | None = None


@dataclass
class CandidatePool:
    """FIFO-capped list of schedules tried first by the next search."""

    gamma: tuple[float, ...]
    capacity: int = 32
    entries: list[PoolEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError(f"pool capacity must be >= 1, got {self.capacity}")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, schedule: SpeedSchedule) -> bool:
        key = schedule.key()
        return any(e.schedule.key() == key and e.schedule.u.shape == schedule.u.shape for e in self.entries)

    def add(self, schedule: SpeedSchedule, objective: float | None = None) -> bool:
        if tuple(schedule.gamma) != tuple(self.gamma):
            raise ScheduleError("pool schedule menu differs from the pool menu")
        if schedule in self:
            return False
        self.entries.append(PoolEntry(schedule, objective))
        while len(self.entries) > self.capacity:
            evicted = self.entries.pop(0)
            logger.debug("Pool full; evicted %s", evicted.schedule.u[:, 0].tolist())
        return True

    def schedules(self) -> list[SpeedSchedule]:
        return [e.schedule for e in self.entries]

    def to_dict(self) -> dict[str, Any]:
        return {
            "gamma": list(self.gamma),
            "capacity": self.capacity,
            "entries": [
                {"indices": e.schedule.indices.tolist(), "objective": e.objective} for e in self.entries
            ],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CandidatePool:
        gamma = tuple(float(g) for g in data["gamma"])
        pool = cls(gamma=gamma, capacity=int(data.get("capacity", 32)))
        for raw in data.get("entries", []):
            sched = SpeedSchedule.from_indices(gamma, np.asarray(raw["indices"], dtype=int))
            obj = raw.get("objective")
            pool.entries.append(PoolEntry(sched, None if obj is None else float(obj)))
        pool.entries = pool.entries[-pool.capacity:]
        return pool

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
        tmp.replace(path)
        logger.info("Saved pool of %d candidates to %s", len(self), path)
        return path

    @classmethod
    def load(cls, path: str | Path, gamma: tuple[float, ...], capacity: int = 32) -> CandidatePool:
        """Read a stored pool; a missing, unreadable or mismatched file gives an empty pool."""
        path = Path(path)
        empty = cls(gamma=tuple(gamma), capacity=capacity)
        if not path.exists():
            return empty
        try:
            pool = cls.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except (json.JSONDecodeError, OSError, KeyError, TypeError, ValueError) as exc:
            logger.warning("Ignoring unreadable pool %s: %s", path, exc)
            return empty
        if pool.gamma != tuple(gamma):
            logger.warning("Ignoring pool %s: menu %s differs from %s", path, list(pool.gamma), list(gamma))
            return empty
        pool.capacity = capacity
        pool.entries = pool.entries[-capacity:]
        return pool


def update_pool(pool: CandidatePool, report: IssaReport) -> CandidatePool:
    """Append the run's feasible candidates in examination order; oldest entries are evicted first."""
    added = 0
    for record in report.records:
        if record.feasible and pool.add(record.schedule, record.objective):
            added += 1
    if added:
        logger.info("Pool updated: %d new candidates (%d stored)", added, len(pool))
    return pool
