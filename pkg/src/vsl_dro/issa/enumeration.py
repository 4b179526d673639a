"""Exhaustive schedule enumeration for small instances."""
from __future__ import annotations

import itertools
import math
from collections.abc import Iterator

import numpy as np

from vsl_dro.core.models import Certificate, HighwayConfig, SpeedSchedule
from vsl_dro.dro.certificate import certificate
from vsl_dro.formulation.instance import InstanceData

MAX_ENUMERATION = 1 << 20


def schedule_count(cfg: HighwayConfig, hold_slots: int = 1) -> int:
    blocks = math.ceil(cfg.horizon / hold_slots)
    return int(cfg.m ** (cfg.n * blocks))


def all_schedules(cfg: HighwayConfig, hold_slots: int = 1) -> Iterator[SpeedSchedule]:
    """Every schedule constant within each hold block, in lexicographic index order."""
    count = schedule_count(cfg, hold_slots)
    if count > MAX_ENUMERATION:
        raise ValueError(f"{count} schedules exceed the enumeration limit {MAX_ENUMERATION}")
    blocks = math.ceil(cfg.horizon / hold_slots)
    block_of = np.arange(cfg.horizon) // hold_slots
    for combo in itertools.product(range(cfg.m), repeat=cfg.n * blocks):
        per_block = np.asarray(combo, dtype=int).reshape(cfg.n, blocks)
        yield SpeedSchedule.from_indices(cfg.gamma, per_block[:, block_of])


def brute_force(inst: InstanceData, method: str = "greedy") -> tuple[SpeedSchedule | None, Certificate | None]:
    """Best certificate over the whole schedule space; the first maximizer wins ties."""
    best: SpeedSchedule | None = None
    best_cert: Certificate | None = None
    for sched in all_schedules(inst.cfg, inst.hold_slots):
        cert = certificate(inst, sched, method)
        if cert.finite and cert.value is not None and (
            best_cert is None or best_cert.value is None or cert.value > best_cert.value
        ):
            best, best_cert = sched, cert
    return best, best_cert
