"""Density regime diagnosis of a sample set against the speed menu."""
from __future__ import annotations

import logging

import numpy as np

from vsl_dro.core.models import Regime, RegimeReport, SpeedSchedule
from vsl_dro.formulation.instance import InstanceData
from vsl_dro.highway.fundamental import max_critical_density
from vsl_dro.traffic.ctm import propagate

logger = logging.getLogger(__name__)


def sample_densities(inst: InstanceData) -> np.ndarray:
    """Planning densities (N, n, T) of every sample under the fastest constant schedule."""
    cfg = inst.cfg
    fastest = SpeedSchedule.constant(cfg.gamma, [cfg.gamma[-1]] * cfg.n, cfg.horizon)
    return np.stack([propagate(cfg, fastest, s).rho[:, : cfg.horizon] for s in inst.samples])


def diagnose_regime(inst: InstanceData, densities: np.ndarray | None = None) -> RegimeReport:
    """Classify the samples as empty, tunable or congested.

    Congested means some density sits above max_u rho_c(u) + epsilon, which
    no speed limit in the menu can certify. ``nontrivial`` reports whether
    every density is at least epsilon.
    """
    rho = sample_densities(inst) if densities is None else np.asarray(densities, dtype=float)
    crit = max_critical_density(inst.cfg)  # (n,)
    eps = inst.epsilon
    max_density = float(rho.max()) if rho.size else 0.0
    notes: list[str] = []
    if rho.size == 0 or np.all(rho == 0.0):
        regime = Regime.EMPTY
    else:
        excess = rho - (crit[None, :, None] + eps)
        if np.any(excess > 0):
            regime = Regime.CONGESTED
            _, e, t = np.unravel_index(int(np.argmax(excess)), excess.shape)
            notes.append(f"edge {int(e) + 1} at t={int(t)} exceeds the largest critical density plus epsilon")
        else:
            regime = Regime.TUNABLE
    nontrivial = bool(rho.size) and bool(np.all(rho >= eps))
    if not nontrivial and regime != Regime.EMPTY:
        notes.append("some densities fall below epsilon; the cone analysis may lose optimizers")
    report = RegimeReport(
        regime=regime,
        max_density=max_density,
        max_critical=float(crit.max()),
        nontrivial=nontrivial,
        notes=notes,
    )
    logger.info("Density regime: %s (max density %.6g, max critical %.6g)", regime.value, max_density,
                report.max_critical)
    return report
