"""Uniform generation and validation of scenario samples."""
from __future__ import annotations

import numpy as np

from vsl_dro.core.errors import SampleFormatError
from vsl_dro.core.models import HighwayConfig, SampleSpec, ScenarioSample


def validate_sample(cfg: HighwayConfig, sample: ScenarioSample, label: str = "sample") -> None:
    """Raise SampleFormatError unless ``sample`` matches ``cfg``."""
    if sample.n != cfg.n:
        raise SampleFormatError(f"{label}: rho0 edge count", field="rho0", expected=cfg.n, actual=sample.n)
    if sample.horizon != cfg.horizon:
        raise SampleFormatError(
            f"{label}: omega horizon length", field="omega", expected=cfg.horizon, actual=sample.horizon
        )
    for name in ("omega", "rho0", "r_in", "r_out"):
        arr = getattr(sample, name)
        if not np.all(np.isfinite(arr)):
            raise SampleFormatError(f"{label}: {name} contains non-finite values", field=name)
        if np.any(arr < 0):
            raise SampleFormatError(f"{label}: {name} must be nonnegative", field=name)
    for name in ("r_in", "r_out"):
        if np.any(getattr(sample, name) >= 1.0):
            raise SampleFormatError(f"{label}: {name} fraction must be < 1", field=name)
    over = sample.rho0 > cfg.rho_jam
    if np.any(over):
        edge = int(np.argmax(over)) + 1
        raise SampleFormatError(f"{label}: rho0 exceeds jam density on edge {edge}", field="rho0")
    no_on = np.array([not e.has_onramp for e in cfg.edges])
    no_off = np.array([not e.has_offramp for e in cfg.edges])
    if np.any(sample.r_in[no_on] != 0):
        raise SampleFormatError(f"{label}: r_in must be zero on edges without an on-ramp", field="r_in")
    if np.any(sample.r_out[no_off] != 0):
        raise SampleFormatError(f"{label}: r_out must be zero on edges without an off-ramp", field="r_out")


def validate_spec(cfg: HighwayConfig, spec: SampleSpec) -> None:
    if spec.rho0[1] > float(cfg.rho_jam.min()):
        raise SampleFormatError(
            f"rho0 upper bound {spec.rho0[1]} exceeds the smallest jam density {cfg.rho_jam.min()}", field="rho0"
        )


def _uniform(rng: np.random.Generator, bounds: tuple[float, float], shape: tuple[int, ...]) -> np.ndarray:
    lo, hi = bounds
    if lo == hi:
        return np.full(shape, float(lo))
    return rng.uniform(lo, hi, size=shape)


def generate_samples(
    cfg: HighwayConfig,
    spec: SampleSpec,
    count: int,
    rng: np.random.Generator | None = None,
) -> list[ScenarioSample]:
    """Draw ``count`` i.i.d. samples; deterministic given ``spec.seed`` (or ``rng``)."""
    if count < 1:
        raise ValueError(f"sample count must be >= 1, got {count}")
    validate_spec(cfg, spec)
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    on = np.array([e.has_onramp for e in cfg.edges], dtype=float)[:, None]
    off = np.array([e.has_offramp for e in cfg.edges], dtype=float)[:, None]
    n, horizon = cfg.n, cfg.horizon
    samples: list[ScenarioSample] = []
    for _ in range(count):
        samples.append(ScenarioSample(
            omega=_uniform(rng, spec.omega, (horizon,)),
            rho0=_uniform(rng, spec.rho0, (n,)),
            r_in=_uniform(rng, spec.r_in, (n, horizon)) * on,
            r_out=_uniform(rng, spec.r_out, (n, horizon)) * off,
        ))
    return samples


def sample_streams(seed: int, count: int) -> list[np.random.Generator]:
    """Independent generators spawned from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def validation_rng(seed: int) -> np.random.Generator:
    """Stream disjoint from the training stream ``default_rng(seed)``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x5A11,)))


def mean_sample(cfg: HighwayConfig, spec: SampleSpec) -> ScenarioSample:
    """Deterministic sample at the midpoint of every range."""
    def mid(b: tuple[float, float]) -> float:
        return 0.5 * (b[0] + b[1])

    on = np.array([e.has_onramp for e in cfg.edges], dtype=float)[:, None]
    off = np.array([e.has_offramp for e in cfg.edges], dtype=float)[:, None]
    return ScenarioSample(
        omega=np.full(cfg.horizon, mid(spec.omega)),
        rho0=np.full(cfg.n, mid(spec.rho0)),
        r_in=np.full((cfg.n, cfg.horizon), mid(spec.r_in)) * on,
        r_out=np.full((cfg.n, cfg.horizon), mid(spec.r_out)) * off,
    )
