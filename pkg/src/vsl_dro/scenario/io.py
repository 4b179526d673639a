"""Sample files: JSON (canonical) and CSV export."""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from vsl_dro.core.errors import SampleFormatError
from vsl_dro.core.models import HighwayConfig, ScenarioSample
from vsl_dro.reports.writers import format_float, write_csv
from vsl_dro.scenario.generator import validate_sample

logger = logging.getLogger(__name__)


def sample_to_dict(sample: ScenarioSample) -> dict[str, Any]:
    return {
        "omega": sample.omega.tolist(),
        "rho0": sample.rho0.tolist(),
        "r_in": sample.r_in.tolist(),
        "r_out": sample.r_out.tolist(),
    }


def save_samples(path: str | Path, samples: list[ScenarioSample]) -> Path:
    """Write samples as a top-level JSON array (floats keep full precision)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps([sample_to_dict(s) for s in samples], indent=2), encoding="utf-8")
    tmp.replace(path)
    logger.info("Wrote %d samples to %s", len(samples), path)
    return path


def _as_array(entry: dict[str, Any], key: str, index: int) -> np.ndarray:
    if key not in entry:
        raise SampleFormatError(f"sample {index}: missing field '{key}'", field=key)
    try:
        return np.asarray(entry[key], dtype=float)
    except (TypeError, ValueError) as err:
        raise SampleFormatError(f"sample {index}: field '{key}' is not numeric ({err})", field=key) from err


def _check_matrix(arr: np.ndarray, key: str, index: int, n: int, horizon: int) -> None:
    if arr.ndim != 2:
        raise SampleFormatError(f"sample {index}: '{key}' must be an [n][T] array", field=key)
    if arr.shape[0] != n:
        raise SampleFormatError(f"sample {index}: '{key}' edge count", field=key, expected=n, actual=arr.shape[0])
    if arr.shape[1] != horizon:
        raise SampleFormatError(
            f"sample {index}: '{key}' horizon length", field=key, expected=horizon, actual=arr.shape[1]
        )


def load_samples(path: str | Path, cfg: HighwayConfig) -> list[ScenarioSample]:
    """Parse and validate a JSON sample file against ``cfg``."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise SampleFormatError(f"{path}: invalid JSON at line {err.lineno}: {err.msg}") from err
    if not isinstance(data, list) or not data:
        raise SampleFormatError(f"{path}: expected a non-empty top-level array of samples")
    samples: list[ScenarioSample] = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict):
            raise SampleFormatError(f"sample {i}: expected an object")
        omega = _as_array(entry, "omega", i)
        rho0 = _as_array(entry, "rho0", i)
        if omega.ndim != 1 or len(omega) != cfg.horizon:
            raise SampleFormatError(
                f"sample {i}: 'omega' horizon length", field="omega", expected=cfg.horizon, actual=omega.size
            )
        if rho0.ndim != 1 or len(rho0) != cfg.n:
            raise SampleFormatError(f"sample {i}: 'rho0' edge count", field="rho0", expected=cfg.n, actual=rho0.size)
        r_in = _as_array(entry, "r_in", i)
        r_out = _as_array(entry, "r_out", i)
        _check_matrix(r_in, "r_in", i, cfg.n, cfg.horizon)
        _check_matrix(r_out, "r_out", i, cfg.n, cfg.horizon)
        sample = ScenarioSample(omega=omega, rho0=rho0, r_in=r_in, r_out=r_out)
        validate_sample(cfg, sample, label=f"sample {i}")
        samples.append(sample)
    logger.debug("Loaded %d samples from %s", len(samples), path)
    return samples


def export_samples_csv(path: str | Path, samples: list[ScenarioSample]) -> Path:
    """One row per (sample, edge): rho0, then omega, r_in and r_out over t."""
    if not samples:
        raise ValueError("no samples to export")
    horizon = samples[0].horizon
    header = ["sample", "edge", "rho0"]
    header += [f"omega_{t}" for t in range(horizon)]
    header += [f"r_in_{t}" for t in range(horizon)]
    header += [f"r_out_{t}" for t in range(horizon)]
    rows: list[list[str]] = []
    for i, s in enumerate(samples):
        for e in range(s.n):
            row = [str(i), str(e + 1), format_float(s.rho0[e])]
            row += [format_float(v) for v in s.omega]
            row += [format_float(v) for v in s.r_in[e]]
            row += [format_float(v) for v in s.r_out[e]]
            rows.append(row)
    return write_csv(path, header, rows)
