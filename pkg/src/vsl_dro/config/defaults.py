"""Built-in configuration profiles for vsl-dro."""
from __future__ import annotations

import copy
import json
from typing import Any

from vsl_dro.config.loader import merge_profile


def _edges(count: int, length: float, f_cap: float, rho_jam: float, u_free: float) -> list[dict[str, Any]]:
    return [
        {"id": i, "length": length, "lanes": 1, "f_cap": f_cap, "rho_jam": rho_jam, "u_free": u_free,
         "has_onramp": True, "has_offramp": True}
        for i in range(1, count + 1)
    ]


# Five 2 km segments, 30 s slots, an accident on segment 4 for the whole horizon.
REFERENCE: dict[str, Any] = {
    "seed": 0,
    "threads": 1,
    "highway": {
        "delta_s": 30.0,
        "horizon": 20,
        "gamma": [40.0, 60.0, 80.0, 100.0, 120.0],
        "edges": _edges(5, 2.0, 3.1e4, 1050.0, 140.0),
        "events": [{"edge": 4, "start_slot": 0, "end_slot": None, "f_cap": 2.7e4}],
    },
    "samples": {
        "count": 3,
        "omega": [2.0e4, 2.4e4],
        "rho0": [260.0, 260.0],
        "r_in": [0.0, 0.05],
        "r_out": [0.0, 0.03],
        "seed": None,
        "file": None,
    },
    "radius": {"mode": "given", "epsilon": 0.985, "beta": 0.05},
    "algorithm": {"budget_s": 60.0, "gap_tol": 0.0, "eta_bar": None, "hold_slots": 20,
                  "certificate_method": "greedy"},
    "pool": {"capacity": 32, "path": None, "seed_speeds": []},
    "mpc": {"steps": 20, "replan_every": 1, "n_samples": None, "fallback": []},
    "validation": {"replications": 200, "n_val": 1000},
    "analysis": {"grid_size": 5},
    "output": {"directory": "vsl-dro-out"},
}

# Two 1 km segments, three slots, two speeds: 2^6 schedules, small enough to enumerate.
TINY: dict[str, Any] = {
    "seed": 0,
    "threads": 1,
    "highway": {
        "delta_s": 30.0,
        "horizon": 3,
        "gamma": [60.0, 100.0],
        "edges": _edges(2, 1.0, 8000.0, 200.0, 120.0),
        "events": [],
    },
    "samples": {
        "count": 2,
        "omega": [5000.0, 7000.0],
        "rho0": [55.0, 80.0],
        "r_in": [0.0, 0.05],
        "r_out": [0.0, 0.03],
        "seed": None,
        "file": None,
    },
    "radius": {"mode": "given", "epsilon": 0.5, "beta": 0.05, "grid_min": 0.001, "grid_max": 100.0,
               "grid_points": 21, "trials": 20, "n_val": 200},
    "algorithm": {"budget_s": 30.0, "gap_tol": 0.0, "eta_bar": None, "hold_slots": 1,
                  "certificate_method": "greedy"},
    "pool": {"capacity": 32, "path": None, "seed_speeds": []},
    "mpc": {"steps": 6, "replan_every": 1, "n_samples": None, "fallback": []},
    "validation": {"replications": 200, "n_val": 200},
    "analysis": {"grid_size": 3},
    "output": {"directory": "vsl-dro-out"},
}

# Closed loop on the five-segment highway with a 35 % capacity and jam drop on
# segment 3 between slots 10 and 30; speeds held for one-minute blocks.
CLOSURE: dict[str, Any] = merge_profile(REFERENCE, {
    "highway": {
        "events": [{"edge": 3, "start_slot": 10, "end_slot": 30, "cap_factor": 0.65, "jam_factor": 0.65}],
    },
    "algorithm": {"budget_s": 10.0, "hold_slots": 2},
    "mpc": {"steps": 40, "replan_every": 1, "n_samples": 3, "fallback": [60.0, 60.0, 60.0, 60.0, 60.0]},
})

PROFILES: dict[str, dict[str, Any]] = {
    "reference": REFERENCE,
    "tiny": TINY,
    "closure": CLOSURE,
}

DEFAULT_PROFILE = "reference"

# committed file stems under configs/ that differ from the profile name
ALIASES: dict[str, str] = {"paper_sec7": "reference"}


def resolve_profile(name: str) -> str:
    return ALIASES.get(name, name)


def profile(name: str) -> dict[str, Any]:
    """A deep copy of the named profile; committed file stems are accepted as aliases."""
    name = resolve_profile(name)
    if name not in PROFILES:
        raise KeyError(f"unknown profile {name!r}; expected one of {sorted(PROFILES)}")
    return copy.deepcopy(PROFILES[name])


def render_profile(name: str) -> str:
    """JSON text of the named profile, as written by ``vsl-dro init``."""
    return json.dumps(profile(name), indent=2) + "\n"
