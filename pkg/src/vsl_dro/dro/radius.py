"""Wasserstein radius from the measure-concentration bound."""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class RadiusParams:
    """Confidence, sample count and light-tail concentration constants.

    ``ell`` is the dimension of the uncertain trajectory (n * T). The
    light-tail constant of the input distribution enters only through
    ``c1`` and ``c2``.
    """

    beta: float
    n_samples: int
    ell: int
    a: float = 2.0
    c1: float = 1.0
    c2: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.n_samples < 1:
            raise ValueError(f"sample count must be >= 1, got {self.n_samples}")
        if self.ell < 1:
            raise ValueError(f"dimension must be >= 1, got {self.ell}")
        if self.a <= 1.0:
            raise ValueError(f"light-tail exponent must exceed 1, got {self.a}")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("concentration constants must be positive")
        if self.beta >= self.c1:
            raise ValueError(f"beta must be below c1 = {self.c1}, got {self.beta}")


def wasserstein_radius(p: RadiusParams) -> float:
    """Radius at which the empirical ball holds the true law with probability 1 - beta.

    For N >= log(c1/beta)/c2 the exponent is 1/max(2, ell), otherwise 1/a.
    Both branches equal 1 at the boundary.
    """
    ratio = math.log(p.c1 / p.beta) / (p.c2 * p.n_samples)
    if ratio <= 1.0:
        exponent = 1.0 / max(2, p.ell)
    else:
        exponent = 1.0 / p.a
    return float(ratio ** exponent)
