"""Row-oriented LP / MILP containers and the solution record."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from vsl_dro.core.models import SolveStatus

INF = math.inf


class Sense(Enum):
    LE = "<="
    EQ = "="
    GE = ">="


@dataclass
class LinearRow:
    """sum(coeffs[j] * x[j]) <sense> rhs."""

    coeffs: dict[int, float]
    sense: Sense
    rhs: float
    name: str = ""

    def activity(self, x: np.ndarray) -> float:
        return float(sum(v * x[j] for j, v in self.coeffs.items()))

    def violation(self, x: np.ndarray) -> float:
        lhs = self.activity(x)
        if self.sense == Sense.LE:
            return max(0.0, lhs - self.rhs)
        if self.sense == Sense.GE:
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass
class LpProblem:
    """Linear program with bounded variables; maximizes by default."""

    objective: list[float] = field(default_factory=list)
    lower: list[float] = field(default_factory=list)
    upper: list[float] = field(default_factory=list)
    names: list[str] = field(default_factory=list)
    rows: list[LinearRow] = field(default_factory=list)
    maximize: bool = True

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def add_var(self, name: str = "", lb: float = 0.0, ub: float = INF, obj: float = 0.0) -> int:
        self.objective.append(float(obj))
        self.lower.append(float(lb))
        self.upper.append(float(ub))
        self.names.append(name or f"v{len(self.names)}")
        return len(self.objective) - 1

    def add_row(self, coeffs: dict[int, float], sense: Sense, rhs: float, name: str = "") -> int:
        self.rows.append(LinearRow(dict(coeffs), sense, float(rhs), name))
        return len(self.rows) - 1

    def add_rows(self, rows: list[LinearRow]) -> None:
        self.rows.extend(rows)

    def set_bounds(self, j: int, lb: float, ub: float) -> None:
        self.lower[j] = float(lb)
        self.upper[j] = float(ub)

    def copy(self) -> LpProblem:
        return LpProblem(
            objective=list(self.objective),
            lower=list(self.lower),
            upper=list(self.upper),
            names=list(self.names),
            rows=list(self.rows),
            maximize=self.maximize,
        )

    def validate(self) -> None:
        n = self.n_vars
        if not (len(self.lower) == len(self.upper) == len(self.names) == n):
            raise ValueError("inconsistent variable dimensions")
        for j, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            if math.isnan(lo) or math.isnan(hi) or lo > hi:
                raise ValueError(f"variable {self.names[j]}: invalid bounds [{lo}, {hi}]")
        if not all(math.isfinite(c) for c in self.objective):
            raise ValueError("objective has non-finite coefficients")
        for i, row in enumerate(self.rows):
            if not math.isfinite(row.rhs):
                raise ValueError(f"row {row.name or i}: non-finite right-hand side")
            for j, v in row.coeffs.items():
                if not 0 <= j < n:
                    raise ValueError(f"row {row.name or i}: variable index {j} out of range")
                if not math.isfinite(v):
                    raise ValueError(f"row {row.name or i}: non-finite coefficient")

    def evaluate(self, x: np.ndarray) -> float:
        return float(np.dot(np.asarray(self.objective), x))

    def max_violation(self, x: np.ndarray) -> float:
        worst = 0.0
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        worst = max(worst, float(np.max(np.maximum(lo - x, 0.0), initial=0.0)))
        worst = max(worst, float(np.max(np.maximum(x - hi, 0.0), initial=0.0)))
        for row in self.rows:
            worst = max(worst, row.violation(x))
        return worst


@dataclass
class MilpProblem:
    """An LP plus binary marks and optional SOS1 groups (one member equals 1)."""

    lp: LpProblem
    binaries: list[int] = field(default_factory=list)
    sos1: list[list[int]] = field(default_factory=list)
    start: dict[int, float] | None = None

    def validate(self) -> None:
        self.lp.validate()
        for j in self.binaries:
            if self.lp.lower[j] < 0 or self.lp.upper[j] > 1:
                raise ValueError(f"binary {self.lp.names[j]} must have bounds within [0, 1]")
        members = set(self.binaries)
        for group in self.sos1:
            if not set(group) <= members:
                raise ValueError("SOS1 groups may only contain binary variables")

    def with_rows(self, rows: list[LinearRow]) -> MilpProblem:
        lp = self.lp.copy()
        lp.add_rows(rows)
        return MilpProblem(lp=lp, binaries=list(self.binaries), sos1=[list(g) for g in self.sos1], start=self.start)


@dataclass
class Basis:
    """Simplex basis over structural + slack columns, reusable as a warm start."""

    basic: np.ndarray
    status: np.ndarray
    n: int
    m: int


@dataclass
class Solution:
    status: SolveStatus
    x: np.ndarray | None = None
    objective: float | None = None
    bound: float | None = None
    nodes: int = 0
    iterations: int = 0
    message: str = ""
    basis: Basis | None = None
    bound_trace: list[float] = field(default_factory=list)
    info: dict[str, float] = field(default_factory=dict)

    @property
    def has_solution(self) -> bool:
        return self.x is not None and self.status in (SolveStatus.OPTIMAL, SolveStatus.BUDGET_INCUMBENT)
