"""Plain-text LP dump for cross-checking problems with external solvers.

Format (CPLEX-LP flavored)::

    \\ <title>
    Maximize | Minimize
     obj: <coef> <name> + ...
    Subject To
     <row>: <coef> <name> + ... <= | = | >= <rhs>
    Bounds
     <lb> <= <name> <= <ub>      (-inf / +inf for open sides)
    Binaries
     <name> ...
    End

Rows are written in construction order and variables in index order, so
dumps of the same instance are byte-identical across runs.
"""
from __future__ import annotations

import math
from pathlib import Path

from vsl_dro.solver.problem import LinearRow, LpProblem, MilpProblem


def _num(v: float) -> str:
    if math.isinf(v):
        return "+inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def _terms(coeffs: dict[int, float], names: list[str]) -> str:
    if not coeffs:
        return "0"
    parts = []
    for j in sorted(coeffs):
        v = coeffs[j]
        parts.append(f"{'-' if v < 0 else '+'} {_num(abs(v))} {names[j]}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def _row(row: LinearRow, index: int, names: list[str]) -> str:
    label = row.name or f"r{index}"
    return f" {label}: {_terms(row.coeffs, names)} {row.sense.value} {_num(row.rhs)}"


def format_lp(problem: LpProblem | MilpProblem, title: str = "vsl-dro") -> str:
    lp = problem.lp if isinstance(problem, MilpProblem) else problem
    names = lp.names
    lines = [f"\\ {title}", "Maximize" if lp.maximize else "Minimize"]
    obj = {j: v for j, v in enumerate(lp.objective) if v != 0.0}
    lines.append(f" obj: {_terms(obj, names)}")
    lines.append("Subject To")
    lines.extend(_row(row, i, names) for i, row in enumerate(lp.rows))
    lines.append("Bounds")
    for j, name in enumerate(names):
        lines.append(f" {_num(lp.lower[j])} <= {name} <= {_num(lp.upper[j])}")
    if isinstance(problem, MilpProblem) and problem.binaries:
        lines.append("Binaries")
        lines.append(" " + " ".join(names[j] for j in sorted(problem.binaries)))
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_lp_file(problem: LpProblem | MilpProblem, path: str | Path, title: str = "vsl-dro") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_lp(problem, title), encoding="utf-8")
    return path
