"""Tests for the bounded-variable simplex."""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from vsl_dro.core.models import SolveStatus
from vsl_dro.solver.problem import LpProblem, Sense
from vsl_dro.solver.simplex import solve_lp


def _vertex_optimum(c: np.ndarray, a: np.ndarray, b: np.ndarray, ub: float) -> float:
    """Best objective over every basic point of {a x <= b, 0 <= x <= ub}."""
    n = len(c)
    rows = [a[i] for i in range(len(a))]
    rhs = list(b)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        rows += [e, -e]
        rhs += [ub, 0.0]
    g = np.array(rows)
    h = np.array(rhs)
    best = -np.inf
    for combo in itertools.combinations(range(len(g)), n):
        sub = g[list(combo)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        x = np.linalg.solve(sub, h[list(combo)])
        if np.all(g @ x <= h + 1e-9):
            best = max(best, float(c @ x))
    return best


def test_single_variable() -> None:
    p = LpProblem()
    x = p.add_var("x", 0.0, 1.0, obj=1.0)
    sol = solve_lp(p)
    assert sol.status == SolveStatus.OPTIMAL
    assert sol.x is not None
    assert sol.x[x] == pytest.approx(1.0)
    assert sol.objective == pytest.approx(1.0)


def test_two_dimensional_vertex() -> None:
    p = LpProblem()
    x = p.add_var("x", obj=1.0)
    y = p.add_var("y", obj=1.0)
    p.add_row({x: 1.0, y: 2.0}, Sense.LE, 4.0)
    p.add_row({x: 3.0, y: 1.0}, Sense.LE, 6.0)
    sol = solve_lp(p)
    assert sol.status == SolveStatus.OPTIMAL
    assert sol.x is not None
    assert sol.x[x] == pytest.approx(1.6)
    assert sol.x[y] == pytest.approx(1.2)
    assert sol.objective == pytest.approx(2.8)


def test_infeasible() -> None:
    p = LpProblem()
    x = p.add_var("x", obj=1.0)
    p.add_row({x: 1.0}, Sense.GE, 2.0)
    p.add_row({x: 1.0}, Sense.LE, 1.0)
    assert solve_lp(p).status == SolveStatus.INFEASIBLE


def test_unbounded() -> None:
    p = LpProblem()
    x = p.add_var("x", obj=1.0)
    y = p.add_var("y")
    p.add_row({x: 1.0, y: -1.0}, Sense.LE, 1.0)
    assert solve_lp(p).status == SolveStatus.UNBOUNDED


def test_minimize_with_free_variable_and_equality() -> None:
    p = LpProblem(maximize=False)
    x = p.add_var("x", -np.inf, np.inf, obj=1.0)
    y = p.add_var("y", 0.0, 10.0, obj=2.0)
    p.add_row({x: 1.0, y: 1.0}, Sense.EQ, 3.0)
    p.add_row({x: 1.0}, Sense.GE, -5.0)
    sol = solve_lp(p)
    assert sol.status == SolveStatus.OPTIMAL
    assert sol.objective == pytest.approx(3.0)


def test_random_lps_match_vertex_enumeration() -> None:
    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 5))
        c = rng.uniform(-1.0, 2.0, size=n)
        a = rng.uniform(-1.0, 3.0, size=(m, n))
        b = rng.uniform(0.5, 5.0, size=m)
        p = LpProblem()
        cols = [p.add_var(f"x{j}", 0.0, 10.0, obj=float(c[j])) for j in range(n)]
        for i in range(m):
            p.add_row({cols[j]: float(a[i, j]) for j in range(n)}, Sense.LE, float(b[i]))
        sol = solve_lp(p)
        assert sol.status == SolveStatus.OPTIMAL
        assert sol.objective == pytest.approx(_vertex_optimum(c, a, b, 10.0), abs=1e-6)
        assert p.max_violation(sol.x) <= 1e-7


def test_warm_start_basis_reaches_same_optimum() -> None:
    p = LpProblem()
    x = p.add_var("x", obj=1.0)
    y = p.add_var("y", obj=1.0)
    p.add_row({x: 1.0, y: 2.0}, Sense.LE, 4.0)
    p.add_row({x: 3.0, y: 1.0}, Sense.LE, 6.0)
    first = solve_lp(p)
    second = solve_lp(p, basis=first.basis)
    assert second.objective == pytest.approx(2.8)
    assert second.iterations <= first.iterations


def test_invalid_bounds_rejected() -> None:
    p = LpProblem()
    p.add_var("x", 2.0, 1.0)
    with pytest.raises(ValueError, match="invalid bounds"):
        p.validate()
