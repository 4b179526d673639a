"""Best-first branch-and-bound over the bounded simplex, plus a lazy-cut loop."""
from __future__ import annotations

import heapq
import logging
import math
import time
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from vsl_dro.core.models import SolveStatus
from vsl_dro.solver.problem import Basis, LinearRow, MilpProblem, Solution
from vsl_dro.solver.simplex import CompiledLp, compile_lp, solve_compiled

logger = logging.getLogger(__name__)

INT_TOL = 1e-6

CutOracle = Callable[[np.ndarray], list[LinearRow]]


@dataclass
class _Node:
    fixes: dict[int, int]
    basis: Basis | None
    depth: int


def _deadline(budget_s: float | None, deadline: float | None) -> float | None:
    if budget_s is None:
        return deadline
    own = time.monotonic() + budget_s
    return own if deadline is None else min(own, deadline)


def _better(value: float, incumbent: float) -> bool:
    """True when ``value`` beats ``incumbent`` by more than the relative tolerance."""
    if incumbent == -math.inf:
        return value > -math.inf
    return value > incumbent + 1e-9 * max(1.0, abs(incumbent))


def _gap_closed(bound: float, incumbent: float, gap_tol: float) -> bool:
    if incumbent == -math.inf or bound == math.inf:
        return False
    return bound - incumbent <= gap_tol * max(1.0, abs(incumbent)) + 1e-9


class _BranchAndBound:
    """Maximizes ``sense * objective``; ``sense`` is -1 for minimization problems."""

    def __init__(self, p: MilpProblem, cp: CompiledLp, deadline: float | None, gap_tol: float) -> None:
        self.p = p
        self.cp = cp
        self.deadline = deadline
        self.gap_tol = gap_tol
        self.sense = 1.0 if p.lp.maximize else -1.0
        self.lower = np.asarray(p.lp.lower, dtype=float)
        self.upper = np.asarray(p.lp.upper, dtype=float)
        self.binaries = np.asarray(sorted(set(p.binaries)), dtype=int)
        self.grouped = {j for g in p.sos1 for j in g}
        self.free_binaries = np.asarray([j for j in self.binaries if j not in self.grouped], dtype=int)
        self.incumbent: np.ndarray | None = None
        self.incumbent_value = -math.inf
        self.nodes = 0
        self.iterations = 0

    def _bounds(self, fixes: dict[int, int]) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.lower.copy(), self.upper.copy()
        if fixes:
            idx = np.fromiter(fixes.keys(), dtype=int, count=len(fixes))
            val = np.fromiter(fixes.values(), dtype=float, count=len(fixes))
            lo[idx] = val
            hi[idx] = val
        return lo, hi

    def solve_node(self, fixes: dict[int, int], basis: Basis | None) -> Solution:
        lo, hi = self._bounds(fixes)
        sol = solve_compiled(self.cp, lo, hi, basis, self.deadline)
        self.nodes += 1
        self.iterations += sol.iterations
        return sol

    def is_integral(self, x: np.ndarray) -> bool:
        if self.binaries.size == 0:
            return True
        vals = x[self.binaries]
        return bool(np.all(np.abs(vals - np.rint(vals)) <= INT_TOL))

    def offer(self, x: np.ndarray) -> bool:
        """Accept an integral LP solution as incumbent if it improves."""
        xr = x.copy()
        if self.binaries.size:
            xr[self.binaries] = np.rint(xr[self.binaries])
        value = self.sense * self.p.lp.evaluate(xr)
        if _better(value, self.incumbent_value):
            self.incumbent = xr
            self.incumbent_value = value
            logger.debug("New incumbent %.9g at node %d", self.sense * value, self.nodes)
            return True
        return False

    def children(self, x: np.ndarray, fixes: dict[int, int]) -> list[dict[int, int]]:
        """Child fix sets in preference order; empty when x is integral."""
        best_group: list[int] | None = None
        best_score = INT_TOL
        for group in self.p.sos1:
            vals = x[group]
            if np.all(np.abs(vals - np.rint(vals)) <= INT_TOL):
                continue
            score = 1.0 - float(vals.max())
            if score > best_score:
                best_group, best_score = group, score
        if best_group is not None:
            open_members = [j for j in best_group if fixes.get(j, 1) != 0 and self.upper[j] > 0.5]
            open_members.sort(key=lambda j: -x[j])
            out: list[dict[int, int]] = []
            for j in open_members:
                child = dict(fixes)
                for k in best_group:
                    child[k] = 1 if k == j else 0
                out.append(child)
            return out
        pool = self.binaries if not self.p.sos1 else (
            self.free_binaries if self.free_binaries.size else self.binaries
        )
        if pool.size == 0:
            return []
        frac = np.abs(x[pool] - np.rint(x[pool]))
        if frac.max() <= INT_TOL:
            pool = self.binaries
            frac = np.abs(x[pool] - np.rint(x[pool]))
            if frac.max() <= INT_TOL:
                return []
        j = int(pool[int(np.argmax(frac))])
        up, down = dict(fixes), dict(fixes)
        up[j], down[j] = 1, 0
        return [up, down] if x[j] >= 0.5 else [down, up]


def solve_milp(
    p: MilpProblem,
    budget_s: float | None = None,
    gap_tol: float = 1e-6,
    deadline: float | None = None,
    bound_hint: float | None = None,
) -> Solution:
    """Best-first branch-and-bound with SOS1 branching.

    ``bound_hint`` is a known valid bound on the optimum (in the problem's
    own sense) and caps the reported best bound. ``p.start`` gives binary
    values tried first as a MIP start.
    """
    p.validate()
    cp = compile_lp(p.lp)
    bb = _BranchAndBound(p, cp, _deadline(budget_s, deadline), gap_tol)
    sense = bb.sense
    hint = math.inf if bound_hint is None else sense * bound_hint

    if p.start:
        fixes = {j: int(round(v)) for j, v in p.start.items() if j in set(p.binaries)}
        start = bb.solve_node(fixes, None)
        if start.status == SolveStatus.OPTIMAL and start.x is not None and bb.is_integral(start.x):
            bb.offer(start.x)

    counter = 0
    heap: list[tuple[float, int, _Node]] = [(-math.inf, 0, _Node({}, None, 0))]
    global_bound = hint
    bound_trace: list[float] = []
    status = SolveStatus.OPTIMAL
    # best relaxation value among subtrees dropped without an answer
    lost = -math.inf
    degraded = False
    while heap:
        top = -heap[0][0]
        global_bound = min(global_bound, max(top, lost, bb.incumbent_value))
        bound_trace.append(sense * global_bound)
        if _gap_closed(global_bound, bb.incumbent_value, gap_tol):
            break
        if bb.deadline is not None and time.monotonic() > bb.deadline:
            status = SolveStatus.BUDGET_INCUMBENT
            break
        key, _, node = heapq.heappop(heap)
        if not _better(-key, bb.incumbent_value):
            continue
        sol = bb.solve_node(node.fixes, node.basis)
        if sol.status == SolveStatus.BUDGET_NO_INCUMBENT:
            counter -= 1
            heapq.heappush(heap, (key, counter, node))
            status = SolveStatus.BUDGET_INCUMBENT
            break
        if sol.status == SolveStatus.UNBOUNDED and node.depth == 0:
            return Solution(SolveStatus.UNBOUNDED, nodes=bb.nodes, iterations=bb.iterations,
                            message="LP relaxation unbounded")
        if sol.status in (SolveStatus.UNBOUNDED, SolveStatus.NUMERICAL):
            # a restriction of a bounded parent cannot be unbounded; both mean the LP went wrong
            logger.warning("%s LP at node %d (%s); subtree dropped", sol.status.value, bb.nodes, sol.message)
            lost = max(lost, -key)
            degraded = True
            continue
        if sol.status != SolveStatus.OPTIMAL or sol.x is None or sol.objective is None:
            continue
        value = sense * sol.objective
        if node.depth == 0:
            logger.debug("Root relaxation %.9g (%d iterations)", sol.objective, sol.iterations)
        if not _better(value, bb.incumbent_value):
            continue
        kids = bb.children(sol.x, node.fixes)
        if not kids:
            bb.offer(sol.x)
            continue
        # pushed in reverse preference so the preferred child pops first among equal keys
        for child in reversed(kids):
            counter -= 1
            heapq.heappush(heap, (-value, counter, _Node(child, sol.basis, node.depth + 1)))

    if not heap and status == SolveStatus.OPTIMAL:
        global_bound = min(global_bound, max(lost, bb.incumbent_value))
        bound_trace.append(sense * global_bound)
    if degraded and not _gap_closed(global_bound, bb.incumbent_value, gap_tol):
        status = SolveStatus.NUMERICAL

    logger.debug("B&B finished: %d nodes, %d LP iterations", bb.nodes, bb.iterations)
    if bb.incumbent is None:
        if status == SolveStatus.NUMERICAL:
            return Solution(SolveStatus.NUMERICAL, bound=sense * global_bound, nodes=bb.nodes,
                            iterations=bb.iterations, bound_trace=bound_trace,
                            message="node LPs failed; feasibility unknown")
        if status == SolveStatus.BUDGET_INCUMBENT:
            return Solution(SolveStatus.BUDGET_NO_INCUMBENT, bound=sense * global_bound, nodes=bb.nodes,
                            iterations=bb.iterations, bound_trace=bound_trace, message="budget exhausted")
        return Solution(SolveStatus.INFEASIBLE, nodes=bb.nodes, iterations=bb.iterations, bound_trace=bound_trace)
    return Solution(
        status,
        x=bb.incumbent,
        objective=sense * bb.incumbent_value,
        bound=sense * max(global_bound, bb.incumbent_value),
        nodes=bb.nodes,
        iterations=bb.iterations,
        bound_trace=bound_trace,
        message="node LPs failed; incumbent not proven optimal" if status == SolveStatus.NUMERICAL else "",
    )


def solve_with_lazy_cuts(
    p: MilpProblem,
    cut_oracle: CutOracle,
    budget_s: float | None = None,
    gap_tol: float = 1e-6,
    max_rounds: int = 200,
) -> Solution:
    """Re-solve with the oracle's violated rows added until it returns none.

    Each round warm-starts from the previous round's binaries and bound.
    ``info['cuts']`` counts rows added, ``info['rounds']`` solves made and
    ``info['oracle_satisfied']`` is 1.0 when the final point passed the oracle.
    """
    deadline = _deadline(budget_s, None)
    current = p
    cuts_added = 0
    last: Solution | None = None
    bound: float | None = None
    for rnd in range(1, max_rounds + 1):
        sol = solve_milp(current, gap_tol=gap_tol, deadline=deadline, bound_hint=bound)
        last = sol
        if sol.x is None:
            sol.info.update(cuts=float(cuts_added), rounds=float(rnd), oracle_satisfied=0.0)
            return sol
        cuts = cut_oracle(sol.x)
        if not cuts:
            sol.info.update(cuts=float(cuts_added), rounds=float(rnd), oracle_satisfied=1.0)
            return sol
        if deadline is not None and time.monotonic() > deadline:
            sol.status = SolveStatus.BUDGET_INCUMBENT
            sol.info.update(cuts=float(cuts_added), rounds=float(rnd), oracle_satisfied=0.0)
            return sol
        logger.debug("Lazy round %d: %d violated rows", rnd, len(cuts))
        cuts_added += len(cuts)
        if sol.status == SolveStatus.OPTIMAL:
            bound = sol.bound
        current = current.with_rows(cuts)
        current.start = {j: float(sol.x[j]) for j in current.binaries} if current.binaries else None
    assert last is not None
    last.status = SolveStatus.BUDGET_INCUMBENT
    last.info.update(cuts=float(cuts_added), rounds=float(max_rounds), oracle_satisfied=0.0)
    return last
