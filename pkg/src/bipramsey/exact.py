"""Exact minimum color counts for tiny K_{n,n} by backtracking."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import BipartiteColoring
from .verifier import BudgetExceeded, iter_cycle_edge_arrays, verify_exhaustive

MAX_N = 6
SEARCH_BUDGET = 10**7  # backtracking nodes per isColorableWith call


@dataclass
class SearchInstance:
    n: int
    k: int
    q: int = 3
    g_max: int | None = None
    budget: int = SEARCH_BUDGET
    _plan: list | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"exact search is limited to 1 <= n <= {MAX_N}")
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.q < 2:
            raise ValueError("q must be at least 2")
        if self.g_max is None:
            self.g_max = self.n * self.n
        if self.g_max < 1:
            raise ValueError("g_max must be positive")

    @property
    def edges(self) -> int:
        return self.n * self.n

    def cycles(self) -> np.ndarray:
        """All C_{2k} copies of K_{n,n} as rows of edge ids, shape (count, 2k)."""
        if self.k > self.n:
            return np.zeros((0, 2 * self.k), dtype=np.int64)
        return np.concatenate([ids for ids, _, _ in iter_cycle_edge_arrays(self.n, self.k)])

    def plan(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per edge: cycles through it, and how many of their edges come later in row-major order."""
        if self._plan is None:
            cyc = self.cycles()
            plan = []
            for e in range(self.edges):
                rows = cyc[(cyc == e).any(axis=1)] if len(cyc) else cyc
                later = (rows > e).sum(axis=1)
                plan.append((rows, later))
            self._plan = plan
        return self._plan


def _distinct_assigned(vals: np.ndarray) -> np.ndarray:
    s = np.sort(vals, axis=1)
    fresh = np.ones_like(s, dtype=bool)
    fresh[:, 1:] = s[:, 1:] != s[:, :-1]
    return np.count_nonzero(fresh & (s >= 0), axis=1)


def _feasible(colors: np.ndarray, rows: np.ndarray, later: np.ndarray, q: int) -> bool:
    # a cycle can still reach q colors only if distinct-so-far + unassigned >= q
    if not len(rows):
        return True
    return bool(np.all(_distinct_assigned(colors[rows]) + later >= q))


def is_colorable_with(inst: SearchInstance, g: int) -> tuple[bool, BipartiteColoring | None]:
    """Backtrack over edges in row-major order with at most ``g`` colors.

    New colors are introduced in order (canonical labelling) and the first
    row is non-decreasing, which fixes the column permutation.
    """
    if g < 1:
        raise ValueError("g must be at least 1")
    n, q = inst.n, inst.q
    m = inst.edges
    plan = inst.plan()
    colors = np.full(m, -1, dtype=np.int64)
    nodes = 0

    def rec(e: int, used: int) -> bool:
        nonlocal nodes
        if e == m:
            return True
        rows, later = plan[e]
        lo = int(colors[e - 1]) if 0 < e < n else 0
        for c in range(lo, min(used + 1, g)):
            nodes += 1
            if nodes > inst.budget:
                raise BudgetExceeded(f"search exceeded {inst.budget} nodes at g={g}")
            colors[e] = c
            if _feasible(colors, rows, later, q) and rec(e + 1, max(used, c + 1)):
                return True
        colors[e] = -1
        return False

    if not rec(0, 0):
        return False, None
    return True, BipartiteColoring(n, inst.k, colors.reshape(n, n).copy())


def count_violations(coloring: BipartiteColoring, k: int, q: int) -> int:
    """Number of C_{2k} with fewer than q colors."""
    n = coloring.n
    if k > n:
        return 0
    flat = coloring.colors.ravel()
    bad = 0
    for ids, _, _ in iter_cycle_edge_arrays(n, k):
        bad += int(np.count_nonzero(_distinct_assigned(flat[ids]) < q))
    return bad


@dataclass(frozen=True)
class SearchResult:
    n: int
    k: int
    q: int
    g_min: int
    witness: BipartiteColoring

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "q": self.q, "gMin": self.g_min, "witness": self.witness.to_json()}


def search_min_colors(inst: SearchInstance) -> SearchResult:
    """Smallest g for which :func:`is_colorable_with` succeeds, with a re-verified witness."""
    for g in range(1, inst.g_max + 1):
        ok, wit = is_colorable_with(inst, g)
        if not ok:
            continue
        if count_violations(wit, inst.k, inst.q):
            raise AssertionError("search returned an invalid witness")
        if inst.q == 3 and verify_exhaustive(wit, inst.k) is not None:
            raise AssertionError("verifier rejected the search witness")
        return SearchResult(inst.n, inst.k, inst.q, g, wit)
    raise ValueError(f"no coloring with at most {inst.g_max} colors")
