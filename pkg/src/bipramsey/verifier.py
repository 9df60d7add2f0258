"""Decide whether a coloring of K_{n,n} gives every 2k-cycle at least three colors."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .cycles import find_cycle, find_path, iter_bits
from .graphs import BipartiteColoring, BipartiteVertex, Side, color_adjacency

EXHAUSTIVE_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    """Raised when an exhaustive enumeration would exceed its cycle budget."""


@dataclass(frozen=True)
class CycleWitness:
    vertices: tuple[BipartiteVertex, ...]
    colors_used: frozenset[int]

    def edges(self, n: int) -> list[tuple[int, int]]:
        out = []
        m = len(self.vertices)
        for i in range(m):
            u, v = self.vertices[i], self.vertices[(i + 1) % m]
            a, b = (u, v) if u.side is Side.A else (v, u)
            out.append((a.index, b.index))
        return out

    def to_json(self) -> dict:
        return {
            "vertices": [[v.side.value, v.index] for v in self.vertices],
            "colorsUsed": sorted(self.colors_used),
        }


@dataclass(frozen=True)
class PathWitness:
    vertices: tuple[BipartiteVertex, ...]
    color: int

    def to_json(self) -> dict:
        return {"vertices": [[v.side.value, v.index] for v in self.vertices], "color": self.color}


def _witness(coloring: BipartiteColoring, raw: list[tuple[str, int]]) -> CycleWitness:
    verts = tuple(BipartiteVertex(Side(s), i) for s, i in raw)
    w = CycleWitness(verts, frozenset())
    used = frozenset(int(coloring.colors[a, b]) for a, b in w.edges(coloring.n))
    return CycleWitness(verts, used)


def check_witness(coloring: BipartiteColoring, witness: CycleWitness, k: int) -> bool:
    """Re-validate a witness: distinct alternating vertices, 2k long, at most two colors."""
    verts = witness.vertices
    if len(verts) != 2 * k or len(set(verts)) != len(verts):
        return False
    n = coloring.n
    for i in range(len(verts)):
        u, v = verts[i], verts[(i + 1) % len(verts)]
        if u.side is v.side or not (0 <= u.index < n and 0 <= v.index < n):
            return False
    used = {int(coloring.colors[a, b]) for a, b in witness.edges(n)}
    return used == set(witness.colors_used) and len(used) <= 2


# ---------------------------------------------------------------------------
# Exhaustive enumeration
# ---------------------------------------------------------------------------

def cycle_count(n: int, k: int) -> int:
    return math.comb(n, k) ** 2 * math.factorial(k) * math.factorial(k - 1) // 2


@lru_cache(maxsize=None)
def _templates(k: int) -> np.ndarray:
    """Hamiltonian cycles of K_{k,k} as (A-position, B-position) edge lists.

    Cycle a_0 b_{t0} a_{s1} b_{t1} ... a_{s_{k-1}} b_{t_{k-1}} back to a_0, with
    a_0 fixed and t0 < t_{k-1} to drop the reversed copy.
    """
    rows = []
    for s in itertools.permutations(range(1, k)):
        a_order = (0,) + s
        for t in itertools.permutations(range(k)):
            if k > 1 and t[0] > t[-1]:
                continue
            edges = []
            for i in range(k):
                edges.append((a_order[i], t[i]))
                edges.append((a_order[(i + 1) % k], t[i]))
            rows.append(edges)
    return np.array(rows, dtype=np.int64)


def iter_cycle_edge_arrays(n: int, k: int) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Yield chunks ``(edge_ids, a_sets, b_sets)`` covering every C_{2k} of K_{n,n}.

    ``edge_ids`` has shape (chunk, 2k) with dense edge ids ``a*n+b`` listed
    along the cycle.  Enumeration order: A-subset, then B-subset, then template.
    """
    tmpl = _templates(k)
    b_sets = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64)
    for a_set in itertools.combinations(range(n), k):
        a_arr = np.array(a_set, dtype=np.int64)
        a_idx = a_arr[tmpl[:, :, 0]]  # (T, 2k)
        b_idx = b_sets[:, tmpl[:, :, 1]]  # (S, T, 2k)
        ids = a_idx[None, :, :] * n + b_idx
        yield ids.reshape(-1, 2 * k), a_arr, b_sets


def _distinct_le_two(cols: np.ndarray) -> np.ndarray:
    s = np.sort(cols, axis=1)
    return 1 + np.count_nonzero(np.diff(s, axis=1), axis=1) <= 2


def _cycle_from_ids(ids: np.ndarray, n: int) -> list[tuple[str, int]]:
    raw: list[tuple[str, int]] = []
    for j in range(0, len(ids), 2):
        a, b = divmod(int(ids[j]), n)
        raw.append(("A", a))
        raw.append(("B", b))
    return raw


def verify_exhaustive(coloring: BipartiteColoring, k: int, budget: int = EXHAUSTIVE_BUDGET) -> CycleWitness | None:
    """Enumerate every C_{2k}; return the first one with at most two colors."""
    coloring.require_complete()
    n = coloring.n
    if k > n:
        return None
    total = cycle_count(n, k)
    if total > budget:
        raise BudgetExceeded(f"{total} cycles exceed the exhaustive budget {budget}; use pairwise mode")
    flat = coloring.colors.ravel()
    for ids, _, _ in iter_cycle_edge_arrays(n, k):
        bad = _distinct_le_two(flat[ids])
        if bad.any():
            row = ids[int(np.argmax(bad))]
            return _witness(coloring, _cycle_from_ids(row, n))
    return None


def count_violations_exhaustive(coloring: BipartiteColoring, k: int, budget: int = EXHAUSTIVE_BUDGET) -> tuple[int, int]:
    """Return ``(violating, total)`` cycle counts by full enumeration."""
    coloring.require_complete()
    n = coloring.n
    total = cycle_count(n, k)
    if total > budget:
        raise BudgetExceeded(f"{total} cycles exceed the exhaustive budget {budget}")
    flat = coloring.colors.ravel()
    bad = 0
    for ids, _, _ in iter_cycle_edge_arrays(n, k):
        bad += int(np.count_nonzero(_distinct_le_two(flat[ids])))
    return bad, total


# ---------------------------------------------------------------------------
# Pairwise color-class scan
# ---------------------------------------------------------------------------

def _vertex_mask(na, nb, n: int) -> int:
    mask = 0
    for a, m in enumerate(na):
        if m:
            mask |= 1 << a
    for b, m in enumerate(nb):
        if m:
            mask |= 1 << (n + b)
    return mask


def _class_components(na, nb, n: int) -> tuple[dict[int, int], list[int]]:
    """Component label per touched vertex (global ids) and each component's A-vertex mask."""
    parent = list(range(2 * n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, m in enumerate(na):
        for b in iter_bits(m):
            ra, rb = find(a), find(n + b)
            if ra != rb:
                parent[ra] = rb
    label: dict[int, int] = {}
    roots: dict[int, int] = {}
    a_masks: list[int] = []
    touched = [a for a, m in enumerate(na) if m] + [n + b for b, m in enumerate(nb) if m]
    for v in touched:
        r = find(v)
        if r not in roots:
            roots[r] = len(a_masks)
            a_masks.append(0)
        label[v] = roots[r]
        if v < n:
            a_masks[roots[r]] |= 1 << v
    return label, a_masks


def _bichromatic_anchors(shared: int, comp_c, comp_d) -> int:
    """A-vertices that may lie on a cycle using both colors c and d.

    Such a cycle alternates between components of c and of d, switching at
    distinct shared vertices, so it closes a cycle in the multigraph whose
    nodes are components and whose edges are shared vertices.  Only the
    components in cyclic parts of that multigraph can host it.
    """
    label_c, masks_c = comp_c
    label_d, masks_d = comp_d
    off = len(masks_c)
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    cyclic = []
    for v in iter_bits(shared):
        x, y = label_c[v], off + label_d[v]
        rx, ry = find(x), find(y)
        if rx == ry:
            cyclic.append(x)
        else:
            parent[rx] = ry
    if not cyclic:
        return 0
    hot = {find(x) for x in cyclic}
    allowed = 0
    for node in parent:
        if find(node) in hot:
            allowed |= masks_c[node] if node < off else masks_d[node - off]
    return allowed


def verify_pairwise(coloring: BipartiteColoring, k: int) -> CycleWitness | None:
    """Scan every color class and every pair of classes for a C_{2k}.

    Pairs are visited in lexicographic order of color ids, single classes
    first, so the returned witness is deterministic.
    """
    coloring.require_complete()
    n = coloring.n
    if k > n:
        return None
    adj_a, adj_b = color_adjacency(coloring.colors)
    palette = sorted(adj_a)
    length = 2 * k
    vert_masks = {c: _vertex_mask(adj_a[c], adj_b[c], n) for c in palette}
    for c in palette:
        raw = find_cycle(adj_a[c], adj_b[c], length)
        if raw is not None:
            return _witness(coloring, raw)
    # no class holds a cycle on its own, so any cycle left must use two colors
    comps = {c: _class_components(adj_a[c], adj_b[c], n) for c in palette}
    for i, c in enumerate(palette):
        ca, cb = adj_a[c], adj_b[c]
        for d in palette[i + 1:]:
            shared = vert_masks[c] & vert_masks[d]
            if not shared & (shared - 1):
                continue
            allowed = _bichromatic_anchors(shared, comps[c], comps[d])
            if not allowed:
                continue
            da, db = adj_a[d], adj_b[d]
            na = [x | y for x, y in zip(ca, da)]
            nb = [x | y for x, y in zip(cb, db)]
            raw = find_cycle(na, nb, length, allowed_a=allowed)
            if raw is not None:
                return _witness(coloring, raw)
    return None


def monochromatic_path_diagnostic(coloring: BipartiteColoring, k: int) -> PathWitness | None:
    """Report a monochromatic path on 2k vertices, if any.

    Such a path has its endpoints on opposite sides, so the host edge joining
    them closes a C_{2k} with at most two colors.
    """
    coloring.require_complete()
    adj_a, adj_b = color_adjacency(coloring.colors)
    for c in sorted(adj_a):
        raw = find_path(adj_a[c], adj_b[c], 2 * k)
        if raw is not None:
            verts = tuple(BipartiteVertex(Side(s), i) for s, i in raw)
            return PathWitness(verts, c)
    return None


def sample_verify(coloring: BipartiteColoring, k: int, trials: int, seed: int) -> float:
    """Fraction of uniformly sampled C_{2k} copies that use at most two colors."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    coloring.require_complete()
    n = coloring.n
    if k > n:
        return 0.0
    rng = np.random.default_rng(seed)
    # A uniform random ordering of k A-vertices and k B-vertices maps onto a
    # uniform cycle: each cycle arises from exactly 2k orderings.
    a = np.argsort(rng.random((trials, n)), axis=1)[:, :k]
    b = np.argsort(rng.random((trials, n)), axis=1)[:, :k]
    cols = np.empty((trials, 2 * k), dtype=np.int64)
    for i in range(k):
        cols[:, 2 * i] = coloring.colors[a[:, i], b[:, i]]
        cols[:, 2 * i + 1] = coloring.colors[a[:, (i + 1) % k], b[:, i]]
    return float(np.mean(_distinct_le_two(cols)))


def binomial_band(p: float, trials: int, sigmas: float = 3.0) -> float:
    return sigmas * math.sqrt(max(p * (1 - p), 0.0) / trials)
