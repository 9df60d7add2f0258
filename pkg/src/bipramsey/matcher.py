"""Conflict-avoiding random greedy matching over colored bicliques plus leftovers.

The two conflict systems are never materialized.  Instead each decision runs
an incremental cycle search: a biclique is rejected if it closes a C_{2k}
with at most two colors, and a leftover edge may not take a color that
closes any cycle of length at most 2k with at most two colors.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .candidates import BicliqueCandidate, PaletteSpec, palette_sizes
from .cycles import find_cycle_through_edge, iter_bits
from .designs import DesignParams, LinearDesign, UncoveredPairs, build_base_design, subsample, uncovered_pairs
from .graphs import UNCOLORED, BipartiteColoring, Side

log = logging.getLogger(__name__)

# Expected number of design blocks per vertex used by ``construct`` when no
# retention is given.  The asymptotic rule (k-1)(k-2)/n^delta keeps almost
# every pair covered at desk scale, which leaves no room for big sides.
FINITE_DESIGN_DEGREE = 3.0


class PaletteExhausted(RuntimeError):
    def __init__(self, edge: tuple[int, int]):
        super().__init__(f"no leftover color fits edge {edge}; enlarge the leftover palette")
        self.edge = edge


@dataclass(frozen=True)
class ConflictParams:
    max_len: int

    def __post_init__(self) -> None:
        if self.max_len < 4 or self.max_len % 2:
            raise ValueError("max_len must be an even integer >= 4")


class _Union:
    """Lazy union of two neighbourhood-mask lists."""

    __slots__ = ("x", "y")

    def __init__(self, x: list[int], y: list[int]):
        self.x, self.y = x, y

    def __getitem__(self, i: int) -> int:
        return self.x[i] | self.y[i]

    def __len__(self) -> int:
        return len(self.x)


class MatchingState:
    """Partial matching over host edges, (vertex, color) tokens and Z-pair tokens.

    Everything is kept as per-vertex bitmasks: ``adj_a[c][a]`` holds the
    B-neighbours of ``a`` in color ``c``; ``occupied[side][c]`` the vertices
    already in a color-``c`` biclique; ``used_pairs[side][u]`` the partners of
    ``u`` already consumed as a big-side pair.
    """

    def __init__(self, n: int, k: int, palette: PaletteSpec):
        self.n, self.k, self.palette = n, k, palette
        total = palette.total
        self.colors = np.full((n, n), UNCOLORED, dtype=np.int64)
        full = (1 << n) - 1
        self.uncov_a = [full] * n  # B-partners of a still uncolored
        self.uncov_b = [full] * n
        self.adj_a = [[0] * n for _ in range(total)]
        self.adj_b = [[0] * n for _ in range(total)]
        self.occupied = {Side.A: [0] * palette.size_w, Side.B: [0] * palette.size_w}
        self.used_pairs = {Side.A: [0] * n, Side.B: [0] * n}
        # color -> number of incident edges, per vertex and side
        self.vertex_colors: dict[Side, list[dict[int, int]]] = {
            Side.A: [dict() for _ in range(n)],
            Side.B: [dict() for _ in range(n)],
        }
        self.chosen: list[BicliqueCandidate] = []
        self.per_color = [0] * palette.size_w
        self.leftover: dict[tuple[int, int], int] = {}
        self.counters = {"proposed": 0, "accepted": 0, "rejectedCompat": 0, "rejectedConflict": 0}
        self.coverage_trace: list[float] = []

    # -- bookkeeping -------------------------------------------------------
    @property
    def covered_count(self) -> int:
        return int(np.count_nonzero(self.colors != UNCOLORED))

    @property
    def coverage(self) -> float:
        return self.covered_count / (self.n * self.n)

    @property
    def used_vertex_colors(self) -> set[tuple[str, int, int]]:
        out = set()
        for side, per in self.occupied.items():
            for c, mask in enumerate(per):
                out.update((side.value, v, c) for v in iter_bits(mask))
        return out

    @property
    def used_z_pairs(self) -> set[tuple[str, int, int]]:
        out = set()
        for side, rows in self.used_pairs.items():
            for u, mask in enumerate(rows):
                out.update((side.value, u, v) for v in iter_bits(mask) if u < v)
        return out

    def _color_edge(self, a: int, b: int, c: int) -> None:
        self.colors[a, b] = c
        self.uncov_a[a] &= ~(1 << b)
        self.uncov_b[b] &= ~(1 << a)
        self.adj_a[c][a] |= 1 << b
        self.adj_b[c][b] |= 1 << a
        va = self.vertex_colors[Side.A][a]
        vb = self.vertex_colors[Side.B][b]
        va[c] = va.get(c, 0) + 1
        vb[c] = vb.get(c, 0) + 1

    def _uncolor_edge(self, a: int, b: int, c: int) -> None:
        self.colors[a, b] = UNCOLORED
        self.uncov_a[a] |= 1 << b
        self.uncov_b[b] |= 1 << a
        self.adj_a[c][a] &= ~(1 << b)
        self.adj_b[c][b] &= ~(1 << a)
        for side, v in ((Side.A, a), (Side.B, b)):
            d = self.vertex_colors[side][v]
            d[c] -= 1
            if not d[c]:
                del d[c]

    def add_biclique(self, cand: BicliqueCandidate) -> None:
        c = cand.color
        for a, b in cand.host_edges():
            self._color_edge(a, b, c)
        ys, zs = cand.y_side, cand.y_side.other
        for v in cand.y:
            self.occupied[ys][c] |= 1 << v
        for v in cand.z:
            self.occupied[zs][c] |= 1 << v
        for i, u in enumerate(cand.z):
            for v in cand.z[i + 1:]:
                self.used_pairs[zs][u] |= 1 << v
                self.used_pairs[zs][v] |= 1 << u
        self.chosen.append(cand)
        self.per_color[c] += 1

    def extend_palette(self, palette: PaletteSpec) -> None:
        """Switch to a larger leftover palette (the structured palette is fixed)."""
        if palette.size_w != self.palette.size_w or palette.total < self.palette.total:
            raise ValueError("only the leftover palette can grow")
        extra = palette.total - len(self.adj_a)
        self.adj_a.extend([0] * self.n for _ in range(extra))
        self.adj_b.extend([0] * self.n for _ in range(extra))
        self.palette = palette

    def uncovered_edges(self) -> list[tuple[int, int]]:
        a, b = np.nonzero(self.colors == UNCOLORED)
        return list(zip(a.tolist(), b.tolist()))


def new_state(n: int, k: int, palette: PaletteSpec) -> MatchingState:
    return MatchingState(n, k, palette)


def compatible(state: MatchingState, cand: BicliqueCandidate) -> bool:
    """No shared host edge, (vertex, color) token or big-side pair token."""
    c = cand.color
    if not 0 <= c < state.palette.size_w:
        return False
    ys, zs = cand.y_side, cand.y_side.other
    ymask = sum(1 << v for v in cand.y)
    zmask = sum(1 << v for v in cand.z)
    if state.occupied[ys][c] & ymask or state.occupied[zs][c] & zmask:
        return False
    uncov = state.uncov_a if ys is Side.A else state.uncov_b
    for y in cand.y:
        if zmask & ~uncov[y]:
            return False
    pairs = state.used_pairs[zs]
    return not any(pairs[v] & zmask for v in cand.z)


def _two_colored_cycle_colors(state: MatchingState, vertices: Iterable[tuple[Side, int]], own: int) -> dict[int, list[tuple[Side, int]]]:
    """Colors other than ``own`` grouped by the listed vertices they touch."""
    seen: dict[int, list[tuple[Side, int]]] = {}
    for side, v in vertices:
        for d in state.vertex_colors[side][v]:
            if d != own:
                seen.setdefault(d, []).append((side, v))
    return seen


def creates_conflict_c(state: MatchingState, cand: BicliqueCandidate, k: int) -> bool:
    """Would adding ``cand`` create a C_{2k} with at most two colors?

    Requires ``compatible``.  The biclique is vertex-disjoint from every other
    class-``c`` biclique, so it is a whole component of its color and has no
    C_{2k} by itself.  A bad cycle therefore leaves the biclique through a
    second color d at two distinct biclique vertices.
    """
    c = cand.color
    length = 2 * k
    touching = _two_colored_cycle_colors(state, cand.vertices(), c)
    risky = {d: vs for d, vs in touching.items() if len(vs) >= 2}
    if not risky:
        return False
    edges = cand.host_edges()
    for a, b in edges:
        state._color_edge(a, b, c)
    try:
        for d in sorted(risky):
            na = _Union(state.adj_a[c], state.adj_a[d])
            nb = _Union(state.adj_b[c], state.adj_b[d])
            hot_a = {v for s, v in risky[d] if s is Side.A}
            hot_b = {v for s, v in risky[d] if s is Side.B}
            for a, b in edges:
                if a in hot_a or b in hot_b:
                    if find_cycle_through_edge(na, nb, a, b, length) is not None:
                        return True
        return False
    finally:
        for a, b in edges:
            state._uncolor_edge(a, b, c)


def run_greedy(candidates: Iterable[BicliqueCandidate], state: MatchingState, conflict: ConflictParams) -> MatchingState:
    """Accept each candidate in stream order that is compatible and conflict-free."""
    k = conflict.max_len // 2
    for cand in candidates:
        state.counters["proposed"] += 1
        if not compatible(state, cand):
            state.counters["rejectedCompat"] += 1
            continue
        if creates_conflict_c(state, cand, k):
            state.counters["rejectedConflict"] += 1
            continue
        state.add_biclique(cand)
        state.counters["accepted"] += 1
        state.coverage_trace.append(state.coverage)
    return state


# ---------------------------------------------------------------------------
# Guided candidate stream
# ---------------------------------------------------------------------------

def per_color_quota(n: int, k: int) -> int:
    """Bicliques per color that fit side by side: 2n vertices over 3k-2 each."""
    return max(1, (2 * n) // (3 * k - 2))


def guided_candidates(
    state: MatchingState,
    design_a: LinearDesign,
    design_b: LinearDesign,
    unc_a: UncoveredPairs,
    unc_b: UncoveredPairs,
    rng: np.random.Generator,
    patience: int = 40,
    y_samples: int = 12,
    sequential: bool = False,
) -> Iterator[BicliqueCandidate]:
    """Stream candidates that fit the live state.

    The least-used color below its quota is served next.  For it we sample a
    few blocks Y on a random side whose vertices are free in that color,
    keep the one with the most usable big-side vertices, and grow Z as a
    clique of uncovered, unused pairs favouring vertices with many uncolored
    edges.  A color is retired after ``patience`` consecutive attempts
    without an accepted biclique.
    """
    n, k = state.n, state.k
    quota = per_color_quota(n, k)
    e_rows = {Side.A: _rows(unc_a.mask), Side.B: _rows(unc_b.mask)}
    blocks = {Side.A: [tuple(r) for r in design_a.hyperedges.tolist()], Side.B: [tuple(r) for r in design_b.hyperedges.tolist()]}
    sides = [s for s in (Side.A, Side.B) if blocks[s]]
    if not sides:
        return
    failures = [0] * state.palette.size_w
    live = set(range(state.palette.size_w))
    size = 2 * k - 1
    while live:
        c = min(live, key=lambda x: (-state.per_color[x] if sequential else state.per_color[x], failures[x], x))
        if state.per_color[c] >= quota or failures[c] >= patience:
            live.discard(c)
            continue
        cand = _propose(state, c, sides, blocks, e_rows, rng, size, y_samples)
        if cand is None:
            failures[c] += 1
            continue
        before = len(state.chosen)
        yield cand
        if len(state.chosen) > before:
            failures[c] = 0
        else:
            failures[c] += 1


def _rows(mask: np.ndarray) -> list[int]:
    return [int(sum(1 << int(j) for j in np.flatnonzero(row))) for row in mask]


def _propose(state, c, sides, blocks, e_rows, rng, size, y_samples) -> BicliqueCandidate | None:
    side = sides[int(rng.integers(len(sides)))]
    other = side.other
    occ_y = state.occupied[side][c]
    free_z = ((1 << state.n) - 1) & ~state.occupied[other][c]
    uncov = state.uncov_a if side is Side.A else state.uncov_b
    z_uncov = state.uncov_b if side is Side.A else state.uncov_a
    options = []
    for i in rng.integers(len(blocks[side]), size=y_samples).tolist():
        y = blocks[side][i]
        if any(occ_y >> v & 1 for v in y):
            continue
        pool = free_z
        for v in y:
            pool &= uncov[v]
        cnt = bin(pool).count("1")
        if cnt >= size:
            options.append((cnt, i, y, pool))
    if not options:
        return None
    options.sort(reverse=True)
    for _, _, y, pool in options[:3]:
        z = _grow_z(pool, e_rows[other], state.used_pairs[other], z_uncov, size, rng)
        if z is not None:
            return BicliqueCandidate(side, y, tuple(z), c)
    return None


def _grow_z(pool: int, adj: list[int], used: list[int], weight: list[int], size: int, rng: np.random.Generator, tries: int = 4) -> list[int] | None:
    """Greedy clique of unused uncovered pairs, heaviest (most uncolored edges) first."""
    for _ in range(tries):
        chosen: list[int] = []
        cand = pool
        while len(chosen) < size and cand:
            bits = list(iter_bits(cand))
            keys = [bin(weight[v]).count("1") + rng.random() * 2 for v in bits]
            v = bits[int(np.argmax(keys))]
            chosen.append(v)
            cand &= adj[v] & ~used[v]
        if len(chosen) == size:
            return chosen
    return None


# ---------------------------------------------------------------------------
# Leftover phase
# ---------------------------------------------------------------------------

def _component(adj_a: list[int], adj_b: list[int], a: int, b: int) -> tuple[int, int]:
    seen_a, seen_b = 1 << a, 1 << b
    frontier_a, frontier_b = seen_a, seen_b
    while frontier_a or frontier_b:
        nb_new = 0
        for x in iter_bits(frontier_a):
            nb_new |= adj_a[x]
        na_new = 0
        for y in iter_bits(frontier_b):
            na_new |= adj_b[y]
        frontier_b = nb_new & ~seen_b
        frontier_a = na_new & ~seen_a
        seen_a |= frontier_a
        seen_b |= frontier_b
    return seen_a, seen_b


def breaks_star_forest(state: MatchingState, a: int, b: int, c: int) -> bool:
    """Would (a, b) give class ``c`` a path with three edges?

    Such a path x..y is fatal under the length <= 2k rule: whatever color
    the edge xy gets, x..y plus xy is a C_4 with at most two colors.  So every
    leftover class must stay a star forest.
    """
    ca, cb = state.adj_a[c], state.adj_b[c]
    if ca[a] and cb[b]:
        return True
    if ca[a]:
        return any(cb[y] & (cb[y] - 1) for y in iter_bits(ca[a]))
    if cb[b]:
        return any(ca[x] & (ca[x] - 1) for x in iter_bits(cb[b]))
    return False


def leftover_conflict(state: MatchingState, a: int, b: int, c: int, k: int) -> bool:
    """Would coloring (a, b) with ``c`` create a cycle of length <= 2k with <= 2 colors,
    or a monochromatic 3-edge path that makes such a cycle unavoidable later?"""
    length = 2 * k
    if breaks_star_forest(state, a, b, c):
        return True
    state._color_edge(a, b, c)
    try:
        ca, cb = state.adj_a[c], state.adj_b[c]
        comp_a, comp_b = _component(ca, cb, a, b)
        hits: dict[int, int] = {}
        for side, comp in ((Side.A, comp_a), (Side.B, comp_b)):
            for v in iter_bits(comp):
                for d in state.vertex_colors[side][v]:
                    if d != c:
                        hits[d] = hits.get(d, 0) + 1
        for d in sorted(d for d, h in hits.items() if h >= 2):
            na = _Union(ca, state.adj_a[d])
            nb = _Union(cb, state.adj_b[d])
            if find_cycle_through_edge(na, nb, a, b, length, 4) is not None:
                return True
        return False
    finally:
        state._uncolor_edge(a, b, c)


def assign_leftover(state: MatchingState, palette: PaletteSpec, k: int, seed: int, first_color: int | None = None) -> MatchingState:
    """Give every uncolored edge a leftover color that creates no short 2-colored cycle.

    Colors are filled one at a time: each leftover color takes every
    remaining edge (in a seeded random order) that it can legally hold before
    the next color is opened.  Every edge is thus tried against each leftover
    color at most once.  Edges still uncolored afterwards raise
    :class:`PaletteExhausted`; the state keeps the partial assignment, so a
    caller can enlarge the palette and resume from ``first_color``.
    """
    if palette.total > len(state.adj_a):
        state.extend_palette(palette)
    rng = np.random.default_rng(seed)
    edges = state.uncovered_edges()
    remaining = [edges[i] for i in rng.permutation(len(edges)).tolist()]
    start = palette.size_w if first_color is None else first_color
    for c in range(start, palette.total):
        if not remaining:
            break
        rejected = []
        for a, b in remaining:
            if leftover_conflict(state, a, b, c, k):
                rejected.append((a, b))
            else:
                state._color_edge(a, b, c)
                state.leftover[(a, b)] = c
        remaining = rejected
    if remaining:
        raise PaletteExhausted(remaining[0])
    return state


def matching_to_coloring(state: MatchingState) -> BipartiteColoring:
    if np.any(state.colors == UNCOLORED):
        raise ValueError("matching leaves edges uncolored; run assign_leftover first")
    return BipartiteColoring(state.n, state.k, state.colors.copy(), state.palette.size_w, state.palette.size_w_prime)


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

def finite_retention(n: int, k: int, degree: float = FINITE_DESIGN_DEGREE) -> float:
    """Retention giving about ``degree`` design blocks per vertex."""
    base_degree = (n - 1) / (k - 2)
    return min(1.0, degree / base_degree)


@dataclass
class ConstructResult:
    coloring: BipartiteColoring
    state: MatchingState
    designs: tuple[LinearDesign, LinearDesign]
    report: dict
    wall_time: float = field(default=0.0)


def construct(
    n: int,
    k: int,
    seed: int,
    delta: float = 0.2,
    retention: float | None = None,
    size_w: int | None = None,
    size_w_prime: int | None = None,
    patience: int = 40,
    sequential: bool = False,
    grow_leftover: bool = True,
) -> ConstructResult:
    """Build a coloring of K_{n,n} aiming to give every C_{2k} three colors.

    ``retention=None`` uses :func:`finite_retention`; pass the asymptotic
    value explicitly to follow the design rule verbatim.  When the leftover
    palette runs out and ``grow_leftover`` is set, it is enlarged by its
    original size and the leftover phase resumes with the new colors.
    """
    if k < 3:
        raise ValueError("construction needs k >= 3")
    t0 = time.perf_counter()
    ss = np.random.SeedSequence(seed)
    s_da, s_db, s_greedy, s_left = (int(x.generate_state(1)[0]) for x in ss.spawn(4))
    if retention is None:
        retention = finite_retention(n, k)
    pal = palette_sizes(n, k, delta, size_w)
    if size_w_prime is not None:
        pal = PaletteSpec(pal.size_w, size_w_prime)
    designs = []
    for side, s in ((Side.A, s_da), (Side.B, s_db)):
        base = build_base_design(n, k, side, seed=s)
        designs.append(subsample(base, DesignParams(n, k, delta, s, retention)))
    design_a, design_b = designs
    unc_a, unc_b = uncovered_pairs(design_a), uncovered_pairs(design_b)
    state = new_state(n, k, pal)
    rng = np.random.default_rng(s_greedy)
    stream = guided_candidates(state, design_a, design_b, unc_a, unc_b, rng, patience=patience, sequential=sequential)
    run_greedy(stream, state, ConflictParams(2 * k))
    greedy_coverage = state.coverage
    step = pal.size_w_prime
    first = pal.size_w
    enlargements = 0
    while True:
        try:
            assign_leftover(state, pal, k, s_left, first_color=first)
            break
        except PaletteExhausted as exc:
            if not grow_leftover:
                raise
            log.info("leftover palette exhausted at edge %s; adding %d colors", exc.edge, step)
            first = pal.total
            pal = PaletteSpec(pal.size_w, pal.size_w_prime + step)
            enlargements += 1
    coloring = matching_to_coloring(state)
    used = coloring.used_colors()
    used_w = sum(1 for c in used if c < pal.size_w)
    report = {
        "n": n,
        "k": k,
        "seed": seed,
        "delta": delta,
        "retention": retention,
        "paletteW": pal.size_w,
        "paletteWPrime": pal.size_w_prime,
        "leftoverPaletteEnlargements": enlargements,
        "designSizes": [len(design_a), len(design_b)],
        "bicliques": len(state.chosen),
        "coverageFraction": greedy_coverage,
        "leftoverEdges": len(state.leftover),
        "colorsUsedW": used_w,
        "colorsUsedWPrime": len(used) - used_w,
        "colorsUsed": len(used),
        "colorDensity": len(used) / n,
        "counters": dict(state.counters),
    }
    wall = time.perf_counter() - t0
    return ConstructResult(coloring, state, (design_a, design_b), report, wall)
