"""The matching universe: palettes, colored bicliques and their hyperedges.

A candidate is a colored copy of K_{k-1,2k-1} whose small side Y is a block
of the design on one side and whose big side Z is a set of 2k-1 vertices on
the other side with every pair uncovered by that side's design.  The
corresponding hyperedge consumes the biclique's host edges, one
(vertex, color) token per biclique vertex and one token per pair of Z.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .designs import LinearDesign, UncoveredPairs
from .graphs import Side, encode_edge


@dataclass(frozen=True)
class PaletteSpec:
    size_w: int
    size_w_prime: int

    def __post_init__(self) -> None:
        if self.size_w < 1 or self.size_w_prime < 1:
            raise ValueError("both palettes need at least one color")

    @property
    def w_colors(self) -> range:
        return range(self.size_w)

    @property
    def w_prime_colors(self) -> range:
        return range(self.size_w, self.size_w + self.size_w_prime)

    @property
    def total(self) -> int:
        return self.size_w + self.size_w_prime


def structured_palette_fraction(k: int) -> Fraction:
    """|W| / n forced by the degree balance of the biclique hypergraph."""
    return Fraction(3 * k - 2, 2 * (k - 1) * (2 * k - 1))


def palette_sizes(n: int, k: int, delta: float, size_w: int | None = None) -> PaletteSpec:
    """Palette sizes: |W| from the degree balance (overridable), |W'| = ceil(n^(1-delta)).

    A tiny tolerance absorbs float error in exact powers such as 1024^0.8.
    """
    if n < 2 or k < 2:
        raise ValueError("need n >= 2 and k >= 2")
    if size_w is None:
        size_w = math.ceil(structured_palette_fraction(k) * n)
    w_prime = math.ceil(n ** (1 - delta) - 1e-9)
    return PaletteSpec(int(size_w), int(w_prime))


@dataclass(frozen=True)
class MatchingParams:
    n: int
    k: int
    delta: float = 0.2
    epsilon: float = 0.05
    kappa: float = 1.0

    def __post_init__(self) -> None:
        # the two constants are only reported, so no ordering between them is enforced
        if not (0 < self.delta < 1 and 0 < self.epsilon < 1):
            raise ValueError("delta and epsilon must lie in (0, 1)")

    @property
    def leading_degree(self) -> float:
        """(3k-2)/(2k-1)! * n^(2k-delta)."""
        return (3 * self.k - 2) / math.factorial(2 * self.k - 1) * self.n ** (2 * self.k - self.delta)

    @property
    def d_target(self) -> float:
        return self.leading_degree + self.kappa * self.n ** (2 * self.k - 2 * self.delta)


@dataclass(frozen=True)
class BicliqueCandidate:
    """Colored K_{k-1,2k-1}: small side ``y`` on ``y_side``, big side ``z`` opposite."""

    y_side: Side
    y: tuple[int, ...]
    z: tuple[int, ...]
    color: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "y", tuple(sorted(self.y)))
        object.__setattr__(self, "z", tuple(sorted(self.z)))

    @property
    def k(self) -> int:
        return len(self.y) + 1

    def host_edges(self) -> list[tuple[int, int]]:
        """(A-index, B-index) pairs of the biclique."""
        if self.y_side is Side.A:
            return [(a, b) for a in self.y for b in self.z]
        return [(a, b) for b in self.y for a in self.z]

    def vertices(self) -> list[tuple[Side, int]]:
        zs = self.y_side.other
        return [(self.y_side, v) for v in self.y] + [(zs, v) for v in self.z]

    def to_json(self) -> dict:
        return {"ySide": self.y_side.value, "y": list(self.y), "z": list(self.z), "color": self.color}


@dataclass(frozen=True)
class H1Hyperedge:
    p_part: frozenset[int]
    q_vertex_color: frozenset[tuple[str, int, int]]  # (side, index, color)
    q_pairs: frozenset[tuple[str, int, int]]  # (side, u, v) with u < v

    def __len__(self) -> int:
        return len(self.p_part) + len(self.q_vertex_color) + len(self.q_pairs)

    def tokens(self) -> frozenset:
        return frozenset(("P", e) for e in self.p_part) | self.q_vertex_color | self.q_pairs


def hyperedge_of(cand: BicliqueCandidate, n: int) -> H1Hyperedge:
    p = frozenset(encode_edge(a, b, n) for a, b in cand.host_edges())
    vc = frozenset((s.value, v, cand.color) for s, v in cand.vertices())
    zs = cand.y_side.other.value
    pairs = frozenset((zs, u, v) for u, v in itertools.combinations(cand.z, 2))
    return H1Hyperedge(p, vc, pairs)


@dataclass(frozen=True)
class H2Option:
    edge: int
    color: int


def h2_options(edge: int, palette: PaletteSpec) -> list[H2Option]:
    return [H2Option(edge, c) for c in palette.w_prime_colors]


def is_valid_candidate(
    cand: BicliqueCandidate,
    design_a: LinearDesign,
    design_b: LinearDesign,
    unc_a: UncoveredPairs,
    unc_b: UncoveredPairs,
    palette: PaletteSpec,
) -> bool:
    k = cand.k
    if len(cand.z) != 2 * k - 1 or len(set(cand.z)) != len(cand.z):
        return False
    if cand.color not in palette.w_colors:
        return False
    design = design_a if cand.y_side is Side.A else design_b
    unc = unc_b if cand.y_side is Side.A else unc_a
    if design.uniformity != k - 1:
        return False
    y = np.array(cand.y)
    if not np.any(np.all(design.hyperedges == y, axis=1)):
        return False
    return all((u, v) in unc for u, v in itertools.combinations(cand.z, 2))


def _mask_rows(mask: np.ndarray) -> list[int]:
    """Bitmask per row of a boolean matrix."""
    n = mask.shape[1]
    weights = [1 << i for i in range(n)]
    return [sum(w for w, bit in zip(weights, row) if bit) for row in mask.tolist()]


def grow_clique(pool: int, adj: list[int], size: int, rng: np.random.Generator, attempts: int = 8) -> list[int] | None:
    """Randomized greedy growth of a ``size``-clique inside ``pool``."""
    for _ in range(attempts):
        chosen: list[int] = []
        cand = pool
        while len(chosen) < size and cand:
            bits = [i for i in range(cand.bit_length()) if cand >> i & 1]
            v = bits[int(rng.integers(len(bits)))]
            chosen.append(v)
            cand &= adj[v]
        if len(chosen) == size:
            return chosen
    return None


def enumerate_candidates(
    design_a: LinearDesign,
    design_b: LinearDesign,
    unc_a: UncoveredPairs,
    unc_b: UncoveredPairs,
    palette: PaletteSpec,
    budget: int,
    seed: int,
) -> Iterator[BicliqueCandidate]:
    """Seeded stream of up to ``budget`` sampling attempts.

    Each attempt draws an orientation, a block Y of that side's design and a
    color, then grows Z greedily among vertices pairwise uncovered.  Failed
    growths are dropped, so the stream may be shorter than ``budget``.
    """
    rng = np.random.default_rng(seed)
    k = design_a.uniformity + 1
    sides = []
    if len(design_a):
        sides.append((Side.A, design_a, _mask_rows(unc_b.mask)))
    if len(design_b):
        sides.append((Side.B, design_b, _mask_rows(unc_a.mask)))
    if not sides:
        return
    n = design_a.n
    full = (1 << n) - 1
    for _ in range(budget):
        side, design, adj = sides[int(rng.integers(len(sides)))]
        y = design.hyperedges[int(rng.integers(len(design)))]
        color = int(rng.integers(palette.size_w))
        z = grow_clique(full, adj, 2 * k - 1, rng, attempts=1)
        if z is None:
            continue
        yield BicliqueCandidate(side, tuple(int(v) for v in y), tuple(z), color)


# ---------------------------------------------------------------------------
# Degree estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DegreeEstimate:
    kind: str
    estimate: float
    band: float
    formula: float
    exact: bool

    def to_row(self) -> dict:
        return {"vertexKind": self.kind, "estimate": self.estimate, "band": self.band, "formulaValue": self.formula}


def _clique_extensions(required: list[int], adj: np.ndarray, size: int, trials: int, rng: np.random.Generator | None) -> tuple[float, float, bool]:
    """Count cliques of ``size`` in graph ``adj`` containing every vertex of ``required``.

    Exact when the candidate space is small or ``rng`` is None, otherwise a
    Monte Carlo estimate with a 3-sigma band.
    """
    need = size - len(required)
    common = np.ones(adj.shape[0], dtype=bool)
    for v in required:
        common &= adj[v]
    common[required] = False
    pool = np.flatnonzero(common)
    if need < 0:
        return 0.0, 0.0, True
    total = math.comb(len(pool), need)
    if total == 0:
        return 0.0, 0.0, True
    sub = adj[np.ix_(pool, pool)]
    iu = np.triu_indices(need, 1)
    if rng is None or total <= trials:
        count = 0
        for combo in itertools.combinations(range(len(pool)), need):
            idx = np.array(combo, dtype=np.int64)
            if np.all(sub[idx[:, None], idx[None, :]][iu]):
                count += 1
        return float(count), 0.0, True
    hits = 0
    for _ in range(trials):
        idx = rng.choice(len(pool), size=need, replace=False)
        if np.all(sub[idx[:, None], idx[None, :]][iu]):
            hits += 1
    frac = hits / trials
    band = 3 * math.sqrt(max(frac * (1 - frac), 1.0 / trials) / trials) * total
    return frac * total, band, False


def _side_count(
    design: LinearDesign,
    z_adj: np.ndarray,
    y_vertex: int | None,
    z_required: list[int],
    k: int,
    trials: int,
    rng: np.random.Generator | None,
) -> tuple[float, float, bool]:
    y_count = len(design) if y_vertex is None else int(design.degrees[y_vertex])
    z_count, z_band, exact = _clique_extensions(z_required, z_adj, 2 * k - 1, trials, rng)
    return y_count * z_count, y_count * z_band, exact


def estimate_h1_degree(
    kind: str,
    design_a: LinearDesign,
    design_b: LinearDesign,
    unc_a: UncoveredPairs,
    unc_b: UncoveredPairs,
    palette: PaletteSpec,
    params: MatchingParams,
    trials: int,
    seed: int,
    vertex: int = 0,
    partner: int | None = None,
) -> DegreeEstimate:
    """Degree in H1 of an edge (``kind='e'``), a (vertex, color) token (``'vc'``) or a Z-pair token (``'pair'``).

    The design side of every count is exact; only the number of cliques of
    uncovered pairs extending the fixed vertices is sampled.  ``trials=0``
    forces exhaustive counting.
    """
    k = params.k
    rng = None if trials <= 0 else np.random.default_rng(seed)
    adj_a, adj_b = unc_a.mask, unc_b.mask
    w = palette.size_w
    if kind == "e":
        a, b = vertex, vertex if partner is None else partner
        x1, b1, e1 = _side_count(design_a, adj_b, a, [b], k, trials, rng)
        x2, b2, e2 = _side_count(design_b, adj_a, b, [a], k, trials, rng)
        est, band, exact = w * (x1 + x2), w * (b1 + b2), e1 and e2
    elif kind == "vc":
        v = vertex
        x1, b1, e1 = _side_count(design_a, adj_b, v, [], k, trials, rng)
        x2, b2, e2 = _side_count(design_b, adj_a, None, [v], k, trials, rng)
        est, band, exact = x1 + x2, b1 + b2, e1 and e2
    elif kind == "pair":
        if partner is None:
            raise ValueError("pair tokens need a partner vertex")
        if not unc_a.mask[vertex, partner]:
            est, band, exact = 0.0, 0.0, True
        else:
            x, b1, exact = _side_count(design_b, adj_a, None, [vertex, partner], k, trials, rng)
            est, band = w * x, w * b1
    else:
        raise ValueError(f"unknown vertex kind {kind!r}")
    return DegreeEstimate(kind, float(est), float(band), params.leading_degree, exact)


def exhaustive_h1_degree(
    kind: str,
    design_a: LinearDesign,
    design_b: LinearDesign,
    unc_a: UncoveredPairs,
    unc_b: UncoveredPairs,
    palette: PaletteSpec,
    vertex: int = 0,
    partner: int | None = None,
) -> int:
    """Brute-force H1 degree by enumerating every candidate hyperedge (tiny n only)."""
    n = design_a.n
    k = design_a.uniformity + 1
    count = 0
    for side, design, unc in ((Side.A, design_a, unc_b), (Side.B, design_b, unc_a)):
        for y in design.hyperedges.tolist():
            for z in itertools.combinations(range(n), 2 * k - 1):
                if not all(unc.mask[u, v] for u, v in itertools.combinations(z, 2)):
                    continue
                for c in palette.w_colors:
                    h = hyperedge_of(BicliqueCandidate(side, tuple(y), z, c), n)
                    if kind == "e":
                        b = vertex if partner is None else partner
                        hit = encode_edge(vertex, b, n) in h.p_part
                    elif kind == "vc":
                        hit = ("A", vertex, 0) in h.q_vertex_color
                    else:
                        u, v = sorted((vertex, partner))
                        hit = ("A", u, v) in h.q_pairs
                    count += hit
    return count
