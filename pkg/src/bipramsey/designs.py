"""Linear (k-1)-uniform hypergraphs on one side of K_{n,n}.

The base design is a Steiner system where one is easy to write down (all
pairs for k=3, Bose/Skolem triple systems for k=4) and a greedy maximal
linear packing otherwise.  Subsampling keeps each block independently,
which preserves linearity; the audit compares the subsample against
binomial concentration bands.
"""
from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse

from .graphs import Side

log = logging.getLogger(__name__)

AUDIT_SIGMAS = 5.0


@dataclass
class LinearDesign:
    """A linear hypergraph on vertex set ``range(n)`` of one side."""

    side: Side
    uniformity: int
    n: int
    hyperedges: np.ndarray  # (m, uniformity) sorted rows
    exact: bool = False  # every pair covered exactly once
    notes: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        h = np.asarray(self.hyperedges, dtype=np.int64).reshape(-1, self.uniformity)
        self.hyperedges = np.sort(h, axis=1)

    def __len__(self) -> int:
        return len(self.hyperedges)

    @cached_property
    def pair_to_edge(self) -> np.ndarray:
        """Dense ``n x n`` map from a vertex pair to its covering block (-1 if none)."""
        out = np.full((self.n, self.n), -1, dtype=np.int64)
        h = self.hyperedges
        ids = np.arange(len(h))
        for i, j in itertools.combinations(range(self.uniformity), 2):
            out[h[:, i], h[:, j]] = ids
            out[h[:, j], h[:, i]] = ids
        return out

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.hyperedges.ravel(), minlength=self.n)

    @cached_property
    def incidence(self) -> sparse.csr_matrix:
        """Vertex-by-block incidence matrix."""
        m = len(self.hyperedges)
        rows = self.hyperedges.ravel()
        cols = np.repeat(np.arange(m), self.uniformity)
        return sparse.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(self.n, m))

    def covered_matrix(self) -> np.ndarray:
        return self.pair_to_edge >= 0

    def is_linear(self) -> bool:
        h = self.hyperedges
        if len(h) == 0:
            return True
        if np.any(np.diff(h, axis=1) == 0):
            return False
        keys = []
        for i, j in itertools.combinations(range(self.uniformity), 2):
            keys.append(h[:, i] * self.n + h[:, j])
        allkeys = np.concatenate(keys)
        return len(np.unique(allkeys)) == len(allkeys)

    def blocks_containing(self, v: int) -> np.ndarray:
        return self.incidence.getrow(v).indices

    def to_json(self) -> dict:
        return {"side": self.side.value, "uniformity": self.uniformity, "hyperedges": self.hyperedges.tolist()}

    @classmethod
    def from_json(cls, data: dict, n: int) -> "LinearDesign":
        return cls(Side(data["side"]), int(data["uniformity"]), n, np.array(data["hyperedges"], dtype=np.int64))


@dataclass(frozen=True)
class UncoveredPairs:
    side: Side
    mask: np.ndarray  # symmetric bool (n, n); True where the pair is not covered

    @property
    def pairs(self) -> set[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.mask, 1))
        return set(zip(i.tolist(), j.tolist()))

    def __len__(self) -> int:
        return int(np.count_nonzero(np.triu(self.mask, 1)))

    def __contains__(self, pair: tuple[int, int]) -> bool:
        u, v = pair
        return u != v and bool(self.mask[u, v])


@dataclass(frozen=True)
class DesignParams:
    n: int
    k: int
    delta: float = 0.2
    seed: int = 0
    retention: float | None = None  # overrides the (k-1)(k-2)/n^delta rule

    def __post_init__(self) -> None:
        if not 0 < self.delta < 0.25:
            raise ValueError("delta must lie in (0, 1/4)")
        if self.retention is not None and not 0 < self.retention <= 1:
            raise ValueError("retention must lie in (0, 1]")

    @property
    def raw_probability(self) -> float:
        return (self.k - 1) * (self.k - 2) / self.n**self.delta

    @property
    def probability(self) -> float:
        if self.retention is not None:
            return self.retention
        return min(1.0, self.raw_probability)


# ---------------------------------------------------------------------------
# Base designs
# ---------------------------------------------------------------------------

def bose_sts(n: int) -> np.ndarray:
    """Steiner triple system of order n = 6t + 3 (Bose construction)."""
    if n % 6 != 3:
        raise ValueError("Bose construction needs n = 3 (mod 6)")
    q = n // 3  # order of the idempotent commutative quasigroup Z_q, q odd
    half = (q + 1) // 2  # inverse of 2 mod q

    def pt(x: int, i: int) -> int:
        return x + q * (i % 3)

    blocks = [(pt(x, 0), pt(x, 1), pt(x, 2)) for x in range(q)]
    for x, y in itertools.combinations(range(q), 2):
        z = ((x + y) * half) % q
        for i in range(3):
            blocks.append((pt(x, i), pt(y, i), pt(z, i + 1)))
    return np.array(blocks, dtype=np.int64)


def skolem_sts(n: int) -> np.ndarray:
    """Steiner triple system of order n = 6t + 1 (Skolem construction)."""
    if n % 6 != 1:
        raise ValueError("Skolem construction needs n = 1 (mod 6)")
    t = (n - 1) // 6
    q = 2 * t
    inf = n - 1

    def op(x: int, y: int) -> int:
        s = (x + y) % q
        return s // 2 if s % 2 == 0 else (s - 1) // 2 + t

    def pt(x: int, i: int) -> int:
        return x + q * (i % 3)

    blocks = [(pt(x, 0), pt(x, 1), pt(x, 2)) for x in range(t)]
    for x in range(t):
        for i in range(3):
            blocks.append((inf, pt(x + t, i), pt(x, i + 1)))
    for x, y in itertools.combinations(range(q), 2):
        for i in range(3):
            blocks.append((pt(x, i), pt(y, i), pt(op(x, y), i + 1)))
    return np.array(blocks, dtype=np.int64)


def greedy_linear_packing(n: int, r: int, seed: int = 0) -> np.ndarray:
    """Random greedy maximal packing of r-sets with pairwise intersections <= 1.

    Every vertex is processed in a random order and receives blocks until no
    r-clique of still-uncovered pairs contains it, so the result is maximal.
    """
    rng = np.random.default_rng(seed)
    free = [((1 << n) - 1) & ~(1 << v) for v in range(n)]  # uncovered partners
    blocks: list[tuple[int, ...]] = []
    for v in rng.permutation(n).tolist():
        while True:
            found = _find_clique_with(v, r, free, rng)
            if found is None:
                break
            for x, y in itertools.combinations(found, 2):
                free[x] &= ~(1 << y)
                free[y] &= ~(1 << x)
            blocks.append(tuple(sorted(found)))
    return np.array(blocks, dtype=np.int64).reshape(-1, r)


def _find_clique_with(v: int, r: int, free: list[int], rng: np.random.Generator, node_budget: int = 20000) -> list[int] | None:
    """Find an r-clique containing v in the graph of uncovered pairs."""
    budget = [node_budget]

    def rec(clique: list[int], cand: int) -> list[int] | None:
        if len(clique) == r:
            return clique
        if bin(cand).count("1") < r - len(clique):
            return None
        bits = [i for i in range(cand.bit_length()) if cand >> i & 1]
        order = rng.permutation(len(bits)).tolist()
        for idx in order:
            u = bits[idx]
            budget[0] -= 1
            if budget[0] < 0:
                return None
            got = rec(clique + [u], cand & free[u])
            if got is not None:
                return got
            cand &= ~(1 << u)
        return None

    return rec([v], free[v])


def build_base_design(n: int, k: int, side: Side = Side.A, seed: int = 0) -> LinearDesign:
    if k < 3:
        raise ValueError("k must be at least 3")
    r = k - 1
    if k == 3:
        i, j = np.triu_indices(n, 1)
        h = np.stack([i, j], axis=1).astype(np.int64)
        return LinearDesign(side, 2, n, h, exact=True)
    if k == 4 and n % 6 == 3:
        return LinearDesign(side, 3, n, bose_sts(n), exact=True)
    if k == 4 and n % 6 == 1:
        return LinearDesign(side, 3, n, skolem_sts(n), exact=True)
    h = greedy_linear_packing(n, r, seed)
    note = f"n={n} admits no exact construction here; greedy maximal linear packing used"
    return LinearDesign(side, r, n, h, exact=False, notes=[note])


def subsample(base: LinearDesign, params: DesignParams) -> LinearDesign:
    """Keep each block of ``base`` independently with the retention probability."""
    p = params.probability
    if params.retention is None and params.raw_probability > 1:
        warnings.warn(
            f"retention (k-1)(k-2)/n^delta = {params.raw_probability:.3f} > 1 clamped to 1",
            RuntimeWarning,
            stacklevel=2,
        )
    rng = np.random.default_rng(params.seed)
    keep = rng.random(len(base.hyperedges)) < p
    notes = list(base.notes) + [f"retention probability {p:.6g}"]
    return LinearDesign(base.side, base.uniformity, base.n, base.hyperedges[keep], exact=False, notes=notes)


def uncovered_pairs(design: LinearDesign, n: int | None = None) -> UncoveredPairs:
    n = design.n if n is None else n
    mask = ~design.covered_matrix()
    np.fill_diagonal(mask, False)
    return UncoveredPairs(design.side, mask)


# ---------------------------------------------------------------------------
# Edge walks
# ---------------------------------------------------------------------------

def count_edge_walks(design: LinearDesign, u: int, v: int, length: int, exclude_shared_edge: bool = False) -> int:
    """Number of block sequences (S_1..S_length) with u in S_1, v in S_length and
    consecutive blocks intersecting.

    With ``exclude_shared_edge`` (and u != v) no block of the sequence may
    contain both u and v.  Uses the linear-design identity
    ``|S cap T| <= 1`` for distinct blocks.
    """
    if length < 1:
        raise ValueError("walk length must be >= 1")
    h = design.hyperedges
    m = len(h)
    if m == 0:
        return 0
    allowed = np.ones(m, dtype=bool)
    if exclude_shared_edge and u != v:
        allowed &= ~(np.any(h == u, axis=1) & np.any(h == v, axis=1))
    inc = design.incidence  # n x m
    w = np.where(allowed & np.any(h == u, axis=1), 1, 0).astype(object)
    r = design.uniformity
    inc_t = inc.T.tocsr()
    for _ in range(length - 1):
        per_vertex = _sparse_matvec(inc, w)
        nxt = _sparse_matvec(inc_t, per_vertex)
        # a block meets itself in r vertices and every other block in <= 1
        nxt = [(x - (r - 1) * y) if a else 0 for x, y, a in zip(nxt, w, allowed)]
        w = np.array(nxt, dtype=object)
    end = allowed & np.any(h == v, axis=1)
    return int(sum(int(x) for x, e in zip(w, end) if e))


def _sparse_matvec(mat: sparse.csr_matrix, vec: np.ndarray) -> list[int]:
    """Exact integer matrix-vector product (counts can exceed int64)."""
    out = []
    indptr, indices = mat.indptr, mat.indices
    for i in range(mat.shape[0]):
        s = 0
        for j in indices[indptr[i]:indptr[i + 1]]:
            s += vec[j]
        out.append(s)
    return out


def brute_force_edge_walks(design: LinearDesign, u: int, v: int, length: int, exclude_shared_edge: bool = False) -> int:
    """Explicit enumeration of block sequences; oracle for small designs."""
    blocks = [frozenset(row.tolist()) for row in design.hyperedges]
    if exclude_shared_edge and u != v:
        blocks = [b for b in blocks if not (u in b and v in b)]
    meets = {i: [j for j, t in enumerate(blocks) if blocks[i] & t] for i in range(len(blocks))}
    count = 0
    stack = [(i, 1) for i, b in enumerate(blocks) if u in b]
    while stack:
        i, depth = stack.pop()
        if depth == length:
            count += v in blocks[i]
            continue
        stack.extend((j, depth + 1) for j in meets[i])
    return count


# ---------------------------------------------------------------------------
# Audit
# ---------------------------------------------------------------------------

@dataclass
class AuditCheck:
    name: str
    observed: float
    expected: float
    band: float
    asymptotic_window: tuple[float, float] | None
    passed: bool
    in_asymptotic_window: bool | None = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "observed": self.observed,
            "expected": self.expected,
            "band": self.band,
            "asymptoticWindow": list(self.asymptotic_window) if self.asymptotic_window else None,
            "inAsymptoticWindow": self.in_asymptotic_window,
            "passed": self.passed,
        }


@dataclass
class AuditReport:
    n: int
    k: int
    delta: float
    probability: float
    size: int
    linear: bool
    checks: list[AuditCheck]
    notes: list[str]

    @property
    def passed(self) -> bool:
        return self.linear and all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "delta": self.delta,
            "retentionProbability": self.probability,
            "size": self.size,
            "linear": self.linear,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
            "notes": self.notes,
        }


def shadow_matrix(design: LinearDesign) -> np.ndarray:
    return design.covered_matrix()


def pair_walk2_count(design: LinearDesign, a: int, a2: int, shadow: np.ndarray | None = None) -> int:
    """Length-2 a-a2 edge walks avoiding any block that holds both a and a2."""
    shadow = shadow_matrix(design) if shadow is None else shadow
    common = shadow[a] & shadow[a2]
    blk = design.pair_to_edge[a, a2]
    if blk >= 0:
        common = common.copy()
        common[design.hyperedges[blk]] = False
    common[[a, a2]] = False
    return int(np.count_nonzero(common))


def _walk2_moments(base: LinearDesign, a: int, a2: int, p: float) -> tuple[float, float]:
    """Mean and variance of the length-2 walk count after subsampling ``base``.

    Each walk is a pair of blocks (one through ``a``, one through ``a2``)
    meeting at a third vertex; it survives with probability p^2.  Walks that
    share a block are positively correlated, which the variance accounts for.
    """
    h = base.hyperedges
    ids_a = base.blocks_containing(a)
    ids_b = base.blocks_containing(a2)
    ids_a = ids_a[~(h[ids_a] == a2).any(axis=1)]
    ids_b = ids_b[~(h[ids_b] == a).any(axis=1)]
    # linearity: each vertex lies in at most one block through a2
    at_vertex = np.full(base.n, -1, dtype=np.int64)
    at_vertex[h[ids_b].ravel()] = np.repeat(ids_b, h.shape[1])
    rows_a = np.repeat(ids_a, h.shape[1])
    partner = at_vertex[h[ids_a].ravel()]
    keep = (partner >= 0) & (partner != rows_a)
    first, second = rows_a[keep], partner[keep]
    t = len(first)
    _, counts = np.unique(np.concatenate([first, second]), return_counts=True)
    shared = int(np.sum(counts * (counts - 1)))
    mean = t * p * p
    var = t * (p**2 - p**4) + shared * (p**3 - p**4)
    return mean, var


def audit_design(
    design: LinearDesign,
    params: DesignParams,
    base: LinearDesign | None = None,
    sample_pairs: int = 200,
    sample_walk_vertices: int = 20,
    sigmas: float = AUDIT_SIGMAS,
) -> AuditReport:
    """Compare a subsampled design against its finite-n concentration bands.

    Each check records the observed statistic, its binomial expectation and
    a ``sigmas``-wide band, plus the asymptotic window where one applies.
    """
    n, k, delta = params.n, params.k, params.delta
    p = params.probability
    base = build_base_design(n, k, design.side, seed=params.seed) if base is None else base
    rng = np.random.default_rng(params.seed + 7919)
    checks: list[AuditCheck] = []
    notes = list(design.notes)
    if not base.exact:
        notes.append("base design is a partial system; windows assume an exact Steiner system")

    m0 = len(base)
    size = len(design)
    mean = p * m0
    sd = math.sqrt(m0 * p * (1 - p))
    lo, hi = n ** (2 - delta) - n ** (2 - 2 * delta), n ** (2 - delta) + n ** (2 - 2 * delta)
    checks.append(AuditCheck("design size", size, mean, sigmas * sd, (lo, hi), abs(size - mean) <= sigmas * sd + 1e-9, lo <= size <= hi))

    base_deg = base.degrees.astype(float)
    deg = design.degrees.astype(float)
    exp_deg = p * base_deg
    sd_deg = np.sqrt(base_deg * p * (1 - p))
    dev = np.abs(deg - exp_deg)
    ok = dev <= sigmas * sd_deg + 1e-9
    worst = int(np.argmax(dev / np.maximum(sd_deg, 1e-12)))
    lo2 = (k - 1) * n ** (1 - delta) - n ** (1 - 2 * delta)
    hi2 = (k - 1) * n ** (1 - delta) + n ** (1 - 2 * delta)
    checks.append(
        AuditCheck(
            "vertex degrees (worst vertex)",
            float(deg[worst]),
            float(exp_deg[worst]),
            float(sigmas * sd_deg[worst]),
            (lo2, hi2),
            bool(ok.all()),
            bool(np.all((deg >= lo2) & (deg <= hi2))),
        )
    )

    shadow = shadow_matrix(design)
    worst_z, worst_stat = -1.0, None
    all_ok = True
    for _ in range(sample_pairs):
        a, a2 = rng.choice(n, size=2, replace=False).tolist()
        x = pair_walk2_count(design, a, a2, shadow)
        mu, var = _walk2_moments(base, a, a2, p)
        sd2 = math.sqrt(var)
        good = abs(x - mu) <= sigmas * sd2 + 1e-9
        all_ok &= good
        z = abs(x - mu) / sd2 if sd2 > 0 else (0.0 if x == mu else math.inf)
        if z > worst_z:
            worst_z, worst_stat = z, (x, mu, sd2)
    if worst_stat is not None:
        x, mu, sd2 = worst_stat
        order = n ** (2 * (1 - delta) - 1)
        checks.append(AuditCheck("2-walks (worst pair)", float(x), float(mu), float(sigmas * sd2), (0.0, 2 * order), all_ok, None))

    if len(design) and sample_walk_vertices:
        ratios = []
        for v in rng.choice(n, size=min(n, sample_walk_vertices), replace=False).tolist():
            ratios.append(design.degrees[v] * 1.0 / n ** (1 - delta))
        checks.append(
            AuditCheck("1-walks / n^(1-delta) (max)", float(max(ratios)), float(k - 1), float("nan"), None, True, None)
        )
    return AuditReport(n, k, delta, p, size, design.is_linear(), checks, notes)
