"""Stripping certificates: the counting chain behind the lower bound, evaluated on a coloring."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bounds import ell, h, h_minimizer, lower_constant_k3_special
from .cycles import find_cycle
from .graphs import BipartiteColoring, BipartiteVertex, MonoComponent, Side, monochromatic_components


class StrippingRefutation(RuntimeError):
    """The stripping process met a structure that no valid coloring can contain."""

    def __init__(self, message: str, component: MonoComponent, core: frozenset[BipartiteVertex]):
        super().__init__(message)
        self.component = component
        self.core = core


class CoreBothSidesLarge(StrippingRefutation):
    """A min-degree-(k-1) core with at least k vertices on both sides."""


class DisconnectedCore(StrippingRefutation):
    """A min-degree-(k-1) core that falls apart into several pieces."""


@dataclass
class StrippingProfile:
    component: MonoComponent
    a: list[int]
    in_f_prime: bool
    core_side: Side | None  # side holding the k-1 small vertices of the core
    core_big: frozenset[int] = field(default_factory=frozenset)
    core_small: frozenset[int] = field(default_factory=frozenset)

    @property
    def a_top(self) -> int:
        return self.a[-1]

    def to_json(self) -> dict:
        sa, sb = self.component.sides()
        return {
            "color": self.component.color,
            "sideA": sa,
            "sideB": sb,
            "a": self.a,
            "inFPrime": self.in_f_prime,
            "coreSide": None if self.core_side is None else self.core_side.value,
        }


def _adjacency(comp: MonoComponent) -> dict[BipartiteVertex, set[BipartiteVertex]]:
    adj: dict[BipartiteVertex, set[BipartiteVertex]] = {v: set() for v in comp.vertices}
    for e in comp.edges:
        a, b = divmod(e, comp.n)
        va, vb = BipartiteVertex(Side.A, a), BipartiteVertex(Side.B, b)
        adj[va].add(vb)
        adj[vb].add(va)
    return adj


def _connected(adj: dict[BipartiteVertex, set[BipartiteVertex]]) -> bool:
    if not adj:
        return True
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(adj)


def strip_component(comp: MonoComponent, k: int, rng: np.random.Generator | None = None) -> StrippingProfile:
    """Record removal degrees while peeling minimum-degree vertices.

    Ties go to the lowest global vertex id, or to a random choice when
    ``rng`` is given.  Once every remaining vertex has degree >= k-1 the
    remainder is the core: its large side is removed first (each at degree
    k-1), then the isolated small side (each at degree 0).
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    n = comp.n
    adj = _adjacency(comp)
    a = [0] * k
    key = (lambda v: (len(adj[v]), v.global_id(n))) if rng is None else (lambda v: (len(adj[v]), rng.random()))

    def remove(v: BipartiteVertex) -> None:
        deg = len(adj[v])
        a[deg] += 1  # deg <= k-1 is guaranteed by the callers
        for w in adj.pop(v):
            adj[w].discard(v)

    while adj:
        v = min(adj, key=key)
        if len(adj[v]) >= k - 1:
            break
        remove(v)
    if not adj:
        return StrippingProfile(comp, a, False, None)

    core = frozenset(adj)
    side_a = sorted(v.index for v in adj if v.side is Side.A)
    side_b = sorted(v.index for v in adj if v.side is Side.B)
    if not _connected(adj):
        raise DisconnectedCore("core of minimum degree k-1 is disconnected", comp, core)
    if len(side_a) >= k and len(side_b) >= k:
        raise CoreBothSidesLarge(
            f"core has {len(side_a)} + {len(side_b)} vertices; one side must have exactly {k - 1}", comp, core
        )
    # small side holds exactly k-1 vertices; prefer B when both sides tie
    small_side = Side.B if len(side_b) == k - 1 else Side.A
    big = side_a if small_side is Side.B else side_b
    small = side_b if small_side is Side.B else side_a
    for idx in big:
        remove(BipartiteVertex(small_side.other, idx))
    for idx in small:
        remove(BipartiteVertex(small_side, idx))
    return StrippingProfile(comp, a, a[k - 1] >= k, small_side, frozenset(big), frozenset(small))


@dataclass(frozen=True)
class PairSharingWitness:
    first: StrippingProfile
    second: StrippingProfile
    shared: tuple[int, int]
    cycle: tuple[BipartiteVertex, ...] | None

    def to_json(self) -> dict:
        return {
            "colors": [self.first.component.color, self.second.component.color],
            "side": self.first.core_side.other.value,
            "shared": list(self.shared),
            "cycle": None if self.cycle is None else [[v.side.value, v.index] for v in self.cycle],
        }


def pair_sharing_scan(profiles: list[StrippingProfile], k: int) -> PairSharingWitness | None:
    """Find two cores in F' whose large sides (on the same host side) share two vertices."""
    cores = [p for p in profiles if p.in_f_prime]
    by_pair: dict[tuple[Side, int, int], StrippingProfile] = {}
    for p in cores:
        big_side = p.core_side.other
        verts = sorted(p.core_big)
        for i, u in enumerate(verts):
            for v in verts[i + 1:]:
                other = by_pair.get((big_side, u, v))
                if other is not None and other.component.color != p.component.color:
                    return PairSharingWitness(other, p, (u, v), _cycle_in_union(other, p, k))
                by_pair.setdefault((big_side, u, v), p)
    return None


def _cycle_in_union(p: StrippingProfile, q: StrippingProfile, k: int) -> tuple[BipartiteVertex, ...] | None:
    n = p.component.n
    na = [0] * n
    nb = [0] * n
    for prof in (p, q):
        for e in prof.component.edges:
            a, b = divmod(e, n)
            na[a] |= 1 << b
            nb[b] |= 1 << a
    raw = find_cycle(na, nb, 2 * k)
    if raw is None:
        return None
    return tuple(BipartiteVertex(Side(s), i) for s, i in raw)


@dataclass
class Inequality:
    name: str
    lhs: float
    rhs: float
    holds: bool
    mid: float | None = None

    def to_json(self) -> dict:
        out = {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}
        if self.mid is not None:
            out["mid"] = self.mid
        return out


@dataclass
class StrippingCertificate:
    n: int
    k: int
    g: int
    ell: int
    profiles: list[StrippingProfile]
    big_a: int  # the aggregate A over F'
    f_prime: int
    sum_degree: int  # sum of removal degrees, equals the edge count
    vertex_total: int  # vertices summed over components
    inequalities: list[Inequality]
    implied_lower_bound: float
    implied_lower_bound_k3: float | None
    pair_sharing: PairSharingWitness | None

    @property
    def vertex_slack(self) -> int:
        return 2 * self.n * self.g - self.vertex_total

    @property
    def passed(self) -> bool:
        return all(i.holds for i in self.inequalities) and self.pair_sharing is None

    def failures(self) -> list[str]:
        out = [i.name for i in self.inequalities if not i.holds]
        if self.pair_sharing is not None:
            out.append("pair sharing")
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "g": self.g,
            "ell": self.ell,
            "A": self.big_a,
            "FPrime": self.f_prime,
            "sumDegCheck": self.sum_degree,
            "vertexCheck": self.vertex_total,
            "vertexSlack": self.vertex_slack,
            "inequalities": [i.to_json() for i in self.inequalities],
            "impliedLowerBound": self.implied_lower_bound,
            "impliedLowerBoundK3": self.implied_lower_bound_k3,
            "pairSharing": None if self.pair_sharing is None else self.pair_sharing.to_json(),
            "passed": self.passed,
            "profiles": [p.to_json() for p in self.profiles],
        }


def build_certificate(coloring: BipartiteColoring, k: int, rng: np.random.Generator | None = None) -> StrippingCertificate:
    """Strip every monochromatic component and evaluate the counting chain.

    Raises :class:`StrippingRefutation` when a core shows the coloring has a
    C_{2k} with at most two colors.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    coloring.require_complete()
    n = coloring.n
    g = coloring.color_count
    l = ell(k)
    profiles = [strip_component(c, k, rng) for c in monochromatic_components(coloring)]
    fp = [p for p in profiles if p.in_f_prime]
    big_a = sum(p.a_top for p in fp)
    sum_deg = sum(j * x for p in profiles for j, x in enumerate(p.a))
    verts = sum(sum(p.a) for p in profiles)
    two_ng = 2 * n * g
    ineq: list[Inequality] = []
    ineq.append(Inequality("edges sum j a_j = n^2", sum_deg, n * n, sum_deg == n * n))
    ineq.append(Inequality("vertices sum a_j <= 2ng", verts, two_ng, verts <= two_ng))

    # (k-2) * vertices - edges, with the exact middle term sum_C (sum_j (k-2-j) a_j)
    mid = sum((k - 2 - j) * x for p in profiles for j, x in enumerate(p.a))
    lhs3 = (k - 2) * two_ng - n * n
    rhs3 = sum(l - p.a_top for p in fp)
    ineq.append(Inequality("core deficit 2(k-2)ng - n^2 >= sum_F' (l - a_{k-1})", lhs3, rhs3, lhs3 >= mid >= rhs3, mid))
    rhs_f = n * n + l * len(fp) - big_a
    ineq.append(Inequality("colors with F' 2(k-2)ng >= n^2 + l|F'| - A", (k - 2) * two_ng, rhs_f, (k - 2) * two_ng >= rhs_f))

    pairs_total = 2 * math.comb(n, 2)
    pair_mid = sum(math.comb(p.a_top, 2) for p in fp)
    conv = len(fp) * (big_a / len(fp)) * (big_a / len(fp) - 1) / 2 if fp else 0.0
    ineq.append(Inequality("pairs 2C(n,2) >= sum_F' C(a_{k-1},2) >= |F'| C(A/|F'|,2)", pairs_total, conv, pairs_total >= pair_mid >= conv - 1e-9, pair_mid))
    f_lb = big_a * big_a / (2 * n * n + big_a) if big_a else 0.0
    ineq.append(Inequality("|F'| >= A^2/(2n^2 + A)", len(fp), f_lb, len(fp) >= f_lb - 1e-9))

    a_ratio = Fraction(big_a, n * n)
    h_val = float(h(a_ratio, l))
    _, h_min = h_minimizer(l)
    lhs_h = (k - 2) * two_ng
    ineq.append(Inequality("2(k-2)ng >= n^2 h(A/n^2) >= n^2 hmin", lhs_h, n * n * h_min, lhs_h >= n * n * h_val - 1e-9 and h_val >= h_min - 1e-12, n * n * h_val))
    implied = n * h_min / (2 * (k - 2))
    ineq.append(Inequality("g >= n hmin / (2(k-2))", g, implied, g >= implied - 1e-9))
    implied_k3 = None
    if k == 3:
        ineq.append(Inequality("A <= n^2/2", big_a, n * n / 2, 2 * big_a <= n * n))
        implied_k3 = float(lower_constant_k3_special() * n)
        ineq.append(Inequality("g >= 7n/20", g, implied_k3, 20 * g >= 7 * n))
    witness = pair_sharing_scan(profiles, k)
    return StrippingCertificate(n, k, g, l, profiles, big_a, len(fp), sum_deg, verts, ineq, implied, implied_k3, witness)
