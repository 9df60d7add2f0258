"""Edge colorings of the complete bipartite graph K_{n,n}.

Vertices of side A are the integers ``0..n-1`` and vertices of side B are
``n..2n-1`` when a single global id is needed.  Colorings are stored densely
as an ``n x n`` integer array ``colors[a, b]`` with ``UNCOLORED`` (-1) for
edges that have not been assigned yet.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

UNCOLORED = -1


class Side(str, enum.Enum):
    A = "A"
    B = "B"

    @property
    def other(self) -> "Side":
        return Side.B if self is Side.A else Side.A


class BipartiteVertex(NamedTuple):
    side: Side
    index: int

    def global_id(self, n: int) -> int:
        return self.index if self.side is Side.A else n + self.index

    @classmethod
    def from_global(cls, v: int, n: int) -> "BipartiteVertex":
        if not 0 <= v < 2 * n:
            raise ValueError(f"vertex id {v} out of range for n={n}")
        return cls(Side.A, v) if v < n else cls(Side.B, v - n)


def encode_edge(a: int, b: int, n: int) -> int:
    if not (0 <= a < n and 0 <= b < n):
        raise ValueError(f"edge ({a}, {b}) out of range for n={n}")
    return a * n + b


def decode_edge(e: int, n: int) -> tuple[int, int]:
    if not 0 <= e < n * n:
        raise ValueError(f"edge id {e} out of range for n={n}")
    return divmod(e, n)


@dataclass
class BipartiteColoring:
    """Dense edge coloring of K_{n,n}.

    ``palette_w`` counts the structured (biclique) colors, which occupy ids
    ``0..palette_w-1``; the leftover palette follows immediately after.
    """

    n: int
    k: int
    colors: np.ndarray
    palette_w: int = 0
    palette_w_prime: int = 0

    def __post_init__(self) -> None:
        self.colors = np.asarray(self.colors, dtype=np.int64)
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.colors.shape != (self.n, self.n):
            raise ValueError(f"colors must have shape ({self.n}, {self.n}), got {self.colors.shape}")
        if np.any(self.colors < UNCOLORED):
            raise ValueError("color ids must be >= 0 (or -1 for uncolored)")
        palette = self.palette_w + self.palette_w_prime
        if palette > 0 and np.any(self.colors >= palette):
            raise ValueError(f"color id outside palette of size {palette}")

    @classmethod
    def uncolored(cls, n: int, k: int, palette_w: int = 0, palette_w_prime: int = 0) -> "BipartiteColoring":
        return cls(n, k, np.full((n, n), UNCOLORED, dtype=np.int64), palette_w, palette_w_prime)

    @property
    def is_complete(self) -> bool:
        return bool(np.all(self.colors != UNCOLORED))

    def used_colors(self) -> list[int]:
        used = np.unique(self.colors)
        return [int(c) for c in used if c != UNCOLORED]

    @property
    def color_count(self) -> int:
        """Number of distinct colors actually used (the quantity g)."""
        return len(self.used_colors())

    def require_complete(self) -> None:
        if not self.is_complete:
            missing = int(np.count_nonzero(self.colors == UNCOLORED))
            raise ValueError(f"coloring is incomplete ({missing} uncolored edges)")

    def relabel(self, mapping: dict[int, int]) -> "BipartiteColoring":
        out = self.colors.copy()
        for old, new in mapping.items():
            out[self.colors == old] = new
        return BipartiteColoring(self.n, self.k, out)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "paletteW": self.palette_w,
            "paletteWPrime": self.palette_w_prime,
            "colors": self.colors.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "BipartiteColoring":
        return cls(
            n=int(data["n"]),
            k=int(data["k"]),
            colors=np.array(data["colors"], dtype=np.int64),
            palette_w=int(data.get("paletteW", 0)),
            palette_w_prime=int(data.get("paletteWPrime", 0)),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), separators=(",", ":")) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "BipartiteColoring":
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class MonoComponent:
    color: int
    vertices: frozenset[BipartiteVertex]
    edges: frozenset[int]
    n: int = field(compare=False)

    def sides(self) -> tuple[list[int], list[int]]:
        """Sorted vertex indices of the component on side A and side B."""
        a = sorted(v.index for v in self.vertices if v.side is Side.A)
        b = sorted(v.index for v in self.vertices if v.side is Side.B)
        return a, b


def _find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def monochromatic_components(coloring: BipartiteColoring) -> list[MonoComponent]:
    """Connected components of every color class, ordered by (color, min edge)."""
    coloring.require_complete()
    n = coloring.n
    parent = list(range(2 * n))
    colors = coloring.colors
    by_color: dict[int, list[int]] = {}
    flat = colors.ravel()
    order = np.argsort(flat, kind="stable")
    for e in order.tolist():
        by_color.setdefault(int(flat[e]), []).append(e)

    components: list[MonoComponent] = []
    for c in sorted(by_color):
        edges = by_color[c]
        touched = set()
        for e in edges:
            a, b = divmod(e, n)
            touched.add(a)
            touched.add(n + b)
            ra, rb = _find(parent, a), _find(parent, n + b)
            if ra != rb:
                parent[ra] = rb
        groups: dict[int, list[int]] = {}
        for e in edges:
            groups.setdefault(_find(parent, e // n), []).append(e)
        for root in sorted(groups, key=lambda r: groups[r][0]):
            es = groups[root]
            verts = set()
            for e in es:
                a, b = divmod(e, n)
                verts.add(BipartiteVertex(Side.A, a))
                verts.add(BipartiteVertex(Side.B, b))
            components.append(MonoComponent(c, frozenset(verts), frozenset(es), n))
        for v in touched:
            parent[v] = v
    return components


def component_bipartition(component: MonoComponent) -> tuple[int, int]:
    size_a = sum(1 for v in component.vertices if v.side is Side.A)
    return size_a, len(component.vertices) - size_a


def color_adjacency(colors: np.ndarray) -> tuple[dict[int, list[int]], dict[int, list[int]]]:
    """Per-color neighbourhood bitmasks.

    Returns ``(adj_a, adj_b)`` where ``adj_a[c][a]`` is an int whose bit ``b``
    is set iff edge ``(a, b)`` has color ``c``, and symmetrically for ``adj_b``.
    """
    n = colors.shape[0]
    adj_a: dict[int, list[int]] = {}
    adj_b: dict[int, list[int]] = {}
    for a in range(n):
        row = colors[a]
        for b in range(n):
            c = int(row[b])
            if c == UNCOLORED:
                continue
            if c not in adj_a:
                adj_a[c] = [0] * n
                adj_b[c] = [0] * n
            adj_a[c][a] |= 1 << b
            adj_b[c][b] |= 1 << a
    return adj_a, adj_b
