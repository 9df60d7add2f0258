"""Slow, obviously-correct reference implementations used only by the tests.

None of these share code with the package beyond the coloring container.
"""
from __future__ import annotations

import itertools
from collections import Counter

import numpy as np


def all_cycles(n: int, k: int) -> list[tuple[int, ...]]:
    """Every C_{2k} of K_{n,n} as a sorted tuple of edge ids a*n+b, each cycle once."""
    seen = set()
    for a_set in itertools.combinations(range(n), k):
        for b_perm in itertools.permutations(range(n), k):
            for a_rest in itertools.permutations(a_set[1:]):
                a_seq = (a_set[0],) + a_rest
                edges = []
                for i in range(k):
                    edges.append(a_seq[i] * n + b_perm[i])
                    edges.append(a_seq[(i + 1) % k] * n + b_perm[i])
                seen.add(tuple(sorted(edges)))
    return sorted(seen)


def cycles_up_to(n: int, max_len: int) -> list[tuple[int, ...]]:
    out = []
    for j in range(2, max_len // 2 + 1):
        out.extend(all_cycles(n, j))
    return out


def bad_cycles(colors: np.ndarray, k: int, q: int = 3) -> list[tuple[int, ...]]:
    """Cycles C_{2k} with fewer than q distinct colors."""
    n = colors.shape[0]
    flat = colors.ravel()
    return [c for c in all_cycles(n, k) if len({int(flat[e]) for e in c}) < q]


def is_valid(colors: np.ndarray, k: int, q: int = 3) -> bool:
    return not bad_cycles(colors, k, q)


def partial_two_colored(colors: np.ndarray, max_len: int) -> list[tuple[int, ...]]:
    """Fully colored cycles of length 4..max_len with at most two colors; -1 marks uncolored."""
    n = colors.shape[0]
    flat = colors.ravel()
    out = []
    for c in cycles_up_to(n, max_len):
        cols = {int(flat[e]) for e in c}
        if -1 not in cols and len(cols) <= 2:
            out.append(c)
    return out


def unpruned_min_colors(n: int, k: int, q: int = 3, g_max: int = 6, chunk: int = 1 << 18) -> int:
    """Minimum g by scanning every coloring in range(g)^(n*n); no symmetry breaking."""
    cyc = np.array(all_cycles(n, k), dtype=np.int64).reshape(-1, 2 * k)
    m = n * n
    for g in range(1, g_max + 1):
        total = g**m
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            digits = np.empty((len(idx), m), dtype=np.int64)
            rest = idx.copy()
            for j in range(m):
                digits[:, j] = rest % g
                rest //= g
            if len(cyc) == 0:
                return g
            vals = np.sort(digits[:, cyc], axis=2)
            distinct = 1 + np.count_nonzero(np.diff(vals, axis=2), axis=2)
            if np.any(np.all(distinct >= q, axis=1)):
                return g
    raise ValueError("g_max too small")


def naive_strip(edges: set[tuple[str, int, str, int]], k: int, order_key=None) -> list[int]:
    """Reference stripping on an explicit edge set of ('A', a, 'B', b) tuples.

    Repeatedly deletes a minimum-degree vertex; once min degree reaches k-1
    the side with more vertices goes first, then the rest.
    """
    adj: dict[tuple[str, int], set] = {}
    for sa, a, sb, b in edges:
        adj.setdefault((sa, a), set()).add((sb, b))
        adj.setdefault((sb, b), set()).add((sa, a))
    key = order_key or (lambda v: (v[0], v[1]))
    a = [0] * k

    def drop(v):
        a[len(adj[v])] += 1
        for w in adj.pop(v):
            adj[w].discard(v)

    while adj:
        low = min(len(s) for s in adj.values())
        if low >= k - 1:
            break
        drop(min((v for v in adj if len(adj[v]) == low), key=key))
    if adj:
        sides = Counter(v[0] for v in adj)
        small = "B" if sides["B"] == k - 1 else "A"
        for v in sorted(v for v in adj if v[0] != small):
            drop(v)
        for v in sorted(list(adj)):
            drop(v)
    return a


def pairs_covered(blocks) -> Counter:
    cnt: Counter = Counter()
    for blk in blocks:
        for u, v in itertools.combinations(sorted(blk), 2):
            cnt[(u, v)] += 1
    return cnt
