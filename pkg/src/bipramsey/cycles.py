"""Fixed-length cycle search in sparse bipartite graphs.

Graphs are given as two lists of neighbourhood bitmasks: ``na[a]`` holds the
B-neighbours of A-vertex ``a`` and ``nb[b]`` the A-neighbours of B-vertex
``b``.  A cycle of length ``2m`` is a cyclic sequence of distinct A-vertices
``a_1..a_m`` together with distinct B-vertices ``b_i`` adjacent to both
``a_i`` and ``a_{i+1}``.  The search walks over A-vertices two steps at a
time and picks the B-vertices at the end as a system of distinct
representatives, which keeps the branching small when the graph is the union
of a couple of color classes.
"""
from __future__ import annotations

from typing import Callable, Sequence

Masks = Sequence[int]


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def distinct_representatives(sets: Sequence[int]) -> list[int] | None:
    """Pick pairwise distinct elements ``r_i in sets[i]`` or return None."""
    chosen: list[int] = []

    def rec(i: int, used: int) -> bool:
        if i == len(sets):
            return True
        for x in iter_bits(sets[i] & ~used):
            chosen.append(x)
            if rec(i + 1, used | (1 << x)):
                return True
            chosen.pop()
        return False

    return list(chosen) if rec(0, 0) else None


def _two_step(na: Masks, nb: Masks, a: int, forbid_b: int) -> int:
    out = 0
    for b in iter_bits(na[a] & ~forbid_b):
        out |= nb[b]
    return out & ~(1 << a)


def find_cycle_through_edge(
    na: Masks, nb: Masks, a: int, b: int, length: int, min_length: int | None = None
) -> list[tuple[str, int]] | None:
    """Return a simple cycle using edge (a, b) with ``min_length <= len <= length``.

    ``min_length`` defaults to ``length`` (exact length).  The cycle is
    returned as an alternating vertex list starting ``[("A", a), ("B", b), ...]``.
    ``na``/``nb`` must already contain the edge (a, b).
    """
    if min_length is None:
        min_length = length
    min_length = max(4, min_length + (min_length % 2))
    if length < min_length:
        return None
    m = length // 2
    m_min = min_length // 2
    bbit = 1 << b
    closers = nb[b] & ~(1 << a)
    if not closers:
        return None
    seq = [a]
    sets: list[int] = []

    def rec(used: int) -> list[int] | None:
        cur = seq[-1]
        depth = len(seq) + 1  # A-vertices on the cycle once nxt is appended
        cands = _two_step(na, nb, cur, bbit) & ~used
        if depth == m:
            cands &= closers
        for nxt in iter_bits(cands):
            common = na[cur] & na[nxt] & ~bbit
            sets.append(common)
            reps = distinct_representatives(sets)
            if reps is not None:
                seq.append(nxt)
                if depth >= m_min and closers >> nxt & 1:
                    return reps
                if depth < m:
                    got = rec(used | (1 << nxt))
                    if got is not None:
                        return got
                seq.pop()
            sets.pop()
        return None

    reps = rec(1 << a)
    if reps is None:
        return None
    # seq = a_1..a_m with b_i joining a_i, a_{i+1}; edge (a_m, b) closes onto a_1 via b.
    cycle: list[tuple[str, int]] = [("A", a), ("B", b)]
    for i in range(len(seq) - 1, 0, -1):
        cycle.append(("A", seq[i]))
        cycle.append(("B", reps[i - 1]))
    return cycle


def find_cycle(na: Masks, nb: Masks, length: int, allowed_a: int | None = None) -> list[tuple[str, int]] | None:
    """Return some simple cycle with exactly ``length`` edges, or None.

    The cycle is anchored at its smallest A-vertex; A-vertices are scanned in
    increasing order so the result is deterministic.
    """
    if length % 2 or length < 4:
        return None
    m = length // 2
    n_a = len(na)
    if allowed_a is None:
        allowed_a = (1 << n_a) - 1
    # A-vertices with fewer than two neighbours can never lie on a cycle.
    live = 0
    for a in iter_bits(allowed_a):
        if na[a] & (na[a] - 1):
            live |= 1 << a
    for a1 in iter_bits(live):
        seq = [a1]
        sets: list[int] = []
        above = live & ~((1 << (a1 + 1)) - 1)

        def rec(used: int) -> list[int] | None:
            cur = seq[-1]
            if len(seq) == m:
                common = na[cur] & na[a1]
                sets.append(common)
                reps = distinct_representatives(sets)
                sets.pop()
                return reps
            cands = _two_step(na, nb, cur, 0) & above & ~used
            for nxt in iter_bits(cands):
                common = na[cur] & na[nxt]
                sets.append(common)
                if distinct_representatives(sets) is not None:
                    seq.append(nxt)
                    got = rec(used | (1 << nxt))
                    if got is not None:
                        return got
                    seq.pop()
                sets.pop()
            return None

        reps = rec(1 << a1)
        if reps is not None:
            cycle: list[tuple[str, int]] = []
            for i in range(m):
                cycle.append(("A", seq[i]))
                cycle.append(("B", reps[i]))
            return cycle
    return None


def find_path(na: Masks, nb: Masks, vertices: int) -> list[tuple[str, int]] | None:
    """Return a simple path on exactly ``vertices`` vertices, or None."""
    n_a, n_b = len(na), len(nb)
    target = vertices

    def nbrs(side: str, v: int) -> tuple[str, int]:
        return ("B", na[v]) if side == "A" else ("A", nb[v])

    path: list[tuple[str, int]] = []
    used = {"A": 0, "B": 0}

    def rec(side: str, v: int) -> bool:
        path.append((side, v))
        used[side] |= 1 << v
        if len(path) == target:
            return True
        other, mask = nbrs(side, v)
        for w in iter_bits(mask & ~used[other]):
            if rec(other, w):
                return True
        path.pop()
        used[side] &= ~(1 << v)
        return False

    for side, count, masks in (("A", n_a, na), ("B", n_b, nb)):
        for v in range(count):
            if masks[v] and rec(side, v):
                return list(path)
    return None


def union_masks(*layers: Masks) -> list[int]:
    out = [0] * len(layers[0])
    for layer in layers:
        for i, m in enumerate(layer):
            out[i] |= m
    return out


MaskGetter = Callable[[int], int]
