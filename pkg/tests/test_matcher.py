import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bipramsey import matcher
from bipramsey.candidates import BicliqueCandidate, PaletteSpec
from bipramsey.graphs import UNCOLORED, Side
from bipramsey.matcher import (
    ConflictParams,
    PaletteExhausted,
    assign_leftover,
    compatible,
    construct,
    creates_conflict_c,
    finite_retention,
    matching_to_coloring,
    new_state,
    per_color_quota,
    run_greedy,
)
from bipramsey.verifier import verify_exhaustive, verify_pairwise
from oracles import all_cycles, cycles_up_to


class CycleOracle:
    """Numpy scan over a precomputed cycle list of K_{n,n}."""

    def __init__(self, n, max_len, exact_len=False):
        cyc = all_cycles(n, max_len // 2) if exact_len else cycles_up_to(n, max_len)
        width = max(len(c) for c in cyc)
        arr = np.full((len(cyc), width), -1, dtype=np.int64)
        for i, c in enumerate(cyc):
            arr[i, : len(c)] = c
            arr[i, len(c):] = c[0]  # pad with a repeat: no effect on the color set
        self.cycles = arr

    def bad(self, colors, through=None):
        flat = colors.ravel()
        vals = flat[self.cycles]
        rows = np.all(vals != UNCOLORED, axis=1)
        s = np.sort(vals, axis=1)
        distinct = 1 + np.count_nonzero(np.diff(s, axis=1), axis=1)
        rows &= distinct <= 2
        if through is not None:
            rows &= np.any(self.cycles == through, axis=1)
        return bool(rows.any())


def random_candidates(n, k, w, seed, count):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        side = Side.A if rng.random() < 0.5 else Side.B
        y = tuple(rng.choice(n, size=k - 1, replace=False).tolist())
        z = tuple(rng.choice(n, size=2 * k - 1, replace=False).tolist())
        yield BicliqueCandidate(side, y, z, int(rng.integers(w)))


def test_compatibility_rules():
    st_ = new_state(8, 3, PaletteSpec(3, 2))
    st_.add_biclique(BicliqueCandidate(Side.A, (0, 1), (0, 1, 2, 3, 4), 0))
    # same color, shared vertex
    assert not compatible(st_, BicliqueCandidate(Side.A, (2, 3), (4, 5, 6, 7, 0), 0))
    # different color, big sides share two vertices
    assert not compatible(st_, BicliqueCandidate(Side.A, (2, 3), (0, 1, 5, 6, 7), 1))
    # different color, a host edge already used
    assert not compatible(st_, BicliqueCandidate(Side.A, (1, 2), (4, 5, 6, 7, 3), 1))
    # the other orientation touches rows 2..6 only
    assert compatible(st_, BicliqueCandidate(Side.B, (0, 1), (2, 3, 4, 5, 6), 1))
    # leftover colors are never structured colors
    assert not compatible(st_, BicliqueCandidate(Side.A, (5, 6), (0, 5, 6, 7, 1), 3))


def test_shared_small_side_allowed():
    st_ = new_state(9, 3, PaletteSpec(3, 2))
    st_.add_biclique(BicliqueCandidate(Side.A, (0, 1), (0, 1, 2, 3, 4), 0))
    # same Y, different color, Z meeting the first in one vertex: allowed
    assert compatible(st_, BicliqueCandidate(Side.A, (2, 3), (4, 5, 6, 7, 8), 1))
    same_y = BicliqueCandidate(Side.A, (0, 1), (4, 5, 6, 7, 8), 1)
    assert not compatible(st_, same_y)  # host edges (0,4), (1,4) already used


def test_vertex_disjoint_candidate_no_conflict():
    st_ = new_state(10, 3, PaletteSpec(2, 2))
    st_.add_biclique(BicliqueCandidate(Side.A, (0, 1), (0, 1, 2, 3, 4), 0))
    far = BicliqueCandidate(Side.A, (2, 3), (5, 6, 7, 8, 9), 1)
    assert compatible(st_, far) and not creates_conflict_c(st_, far, 3)


def test_two_biclique_cycle_detected():
    # color 0 on A{0,1} x B{0..4}; color 1 on B{0,1} x A{2..6} closes
    # a0-b0-a2-b1-a1-b2-a0, a C6 in two colors
    st_ = new_state(8, 3, PaletteSpec(2, 2))
    st_.add_biclique(BicliqueCandidate(Side.A, (0, 1), (0, 1, 2, 3, 4), 0))
    cand = BicliqueCandidate(Side.B, (0, 1), (2, 3, 4, 5, 6), 1)
    assert compatible(st_, cand)
    assert creates_conflict_c(st_, cand, 3)
    # a single shared B vertex gives no such cycle
    lone = BicliqueCandidate(Side.B, (0, 5), (2, 3, 4, 5, 6), 1)
    assert compatible(st_, lone) and not creates_conflict_c(st_, lone, 3)


def _conflict_oracle(oracle, state, cand):
    trial = state.colors.copy()
    for a, b in cand.host_edges():
        trial[a, b] = cand.color
    return oracle.bad(trial)


@pytest.mark.parametrize("seed", range(6))
def test_conflict_oracle_equivalence(seed):
    # every compatible candidate is judged, accepted or not
    n, k, w = 9, 3, 4
    oracle = CycleOracle(n, 2 * k, exact_len=True)
    state = new_state(n, k, PaletteSpec(w, 3))
    outcomes = []
    # build a small base, then probe without committing
    for cand in random_candidates(n, k, w, seed, 3000):
        if len(state.chosen) < 1 + seed % 2 and compatible(state, cand) and not creates_conflict_c(state, cand, k):
            state.add_biclique(cand)
    assert not oracle.bad(state.colors)
    for cand in random_candidates(n, k, w, seed + 1000, 3000):
        if compatible(state, cand):
            got = creates_conflict_c(state, cand, k)
            assert got == _conflict_oracle(oracle, state, cand)
            outcomes.append(got)
    assert outcomes


def test_conflict_oracle_sees_both_outcomes():
    n, k, w = 9, 3, 4
    oracle = CycleOracle(n, 2 * k, exact_len=True)
    seen = set()
    for seed in range(10):
        state = new_state(n, k, PaletteSpec(w, 3))
        for cand in random_candidates(n, k, w, 100 + seed, 1500):
            if compatible(state, cand):
                got = creates_conflict_c(state, cand, k)
                assert got == _conflict_oracle(oracle, state, cand)
                seen.add(got)
                if not got:
                    state.add_biclique(cand)
    assert seen == {True, False}


def test_greedy_uses_conflict_check(monkeypatch):
    calls = []
    original = matcher.creates_conflict_c

    def spy(state, cand, k):
        calls.append(cand)
        return original(state, cand, k)

    monkeypatch.setattr(matcher, "creates_conflict_c", spy)
    st_ = run_greedy(random_candidates(9, 3, 4, 0, 500), new_state(9, 3, PaletteSpec(4, 3)), ConflictParams(6))
    assert set(st_.chosen) <= set(calls)


@pytest.mark.parametrize("seed", range(4))
def test_leftover_oracle_equivalence(seed, monkeypatch):
    n, k, w = 7, 3, 3
    oracle = CycleOracle(n, 2 * k)
    state = run_greedy(random_candidates(n, k, w, seed, 200), new_state(n, k, PaletteSpec(w, 4)), ConflictParams(6))
    original = matcher.leftover_conflict

    def checked(st_, a, b, c, kk):
        got = original(st_, a, b, c, kk)
        trial = st_.colors.copy()
        trial[a, b] = c
        cls = trial == c
        deg_a, deg_b = cls.sum(axis=1), cls.sum(axis=0)
        path3 = any(deg_a[x] >= 2 and deg_b[y] >= 2 for x, y in zip(*np.nonzero(cls)))
        assert got == (path3 or oracle.bad(trial, through=a * n + b))
        return got

    monkeypatch.setattr(matcher, "leftover_conflict", checked)
    pal = PaletteSpec(w, 4)
    first = None
    for _ in range(20):
        try:
            assign_leftover(state, pal, k, seed, first_color=first)
            break
        except PaletteExhausted:
            first = pal.total
            pal = PaletteSpec(w, pal.size_w_prime + 4)
    col = matching_to_coloring(state)
    # bicliques hold monochromatic C4s, so the final check is on C6 only
    assert not CycleOracle(n, 2 * k, exact_len=True).bad(col.colors)


def test_empty_stream():
    st_ = run_greedy([], new_state(6, 3, PaletteSpec(2, 2)), ConflictParams(6))
    assert st_.coverage == 0 and not st_.chosen


def test_single_biclique_then_leftover():
    n = 10
    st_ = new_state(n, 3, PaletteSpec(1, 40))
    run_greedy([BicliqueCandidate(Side.A, (0, 1), (0, 1, 2, 3, 4), 0)], st_, ConflictParams(6))
    assign_leftover(st_, st_.palette, 3, seed=0)
    col = matching_to_coloring(st_)
    assert np.count_nonzero(col.colors == 0) == 10
    assert col.color_count == 1 + len(set(st_.leftover.values()))
    assert verify_pairwise(col, 3) is None


def test_exhaustion_reports_edge():
    st_ = new_state(6, 3, PaletteSpec(1, 1))
    with pytest.raises(PaletteExhausted) as info:
        assign_leftover(st_, st_.palette, 3, seed=0)
    assert len(info.value.edge) == 2
    with pytest.raises(ValueError):
        matching_to_coloring(st_)


def test_config_validation():
    with pytest.raises(ValueError):
        ConflictParams(5)
    with pytest.raises(ValueError):
        construct(10, 2, seed=1)
    assert per_color_quota(60, 3) == 17
    assert 0 < finite_retention(60, 3) < 1


@pytest.mark.parametrize("n,seed", [(12, 1), (16, 2), (24, 3)])
def test_construct_invariants(n, seed):
    res = construct(n, 3, seed)
    col, state = res.coloring, res.state
    assert col.is_complete
    assert verify_pairwise(col, 3) is None
    if n <= 12:
        assert verify_exhaustive(col, 3) is None
    # equal-color bicliques are vertex-disjoint; big sides share at most one vertex
    by_color = {}
    for cand in state.chosen:
        by_color.setdefault(cand.color, []).append(cand)
    for group in by_color.values():
        for p, q in itertools.combinations(group, 2):
            assert not set(p.vertices()) & set(q.vertices())
    for p, q in itertools.combinations(state.chosen, 2):
        if p.y_side == q.y_side:
            assert len(set(p.z) & set(q.z)) <= 1
    trace = state.coverage_trace
    assert all(x <= y for x, y in zip(trace, trace[1:]))
    # leftover classes are star forests
    for c in set(state.leftover.values()):
        cls = col.colors == c
        deg_a, deg_b = cls.sum(axis=1), cls.sum(axis=0)
        assert not any(deg_a[x] >= 2 and deg_b[y] >= 2 for x, y in zip(*np.nonzero(cls)))
    rep = res.report
    assert rep["colorsUsed"] == rep["colorsUsedW"] + rep["colorsUsedWPrime"] == col.color_count
    assert all(c >= col.palette_w for c in state.leftover.values())


def test_construct_deterministic():
    a = construct(20, 3, seed=5)
    b = construct(20, 3, seed=5)
    assert np.array_equal(a.coloring.colors, b.coloring.colors)
    assert a.report == b.report


@given(st.integers(0, 10**6))
@settings(max_examples=5)
def test_construct_always_valid(seed):
    assert verify_pairwise(construct(14, 3, seed).coloring, 3) is None


def test_construct_k4_small():
    res = construct(13, 4, seed=2, retention=0.3)
    assert verify_pairwise(res.coloring, 4) is None
