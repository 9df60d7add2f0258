import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bipramsey.graphs import (
    UNCOLORED,
    BipartiteColoring,
    BipartiteVertex,
    Side,
    color_adjacency,
    component_bipartition,
    decode_edge,
    encode_edge,
    monochromatic_components,
)


def test_edge_codec_roundtrip():
    n = 7
    for a in range(n):
        for b in range(n):
            assert decode_edge(encode_edge(a, b, n), n) == (a, b)
    with pytest.raises(ValueError):
        encode_edge(7, 0, 7)
    with pytest.raises(ValueError):
        decode_edge(49, 7)


def test_vertex_ids():
    assert BipartiteVertex(Side.B, 2).global_id(5) == 7
    assert BipartiteVertex.from_global(7, 5) == BipartiteVertex(Side.B, 2)
    assert Side.A.other is Side.B


def test_validation():
    with pytest.raises(ValueError):
        BipartiteColoring(3, 3, np.zeros((3, 2)))
    with pytest.raises(ValueError):
        BipartiteColoring(2, 2, np.array([[0, -2], [0, 0]]))
    with pytest.raises(ValueError):
        BipartiteColoring(2, 2, np.array([[0, 3], [0, 0]]), palette_w=2, palette_w_prime=1)
    part = BipartiteColoring.uncolored(3, 3)
    assert not part.is_complete
    with pytest.raises(ValueError, match="9 uncolored"):
        part.require_complete()


def test_json_roundtrip(tmp_path):
    col = BipartiteColoring(3, 3, np.array([[0, 1, 2], [1, 2, 0], [2, 0, 1]]), 2, 1)
    path = tmp_path / "c.json"
    col.save(path)
    back = BipartiteColoring.load(path)
    assert np.array_equal(back.colors, col.colors)
    assert (back.palette_w, back.palette_w_prime, back.k) == (2, 1, 3)


def test_rainbow_components(rainbow4):
    comps = monochromatic_components(rainbow4)
    assert len(comps) == 16
    assert all(component_bipartition(c) == (1, 1) for c in comps)
    assert rainbow4.color_count == 16


def test_two_color_components():
    # color 0 on a K_{2,2} block and on an isolated edge; color 1 elsewhere
    cols = np.ones((3, 3), dtype=int)
    cols[:2, :2] = 0
    cols[2, 2] = 0
    comps = monochromatic_components(BipartiteColoring(3, 3, cols))
    zero = [c for c in comps if c.color == 0]
    assert sorted(len(c.edges) for c in zero) == [1, 4]
    k22 = next(c for c in zero if len(c.edges) == 4)
    assert k22.sides() == ([0, 1], [0, 1])
    one = [c for c in comps if c.color == 1]
    # (0,2),(1,2) meet at B2 and (2,0),(2,1) at A2, with nothing joining them
    assert sorted(len(c.edges) for c in one) == [2, 2]


@given(arrays(np.int64, (4, 4), elements=st.integers(0, 3)))
def test_components_partition_edges(cols):
    comps = monochromatic_components(BipartiteColoring(4, 3, cols))
    edges = sorted(e for c in comps for e in c.edges)
    assert edges == list(range(16))
    for c in comps:
        assert all(cols.ravel()[e] == c.color for e in c.edges)
        # vertices are exactly the endpoints of the edges
        ends = {BipartiteVertex(Side.A, e // 4) for e in c.edges} | {BipartiteVertex(Side.B, e % 4) for e in c.edges}
        assert ends == set(c.vertices)


@given(arrays(np.int64, (4, 4), elements=st.integers(-1, 2)))
def test_color_adjacency_masks(cols):
    adj_a, adj_b = color_adjacency(cols)
    for c in adj_a:
        for a in range(4):
            for b in range(4):
                assert bool(adj_a[c][a] >> b & 1) == (cols[a, b] == c)
                assert bool(adj_b[c][b] >> a & 1) == (cols[a, b] == c)
    assert UNCOLORED not in adj_a


def test_relabel():
    col = BipartiteColoring(2, 2, np.array([[0, 1], [1, 0]]))
    assert col.relabel({0: 5, 1: 0}).colors.tolist() == [[5, 0], [0, 5]]
