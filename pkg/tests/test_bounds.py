import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bipramsey.bounds import (
    NotApplicable,
    bound_report,
    ell,
    h,
    h_minimizer,
    lower_constant,
    lower_constant_error,
    lower_constant_k3_special,
    lower_constant_radical,
    numeric_h_minimizer,
    profile_summary,
    ratio,
    structural_bound,
    upper_constant,
)
from bipramsey.graphs import BipartiteColoring


def test_k3_constants():
    assert lower_constant(3) == pytest.approx(2 * math.sqrt(2) - 2.5, abs=1e-12)
    assert lower_constant_k3_special() == Fraction(7, 20)
    assert upper_constant(3) == Fraction(7, 20)


def test_k4_constants():
    assert upper_constant(4) == Fraction(5, 21)
    assert lower_constant(4) == pytest.approx(0.2272, abs=5e-5)
    assert 0.227 <= lower_constant(4) < float(upper_constant(4)) <= 0.239


def test_ell_expansion_identity():
    for k in range(3, 51):
        l = ell(k)
        assert l * (l - 1) == k**4 - 6 * k**3 + 12 * k**2 - 9 * k + 2


@pytest.mark.parametrize("k", [4, 5, 10, 57, 200])
def test_radical_form_matches(k):
    assert lower_constant_radical(k) == pytest.approx(lower_constant(k), abs=1e-12)


def test_error_bound_covers_high_precision_value():
    import mpmath

    with mpmath.workdps(60):
        for k in (3, 4, 30, 1000, 10**6):
            l = mpmath.mpf(ell(k))
            exact = (3 - 4 * l + 4 * mpmath.sqrt(l * (l - 1))) / (2 * (k - 2))
            assert abs(lower_constant(k) - exact) <= lower_constant_error(k)


def test_asymptotics():
    assert ratio(10**4) == pytest.approx(1.5, abs=1e-2)
    k = 10**6
    assert k * lower_constant(k) == pytest.approx(0.5, abs=1e-3)
    assert k * float(upper_constant(k)) == pytest.approx(0.75, abs=1e-3)


def test_ratio_requires_k4():
    with pytest.raises(ValueError):
        ratio(3)
    with pytest.raises(ValueError):
        lower_constant(2)


def test_h_exact_values():
    assert h(Fraction(1, 2), 2) == Fraction(7, 10)
    assert h(Fraction(0), 7) == 1
    with pytest.raises(ValueError):
        h(Fraction(1, 2), 1)


@given(st.integers(min_value=2, max_value=500))
@settings(max_examples=40, deadline=None)
def test_h_minimizer_matches_numeric(l):
    a_star, h_min = h_minimizer(l)
    a_num, h_num = numeric_h_minimizer(l)
    assert a_star == pytest.approx(a_num, abs=1e-9)
    assert h_min == pytest.approx(h_num, abs=1e-9)
    assert h_min == pytest.approx(float(h(Fraction(a_star), l)), abs=1e-12)


@given(st.integers(min_value=2, max_value=200), st.fractions(min_value=0, max_value=4))
@settings(max_examples=100, deadline=None)
def test_h_never_below_minimum(l, a):
    assert float(h(a, l)) >= h_minimizer(l)[1] - 1e-12


def test_h_decreasing_before_minimizer_k3():
    # the 7/20 refinement relies on h falling on [0, 1/2] when l = 2
    xs = [Fraction(i, 100) for i in range(51)]
    vals = [h(x, 2) for x in xs]
    assert all(u > v for u, v in zip(vals, vals[1:]))
    assert h_minimizer(2)[0] > 0.5


@given(st.integers(min_value=4, max_value=2000))
def test_upper_above_lower(k):
    assert float(upper_constant(k)) > lower_constant(k) > 0


def test_bound_report_rows():
    r = bound_report(3)
    assert r.csv_row()[:3] == [3, repr(lower_constant(3)), 0.35]
    assert r.lower_k3_special == Fraction(7, 20)
    assert bound_report(5).lower_k3_special is None
    assert r.to_json()["upperConstant"] == "7/20"


def _biclique_coloring(n, blocks):
    cols = np.full((n, n), -1)
    for c, (ys, zs) in enumerate(blocks):
        for a in ys:
            for b in zs:
                cols[a, b] = c
    return cols


def test_structural_rejects_non_biclique():
    col = BipartiteColoring(3, 3, np.arange(9).reshape(3, 3))
    out = structural_bound(col, 3)
    assert isinstance(out, NotApplicable)
    assert "K_{2,b}" in out.reason


def test_structural_single_biclique_family():
    # K_{2,4} blocks tiling K_{4,4}: rows {0,1},{2,3} against all columns, two colors
    cols = _biclique_coloring(4, [((0, 1), (0, 1, 2, 3)), ((2, 3), (0, 1, 2, 3))])
    col = BipartiteColoring(4, 3, cols)
    ev = structural_bound(col, 3)
    assert not isinstance(ev, NotApplicable)
    assert ev.families == 2 and ev.big_total == 8
    assert ev.checks["edges n^2 = (k-1)B"][2]
    # the counting chain is necessary, not sufficient: it holds (with equality
    # in the pair count) although the two blocks share B-pairs
    assert ev.checks["pairs 2C(n,2) >= sum C(b_j,2)"][:2] == (12, 12)
    assert ev.passed
    assert profile_summary(col) == {(2, 4): 2}
