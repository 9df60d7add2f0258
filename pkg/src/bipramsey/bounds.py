"""Closed-form bound constants for r(K_{n,n}, C_{2k}, 3) / n and the h(a) analysis."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .graphs import BipartiteColoring, MonoComponent, component_bipartition, monochromatic_components


def ell(k: int) -> int:
    return (k - 1) * (k - 2)


def _check_k(k: int, minimum: int) -> None:
    if k < minimum:
        raise ValueError(f"k must be at least {minimum}")


def lower_constant(k: int) -> float:
    """(3 - 4l + 4 sqrt(l(l-1))) / (2(k-2)) with l = (k-1)(k-2).

    Evaluated as 3 - 4l/(l + sqrt(l(l-1))), which avoids the cancellation
    between 4l and 4 sqrt(l(l-1)) at large k.
    """
    _check_k(k, 3)
    l = ell(k)
    root = math.sqrt(l * (l - 1))
    # 4 sqrt(l(l-1)) - 4l = -4l / (l + sqrt(l(l-1)))
    return (3 - 4 * l / (l + root)) / (2 * (k - 2))


def lower_constant_radical(k: int) -> float:
    """The same constant in its expanded radical form (k >= 4)."""
    _check_k(k, 3)
    poly = k**4 - 6 * k**3 + 12 * k**2 - 9 * k + 2
    return (4 * math.sqrt(poly) - 4 * k**2 + 12 * k - 5) / (2 * (k - 2))


def lower_constant_error(k: int) -> float:
    """A safe absolute error bound for the float value of :func:`lower_constant`."""
    return 8 * math.ulp(1.0) * max(1.0, abs(lower_constant(k)))


def upper_constant(k: int) -> Fraction:
    _check_k(k, 2)
    return Fraction(3 * k - 2, 2 * (k - 1) * (2 * k - 1))


def lower_constant_k3_special() -> Fraction:
    """7/20: h is decreasing on [0, sqrt(8) - 2) and A <= n^2/2 forces a <= 1/2."""
    return Fraction(7, 20)


def h(a, l):
    """h(a) = 1 + l a^2 / (2 + a) - a; exact for Fraction arguments."""
    if l < 2:
        raise ValueError("l must be at least 2")
    if a < 0:
        raise ValueError("a must be non-negative")
    return 1 + l * a * a / (2 + a) - a


def h_minimizer(l: int | float) -> tuple[float, float]:
    """Closed forms a* = 2(sqrt(l/(l-1)) - 1), h(a*) = 3 - 4l + 4 sqrt(l(l-1))."""
    if l < 2:
        raise ValueError("l must be at least 2")
    root = math.sqrt(l * (l - 1))
    a_star = 2 / (math.sqrt(l - 1) * (math.sqrt(l) + math.sqrt(l - 1)))  # 2(sqrt(l/(l-1)) - 1)
    h_min = 3 - 4 * l / (l + root)
    return a_star, h_min


def golden_section_min(f, lo, hi, tol=mpmath.mpf("1e-25"), dps: int = 50) -> tuple:
    """Golden-section search at ``dps`` digits; returns (argmin, min)."""
    with mpmath.workdps(dps):
        lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
        inv_phi = (mpmath.sqrt(5) - 1) / 2
        c = hi - inv_phi * (hi - lo)
        d = lo + inv_phi * (hi - lo)
        fc, fd = f(c), f(d)
        while hi - lo > tol:
            if fc < fd:
                hi, d, fd = d, c, fc
                c = hi - inv_phi * (hi - lo)
                fc = f(c)
            else:
                lo, c, fc = c, d, fd
                d = lo + inv_phi * (hi - lo)
                fd = f(d)
        x = (lo + hi) / 2
        return x, f(x)


def numeric_h_minimizer(l: int, lo: float = 0.0, hi: float = 4.0) -> tuple[float, float]:
    a, val = golden_section_min(lambda a: 1 + l * a * a / (2 + a) - a, lo, hi)
    return float(a), float(val)


def ratio(k: int) -> float:
    _check_k(k, 4)
    return float(upper_constant(k)) / lower_constant(k)


@dataclass(frozen=True)
class BoundReport:
    k: int
    lower: float
    upper: Fraction
    lower_k3_special: Fraction | None
    ratio: float | None
    ell: int
    a_star: float

    def csv_row(self) -> list:
        return [self.k, repr(self.lower), float(self.upper), "" if self.ratio is None else repr(self.ratio)]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "lowerConstant": self.lower,
            "upperConstant": str(self.upper),
            "lowerConstantK3Special": None if self.lower_k3_special is None else str(self.lower_k3_special),
            "ratio": self.ratio,
            "ell": self.ell,
            "aStar": self.a_star,
        }


def bound_report(k: int) -> BoundReport:
    _check_k(k, 3)
    special = lower_constant_k3_special() if k == 3 else None
    r = ratio(k) if k >= 4 else float(upper_constant(k)) / lower_constant(k)
    return BoundReport(k, lower_constant(k), upper_constant(k), special, r, ell(k), h_minimizer(ell(k))[0])


# ---------------------------------------------------------------------------
# Structural bound for biclique-component colorings
# ---------------------------------------------------------------------------

@dataclass
class StructuralEvaluation:
    n: int
    k: int
    g: int
    families: int  # |F|
    big_total: int  # B = sum of big sides
    checks: dict[str, tuple[float, float, bool]]  # name -> (lhs, rhs, holds)
    implied_lower: float

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.checks.values())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "g": self.g,
            "F": self.families,
            "B": self.big_total,
            "impliedLowerBound": self.implied_lower,
            "passed": self.passed,
            "checks": {name: {"lhs": l, "rhs": r, "holds": ok} for name, (l, r, ok) in self.checks.items()},
        }


@dataclass(frozen=True)
class NotApplicable:
    component: MonoComponent
    reason: str

    def to_json(self) -> dict:
        a, b = self.component.sides()
        return {"notApplicable": True, "reason": self.reason, "color": self.component.color, "sideA": a, "sideB": b}


def _is_complete_bipartite(comp: MonoComponent) -> bool:
    sa, sb = component_bipartition(comp)
    return len(comp.edges) == sa * sb


def structural_bound(coloring: BipartiteColoring, k: int, slack: float = 0.0) -> StructuralEvaluation | NotApplicable:
    """Evaluate the counting chain for colorings whose components are all K_{k-1,b}, b >= k.

    ``slack`` is the fraction of the n^2 edges that may lie in other
    components; those edges are ignored in the counts.
    """
    _check_k(k, 3)
    n = coloring.n
    comps = monochromatic_components(coloring)
    good: list[int] = []
    stray_edges = 0
    for comp in comps:
        sa, sb = component_bipartition(comp)
        small, big = min(sa, sb), max(sa, sb)
        ok = _is_complete_bipartite(comp) and small == k - 1 and big >= k
        if ok:
            good.append(big)
            continue
        stray_edges += len(comp.edges)
        if stray_edges > slack * n * n:
            reason = f"component is K_{{{sa},{sb}}}" if _is_complete_bipartite(comp) else "component is not complete bipartite"
            return NotApplicable(comp, f"{reason}, not K_{{{k - 1},b}} with b >= {k}")
    g = coloring.color_count
    fam = len(good)
    big_total = sum(good)
    covered = n * n - stray_edges
    checks: dict[str, tuple[float, float, bool]] = {}
    checks["edges n^2 = (k-1)B"] = (covered, (k - 1) * big_total, covered == (k - 1) * big_total)
    lhs = 2 * n * g
    rhs = (k - 1) * fam + big_total
    checks["vertices 2ng >= (k-1)|F| + B"] = (lhs, rhs, lhs >= rhs)
    pair_lhs = 2 * math.comb(n, 2)
    pair_mid = sum(math.comb(b, 2) for b in good)
    checks["pairs 2C(n,2) >= sum C(b_j,2)"] = (pair_lhs, pair_mid, pair_lhs >= pair_mid)
    conv = 0.5 * big_total * (big_total / fam - 1) if fam else 0.0
    checks["convexity sum C(b_j,2) >= B(B/|F|-1)/2"] = (pair_mid, conv, pair_mid >= conv - 1e-9)
    f_lb = big_total**2 / (big_total + 2 * n * n) if big_total else 0.0
    checks["|F| >= B^2/(B + 2n^2)"] = (fam, f_lb, fam >= f_lb - 1e-9)
    f_closed = n * n / ((k - 1) * (2 * k - 1))
    checks["|F| >= n^2/((k-1)(2k-1))"] = (fam, f_closed, fam >= f_closed - 1e-9)
    implied = float(upper_constant(k)) * n
    checks["g >= (3k-2)n/(2(k-1)(2k-1))"] = (g, implied, g >= implied - 1e-9)
    return StructuralEvaluation(n, k, g, fam, big_total, checks, implied)


def profile_summary(coloring: BipartiteColoring) -> Counter:
    """Multiset of (small side, big side) shapes of complete-bipartite components."""
    out: Counter = Counter()
    for comp in monochromatic_components(coloring):
        if _is_complete_bipartite(comp):
            sa, sb = component_bipartition(comp)
            out[(min(sa, sb), max(sa, sb))] += 1
    return out
