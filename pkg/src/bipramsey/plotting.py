"""Figures for the CLI reports.  Everything renders off-screen to a file."""
from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .bounds import BoundReport  # noqa: E402
from .candidates import DegreeEstimate  # noqa: E402
from .certify import StrippingCertificate  # noqa: E402
from .designs import AuditReport, LinearDesign  # noqa: E402
from .graphs import BipartiteColoring  # noqa: E402

STYLE = {
    "figure.figsize": (6.4, 4.0),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
    # fixed metadata keeps PNG output reproducible across runs
    "svg.hashsalt": "bipramsey",
}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Software": None} if path.suffix.lower() == ".png" else None)
    plt.close(fig)
    return path


def bounds_figure(reports: Sequence[BoundReport], path: str | Path) -> Path:
    """Lower and upper constants against k, with their ratio on a second axis."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ks = [r.k for r in reports]
        ax.plot(ks, [r.lower for r in reports], "o-", label="lower constant")
        ax.plot(ks, [float(r.upper) for r in reports], "s-", label="upper constant")
        ax.set_xlabel("k")
        ax.set_ylabel("r / n")
        ax.set_yscale("log")
        ratios = [(r.k, r.ratio) for r in reports if r.ratio is not None]
        if ratios:
            ax2 = ax.twinx()
            ax2.plot(*zip(*ratios), "k:", label="upper / lower")
            ax2.axhline(1.5, color="grey", lw=0.8)
            ax2.set_ylabel("ratio")
            ax2.grid(False)
            ax2.legend(loc="center right")
        ax.legend(loc="upper right")
        ax.set_title("Bound constants")
        return _save(fig, path)


def construct_figure(coloring: BipartiteColoring, report: dict, coverage_trace: Sequence[float], path: str | Path) -> Path:
    """Greedy coverage over accepted bicliques and the color class size profile."""
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
        if len(coverage_trace):
            ax1.plot(np.arange(1, len(coverage_trace) + 1), coverage_trace)
        ax1.set_xlabel("bicliques accepted")
        ax1.set_ylabel("fraction of edges covered")
        ax1.set_title("Biclique phase")

        sizes = Counter(coloring.colors.ravel().tolist())
        w = coloring.palette_w
        cols = sorted(sizes)
        ax2.bar(range(len(cols)), [sizes[c] for c in cols],
                color=["tab:blue" if c < w else "tab:orange" for c in cols], width=1.0)
        ax2.set_xlabel("color (W then W')")
        ax2.set_ylabel("edges")
        ax2.set_title(f"{report.get('colorsUsed', len(cols))} colors, n = {coloring.n}")
        fig.tight_layout()
        return _save(fig, path)


def audit_figure(design: LinearDesign, report: AuditReport, path: str | Path) -> Path:
    """Histogram of design degrees with the expected degree and the degree band."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        deg = design.degrees
        ax.hist(deg, bins=range(int(deg.min()), int(deg.max()) + 2), align="left", alpha=0.8)
        check = next((c for c in report.checks if c.name.startswith("vertex degrees")), None)
        if check is not None:
            ax.axvline(check.expected, color="k", label="expected")
            if check.asymptotic_window:
                ax.axvspan(*check.asymptotic_window, color="tab:green", alpha=0.15, label="asymptotic window")
        ax.set_xlabel("blocks through a vertex")
        ax.set_ylabel("vertices")
        ax.set_title(f"Design degrees, n = {report.n}, p = {report.probability:.4g}")
        ax.legend()
        return _save(fig, path)


def degrees_figure(estimates: Sequence[DegreeEstimate], path: str | Path) -> Path:
    """Sampled H1 degrees with error bars next to the leading-order formula."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        x = np.arange(len(estimates))
        ax.errorbar(x, [e.estimate for e in estimates], yerr=[e.band for e in estimates], fmt="o", capsize=4, label="estimate")
        ax.plot(x, [e.formula for e in estimates], "k_", markersize=20, label="leading order")
        ax.set_xticks(x, [e.kind for e in estimates])
        ax.set_yscale("symlog")
        ax.set_ylabel("degree")
        ax.legend()
        ax.set_title("H1 vertex degrees")
        return _save(fig, path)


def certificate_figure(cert: StrippingCertificate, path: str | Path) -> Path:
    """Big-side sizes a_{k-1} over F' and the slack of each inequality."""
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
        tops = [p.a_top for p in cert.profiles if p.in_f_prime]
        if tops:
            ax1.hist(tops, bins=range(cert.k, max(tops) + 2), align="left")
        ax1.set_xlabel("a_{k-1}")
        ax1.set_ylabel("components in F'")
        ax1.set_title(f"A = {cert.big_a}, |F'| = {cert.f_prime}")
        names = [i.name.split()[0] for i in cert.inequalities]
        slack = [float(i.lhs) - float(i.rhs) for i in cert.inequalities]
        ax2.barh(range(len(names)), slack, color=["tab:green" if i.holds else "tab:red" for i in cert.inequalities])
        ax2.set_yticks(range(len(names)), names, fontsize=7)
        ax2.set_xscale("symlog")
        ax2.set_xlabel("lhs - rhs")
        fig.tight_layout()
        return _save(fig, path)
