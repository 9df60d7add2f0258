import matplotlib
import pytest

from bipramsey.bounds import bound_report
from bipramsey.certify import build_certificate
from bipramsey.cli import main
from bipramsey.matcher import construct
from bipramsey.plotting import bounds_figure, certificate_figure, construct_figure


def test_uses_file_backend():
    assert matplotlib.get_backend().lower() == "agg"


@pytest.mark.parametrize("suffix", ["png", "svg", "pdf"])
def test_bounds_figure_formats(tmp_path, suffix):
    path = bounds_figure([bound_report(k) for k in range(3, 12)], tmp_path / f"b.{suffix}")
    assert path.exists() and path.stat().st_size > 0


def test_construct_and_certificate_figures(tmp_path):
    res = construct(20, 3, seed=2)
    p = construct_figure(res.coloring, res.report, res.state.coverage_trace, tmp_path / "sub" / "c.png")
    assert p.exists()  # parent directory is created on demand
    q = certificate_figure(build_certificate(res.coloring, 3), tmp_path / "cert.png")
    assert q.stat().st_size > 0


def test_audit_and_degree_figures(tmp_path):
    a = tmp_path / "audit.png"
    assert main(["audit-design", "--n", "128", "--k", "3", "--seed", "2", "--out", str(tmp_path / "a.json"), "--figure", str(a)]) == 0
    d = tmp_path / "deg.png"
    assert main(["estimate-degrees", "--n", "40", "--k", "3", "--trials", "2", "--retention", "0.3", "--out", str(tmp_path / "d.csv"), "--figure", str(d)]) == 0
    assert a.stat().st_size > 0 and d.stat().st_size > 0
