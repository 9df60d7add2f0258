"""Command line entry point: ``bipramsey <command> ...``.

Exit codes: 0 success, 2 verification violation, 3 budget exceeded,
4 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_BUDGET = 3
EXIT_CONFIG = 4

BOUNDS_HEADER = ["k", "lower", "upper", "ratio"]
DEGREES_HEADER = ["vertexKind", "estimate", "band", "formulaValue"]
CONSTRUCT_HEADER = ["n", "k", "seed", "colorsUsed", "colorsUsedW", "colorsUsedWPrime", "colorDensity", "coverageFraction", "valid"]

log = logging.getLogger("bipramsey")


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default, which we reserve for violations
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def dump_json(obj, path: str | Path | None) -> None:
    """Write canonical JSON (sorted keys, fixed indent) to ``path`` or stdout."""
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def write_meta(path: str | Path, **fields) -> None:
    """Timing and other run-dependent values live beside the artifact, never inside it."""
    meta = Path(str(path) + ".meta.json")
    meta.write_text(json.dumps({"version": __version__, **fields}, indent=2, sort_keys=True) + "\n")


def write_csv(header: list[str], rows: list[list], path: str | Path | None) -> None:
    fh = sys.stdout if path is None or str(path) == "-" else open(path, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()


def _positive(name: str, value, minimum=1) -> None:
    if value is not None and value < minimum:
        raise ConfigError(f"--{name} must be at least {minimum}")


def _check_delta(delta: float) -> None:
    if not 0 < delta < 0.25:
        raise ConfigError("--delta must lie in (0, 1/4)")


def _check_retention(p: float | None) -> None:
    if p is not None and not 0 < p <= 1:
        raise ConfigError("--retention must lie in (0, 1]")


def _load_coloring(path: str):
    from .graphs import BipartiteColoring

    try:
        return BipartiteColoring.load(path)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read coloring {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_construct(args) -> int:
    from .matcher import construct
    from .verifier import verify_pairwise

    _positive("n", args.n, 2)
    _positive("k", args.k, 3)
    _check_delta(args.delta)
    _check_retention(args.retention)
    _positive("size-w", args.size_w)
    _positive("size-w-prime", args.size_w_prime)
    res = construct(
        args.n, args.k, args.seed, delta=args.delta, retention=args.retention,
        size_w=args.size_w, size_w_prime=args.size_w_prime,
    )
    witness = verify_pairwise(res.coloring, args.k)
    report = dict(res.report, valid=witness is None)
    if witness is not None:
        report["witness"] = witness.to_json()
    dump_json(res.coloring.to_json(), args.out)
    if args.out not in (None, "-"):
        write_meta(args.out, wallTimeSeconds=res.wall_time)
    if args.report:
        dump_json(report, args.report)
        write_meta(args.report, wallTimeSeconds=res.wall_time)
    if args.csv:
        write_csv(CONSTRUCT_HEADER, [[report[h] for h in CONSTRUCT_HEADER]], args.csv)
    if args.figure:
        from .plotting import construct_figure

        construct_figure(res.coloring, report, res.state.coverage_trace, args.figure)
    return EXIT_OK if witness is None else EXIT_VIOLATION


def cmd_verify(args) -> int:
    from .verifier import monochromatic_path_diagnostic, sample_verify, verify_exhaustive, verify_pairwise

    col = _load_coloring(args.coloring)
    k = args.k if args.k is not None else col.k
    _positive("k", k, 2)
    if not col.is_complete:
        raise ConfigError("coloring has uncolored edges")
    out: dict = {"n": col.n, "k": k, "mode": args.mode, "colorsUsed": col.color_count}
    if args.mode == "sample":
        _positive("trials", args.trials)
        frac = sample_verify(col, k, args.trials, args.seed)
        out.update(trials=args.trials, seed=args.seed, violatingFraction=frac, valid=frac == 0.0)
        dump_json(out, args.out)
        return EXIT_OK if frac == 0.0 else EXIT_VIOLATION
    witness = verify_exhaustive(col, k) if args.mode == "exhaustive" else verify_pairwise(col, k)
    out["valid"] = witness is None
    out["witness"] = None if witness is None else witness.to_json()
    if witness is not None:
        path = monochromatic_path_diagnostic(col, k)
        out["monochromaticPath"] = None if path is None else path.to_json()
    dump_json(out, args.out)
    return EXIT_OK if witness is None else EXIT_VIOLATION


def cmd_certify(args) -> int:
    from .certify import StrippingRefutation, build_certificate

    col = _load_coloring(args.coloring)
    k = args.k if args.k is not None else col.k
    _positive("k", k, 3)
    if not col.is_complete:
        raise ConfigError("coloring has uncolored edges")
    try:
        cert = build_certificate(col, k)
    except StrippingRefutation as exc:
        comp = exc.component
        a, b = comp.sides()
        dump_json({"refuted": True, "reason": str(exc), "kind": type(exc).__name__,
                   "color": comp.color, "sideA": a, "sideB": b}, args.out)
        return EXIT_VIOLATION
    dump_json(cert.to_json(), args.out)
    if args.figure:
        from .plotting import certificate_figure

        certificate_figure(cert, args.figure)
    if cert.pair_sharing is not None:
        return EXIT_VIOLATION
    if not cert.passed:
        log.warning("inequalities failed: %s", ", ".join(cert.failures()))
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_bounds(args) -> int:
    from .bounds import bound_report

    if args.table:
        lo, hi = args.table
        if lo < 3 or hi < lo:
            raise ConfigError("--table needs 3 <= kmin <= kmax")
        ks = range(lo, hi + 1)
    else:
        _positive("k", args.k, 3)
        ks = [args.k]
    reports = [bound_report(k) for k in ks]
    if args.json:
        dump_json([r.to_json() for r in reports], args.json)
    write_csv(BOUNDS_HEADER, [r.csv_row() for r in reports], args.out)
    if args.figure:
        from .plotting import bounds_figure

        bounds_figure(reports, args.figure)
    return EXIT_OK


def cmd_search(args) -> int:
    from .exact import SearchInstance, search_min_colors

    try:
        inst = SearchInstance(args.n, args.k, args.q, args.gmax, budget=args.budget)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    t0 = time.perf_counter()
    res = search_min_colors(inst)
    dump_json(res.to_json(), args.out)
    if args.out not in (None, "-"):
        write_meta(args.out, wallTimeSeconds=time.perf_counter() - t0)
    return EXIT_OK


def _designs(n: int, k: int, delta: float, seed: int, retention: float | None):
    from .designs import DesignParams, build_base_design, subsample
    from .graphs import Side

    ss = np.random.SeedSequence(seed)
    out = []
    for side, child in zip((Side.A, Side.B), ss.spawn(2)):
        s = int(child.generate_state(1)[0])
        base = build_base_design(n, k, side, seed=s)
        params = DesignParams(n, k, delta, s, retention)
        out.append((base, params, subsample(base, params)))
    return out


def cmd_audit_design(args) -> int:
    from .designs import DesignParams, audit_design, build_base_design, subsample
    from .graphs import Side

    _positive("n", args.n, 3)
    _positive("k", args.k, 3)
    _check_delta(args.delta)
    _check_retention(args.retention)
    if args.base_only:
        dump_json(build_base_design(args.n, args.k, Side.A, seed=args.seed).to_json(), args.out)
        return EXIT_OK
    params = DesignParams(args.n, args.k, args.delta, args.seed, args.retention)
    base = build_base_design(args.n, args.k, Side.A, seed=args.seed)
    design = subsample(base, params)
    report = audit_design(design, params, base, sample_pairs=args.sample_pairs)
    if args.design_out:
        dump_json(design.to_json(), args.design_out)
    dump_json(report.to_json(), args.out)
    if args.figure:
        from .plotting import audit_figure

        audit_figure(design, report, args.figure)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_estimate_degrees(args) -> int:
    from .candidates import MatchingParams, estimate_h1_degree, palette_sizes
    from .designs import uncovered_pairs

    _positive("n", args.n, 3)
    _positive("k", args.k, 3)
    _check_delta(args.delta)
    _check_retention(args.retention)
    if args.trials < 0:
        raise ConfigError("--trials must be non-negative")
    (_, _, da), (_, _, db) = _designs(args.n, args.k, args.delta, args.seed, args.retention)
    ua, ub = uncovered_pairs(da), uncovered_pairs(db)
    pal = palette_sizes(args.n, args.k, args.delta)
    mp = MatchingParams(args.n, args.k, args.delta, args.epsilon, args.kappa)
    ests = []
    for i, (kind, partner) in enumerate((("e", 0), ("vc", None), ("pair", None))):
        if kind == "pair":
            row = np.flatnonzero(ua.mask[0])
            partner = int(row[0]) if len(row) else 1
        ests.append(estimate_h1_degree(kind, da, db, ua, ub, pal, mp, args.trials, args.seed + i, vertex=0, partner=partner))
    rows = [[r[h] for h in DEGREES_HEADER] for r in (e.to_row() for e in ests)]
    write_csv(DEGREES_HEADER, rows, args.out)
    if args.figure:
        from .plotting import degrees_figure

        degrees_figure(ests, args.figure)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bipramsey", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("construct", help="build a coloring with the biclique matching pipeline")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--delta", type=float, default=0.2)
    c.add_argument("--retention", type=float, help="design retention probability (default: finite-scale rule)")
    c.add_argument("--size-w", type=int, help="override the structured palette size")
    c.add_argument("--size-w-prime", type=int, help="override the initial leftover palette size")
    c.add_argument("--out", help="coloring JSON (default stdout)")
    c.add_argument("--report", help="report JSON")
    c.add_argument("--csv", help="one-row CSV summary")
    c.add_argument("--figure", help="coverage and class-size figure (PNG/PDF/SVG)")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="check every C_2k has at least three colors")
    v.add_argument("--coloring", required=True)
    v.add_argument("--k", type=int)
    v.add_argument("--mode", choices=["exhaustive", "pairwise", "sample"], default="pairwise")
    v.add_argument("--trials", type=int, default=10000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    ce = sub.add_parser("certify", help="stripping certificate and inequality chain")
    ce.add_argument("--coloring", required=True)
    ce.add_argument("--k", type=int)
    ce.add_argument("--out")
    ce.add_argument("--figure")
    ce.set_defaults(func=cmd_certify)

    b = sub.add_parser("bounds", help="closed-form bound constants as CSV")
    b.add_argument("--k", type=int, default=3)
    b.add_argument("--table", type=int, nargs=2, metavar=("KMIN", "KMAX"))
    b.add_argument("--out", help="CSV path (default stdout)")
    b.add_argument("--json", help="also write the full reports as JSON")
    b.add_argument("--figure")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("search", help="exact minimum color count for tiny n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--q", type=int, default=3)
    s.add_argument("--gmax", type=int)
    s.add_argument("--budget", type=int, default=10**7, help="backtracking nodes per color count")
    s.add_argument("--out")
    s.set_defaults(func=cmd_search)

    a = sub.add_parser("audit-design", help="subsample a linear design and audit its statistics")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--delta", type=float, default=0.2)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--retention", type=float)
    a.add_argument("--sample-pairs", type=int, default=200)
    a.add_argument("--base-only", action="store_true", help="emit the base design JSON and stop")
    a.add_argument("--design-out", help="write the subsampled design JSON")
    a.add_argument("--out")
    a.add_argument("--figure")
    a.set_defaults(func=cmd_audit_design)

    e = sub.add_parser("estimate-degrees", help="H1 vertex degrees against the leading-order formula")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--delta", type=float, default=0.2)
    e.add_argument("--epsilon", type=float, default=0.05)
    e.add_argument("--kappa", type=float, default=1.0)
    e.add_argument("--trials", type=int, default=2000, help="Monte Carlo trials (0 = exhaustive)")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--retention", type=float)
    e.add_argument("--out", help="CSV path (default stdout)")
    e.add_argument("--figure")
    e.set_defaults(func=cmd_estimate_degrees)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    from .verifier import BudgetExceeded

    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"bipramsey: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"bipramsey: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:  # library precondition failures
        print(f"bipramsey: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
