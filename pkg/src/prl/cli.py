"""Command-line interface: ``prl <command> ...``.

Exit codes: 0 when the counterexample (or check) is certified, 1 when a
verification stage fails, 2 on invalid input or parameters.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from prl import __version__
from prl.circles import CONVENTIONS, CORRECTED
from prl.errors import GeometryError, UnsupportedFormat
from prl.export import FORMATS, export_circles
from prl.pipeline import (
    PASS, SWEEP_COLUMNS, CounterexampleParams, InvalidParams, configurations_from_report,
    hyperideal_report, report_json, run_counterexample, sweep,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

log = logging.getLogger("prl")


class _Invalid(Exception):
    pass


def _float_list(text: str) -> list:
    try:
        values = [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _write(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise _Invalid(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise _Invalid(f"{path} is not valid JSON: {exc}")


def _params(args) -> CounterexampleParams:
    kw = dict(a=args.a, h=args.h, t=args.t, convention=args.convention)
    if args.tol is not None:
        kw["tol_equal"] = args.tol
    try:
        return CounterexampleParams(**kw).validate()
    except InvalidParams as exc:
        raise _Invalid(str(exc))


def _summary(report: dict) -> str:
    lines = ["# stage            status"]
    for st in report["stages"]:
        lines.append(f"  {st['name']:<16} {st['status']:<14} {st['message']}")
    lines.append(f"# verdict: {report['verdict']}")
    return "\n".join(lines) + "\n"


def cmd_counterexample(args) -> int:
    report = run_counterexample(_params(args))
    _write(report_json(report), args.out)
    if args.out is not None:
        sys.stderr.write(_summary(report))
    if args.figures:
        from prl import plotting

        figdir = Path(args.figures)
        configs = configurations_from_report(report)
        if configs:
            plotting.plot_packings(configs, figdir / "packings.png", title=f"t = {args.t:g}")
        if isinstance(report.get("gram"), dict):
            plotting.plot_gram_difference(report, figdir / "gram_difference.png")
    return EXIT_OK if report["verdict"] == PASS else EXIT_FAILED


def cmd_hyperideal(args) -> int:
    report = hyperideal_report(_params(args))
    _write(report_json(report), args.out)
    return EXIT_OK if report["verdict"] == PASS else EXIT_FAILED


def cmd_packing_eval(args) -> int:
    from prl.packing import evaluate_packing_document

    doc = _read_json(args.infile)
    if not isinstance(doc, dict):
        raise _Invalid("packing document must be a JSON object")
    try:
        result = evaluate_packing_document(doc)
    except (GeometryError, ValueError, TypeError, KeyError) as exc:
        raise _Invalid(f"malformed packing document: {exc}")
    _write(json.dumps(result, sort_keys=True, indent=2) + "\n", args.out)
    return EXIT_OK if result["valid"] else EXIT_FAILED


def cmd_sweep(args) -> int:
    kw = {"convention": args.convention}
    if args.tol is not None:
        kw["tol_equal"] = args.tol
    rows = sweep(args.a, args.h, args.t, **kw)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
    _write(buf.getvalue(), args.out)
    if args.figure:
        from prl import plotting

        plotting.plot_sweep(rows, args.figure)
    if any(r["verdict"] == "invalid" for r in rows):
        return EXIT_INVALID
    return EXIT_OK if all(r["verdict"] == PASS for r in rows) else EXIT_FAILED


def cmd_export(args) -> int:
    report = _read_json(args.infile)
    if not isinstance(report, dict):
        raise _Invalid("report must be a JSON object")
    try:
        configs = configurations_from_report(report)
    except (KeyError, TypeError, ValueError) as exc:
        raise _Invalid(f"malformed circles section: {exc}")
    if not configs:
        log.error("report has no circle tables (circles stage not evaluated)")
        return EXIT_FAILED
    try:
        text = export_circles(configs, args.format)
    except UnsupportedFormat as exc:
        raise _Invalid(str(exc))
    _write(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from prl import verify

    checks = verify.run_all(seed=args.seed, modules=args.module)
    if args.json:
        sys.stdout.write(json.dumps([c.to_dict() for c in checks], indent=2) + "\n")
    else:
        for c in checks:
            sys.stdout.write(c.line().rstrip() + "\n")
        failed = sum(not c.passed for c in checks)
        sys.stdout.write(f"# {len(checks) - failed}/{len(checks)} checks passed\n")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAILED


def _add_run_flags(p):
    p.add_argument("--a", type=float, default=1.55, help="edge length of the base triangle")
    p.add_argument("--h", type=float, default=0.5, help="half-height of the octahedron")
    p.add_argument("--t", type=float, default=0.01, help="flex parameter")
    p.add_argument("--tol", type=float, default=None, help="equality tolerance (default 1e-10)")
    p.add_argument("--convention", choices=CONVENTIONS, default=CORRECTED)
    p.add_argument("--out", default=None, help="write JSON here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prl", description="Certify a non-rigid inversive-distance packing.")
    parser.add_argument("--version", action="version", version=f"prl {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("counterexample", help="run the full certification chain")
    _add_run_flags(p)
    p.add_argument("--figures", default=None, metavar="DIR", help="also render PNG figures into DIR")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("hyperideal", help="hyperideal edge and diagonal lengths of both polyhedra")
    _add_run_flags(p)
    p.set_defaults(func=cmd_hyperideal)

    p = sub.add_parser("packing-eval", help="evaluate a packing document")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_packing_eval)

    p = sub.add_parser("sweep", help="grid of counterexample runs as CSV")
    p.add_argument("--a", type=_float_list, required=True)
    p.add_argument("--h", type=_float_list, required=True)
    p.add_argument("--t", type=_float_list, required=True)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--convention", choices=CONVENTIONS, default=CORRECTED)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.add_argument("--figure", default=None, metavar="PNG")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export", help="export the circle tables of a report")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("verify", help="run the property suites of every module")
    p.add_argument("--seed", type=int, default=None, help="overrides PRL_SEED")
    p.add_argument("--module", action="append", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except _Invalid as exc:
        log.error("%s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
