"""Command-line front end: ``morrey-embed <subcommand>``.

Exit codes: 0 success (any verdict), 1 selftest or battery failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Optional

from .atlas import GridSpec, run_table
from .classifier import InternalConsistencyError, check_query, classify, gamma
from .dyadic import CoeffSeq, cube_from_arg
from .params import ParamError, Scale, space_from_json
from .selftest import SUITES, run_selftest
from .seqnorm import NormOverflow, NormParams, brute_force_norm, seq_norm
from .suite import load_scenario

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


def _read_json(text: str):
    """Inline JSON, or a path to a JSON file."""
    path = Path(text)
    if not text.lstrip().startswith(("{", "[")) and path.exists():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON: {exc}") from exc


def _default_jobs() -> int:
    raw = os.environ.get("MORREY_EMBED_JOBS", "1")
    try:
        jobs = int(raw)
    except ValueError:
        jobs = 1
    return max(jobs, 1)


def _pair(args) -> tuple:
    src = space_from_json(_read_json(args.src))
    tgt = space_from_json(_read_json(args.tgt))
    check_query(src, tgt)
    return src, tgt


def cmd_classify(args) -> int:
    src, tgt = _pair(args)
    verdict = classify(src, tgt)
    print(_dump(verdict.to_json(with_trace=args.trace)))
    return EXIT_OK


def cmd_gamma(args) -> int:
    src, tgt = _pair(args)
    g = gamma(src, tgt)
    print(_dump({"gamma": str(g), "branch": g.branch.value}))
    return EXIT_OK


def cmd_norm(args) -> int:
    seq = CoeffSeq.from_json(_read_json(args.seq))
    raw = dict(_read_json(args.params))
    if args.scale:
        raw["scale"] = args.scale
    restriction = cube_from_arg(args.restrict) if args.restrict else None
    try:
        np_ = NormParams(raw["s"], raw.get("tau", "0"), raw["p"], raw["q"], int(raw.get("d", seq.d)),
                         restriction, raw.get("scale", "B"))
    except KeyError as exc:
        raise UsageError(f"norm parameters need field {exc}") from exc
    result = brute_force_norm(seq, np_) if args.brute_force else seq_norm(seq, np_)
    print(_dump(result.to_json()))
    return EXIT_OK


def _parse_J(text: Optional[str]) -> Optional[list]:
    if not text:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"--J expects a comma-separated list of integers, got {text!r}") from exc


def write_figure(result, path: str) -> None:
    """Log-log plot of the norm ratio against J (needs the ``plot`` extra)."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise UsageError("--figure needs matplotlib (pip install artifact[plot])") from exc
    rows = result.report.rows
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog([r[0] for r in rows], [r[3] for r in rows], "o-", label="tgt / src")
    ax.set_xlabel("J")
    ax.set_ylabel("norm ratio")
    ax.set_title(f"{result.scenario.name}: alpha = {result.report.alpha:.3g}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def cmd_experiment(args) -> int:
    scenario = load_scenario(args.scenario)
    result = scenario.run(_parse_J(args.J), jobs=args.jobs)
    text = _dump(result.to_json())
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(result.report.csv_rows())
    if args.figure:
        write_figure(result, args.figure)
    return EXIT_OK


def cmd_table(args) -> int:
    grid = GridSpec.from_json(_read_json(args.grid)) if args.grid else GridSpec()
    report = run_table(grid, jobs=args.jobs, battery=not args.no_battery)
    text = report.to_csv()
    summary = "\n".join(report.summary_lines())
    if args.out:
        Path(args.out).write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_selftest(args) -> int:
    only = [x.strip() for x in args.filter.split(",")] if args.filter else None
    if only and any(x not in SUITES for x in only):
        raise UsageError(f"--filter takes a comma-separated subset of {', '.join(SUITES)}")
    ok = run_selftest(only, rule_cases=args.rule_cases, jobs=args.jobs)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morrey-embed",
                                     description="Embeddings of Besov-type and Triebel-Lizorkin-type spaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    jobs = _default_jobs()

    p = sub.add_parser("classify", help="decide an embedding")
    p.add_argument("--src", required=True, help="space descriptor (JSON or file)")
    p.add_argument("--tgt", required=True, help="space descriptor (JSON or file)")
    p.add_argument("--trace", action=argparse.BooleanOptionalAction, default=True,
                   help="include the rule trace (default on)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gamma", help="critical exponent of a pair")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("norm", help="sequence-space quasi-norm")
    p.add_argument("--seq", required=True, help="sequence file (JSON)")
    p.add_argument("--params", required=True, help='{"s":..,"tau":..,"p":..,"q":..}')
    p.add_argument("--scale", choices=[s.value for s in Scale])
    p.add_argument("--restrict", help='cube {"j":..,"m":[..]} with j <= 0')
    p.add_argument("--brute-force", action="store_true")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("experiment", help="norm-ratio growth along a counterexample family")
    p.add_argument("--scenario", required=True, help="shipped scenario name or JSON file")
    p.add_argument("--J", help="comma-separated truncation levels")
    p.add_argument("--out", help="JSON report path (default stdout)")
    p.add_argument("--csv", help="CSV with columns J, src_norm, tgt_norm, ratio")
    p.add_argument("--figure", help="PNG plot of the ratio (optional matplotlib)")
    p.add_argument("--jobs", type=int, default=jobs)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("table", help="sweep a parameter grid and run the consistency battery")
    p.add_argument("--grid", help="grid spec (JSON or file); default grid if omitted")
    p.add_argument("--out", help="CSV path (default stdout, summary on stderr)")
    p.add_argument("--no-battery", action="store_true")
    p.add_argument("--jobs", type=int, default=jobs)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("selftest", help="run the oracle suites")
    p.add_argument("--filter", help=f"comma-separated subset of: {', '.join(SUITES)}")
    p.add_argument("--rule-cases", help="reference rule cases file (default: shipped)")
    p.add_argument("--jobs", type=int, default=jobs)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ParamError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NormOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except InternalConsistencyError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
