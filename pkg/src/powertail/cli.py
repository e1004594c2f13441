"""Command-line interface: ``powertail <command> [options]``.

Exit codes: 0 success, 2 bad input, 3 numerical failure, 4 batch finished
with some failed entries.
"""

from __future__ import annotations

import argparse
import csv
import json
import secrets
import sys
from pathlib import Path

from . import __version__
from .compare import ComparisonRow, classify, compare_alternatives
from .data import SyntheticSpec, export_ccdf, generate, load, save
from .errors import InputError, NumericalError, PowerTailError
from .fitting import DEFAULT_MIN_TAIL, fit_fixed_xmin, fit_xmin
from .gof import DEFAULT_GOF_REPS, gof_test
from .report import (
    DEFAULT_SE_REPS,
    Settings,
    analyze,
    comparison_header,
    comparison_line,
    fit_to_dict,
    gof_to_dict,
    read_manifest,
    render_text,
    report_to_dict,
    row_to_dict,
    run_batch,
    write_summary,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_PARTIAL = 4

CLASSIFY_COLUMNS = {
    "lognormal": ("lognormal_nlr", "lognormal_p"),
    "exponential": ("exponential_nlr", "exponential_p"),
    "stretched_exp": ("stretched_exp_nlr", "stretched_exp_p"),
    "cutoff_power_law": ("cutoff_lr", "cutoff_p"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_input(p, multiple=False):
    if multiple:
        p.add_argument("--input", "-i", nargs="+", required=True, help="data file(s)")
    else:
        p.add_argument("--input", "-i", required=True, help="data file")
    p.add_argument("--format", choices=("plain", "csv"), default="plain")
    p.add_argument("--column", help="CSV column name or 0-based index")
    p.add_argument("--label", help="dataset label (default: file stem)")
    p.add_argument("--year", type=int)


def _add_fit(p):
    p.add_argument("--min-tail", type=int, default=DEFAULT_MIN_TAIL, help="smallest tail allowed for x_min")
    p.add_argument("--xmin", type=float, help="use this fixed lower bound instead of scanning")


def _add_run(p, gof=True, se=True):
    p.add_argument("--seed", type=int, help="random seed (random and echoed if omitted)")
    if gof:
        p.add_argument("--gof-reps", type=int, default=DEFAULT_GOF_REPS)
    if se:
        p.add_argument("--se-reps", type=int, default=DEFAULT_SE_REPS)
        p.add_argument("--hold-xmin", action="store_true", help="hold x_min fixed in SE resamples")
    p.add_argument("--workers", type=int, default=0, help="worker threads (0 = all cores)")
    p.add_argument("--output", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="powertail", description="Power-law tail detection and validation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="full pipeline: fit, SEs, GOF, comparisons, verdict")
    _add_input(p, multiple=True)
    _add_fit(p)
    _add_run(p)
    p.add_argument("--force-compare", action="store_true", help="compare alternatives even if GOF rejects")
    p.add_argument("--strict-alternatives", action="store_true",
                   help="verdict 'none' when a non-nested alternative is significantly better")
    p.add_argument("--no-timing", action="store_true", help="write runtime_ms as null (byte-stable output)")

    p = sub.add_parser("batch", help="analyze every dataset listed in a manifest CSV")
    p.add_argument("--manifest", "-m", required=True, help="CSV with columns path,label,year[,format,column]")
    p.add_argument("--summary", help="write the summary CSV here (default: stdout)")
    p.add_argument("--reports-dir", help="write one JSON report per dataset into this directory")
    _add_fit(p)
    _add_run(p)
    p.add_argument("--force-compare", action="store_true")
    p.add_argument("--strict-alternatives", action="store_true")
    p.add_argument("--no-timing", action="store_true")

    p = sub.add_parser("gof", help="fit and goodness-of-fit test only")
    _add_input(p)
    _add_fit(p)
    _add_run(p, se=False)

    p = sub.add_parser("compare", help="fit and likelihood-ratio comparisons only")
    _add_input(p)
    _add_fit(p)
    p.add_argument("--output", choices=("text", "json"), default="text")

    p = sub.add_parser("generate", help="write a synthetic dataset")
    p.add_argument("--family", default="power_law")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                   help="family parameter, e.g. alpha=2.5 (repeatable)")
    p.add_argument("-n", type=int, required=True, help="number of tail draws")
    p.add_argument("--body", nargs=3, type=float, metavar=("LOW", "HIGH", "COUNT"),
                   help="prepend COUNT uniform(LOW, HIGH) values")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o", help="output file (default: stdout)")

    p = sub.add_parser("ccdf", help="export CCDF plot data as CSV")
    _add_input(p)
    _add_fit(p)
    p.add_argument("--no-fit", action="store_true", help="all data, no fitted overlay")
    p.add_argument("--out", "-o", help="output CSV (default: stdout)")

    p = sub.add_parser("classify-only", help="verdicts from tabulated statistics")
    p.add_argument("--input", "-i", required=True,
                   help="CSV: label,gof_p,lognormal_nlr,lognormal_p,exponential_nlr,exponential_p,"
                        "stretched_exp_nlr,stretched_exp_p,cutoff_lr,cutoff_p ('nc' allowed)")
    p.add_argument("--strict-alternatives", action="store_true")
    p.add_argument("--output", choices=("text", "json"), default="text")
    return parser


def _seed(args):
    return args.seed if args.seed is not None else secrets.randbits(31)


def _settings(args):
    return Settings(
        gof_reps=getattr(args, "gof_reps", DEFAULT_GOF_REPS),
        se_reps=getattr(args, "se_reps", DEFAULT_SE_REPS),
        min_tail=args.min_tail,
        xmin=args.xmin,
        force_compare=getattr(args, "force_compare", False),
        hold_xmin=getattr(args, "hold_xmin", False),
        strict_alternatives=getattr(args, "strict_alternatives", False),
        workers=args.workers,
        timing=not getattr(args, "no_timing", False),
    )


def _load(args, path=None, label=None):
    path = path or args.input
    return load(path, args.format, args.column, label=label or args.label, year=args.year)


def _fit(args, dataset):
    if args.xmin is not None:
        return fit_fixed_xmin(dataset, args.xmin)
    return fit_xmin(dataset, args.min_tail)


def cmd_analyze(args, out):
    settings = _settings(args)
    seed = _seed(args)
    reports = []
    for path in args.input:
        label = args.label if len(args.input) == 1 else None
        dataset = _load(args, path, label)
        try:
            reports.append(analyze(dataset, settings, seed))
        except PowerTailError as exc:
            raise type(exc)(f"{dataset.label}: {exc}") from exc
    if args.output == "json":
        payload = [report_to_dict(r) for r in reports]
        out.write(json.dumps(payload[0] if len(payload) == 1 else payload, indent=2) + "\n")
    else:
        out.write("\n\n".join(render_text(r) for r in reports) + "\n")
    return EXIT_OK


def cmd_batch(args, out):
    entries = read_manifest(args.manifest)
    settings = _settings(args)
    seed = _seed(args)
    result = run_batch(entries, settings, seed)
    if args.reports_dir:
        target = Path(args.reports_dir)
        target.mkdir(parents=True, exist_ok=True)
        for i, report in enumerate(result.reports):
            name = f"{i:03d}_{report.label}.json".replace("/", "_")
            (target / name).write_text(json.dumps(report_to_dict(report), indent=2) + "\n", encoding="utf-8")
    if args.summary:
        with open(args.summary, "w", encoding="utf-8", newline="") as fh:
            write_summary(result.reports, fh)
    else:
        write_summary(result.reports, out)
    if args.output == "json" and not args.reports_dir:
        out.write(json.dumps([report_to_dict(r) for r in result.reports], indent=2) + "\n")
    elif args.output == "text" and args.summary:
        out.write("\n\n".join(render_text(r) for r in result.reports) + "\n")
    for label, exc in result.failures:
        print(f"powertail: {label}: {exc}", file=sys.stderr)
    return EXIT_PARTIAL if result.failures else EXIT_OK


def cmd_gof(args, out):
    dataset = _load(args)
    seed = _seed(args)
    fit = _fit(args, dataset)
    gof = gof_test(dataset, fit, args.gof_reps, seed, args.workers)
    if args.output == "json":
        payload = {"label": dataset.label, "year": dataset.year, "fit": fit_to_dict(fit),
                   "gof": gof_to_dict(gof), "seed": seed}
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write(
            f"{dataset.label}: alpha={fit.alpha_hat:.4f} x_min={fit.x_min_hat:.6g} "
            f"n_tail={fit.n_tail}/{fit.n_total} KS={fit.ks:.4f}\n"
            f"GOF p = {gof.p_value:.3f} ({gof.exceed_count}/{gof.replications}) "
            f"{'reject' if gof.reject else 'not rejected'}\nseed: {seed}\n"
        )
    return EXIT_OK


def cmd_compare(args, out):
    dataset = _load(args)
    fit = _fit(args, dataset)
    rows = compare_alternatives(dataset, fit)
    if args.output == "json":
        payload = {"label": dataset.label, "year": dataset.year, "fit": fit_to_dict(fit),
                   "comparisons": [row_to_dict(r) for r in rows]}
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write("\n".join(comparison_header() + [comparison_line(dataset.label, None, rows, None)]) + "\n")
    return EXIT_OK


def _parse_params(items):
    params = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"--param expects NAME=VALUE, got {item!r}")
        try:
            params[name.strip()] = float(value)
        except ValueError:
            raise InputError(f"--param {name}: not a number: {value!r}") from None
    return params


def cmd_generate(args, out):
    body = None
    if args.body is not None:
        low, high, count = args.body
        body = (low, high, int(count))
    spec = SyntheticSpec(args.family, _parse_params(args.param), args.n, args.seed, body)
    dataset = generate(spec)
    if args.out:
        save(dataset, args.out)
    else:
        for v in dataset.values:
            out.write(f"{v:.17g}\n")
    return EXIT_OK


def cmd_ccdf(args, out):
    dataset = _load(args)
    fit = None if args.no_fit else _fit(args, dataset)
    series = export_ccdf(dataset, fit, args.out)
    if not args.out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["x", "ccdf_empirical"] + (["ccdf_fit"] if series.fit is not None else []))
        for row in series.rows():
            writer.writerow([f"{v:.17g}" for v in row])
    return EXIT_OK


def _cell(row, key, lineno):
    raw = (row.get(key) or "").strip()
    if raw.lower() in ("nc", "", "-"):
        return None
    try:
        return float(raw)
    except ValueError:
        raise InputError(f"line {lineno}: column {key}: not a number: {raw!r}") from None


def read_classify_table(path):
    """Rows of (label, gof_p, [ComparisonRow x4], expected-or-None) from a statistics CSV."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    table = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"gof_p", *[c for pair in CLASSIFY_COLUMNS.values() for c in pair]} - set(reader.fieldnames or [])
        if missing:
            raise InputError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            lineno = reader.line_num
            gof_p = _cell(row, "gof_p", lineno)
            if gof_p is None:
                raise InputError(f"line {lineno}: gof_p is required")
            rows = []
            for family, (stat_key, p_key) in CLASSIFY_COLUMNS.items():
                stat, p = _cell(row, stat_key, lineno), _cell(row, p_key, lineno)
                kind = "LR" if family == "cutoff_power_law" else "NLR"
                if stat is None or p is None:
                    rows.append(ComparisonRow.not_converged(family))
                else:
                    rows.append(ComparisonRow(family, kind, stat, p))
            expected = (row.get("expected") or "").strip() or None
            table.append(((row.get("label") or "").strip(), gof_p, rows, expected))
    if not table:
        raise InputError(f"{path}: no rows")
    return table


def cmd_classify_only(args, out):
    table = read_classify_table(args.input)
    results = []
    for label, gof_p, rows, expected in table:
        verdict = classify(gof_p, rows, strict_alternatives=args.strict_alternatives)
        results.append((label, gof_p, rows, verdict, expected))
    if args.output == "json":
        payload = [
            {"label": label, "verdict": v.value, **({"expected": e, "match": v.value == _norm(e)} if e else {})}
            for label, _, _, v, e in results
        ]
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        lines = comparison_header()
        lines += [comparison_line(label, gof_p, rows, v) for label, gof_p, rows, v, _ in results]
        checked = [(v, e) for _, _, _, v, e in results if e]
        if checked:
            hits = sum(v.value == _norm(e) for v, e in checked)
            lines.append(f"\n{hits}/{len(checked)} verdicts match the expected column")
        out.write("\n".join(lines) + "\n")
    return EXIT_OK


def _norm(label):
    return label.strip().lower().replace("-", "").replace(" ", "_")


COMMANDS = {
    "analyze": cmd_analyze,
    "batch": cmd_batch,
    "gof": cmd_gof,
    "compare": cmd_compare,
    "generate": cmd_generate,
    "ccdf": cmd_ccdf,
    "classify-only": cmd_classify_only,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except InputError as exc:
        print(f"powertail: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ArithmeticError) as exc:
        print(f"powertail: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PowerTailError as exc:
        print(f"powertail: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
