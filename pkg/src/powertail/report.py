"""End-to-end analysis of one dataset and its JSON / text reports."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .compare import ComparisonRow, Verdict, classify, compare_alternatives
from .data import Dataset, load, summary_stats
from .errors import InputError, PowerTailError
from .fitting import (
    DEFAULT_MIN_TAIL,
    PowerLawFit,
    bootstrap_se,
    fit_fixed_xmin,
    fit_xmin,
    with_standard_errors,
)
from .gof import DEFAULT_GOF_REPS, GOF_THRESHOLD, GofResult, gof_test

__all__ = ["Settings", "AnalysisReport", "analyze", "report_to_dict", "report_to_json", "render_text"]

DEFAULT_SE_REPS = 10_000

ALT_LABELS = {
    "lognormal": "Log-normal",
    "exponential": "Exponential",
    "stretched_exp": "Stretched exp.",
    "cutoff_power_law": "PL with cut-off",
}


@dataclass(frozen=True)
class Settings:
    gof_reps: int = DEFAULT_GOF_REPS
    se_reps: int = DEFAULT_SE_REPS
    min_tail: int = DEFAULT_MIN_TAIL
    xmin: float | None = None
    threshold: float = GOF_THRESHOLD
    force_compare: bool = False
    hold_xmin: bool = False
    strict_alternatives: bool = False
    # resource knobs: never change results, so not echoed in reports
    workers: int | None = field(default=1, compare=False)
    timing: bool = field(default=True, compare=False)

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("workers")
        out.pop("timing")
        return out


@dataclass(frozen=True)
class AnalysisReport:
    label: str
    year: int | None
    fit: PowerLawFit
    gof: GofResult | None
    comparisons: list[ComparisonRow]
    verdict: Verdict | None
    seed: int
    settings: Settings
    runtime_ms: int | None = None
    n_se_dropped: int = 0
    summary: dict = field(default_factory=dict)


def analyze(dataset: Dataset, settings: Settings, seed: int) -> AnalysisReport:
    """Fit, bootstrap standard errors, GOF test, comparisons and verdict.

    Alternatives are only compared when the GOF test does not reject the power
    law, unless ``settings.force_compare`` is set.
    """
    start = time.perf_counter()
    if settings.xmin is not None:
        fit = fit_fixed_xmin(dataset, settings.xmin)
    else:
        fit = fit_xmin(dataset, settings.min_tail)
    hold = fit.x_min_hat if (fit.xmin_fixed or settings.hold_xmin) else None
    se = bootstrap_se(dataset, settings.se_reps, seed, fit.min_tail, hold, settings.workers)
    fit = with_standard_errors(fit, se)
    gof = gof_test(dataset, fit, settings.gof_reps, seed, settings.workers, settings.threshold)

    rows: list[ComparisonRow] = []
    if not gof.reject or settings.force_compare:
        rows = compare_alternatives(dataset, fit)
    verdict = classify(gof, rows, settings.threshold, settings.strict_alternatives)
    runtime = int(round((time.perf_counter() - start) * 1000)) if settings.timing else None
    return AnalysisReport(
        label=dataset.label,
        year=dataset.year,
        fit=fit,
        gof=gof,
        comparisons=rows,
        verdict=verdict,
        seed=int(seed),
        settings=settings,
        runtime_ms=runtime,
        n_se_dropped=se.dropped,
        summary=summary_stats(dataset),
    )


def _num(value):
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def fit_to_dict(fit: PowerLawFit) -> dict:
    return {
        "alpha": _num(fit.alpha_hat),
        "se_alpha": _num(fit.se_alpha),
        "x_min": _num(fit.x_min_hat),
        "se_x_min": _num(fit.se_x_min),
        "n_tail": fit.n_tail,
        "n_total": fit.n_total,
        "ks": _num(fit.ks),
    }


def gof_to_dict(gof: GofResult | None) -> dict | None:
    if gof is None:
        return None
    return {"p": gof.p_value, "reps": gof.replications, "ks": _num(gof.ks_observed)}


def row_to_dict(row: ComparisonRow) -> dict:
    return {
        "alt": row.alternative,
        "kind": row.statistic_kind,
        "stat": _num(row.statistic),
        "p": _num(row.p_value),
        "nc": row.nc,
    }


def report_to_dict(report: AnalysisReport) -> dict:
    return {
        "label": report.label,
        "year": report.year,
        "fit": fit_to_dict(report.fit),
        "gof": gof_to_dict(report.gof),
        "comparisons": [row_to_dict(r) for r in report.comparisons],
        "verdict": report.verdict.value if report.verdict is not None else None,
        "seed": report.seed,
        "settings": report.settings.echo(),
        "runtime_ms": report.runtime_ms,
    }


def report_to_json(report: AnalysisReport) -> str:
    return json.dumps(report_to_dict(report), indent=2)


def _fmt(value, width=8):
    return f"{value:{width}.3f}" if value is not None else f"{'':{width}}"


def comparison_header() -> list[str]:
    top = f"{'Data set':<16}{'Power law':>10}"
    sub = f"{'':<16}{'p':>10}"
    for family, label in ALT_LABELS.items():
        top += f"  {label:^17}"
        kind = "LR" if family == "cutoff_power_law" else "NLR"
        sub += f"  {kind:>8} {'p':>8}"
    top += "  Support for power law"
    return [top, sub]


def comparison_line(label: str, gof_p: float | None, rows: list[ComparisonRow], verdict: Verdict | None) -> str:
    line = f"{label:<16.16}{_fmt(gof_p, 10)}"
    by_alt = {r.alternative: r for r in rows}
    for family in ALT_LABELS:
        row = by_alt.get(family)
        if row is None:
            line += f"  {'':>8} {'':>8}"
        elif row.nc:
            line += f"  {'nc':>8} {'-':>8}"
        else:
            line += f"  {row.statistic:8.3f} {row.p_value:8.3f}"
    line += f"  {verdict.display if verdict is not None else ''}"
    return line


def render_text(report: AnalysisReport) -> str:
    fit = report.fit
    title = report.label + (f" ({report.year})" if report.year is not None else "")
    stats = report.summary
    lines = [title, "=" * len(title)]
    if stats:
        lines.append(
            f"n={stats['n']}  min={stats['min']:.6g}  median={stats['median']:.6g}  "
            f"mean={stats['mean']:.6g}  max={stats['max']:.6g}"
        )
    se_a = f" ± {fit.se_alpha:.3f}" if fit.se_alpha is not None else ""
    se_x = f" ± {fit.se_x_min:.6g}" if fit.se_x_min is not None else ""
    lines.append(f"alpha   = {fit.alpha_hat:.4f}{se_a}")
    lines.append(f"x_min   = {fit.x_min_hat:.6g}{se_x}{'  (fixed)' if fit.xmin_fixed else ''}")
    lines.append(f"tail    = {fit.n_tail} of {fit.n_total} ({100 * fit.tail_fraction:.0f}%)")
    lines.append(f"KS      = {fit.ks:.4f}")
    if report.n_se_dropped:
        lines.append(f"note: {report.n_se_dropped} SE replicates dropped")
    if report.gof is not None:
        g = report.gof
        lines.append(f"GOF p   = {g.p_value:.3f} ({g.exceed_count}/{g.replications} exceed)")
        if g.dropped:
            lines.append(f"note: {g.dropped} GOF replicates dropped")
    lines.append("")
    if report.comparisons:
        lines.extend(comparison_header())
        gof_p = report.gof.p_value if report.gof is not None else None
        lines.append(comparison_line(title, gof_p, report.comparisons, report.verdict))
    elif report.verdict is Verdict.NONE:
        lines.append("power law rejected by the goodness-of-fit test; alternatives not compared")
    lines.append("")
    lines.append(f"verdict: {report.verdict.display if report.verdict is not None else '-'}")
    lines.append(f"seed: {report.seed}")
    if report.runtime_ms is not None:
        lines.append(f"runtime: {report.runtime_ms} ms")
    return "\n".join(lines)


SUMMARY_COLUMNS = [
    "label", "year", "alpha_hat", "se_alpha", "ci95_lo", "ci95_hi",
    "x_min_hat", "n_tail", "tail_fraction", "gof_p", "verdict",
]


def summary_row(report: AnalysisReport) -> dict:
    """One row of the per-dataset summary table (alpha with a normal 95% interval)."""
    fit = report.fit
    se = fit.se_alpha if fit.se_alpha is not None else math.nan
    return {
        "label": report.label,
        "year": report.year,
        "alpha_hat": fit.alpha_hat,
        "se_alpha": se,
        "ci95_lo": fit.alpha_hat - 1.96 * se,
        "ci95_hi": fit.alpha_hat + 1.96 * se,
        "x_min_hat": fit.x_min_hat,
        "n_tail": fit.n_tail,
        "tail_fraction": fit.tail_fraction,
        "gof_p": report.gof.p_value if report.gof is not None else None,
        "verdict": report.verdict.value if report.verdict is not None else None,
    }


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: str
    year: int | None = None
    fmt: str = "plain"
    column: str | None = None


def read_manifest(path) -> list[ManifestEntry]:
    """CSV manifest with columns ``path,label,year`` and optional ``format,column``.

    Relative paths are resolved against the manifest's directory.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such manifest")
    entries = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "path" not in reader.fieldnames:
            raise InputError(f"{path}: manifest needs a header with a 'path' column")
        for row in reader:
            raw = (row.get("path") or "").strip()
            if not raw:
                continue
            file_path = Path(raw)
            if not file_path.is_absolute():
                file_path = path.parent / file_path
            year = (row.get("year") or "").strip()
            try:
                year_value = int(year) if year else None
            except ValueError:
                raise InputError(f"{path}: line {reader.line_num}: bad year {year!r}") from None
            entries.append(ManifestEntry(
                path=str(file_path),
                label=(row.get("label") or "").strip() or file_path.stem,
                year=year_value,
                fmt=(row.get("format") or "").strip() or "plain",
                column=(row.get("column") or "").strip() or None,
            ))
    if not entries:
        raise InputError(f"{path}: manifest lists no datasets")
    return entries


@dataclass
class BatchResult:
    reports: list[AnalysisReport]
    failures: list[tuple[str, Exception]]


def run_batch(entries: list[ManifestEntry], settings: Settings, seed: int) -> BatchResult:
    """Analyse every manifest entry; failures are collected and the batch continues."""
    result = BatchResult([], [])
    for entry in entries:
        try:
            dataset = load(entry.path, entry.fmt, entry.column, label=entry.label, year=entry.year)
            result.reports.append(analyze(dataset, settings, seed))
        except PowerTailError as exc:
            result.failures.append((entry.label, exc))
    return result


def write_summary(reports: list[AnalysisReport], fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        row = summary_row(report)
        writer.writerow({k: (f"{v:.6g}" if isinstance(v, float) else ("" if v is None else v)) for k, v in row.items()})
