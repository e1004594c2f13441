"""Dataset ingestion, synthetic data and CCDF export."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError
from .models import PowerLaw, make_model

__all__ = [
    "Dataset",
    "CcdfSeries",
    "SyntheticSpec",
    "load",
    "save",
    "generate",
    "ccdf_series",
    "export_ccdf",
    "summary_stats",
]


@dataclass(frozen=True)
class Dataset:
    """Positive observations sorted ascending, plus provenance metadata.

    Values are unitless; ``unit`` is free text for the report only.
    """

    values: np.ndarray
    label: str = ""
    year: int | None = None
    source: str | None = None
    unit: str | None = None

    def __post_init__(self):
        values = np.sort(np.asarray(self.values, dtype=float).ravel())
        if values.size == 0:
            raise InputError("dataset is empty")
        if not np.all(np.isfinite(values)) or values[0] <= 0:
            raise InputError("dataset values must be finite and positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size


def _parse_value(text, where, problems):
    text = text.strip()
    if not text:
        problems.append(f"{where}: missing value")
        return None
    try:
        value = float(text)
    except ValueError:
        problems.append(f"{where}: not a number: {text!r}")
        return None
    if not math.isfinite(value):
        problems.append(f"{where}: not finite: {text!r}")
    elif value <= 0:
        problems.append(f"{where}: value must be positive, got {text}")
    else:
        return value
    return None


def _read_plain(path, problems):
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            value = _parse_value(stripped, f"line {lineno}", problems)
            if value is not None:
                values.append(value)
    return values


def _read_csv(path, column, problems):
    values = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty CSV file") from None
        header = [h.strip() for h in header]
        if column is None:
            if len(header) != 1:
                raise InputError(f"{path}: CSV has {len(header)} columns; choose one with column=")
            idx = 0
        elif isinstance(column, int) or str(column).isdigit():
            idx = int(column)
            if idx >= len(header):
                raise InputError(f"{path}: column index {idx} out of range ({len(header)} columns)")
        else:
            try:
                idx = header.index(str(column))
            except ValueError:
                raise InputError(f"{path}: no column named {column!r}; have {header}") from None
        for row in reader:
            lineno = reader.line_num
            if not any(cell.strip() for cell in row):
                continue
            cell = row[idx] if idx < len(row) else ""
            value = _parse_value(cell, f"line {lineno}", problems)
            if value is not None:
                values.append(value)
    return values


def load(path, fmt: str = "plain", column=None, label=None, year=None, source=None, unit=None) -> Dataset:
    """Read a dataset from a plain one-value-per-line file or a CSV column.

    Plain files may contain blank lines and ``#`` comments. CSV files need a
    header row; ``column`` selects a column by name or 0-based index. Any
    non-numeric, missing or non-positive entry is an error; all offending
    lines are listed in ``InputError.problems``.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    problems: list[str] = []
    try:
        if fmt == "plain":
            values = _read_plain(path, problems)
        elif fmt == "csv":
            values = _read_csv(path, column, problems)
        else:
            raise InputError(f"unknown format {fmt!r}; use 'plain' or 'csv'")
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not UTF-8 text ({exc})") from None
    if problems:
        shown = "; ".join(problems[:10])
        more = f" (+{len(problems) - 10} more)" if len(problems) > 10 else ""
        raise InputError(f"{path}: {len(problems)} invalid entries: {shown}{more}", problems)
    if not values:
        raise InputError(f"{path}: no valid values")
    return Dataset(np.array(values), label=label if label is not None else path.stem,
                   year=year, source=source if source is not None else str(path), unit=unit)


def save(dataset, path) -> None:
    """Write values one per line with 17 significant digits (round-trips exactly)."""
    values = getattr(dataset, "values", dataset)
    with open(path, "w", encoding="utf-8") as fh:
        for v in values:
            fh.write(f"{v:.17g}\n")


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic dataset.

    ``params`` are the keyword parameters of the tail family. ``body`` is an
    optional ``(low, high, count)`` uniform body prepended to the tail.
    """

    family: str
    params: dict
    n: int
    seed: int
    body: tuple[float, float, int] | None = None
    label: str = "synthetic"


def generate(spec: SyntheticSpec) -> Dataset:
    """Draw a reproducible dataset from ``spec``."""
    if spec.n < 1:
        raise InputError(f"n must be positive, got {spec.n}")
    try:
        model = make_model(spec.family, **spec.params)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rng = np.random.default_rng(spec.seed)
    parts = []
    if spec.body is not None:
        low, high, count = spec.body
        if not 0 < low < high or count < 0:
            raise InputError(f"bad body spec {spec.body}")
        parts.append(rng.uniform(low, high, int(count)))
    parts.append(np.atleast_1d(model.sample(rng, spec.n)))
    return Dataset(np.concatenate(parts), label=spec.label, source=f"synthetic:{spec.family}")


@dataclass(frozen=True)
class CcdfSeries:
    x: np.ndarray
    fraction: np.ndarray
    fit: np.ndarray | None = field(default=None)

    def rows(self):
        if self.fit is None:
            return list(zip(self.x.tolist(), self.fraction.tolist()))
        return list(zip(self.x.tolist(), self.fraction.tolist(), self.fit.tolist()))


def ccdf_series(data, fit=None) -> CcdfSeries:
    """Empirical CCDF ``P(X >= x)`` at each distinct value of the tail.

    With a fit, only values ``>= x_min_hat`` are used and the fitted
    power-law CCDF is attached as an overlay.
    """
    values = np.sort(np.asarray(getattr(data, "values", data), dtype=float))
    if fit is not None:
        values = values[values >= fit.x_min_hat]
        if values.size == 0:
            raise InputError("no observations at or above the fitted x_min")
    n = values.size
    xs, first = np.unique(values, return_index=True)
    fraction = (n - first) / n
    overlay = None
    if fit is not None:
        overlay = PowerLaw(alpha=fit.alpha_hat, x_min=fit.x_min_hat).ccdf(xs)
    return CcdfSeries(xs, fraction, overlay)


def export_ccdf(data, fit=None, path=None) -> CcdfSeries:
    """Compute :func:`ccdf_series` and, if ``path`` is given, write it as CSV."""
    series = ccdf_series(data, fit)
    if path is not None:
        header = ["x", "ccdf_empirical"] + (["ccdf_fit"] if series.fit is not None else [])
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(header)
                for row in series.rows():
                    writer.writerow([f"{v:.17g}" for v in row])
        except OSError as exc:
            raise InputError(f"cannot write {path}: {exc}") from None
    return series


def summary_stats(data) -> dict:
    values = np.asarray(getattr(data, "values", data), dtype=float)
    return {
        "n": int(values.size),
        "min": float(values.min()),
        "max": float(values.max()),
        "mean": float(values.mean()),
        "median": float(np.median(values)),
    }
