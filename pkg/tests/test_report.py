import json

import numpy as np
import pytest

from powertail.compare import Verdict
from powertail.data import Dataset, SyntheticSpec, generate
from powertail.report import Settings, analyze, render_text, report_to_dict, report_to_json, summary_row

FAST = Settings(gof_reps=99, se_reps=100)


def test_composite_data_mostly_supports_a_power_law():
    verdicts = []
    for seed in range(20):
        spec = SyntheticSpec("power_law", {"alpha": 2.5, "x_min": 3.0}, 300, seed, body=(0.5, 3.0, 100))
        verdicts.append(analyze(generate(spec), FAST, seed).verdict)
    supported = sum(v is not Verdict.NONE for v in verdicts)
    assert supported > 10


def test_uniform_data_mostly_gets_no_support():
    verdicts = [analyze(Dataset(np.random.default_rng(s).uniform(1, 2, 1000)), FAST, s).verdict for s in range(20)]
    assert sum(v is Verdict.NONE for v in verdicts) > 10


def test_rejected_fit_skips_comparisons_unless_forced():
    ds = Dataset(np.random.default_rng(3).uniform(1, 2, 1000))
    plain = analyze(ds, FAST, 0)
    assert plain.verdict is Verdict.NONE and plain.comparisons == []
    forced = analyze(ds, Settings(gof_reps=99, se_reps=100, force_compare=True), 0)
    assert forced.verdict is Verdict.NONE and len(forced.comparisons) == 4


def test_report_serialisation():
    ds = generate(SyntheticSpec("power_law", {"alpha": 2.2, "x_min": 1.0}, 300, 5))
    report = analyze(ds, Settings(gof_reps=99, se_reps=100, timing=False), 9)
    payload = report_to_dict(report)
    assert json.loads(report_to_json(report)) == payload
    assert payload["runtime_ms"] is None
    assert "workers" not in payload["settings"]
    row = summary_row(report)
    assert row["ci95_lo"] == pytest.approx(row["alpha_hat"] - 1.96 * row["se_alpha"])
    assert "verdict:" in render_text(report)


def test_workers_setting_does_not_change_the_report():
    ds = generate(SyntheticSpec("lognormal", {"mu": 0.5, "sigma": 1.0, "x_min": 1.0}, 300, 2))
    a = analyze(ds, Settings(gof_reps=199, se_reps=200, workers=1, timing=False), 4)
    b = analyze(ds, Settings(gof_reps=199, se_reps=200, workers=6, timing=False), 4)
    assert report_to_json(a) == report_to_json(b)
