import math

import numpy as np
import pytest
from scipy import stats

from powertail.compare import (
    ComparisonRow,
    Verdict,
    classify,
    compare_alternatives,
    nested_p_value,
    vuong_nested,
    vuong_nonnested,
)
from powertail.errors import DegenerateComparisonError
from powertail.fitting import fit_fixed_xmin
from powertail.gof import GofResult
from powertail.models import CutoffPowerLaw, FitOutcome, LogNormalTail, PowerLaw, fit_mle


def _two_sided(nlr):
    return 2 * stats.norm.sf(abs(nlr))


@pytest.mark.parametrize("nlr, p", [(2.043, 0.041), (-0.544, 0.586), (0.483, 0.629)])
def test_nonnested_p_values_against_normal_tail(nlr, p):
    assert _two_sided(nlr) == pytest.approx(p, abs=0.001)
    # the same formula that the library applies
    assert math.erfc(abs(nlr) / math.sqrt(2)) == pytest.approx(_two_sided(nlr), rel=1e-12)


@pytest.mark.parametrize("lr, p", [(-1.715, 0.064), (-0.068, 0.713), (0.0, 1.0), (-3.0, stats.chi2.sf(6.0, 1))])
def test_nested_p_value_is_chi2_one_dof(lr, p):
    assert nested_p_value(lr) == pytest.approx(p, abs=0.002)
    assert nested_p_value(lr) == pytest.approx(stats.chi2.sf(-2 * lr, 1), rel=1e-10)


def _vuong_oracle(tail, pl, alt):
    l = np.array([pl.logpdf(t) - alt.logpdf(t) for t in tail])
    nlr = l.sum() / (math.sqrt(l.size) * l.std())
    return nlr, _two_sided(nlr)


def test_vuong_matches_pointwise_oracle(rng):
    tail = LogNormalTail(0.5, 1.2, 1.0).sample(rng, 400)
    pl = PowerLaw(fit_mle("power_law", tail, 1.0).model.alpha, 1.0)
    alt = fit_mle("lognormal", tail, 1.0)
    row = vuong_nonnested(tail, pl, alt)
    nlr, p = _vuong_oracle(tail, pl, alt.model)
    assert row.statistic == pytest.approx(nlr, rel=1e-10)
    assert row.p_value == pytest.approx(p, rel=1e-8)
    assert row.statistic_kind == "NLR" and not row.nc


def test_vuong_is_antisymmetric(rng):
    tail = PowerLaw(2.5, 1.0).sample(rng, 300)
    a = LogNormalTail(0.0, 1.0, 1.0)
    b = LogNormalTail(-1.0, 2.0, 1.0)
    forward = vuong_nonnested(tail, PowerLaw(2.5, 1.0), FitOutcome("lognormal", a, a.loglik(tail), True, ""))
    nlr_pl_a, _ = _vuong_oracle(tail, PowerLaw(2.5, 1.0), a)
    assert forward.statistic == pytest.approx(nlr_pl_a, rel=1e-10)
    # swapping the roles flips the sign and keeps the p-value
    l_ab = a.logpdf(tail) - b.logpdf(tail)
    l_ba = -l_ab
    z_ab = l_ab.sum() / (math.sqrt(l_ab.size) * l_ab.std())
    z_ba = l_ba.sum() / (math.sqrt(l_ba.size) * l_ba.std())
    assert z_ab == pytest.approx(-z_ba)


def test_comparing_a_model_with_itself_is_an_error():
    tail = np.array([1.0, 2.0, 3.0])
    pl = PowerLaw(2.0, 1.0)
    # an exponential-looking alternative with identical log densities is impossible,
    # so use a cut-off fit object posing as a non-nested one
    clone = CutoffPowerLaw(2.0, 0.0, 1.0)
    with pytest.raises(DegenerateComparisonError):
        vuong_nonnested(tail, pl, FitOutcome("lognormal", clone, clone.loglik(tail), True, ""))


def test_nested_lr_is_never_positive(rng):
    tail = PowerLaw(2.1, 1.0).sample(rng, 500)
    pl = fit_mle("power_law", tail, 1.0).model
    row = vuong_nested(tail, pl, fit_mle("cutoff_power_law", tail, 1.0))
    assert row.statistic <= 0.0
    assert 0.0 <= row.p_value <= 1.0


def test_not_converged_rows():
    tail = PowerLaw(2.0, 1.0).sample(np.random.default_rng(0), 200)
    pl = PowerLaw(2.0, 1.0)
    row = vuong_nested(tail, pl, FitOutcome.failed("cutoff_power_law", "budget"))
    assert row.nc and row.statistic is None and row.statistic_kind == "LR"
    assert vuong_nonnested(tail, pl, FitOutcome.failed("lognormal", "x")).nc


def test_compare_alternatives_order_and_kinds(rng):
    x = PowerLaw(2.5, 1.0).sample(rng, 600)
    rows = compare_alternatives(x, fit_fixed_xmin(x, 1.0))
    assert [r.alternative for r in rows] == ["lognormal", "exponential", "stretched_exp", "cutoff_power_law"]
    assert [r.statistic_kind for r in rows] == ["NLR", "NLR", "NLR", "LR"]
    # a genuine power law beats the exponential decisively
    assert rows[1].statistic > 0 and rows[1].p_value < 0.01


def test_compare_with_tiny_budget_reports_nc(rng):
    x = PowerLaw(2.5, 1.0).sample(rng, 300)
    rows = compare_alternatives(x, fit_fixed_xmin(x, 1.0), max_iter=2)
    assert rows[0].nc and rows[3].nc
    assert not rows[1].nc  # the exponential has a closed form


def _row(kind, stat, p, alt="lognormal"):
    if stat is None:
        return ComparisonRow.not_converged(alt if kind == "NLR" else "cutoff_power_law")
    return ComparisonRow(alt if kind == "NLR" else "cutoff_power_law", kind, stat, p)


def test_classify_examples():
    good = [_row("NLR", 3.0, 0.003), _row("NLR", 5.0, 0.0001, "exponential"), _row("NLR", 2.0, 0.04, "stretched_exp"),
            _row("LR", -0.2, 0.52)]
    assert classify(0.5, good) is Verdict.GOOD
    assert classify(0.05, good) is Verdict.NONE
    cut = good[:3] + [_row("LR", -3.0, 0.014)]
    assert classify(0.5, cut) is Verdict.WITH_CUTOFF
    weak = [_row("NLR", -0.5, 0.6)] + good[1:]
    assert classify(0.5, weak) is Verdict.MODERATE
    nc = [_row("NLR", None, None)] + good[1:]
    assert classify(0.5, nc) is Verdict.MODERATE
    nc_cut = good[:3] + [_row("LR", None, None)]
    assert classify(0.5, nc_cut) is Verdict.GOOD


def test_classify_boundary_and_strict_mode():
    rows = [_row("NLR", -2.5, 0.01), _row("LR", -0.1, 0.65)]
    assert classify(0.1, rows) is Verdict.MODERATE  # p equal to the threshold is not a rejection
    assert classify(0.1, rows, strict_alternatives=True) is Verdict.NONE
    assert classify(GofResult(0.05, 99, 20, 0.2, False), rows) is Verdict.MODERATE


def test_verdict_display():
    assert Verdict.WITH_CUTOFF.display == "with cut-off"
    assert Verdict.GOOD.display == "good"
