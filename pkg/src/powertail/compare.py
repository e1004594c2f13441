"""Likelihood-ratio comparison of the power law against alternative tails.

Non-nested alternatives (log-normal, exponential, stretched exponential) use
Vuong's normalised log-likelihood ratio with a two-sided normal p-value. The
cut-off power law nests the pure power law, so it gets the plain
log-likelihood ratio with a chi-squared(1) p-value. Positive statistics
favour the power law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateComparisonError, NumericalError
from .fitting import PowerLawFit, sorted_values
from .gof import GOF_THRESHOLD, GofResult
from .models import ALTERNATIVES, FitOutcome, PowerLaw, fit_mle

__all__ = [
    "ComparisonRow",
    "Verdict",
    "vuong_nonnested",
    "vuong_nested",
    "compare_alternatives",
    "classify",
]

NESTING_TOL = 1e-8


@dataclass(frozen=True)
class ComparisonRow:
    alternative: str
    statistic_kind: str  # "NLR" or "LR"
    statistic: float | None
    p_value: float | None
    nc: bool = False
    fit: FitOutcome | None = None

    @classmethod
    def not_converged(cls, alternative):
        kind = "LR" if alternative == "cutoff_power_law" else "NLR"
        return cls(alternative, kind, None, None, nc=True)


class Verdict(str, Enum):
    GOOD = "good"
    MODERATE = "moderate"
    WITH_CUTOFF = "with_cutoff"
    NONE = "none"

    @property
    def display(self) -> str:
        return "with cut-off" if self is Verdict.WITH_CUTOFF else self.value


def _tail(data, x_min):
    x = sorted_values(data)
    return x[x >= x_min]


def vuong_nonnested(tail, pl: PowerLaw, alt: FitOutcome) -> ComparisonRow:
    """Vuong test of the power law against a non-nested alternative.

    ``NLR = sum(l_i) / (sqrt(n) * sd(l_i))`` with ``l_i`` the pointwise
    log-density differences (power law minus alternative) and ``sd`` the
    population standard deviation.
    """
    if not alt.converged:
        return ComparisonRow.not_converged(alt.family)
    tail = _tail(tail, pl.x_min)
    diffs = pl.logpdf(tail) - alt.model.logpdf(tail)
    n = diffs.size
    lr = float(diffs.sum())
    sigma = float(np.std(diffs))
    if not sigma > 0:
        raise DegenerateComparisonError(f"identical pointwise likelihoods against {alt.family}")
    nlr = lr / (math.sqrt(n) * sigma)
    p = math.erfc(abs(nlr) / math.sqrt(2.0))
    return ComparisonRow(alt.family, "NLR", nlr, p, fit=alt)


def nested_p_value(lr: float) -> float:
    """Upper tail of chi-squared(1) at ``-2 * lr``."""
    return math.erfc(math.sqrt(max(-lr, 0.0)))


def vuong_nested(tail, pl: PowerLaw, cutoff: FitOutcome) -> ComparisonRow:
    """Log-likelihood ratio of the power law against its cut-off extension."""
    if not cutoff.converged:
        return ComparisonRow.not_converged("cutoff_power_law")
    tail = _tail(tail, pl.x_min)
    lr = pl.loglik(tail) - cutoff.log_likelihood
    if lr > NESTING_TOL:
        raise NumericalError(
            f"cut-off fit is worse than the nested power law by {lr:.3g}; optimiser failed"
        )
    lr = min(lr, 0.0)
    return ComparisonRow("cutoff_power_law", "LR", lr, nested_p_value(lr), fit=cutoff)


def compare_alternatives(data, fit: PowerLawFit, max_iter: int | None = None) -> list[ComparisonRow]:
    """Fit the four alternatives on the power-law tail and test each one.

    Rows come back in the fixed order log-normal, exponential, stretched
    exponential, cut-off power law.
    """
    tail = _tail(data, fit.x_min_hat)
    pl = fit.params
    kwargs = {} if max_iter is None else {"max_iter": max_iter}
    rows = []
    for family in ALTERNATIVES:
        outcome = fit_mle(family, tail, fit.x_min_hat, **kwargs)
        if family == "cutoff_power_law":
            rows.append(vuong_nested(tail, pl, outcome))
        else:
            rows.append(vuong_nonnested(tail, pl, outcome))
    return rows


def classify(
    gof: GofResult | float,
    rows,
    threshold: float = GOF_THRESHOLD,
    strict_alternatives: bool = False,
) -> Verdict:
    """Overall support for the power law.

    ``gof`` may be a :class:`GofResult` or a bare p-value. With
    ``strict_alternatives`` a non-nested alternative that is significantly
    better than the power law also yields ``none``.
    """
    gof_p = gof.p_value if isinstance(gof, GofResult) else float(gof)
    if gof_p < threshold:
        return Verdict.NONE
    nonnested = [r for r in rows if r.statistic_kind == "NLR"]
    cutoff = [r for r in rows if r.statistic_kind == "LR"]
    if strict_alternatives and any(
        not r.nc and r.p_value < threshold and r.statistic < 0 for r in nonnested
    ):
        return Verdict.NONE
    if any(not r.nc and r.p_value < threshold for r in cutoff):
        return Verdict.WITH_CUTOFF
    if nonnested and all(not r.nc and r.p_value < threshold and r.statistic > 0 for r in nonnested):
        return Verdict.GOOD
    return Verdict.MODERATE
