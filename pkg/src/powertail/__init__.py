"""Detect and validate power-law behaviour in the upper tail of positive data."""

from .compare import ComparisonRow, Verdict, classify, compare_alternatives, vuong_nested, vuong_nonnested
from .data import CcdfSeries, Dataset, SyntheticSpec, export_ccdf, generate, load, save
from .errors import (
    DegenerateComparisonError,
    DegenerateDataError,
    DomainError,
    InputError,
    NumericalError,
    PowerTailError,
)
from .fitting import PowerLawFit, bootstrap_se, fit_alpha, fit_fixed_xmin, fit_xmin, ks_statistic
from .gof import GofResult, gof_test
from .models import (
    CutoffPowerLaw,
    ExponentialTail,
    FitOutcome,
    LogNormalTail,
    PowerLaw,
    StretchedExpTail,
    ccdf,
    fit_mle,
    make_model,
    pdf,
    sample,
)
from .report import AnalysisReport, Settings, analyze

__version__ = "0.1.0"
