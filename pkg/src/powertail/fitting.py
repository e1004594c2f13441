"""Joint estimation of the power-law exponent and the lower bound x_min.

``x_min`` is chosen among the distinct observed values as the one whose
power-law fit (exponent by maximum likelihood) has the smallest
Kolmogorov-Smirnov distance to the data above it. Standard errors come from a
nonparametric bootstrap that repeats the whole scan on every resample.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .errors import DegenerateDataError, InputError
from .models import PowerLaw
from .parallel import SE_STAGE, replicate_seeds, run_chunked

__all__ = [
    "PowerLawFit",
    "BootstrapSE",
    "fit_alpha",
    "ks_statistic",
    "fit_xmin",
    "fit_fixed_xmin",
    "bootstrap_se",
]

DEFAULT_MIN_TAIL = 10
DROP_WARN_FRACTION = 0.01


def sorted_values(data) -> np.ndarray:
    """Sorted float copy of a Dataset's values or of any array-like."""
    values = np.asarray(getattr(data, "values", data), dtype=float)
    return np.sort(values.ravel())


@dataclass(frozen=True)
class PowerLawFit:
    alpha_hat: float
    x_min_hat: float
    n_tail: int
    n_total: int
    ks: float
    se_alpha: float | None = None
    se_x_min: float | None = None
    xmin_fixed: bool = False
    min_tail: int = DEFAULT_MIN_TAIL

    @property
    def params(self) -> PowerLaw:
        return PowerLaw(alpha=self.alpha_hat, x_min=self.x_min_hat)

    @property
    def tail_fraction(self) -> float:
        return self.n_tail / self.n_total


@dataclass(frozen=True)
class BootstrapSE:
    se_alpha: float
    se_x_min: float
    replications: int
    dropped: int = 0
    warning: str | None = None

    def __iter__(self):
        # unpacks as the (se_alpha, se_x_min) pair
        return iter((self.se_alpha, self.se_x_min))


def fit_alpha(data, x_min: float) -> float:
    """Maximum-likelihood exponent ``1 + n / sum(log(x_i / x_min))`` over ``x_i >= x_min``."""
    x = sorted_values(data)
    x_min = float(x_min)
    if not x_min > 0:
        raise InputError(f"x_min must be positive, got {x_min}")
    n_tail = x.size - int(np.searchsorted(x, x_min))
    if n_tail < 2:
        raise InputError(f"need at least 2 observations >= x_min={x_min!r}, have {n_tail}")
    alpha = _kernels.alpha_at(x, x_min)
    if math.isnan(alpha):
        raise DegenerateDataError(f"all tail observations equal x_min={x_min!r}")
    return float(alpha)


def ks_statistic(data, params: PowerLaw) -> float:
    """Largest gap between the tail's empirical CDF and the power-law CDF.

    Both step edges of the empirical CDF are checked at every observation.
    """
    x = sorted_values(data)
    if x.size == 0 or x[-1] < params.x_min:
        raise InputError(f"no observations >= x_min={params.x_min!r}")
    return float(_kernels.ks_at(x, float(params.alpha), float(params.x_min)))


def fit_xmin(data, min_tail: int = DEFAULT_MIN_TAIL) -> PowerLawFit:
    """KS-minimising choice of x_min over the distinct observed values.

    Only candidates leaving at least ``min_tail`` observations in the tail are
    considered. Ties in KS go to the smaller x_min.
    """
    x = sorted_values(data)
    if min_tail < 4:
        raise InputError(f"min_tail must be at least 4, got {min_tail}")
    if x.size < min_tail:
        raise InputError(f"need at least min_tail={min_tail} observations, have {x.size}")
    i, alpha, ks = _kernels.scan_xmin(x, int(min_tail))
    if i < 0:
        raise DegenerateDataError("no x_min candidate gives a finite exponent")
    return PowerLawFit(
        alpha_hat=float(alpha),
        x_min_hat=float(x[i]),
        n_tail=int(x.size - i),
        n_total=int(x.size),
        ks=float(ks),
        min_tail=int(min_tail),
    )


def fit_fixed_xmin(data, x_min: float) -> PowerLawFit:
    """Power-law fit with a user-imposed lower bound (no scan)."""
    x = sorted_values(data)
    alpha = fit_alpha(x, x_min)
    params = PowerLaw(alpha=alpha, x_min=float(x_min))
    n_tail = int(x.size - np.searchsorted(x, x_min))
    return PowerLawFit(
        alpha_hat=alpha,
        x_min_hat=float(x_min),
        n_tail=n_tail,
        n_total=int(x.size),
        ks=ks_statistic(x, params),
        xmin_fixed=True,
    )


def bootstrap_se(
    data,
    replications: int,
    seed: int,
    min_tail: int = DEFAULT_MIN_TAIL,
    fixed_xmin: float | None = None,
    workers: int | None = 1,
) -> BootstrapSE:
    """Bootstrap standard errors of the exponent and of x_min.

    Each replicate resamples the full dataset with replacement and repeats the
    x_min scan, unless ``fixed_xmin`` is given, in which case only the exponent
    is refitted above that bound (and ``se_x_min`` is 0). Replicates whose fit
    fails are dropped; dropping more than 1% attaches a warning.

    The result depends only on ``seed``, never on ``workers``.
    """
    if replications < 2:
        raise InputError(f"need at least 2 bootstrap replications, got {replications}")
    x = sorted_values(data)
    seeds = replicate_seeds(seed, SE_STAGE, replications)
    alphas = np.full(replications, np.nan)
    xmins = np.full(replications, np.nan)
    fixed = float(fixed_xmin) if fixed_xmin is not None else 0.0

    def task(lo, hi):
        _kernels.resample_fits(x, seeds[lo:hi], int(min_tail), fixed, alphas[lo:hi], xmins[lo:hi])

    run_chunked(task, replications, workers)
    ok = ~np.isnan(alphas)
    used = int(ok.sum())
    dropped = replications - used
    warning = None
    if dropped > DROP_WARN_FRACTION * replications:
        warning = f"{dropped} of {replications} bootstrap replicates failed to fit and were dropped"
        warnings.warn(warning, RuntimeWarning, stacklevel=2)
    if used < 2:
        raise DegenerateDataError("fewer than 2 bootstrap replicates could be fitted")
    return BootstrapSE(
        se_alpha=float(np.std(alphas[ok], ddof=1)),
        se_x_min=float(np.std(xmins[ok], ddof=1)),
        replications=used,
        dropped=dropped,
        warning=warning,
    )


def with_standard_errors(fit: PowerLawFit, se: BootstrapSE) -> PowerLawFit:
    return replace(fit, se_alpha=se.se_alpha, se_x_min=se.se_x_min)
