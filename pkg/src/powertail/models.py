"""Tail distributions conditional on ``x >= x_min``.

Five families are supported: the pure power law and the four alternatives it
is compared against (log-normal, exponential, stretched exponential and power
law with exponential cut-off). Every model exposes ``logpdf``, ``pdf``,
``ccdf``, ``cdf``, ``loglik`` and ``sample``; every family has a maximum
likelihood fitter returning a :class:`FitOutcome`.

Numerical fits are carried out on ``y = x / x_min`` (so ``y >= 1``) with
dimensionless parameters and mapped back afterwards. This keeps the optimiser
tolerances meaningful whatever the monetary unit of the data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
from scipy import special

from .errors import DomainError, InputError
from .optimize import nelder_mead
from .special import log_upper_gamma

__all__ = [
    "FAMILIES",
    "TailModel",
    "PowerLaw",
    "LogNormalTail",
    "ExponentialTail",
    "StretchedExpTail",
    "CutoffPowerLaw",
    "FitOutcome",
    "make_model",
    "pdf",
    "ccdf",
    "sample",
    "fit_mle",
]

_LOG_2PI = math.log(2.0 * math.pi)
MAX_ITER = 10_000
XTOL = 1e-8


class TailModel:
    """Common behaviour of the truncated families."""

    family: ClassVar[str]
    x_min: float

    def _support(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(~(x >= self.x_min)):
            raise DomainError(f"{self.family}: x must be >= x_min={self.x_min!r}")
        return x

    def logpdf(self, x):
        raise NotImplementedError

    def ccdf(self, x):
        raise NotImplementedError

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def cdf(self, x):
        return 1.0 - self.ccdf(x)

    def loglik(self, x):
        return float(np.sum(self.logpdf(x)))

    def sample(self, rng, size=None):
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PowerLaw(TailModel):
    """Continuous power law ``p(x) = (alpha-1)/x_min * (x/x_min)**-alpha``."""

    alpha: float
    x_min: float
    family: ClassVar[str] = "power_law"

    def __post_init__(self):
        if not self.alpha > 1:
            raise ValueError(f"power law needs alpha > 1, got {self.alpha}")
        if not self.x_min > 0:
            raise ValueError(f"x_min must be positive, got {self.x_min}")

    def logpdf(self, x):
        x = self._support(x)
        return math.log(self.alpha - 1.0) - math.log(self.x_min) - self.alpha * np.log(x / self.x_min)

    def ccdf(self, x):
        x = self._support(x)
        return (x / self.x_min) ** (1.0 - self.alpha)

    def ppf(self, u):
        """Inverse CDF; ``u`` in [0, 1)."""
        u = np.asarray(u, dtype=float)
        return self.x_min * (1.0 - u) ** (-1.0 / (self.alpha - 1.0))

    def sample(self, rng, size=None):
        return self.ppf(rng.random(size))

    def params(self):
        return {"alpha": self.alpha, "x_min": self.x_min}


@dataclass(frozen=True)
class LogNormalTail(TailModel):
    """Log-normal(mu, sigma) conditioned on ``x >= x_min``."""

    mu: float
    sigma: float
    x_min: float
    family: ClassVar[str] = "lognormal"

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.x_min > 0:
            raise ValueError(f"x_min must be positive, got {self.x_min}")

    @property
    def _log_tail_mass(self):
        return special.log_ndtr((self.mu - math.log(self.x_min)) / self.sigma)

    def logpdf(self, x):
        x = self._support(x)
        lx = np.log(x)
        z = (lx - self.mu) / self.sigma
        return -lx - math.log(self.sigma) - 0.5 * _LOG_2PI - 0.5 * z * z - self._log_tail_mass

    def ccdf(self, x):
        x = self._support(x)
        return np.exp(special.log_ndtr((self.mu - np.log(x)) / self.sigma) - self._log_tail_mass)

    def sample(self, rng, size=None):
        v = 1.0 - rng.random(size)  # (0, 1]
        z = special.ndtri_exp(np.log(v) + self._log_tail_mass)
        return np.maximum(np.exp(self.mu - self.sigma * z), self.x_min)

    def params(self):
        return {"mu": self.mu, "sigma": self.sigma, "x_min": self.x_min}


@dataclass(frozen=True)
class ExponentialTail(TailModel):
    """``p(x) = lam * exp(-lam (x - x_min))``."""

    lam: float
    x_min: float
    family: ClassVar[str] = "exponential"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not self.x_min > 0:
            raise ValueError(f"x_min must be positive, got {self.x_min}")

    def logpdf(self, x):
        x = self._support(x)
        return math.log(self.lam) - self.lam * (x - self.x_min)

    def ccdf(self, x):
        x = self._support(x)
        return np.exp(-self.lam * (x - self.x_min))

    def sample(self, rng, size=None):
        return self.x_min + rng.standard_exponential(size) / self.lam

    def params(self):
        return {"lam": self.lam, "x_min": self.x_min}


@dataclass(frozen=True)
class StretchedExpTail(TailModel):
    """Stretched exponential ``p(x) = beta lam x**(beta-1) exp(-lam (x**beta - x_min**beta))``."""

    lam: float
    beta: float
    x_min: float
    family: ClassVar[str] = "stretched_exp"

    def __post_init__(self):
        if not self.lam > 0 or not self.beta > 0:
            raise ValueError(f"lambda and beta must be positive, got {self.lam}, {self.beta}")
        if not self.x_min > 0:
            raise ValueError(f"x_min must be positive, got {self.x_min}")

    def logpdf(self, x):
        x = self._support(x)
        return (
            math.log(self.beta)
            + math.log(self.lam)
            + (self.beta - 1.0) * np.log(x)
            - self.lam * (x**self.beta - self.x_min**self.beta)
        )

    def ccdf(self, x):
        x = self._support(x)
        return np.exp(-self.lam * (x**self.beta - self.x_min**self.beta))

    def sample(self, rng, size=None):
        e = rng.standard_exponential(size)
        return (self.x_min**self.beta + e / self.lam) ** (1.0 / self.beta)

    def params(self):
        return {"lam": self.lam, "beta": self.beta, "x_min": self.x_min}


def _cutoff_log_norm(alpha, lam_scaled):
    """log of ``int_1^inf y**-alpha exp(-lam (y-1)) dy``."""
    if lam_scaled == 0.0:
        return -math.log(alpha - 1.0) if alpha > 1.0 else math.inf
    return lam_scaled + (alpha - 1.0) * math.log(lam_scaled) + log_upper_gamma(1.0 - alpha, lam_scaled)


@dataclass(frozen=True)
class CutoffPowerLaw(TailModel):
    """Power law with exponential cut-off, ``p(x) ∝ x**-alpha exp(-lam x)``.

    ``lam == 0`` is allowed and reduces to the pure power law (then
    ``alpha > 1`` is required for normalisability).
    """

    alpha: float
    lam: float
    x_min: float
    family: ClassVar[str] = "cutoff_power_law"
    _log_norm: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"lambda must be non-negative, got {self.lam}")
        if not self.x_min > 0:
            raise ValueError(f"x_min must be positive, got {self.x_min}")
        if self.lam == 0 and not self.alpha > 1:
            raise ValueError("cut-off power law with lambda=0 needs alpha > 1")
        object.__setattr__(self, "_log_norm", _cutoff_log_norm(self.alpha, self.lam * self.x_min))

    def logpdf(self, x):
        x = self._support(x)
        y = x / self.x_min
        return -self.alpha * np.log(y) - self.lam * (x - self.x_min) - self._log_norm - math.log(self.x_min)

    def ccdf(self, x):
        x = self._support(x)
        if self.lam == 0:
            return (x / self.x_min) ** (1.0 - self.alpha)
        a = 1.0 - self.alpha
        ref = log_upper_gamma(a, self.lam * self.x_min)
        flat = np.array([log_upper_gamma(a, self.lam * v) - ref for v in x.ravel()])
        return np.exp(flat).reshape(x.shape)

    def sample(self, rng, size=None):
        count = 1 if size is None else int(np.prod(size))
        out = self._sample_flat(rng, count)
        return out[0] if size is None else out.reshape(size)

    def _sample_flat(self, rng, count):
        lam_s = self.lam * self.x_min
        if self.alpha < 0:
            # y ~ Gamma(1-alpha, rate lam_s) truncated to y >= 1, by inversion
            a = 1.0 - self.alpha
            v = 1.0 - rng.random(count)
            t = special.gammainccinv(a, v * special.gammaincc(a, lam_s))
            return np.maximum(t / lam_s, 1.0) * self.x_min
        out = np.empty(0)
        while out.size < count:
            need = count - out.size
            batch = max(2 * need, 64)
            if self.alpha > 1:
                # power-law envelope, accept with the exponential factor
                y = (1.0 - rng.random(batch)) ** (-1.0 / (self.alpha - 1.0))
                keep = rng.random(batch) < np.exp(-lam_s * (y - 1.0))
            else:
                # exponential envelope, accept with y**-alpha <= 1
                y = 1.0 + rng.standard_exponential(batch) / lam_s
                keep = rng.random(batch) < y ** (-self.alpha)
            out = np.concatenate([out, y[keep][:need]])
        return out * self.x_min

    def params(self):
        return {"alpha": self.alpha, "lam": self.lam, "x_min": self.x_min}


_CLASSES = {cls.family: cls for cls in (PowerLaw, LogNormalTail, ExponentialTail, StretchedExpTail, CutoffPowerLaw)}
FAMILIES = tuple(_CLASSES)
ALTERNATIVES = ("lognormal", "exponential", "stretched_exp", "cutoff_power_law")


def make_model(family: str, **params) -> TailModel:
    """Build a model from its family tag and keyword parameters."""
    try:
        cls = _CLASSES[family]
    except KeyError:
        raise InputError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}") from None
    try:
        return cls(**params)
    except TypeError as exc:
        raise InputError(f"bad parameters for {family}: {exc}") from None


def pdf(model: TailModel, x):
    return model.pdf(x)


def ccdf(model: TailModel, x):
    return model.ccdf(x)


def sample(model: TailModel, rng, size=None):
    return model.sample(rng, size)


@dataclass(frozen=True)
class FitOutcome:
    """Result of a maximum-likelihood fit; ``model`` is None when the fit did not converge."""

    family: str
    model: TailModel | None
    log_likelihood: float | None
    converged: bool
    message: str = ""

    @property
    def nc(self) -> bool:
        return not self.converged

    @classmethod
    def failed(cls, family, message):
        return cls(family, None, None, False, message)


def _tail_of(data, x_min):
    values = np.asarray(getattr(data, "values", data), dtype=float)
    tail = np.sort(values[values >= x_min])
    if tail.size == 0:
        raise InputError(f"no observations at or above x_min={x_min!r}")
    return tail


def _multistart(objective, starts, step, max_iter):
    best = None
    for start in starts:
        res = nelder_mead(objective, start, step, xtol=XTOL, max_iter=max_iter)
        if res.converged and math.isfinite(res.fun) and (best is None or res.fun < best.fun):
            best = res
    return best


def _fit_exponential(tail, x_min, max_iter):
    excess = float(np.mean(tail / x_min)) - 1.0
    if not excess > 0:
        return None, "all tail values equal x_min"
    return ExponentialTail(lam=1.0 / (excess * x_min), x_min=x_min), ""


def _fit_lognormal(tail, x_min, max_iter):
    ly = np.log(tail / x_min)
    m1 = float(ly.mean())
    m2 = float(np.mean(ly * ly))
    s = float(ly.std())
    if not s > 0:
        return None, "zero spread of log values"

    def objective(theta):
        mu, log_sigma = theta
        sigma = math.exp(log_sigma)
        quad = (m2 - 2.0 * mu * m1 + mu * mu) / (2.0 * sigma * sigma)
        return m1 + log_sigma + 0.5 * _LOG_2PI + quad + special.log_ndtr(mu / sigma)

    ls = math.log(s)
    starts = [(m1, ls), (m1 - s, ls + 0.5), (0.0, ls + math.log(2.0)), (m1 + s, ls - 0.5)]
    best = _multistart(objective, starts, (0.5 * s, 0.2), max_iter)
    if best is None:
        return None, "simplex search did not converge"
    mu_s, log_sigma = best.x
    return LogNormalTail(mu=float(mu_s) + math.log(x_min), sigma=math.exp(log_sigma), x_min=x_min), ""


def _fit_stretched(tail, x_min, max_iter):
    y = tail / x_min
    ly = np.log(y)
    mean_ly = float(ly.mean())
    if not mean_ly > 0:
        return None, "all tail values equal x_min"

    def objective(theta):
        log_lam, log_beta = theta
        lam = math.exp(log_lam)
        beta = math.exp(log_beta)
        stretched = float(np.mean(np.expm1(beta * ly)))
        return -(log_beta + log_lam + (beta - 1.0) * mean_ly - lam * stretched)

    starts = []
    for beta in (1.0, 0.5, 0.25, 2.0):
        lam = 1.0 / float(np.mean(np.expm1(beta * ly)))
        starts.append((math.log(lam), math.log(beta)))
    best = _multistart(objective, starts, (0.2, 0.2), max_iter)
    if best is None:
        return None, "simplex search did not converge"
    lam_s, beta = math.exp(best.x[0]), math.exp(best.x[1])
    return StretchedExpTail(lam=lam_s / x_min**beta, beta=beta, x_min=x_min), ""


def _fit_cutoff(tail, x_min, max_iter):
    y = tail / x_min
    mean_ly = float(np.mean(np.log(y)))
    mean_excess = float(np.mean(y)) - 1.0
    if not mean_ly > 0:
        return None, "all tail values equal x_min"

    def objective(theta):
        alpha, s = theta
        lam = s * s
        return alpha * mean_ly + lam * mean_excess + _cutoff_log_norm(alpha, lam)

    # lambda = s**2 keeps the search unconstrained; s = 0 is the pure power law
    alpha_pl = 1.0 + 1.0 / mean_ly
    root_lam = math.sqrt(1.0 / mean_excess)
    starts = [
        (alpha_pl, 0.0),
        (alpha_pl, root_lam * math.sqrt(0.1)),
        (1.0, root_lam),
        (0.5 * alpha_pl, root_lam * math.sqrt(0.5)),
    ]
    best = _multistart(objective, starts, (0.1, 0.3 * root_lam), max_iter)
    if best is None:
        return None, "simplex search did not converge"
    alpha, s = best.x
    lam_s = s * s
    # an optimum on the boundary: report the pure power law exactly
    if lam_s <= 1e-12 and objective((alpha_pl, 0.0)) <= best.fun + 1e-9:
        alpha, lam_s = alpha_pl, 0.0
    return CutoffPowerLaw(alpha=float(alpha), lam=float(lam_s) / x_min, x_min=x_min), ""


_FITTERS = {
    "exponential": _fit_exponential,
    "lognormal": _fit_lognormal,
    "stretched_exp": _fit_stretched,
    "cutoff_power_law": _fit_cutoff,
}


def fit_mle(family: str, data, x_min: float, max_iter: int = MAX_ITER) -> FitOutcome:
    """Maximum-likelihood fit of ``family`` to the observations ``>= x_min``.

    ``data`` may be a :class:`~powertail.data.Dataset` or any array of values.
    Non-convergence of the simplex search (or a non-finite likelihood) gives a
    ``FitOutcome`` with ``converged=False`` instead of raising.
    """
    tail = _tail_of(data, x_min)
    if family == "power_law":
        from .fitting import fit_alpha

        model = PowerLaw(alpha=fit_alpha(tail, x_min), x_min=x_min)
        return FitOutcome(family, model, model.loglik(tail), True)
    try:
        fitter = _FITTERS[family]
    except KeyError:
        raise InputError(f"unknown family {family!r}") from None

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        model, message = fitter(tail, float(x_min), max_iter)
        if model is None:
            return FitOutcome.failed(family, message)
        ll = model.loglik(tail)
    if not math.isfinite(ll):
        return FitOutcome.failed(family, "non-finite log-likelihood at optimum")
    return FitOutcome(family, model, ll, True)
