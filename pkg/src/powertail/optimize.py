"""Derivative-free Nelder-Mead simplex minimisation.

Used by the alternative tail models whose likelihoods have no closed-form
maximum. Convergence is declared when every vertex lies within
``xtol * max(1, |best|)`` of the best vertex in every coordinate.
Non-finite objective values are treated as +inf, so constraints can be
expressed by returning ``inf`` outside the feasible region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["SimplexResult", "nelder_mead"]


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    fun: float
    converged: bool
    iterations: int
    evaluations: int


def _safe(fun, x):
    value = fun(x)
    value = float(value)
    return value if math.isfinite(value) else math.inf


def nelder_mead(fun, x0, step, xtol=1e-8, max_iter=10_000):
    """Minimise ``fun`` starting from ``x0``.

    Parameters
    ----------
    fun : callable
        Maps a 1-d array to a float.
    x0 : array_like
        Starting vertex.
    step : array_like or float
        Offsets along each coordinate axis used to build the initial simplex.
    xtol : float
        Relative simplex diameter at which the search stops.
    max_iter : int
        Iteration budget; exhausting it yields ``converged=False``.

    Returns
    -------
    SimplexResult
    """
    x0 = np.asarray(x0, dtype=float)
    dim = x0.size
    step = np.broadcast_to(np.asarray(step, dtype=float), (dim,))

    simplex = np.empty((dim + 1, dim))
    simplex[0] = x0
    for i in range(dim):
        vertex = x0.copy()
        vertex[i] += step[i] if step[i] != 0 else 0.05
        simplex[i + 1] = vertex
    values = np.array([_safe(fun, v) for v in simplex])
    evaluations = dim + 1

    # standard coefficients: reflection, expansion, contraction, shrink
    rho, chi, gamma, sigma = 1.0, 2.0, 0.5, 0.5

    converged = False
    iteration = 0
    while iteration < max_iter:
        order = np.argsort(values, kind="stable")
        simplex = simplex[order]
        values = values[order]

        best = simplex[0]
        spread = np.max(np.abs(simplex[1:] - best))
        if math.isfinite(values[0]) and spread <= xtol * max(1.0, np.max(np.abs(best))):
            converged = True
            break
        iteration += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]

        xr = centroid + rho * (centroid - worst)
        fr = _safe(fun, xr)
        evaluations += 1
        if fr < values[0]:
            xe = centroid + chi * (xr - centroid)
            fe = _safe(fun, xe)
            evaluations += 1
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue

        if fr < values[-1]:
            xc = centroid + gamma * (xr - centroid)
            fc = _safe(fun, xc)
            evaluations += 1
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                continue
        else:
            xc = centroid - gamma * (centroid - worst)
            fc = _safe(fun, xc)
            evaluations += 1
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
                continue

        for i in range(1, dim + 1):
            simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
            values[i] = _safe(fun, simplex[i])
        evaluations += dim

    order = np.argsort(values, kind="stable")
    return SimplexResult(
        x=simplex[order[0]].copy(),
        fun=float(values[order[0]]),
        converged=converged,
        iterations=iteration,
        evaluations=evaluations,
    )
