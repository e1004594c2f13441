"""Compiled inner loops for the x_min scan and the two bootstraps.

Every kernel releases the GIL so replicate chunks can run on a thread pool.
Each replicate reseeds the (per-thread) numba generator from its own seed, so
a replicate's draws never depend on which thread ran it.

Arithmetic conventions (the brute-force reference in the tests relies on
them being exactly these):

* logs are taken once per observation, ``lx[j] = log(x[j])``;
* ``alpha = 1 + n_tail / sum_j (lx[j] - lx[i])``, summed in ascending order;
* model CDF ``P_j = 1 - exp((1 - alpha) * (lx[j] - lx[i]))``;
* the empirical CDF edges at tail position ``k`` are ``k / n_tail`` and
  ``(k + 1) / n_tail``.
"""

import math

import numpy as np
from numba import njit

_CACHE = True


@njit(cache=_CACHE, nogil=True)
def alpha_at(x_sorted, x_min):
    """MLE of alpha on the sorted values ``>= x_min``; NaN when undefined."""
    n = x_sorted.size
    start = np.searchsorted(x_sorted, x_min)
    nt = n - start
    if nt < 1:
        return math.nan
    lmin = math.log(x_min)
    s = 0.0
    for j in range(start, n):
        s += math.log(x_sorted[j]) - lmin
    if s <= 0.0:
        return math.nan
    return 1.0 + nt / s


@njit(cache=_CACHE, nogil=True)
def ks_at(x_sorted, alpha, x_min):
    """KS distance between the tail (values >= x_min) and a power law."""
    n = x_sorted.size
    start = np.searchsorted(x_sorted, x_min)
    nt = n - start
    if nt < 1:
        return math.nan
    lmin = math.log(x_min)
    e = 1.0 - alpha
    d = 0.0
    for j in range(start, n):
        p = 1.0 - math.exp(e * (math.log(x_sorted[j]) - lmin))
        k = j - start
        lo = abs(p - k / nt)
        hi = abs((k + 1) / nt - p)
        if lo > d:
            d = lo
        if hi > d:
            d = hi
    return d


@njit(cache=_CACHE, nogil=True)
def scan_xmin(x_sorted, min_tail):
    """Scan unique observed values as x_min candidates.

    Returns ``(index, alpha, ks)`` of the candidate with the smallest KS
    distance (the first, i.e. smallest x_min, on ties). ``index`` is -1 when
    no candidate yields a finite estimate.

    A candidate's KS loop stops as soon as its running maximum reaches the
    best KS so far, since it can no longer win; the winner's KS is always
    evaluated in full.
    """
    n = x_sorted.size
    lx = np.empty(n)
    for j in range(n):
        lx[j] = math.log(x_sorted[j])
    best_i = -1
    best_alpha = math.nan
    best_ks = math.inf
    for i in range(n - min_tail + 1):
        if i > 0 and x_sorted[i] == x_sorted[i - 1]:
            continue
        nt = n - i
        s = 0.0
        for j in range(i, n):
            s += lx[j] - lx[i]
        if s <= 0.0:
            continue
        alpha = 1.0 + nt / s
        e = 1.0 - alpha
        d = 0.0
        for j in range(i, n):
            p = 1.0 - math.exp(e * (lx[j] - lx[i]))
            k = j - i
            lo = abs(p - k / nt)
            hi = abs((k + 1) / nt - p)
            if lo > d:
                d = lo
            if hi > d:
                d = hi
            if d >= best_ks:
                break
        if d < best_ks:
            best_ks = d
            best_i = i
            best_alpha = alpha
    return best_i, best_alpha, best_ks


@njit(cache=_CACHE, nogil=True)
def _fit_sample(x, min_tail, fixed_xmin):
    """(alpha, x_min, ks) for one synthetic sample; NaNs on failure."""
    x.sort()
    if fixed_xmin > 0.0:
        alpha = alpha_at(x, fixed_xmin)
        if math.isnan(alpha) or x.size - np.searchsorted(x, fixed_xmin) < 2:
            return math.nan, math.nan, math.nan
        return alpha, fixed_xmin, ks_at(x, alpha, fixed_xmin)
    if x.size < min_tail:
        return math.nan, math.nan, math.nan
    i, alpha, ks = scan_xmin(x, min_tail)
    if i < 0:
        return math.nan, math.nan, math.nan
    return alpha, x[i], ks


@njit(cache=_CACHE, nogil=True)
def resample_fits(values, seeds, min_tail, fixed_xmin, out_alpha, out_xmin):
    """Nonparametric bootstrap: refit each with-replacement resample of ``values``."""
    n = values.size
    buf = np.empty(n)
    for r in range(seeds.size):
        np.random.seed(seeds[r])
        for j in range(n):
            buf[j] = values[np.random.randint(0, n)]
        alpha, xmin, _ = _fit_sample(buf, min_tail, fixed_xmin)
        out_alpha[r] = alpha
        out_xmin[r] = xmin


@njit(cache=_CACHE, nogil=True)
def semiparametric_ks(body, n, p_tail, alpha, x_min, seeds, min_tail, fixed_xmin, out_ks):
    """KS statistics of refits to semi-parametric synthetic datasets.

    Each synthetic observation is, with probability ``p_tail``, a power-law
    draw above ``x_min`` and otherwise a uniform pick from ``body``.
    """
    nb = body.size
    buf = np.empty(n)
    expo = -1.0 / (alpha - 1.0)
    for r in range(seeds.size):
        np.random.seed(seeds[r])
        for j in range(n):
            if nb == 0 or np.random.random() < p_tail:
                buf[j] = x_min * (1.0 - np.random.random()) ** expo
            else:
                buf[j] = body[np.random.randint(0, nb)]
        _, _, ks = _fit_sample(buf, min_tail, fixed_xmin)
        out_ks[r] = ks
