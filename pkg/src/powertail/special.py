"""Upper incomplete gamma function for arbitrary real shape.

The normalising constant of the power law with exponential cut-off is
``lambda**(alpha-1) * Gamma(1-alpha, lambda*x_min)``, and ``1 - alpha`` is
usually negative. ``scipy.special.gammaincc`` only accepts a positive shape
(and loses accuracy as the shape approaches 0), so shapes below 1 are handled
here with

* a Lentz continued fraction when ``z >= 1``;
* for ``z < 1``, the split ``Gamma(a, z) = Gamma(a, 1) + int_z^1 t**(a-1) e**-t dt``
  where the finite integral is expanded term by term from the exponential
  series (no special case is needed at non-positive integer ``a``);
* adaptive quadrature of a rescaled integrand for very negative shapes or
  when ``z**a`` would overflow.

All public functions work in log space to survive the large magnitudes that
appear as ``z -> 0``.
"""

from __future__ import annotations

import math

from scipy import integrate, special

__all__ = ["log_upper_gamma", "upper_gamma"]

_EPS = 1e-16
_FPMIN = 1e-300
_MAX_TERMS = 500
_QUAD_SHAPE_LIMIT = -50.0
_LOG_OVERFLOW = 700.0


def _gamma_cf(a, z):
    """Continued fraction part ``h`` with ``Gamma(a, z) = z**a e**-z h``.

    Converges for every real ``a`` when ``z > 0``; quickly once ``z >= 1``.
    """
    b = z + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_TERMS + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"continued fraction for Gamma({a}, {z}) did not converge")


def _partial_integral(a, z):
    """``int_z^1 t**(a-1) e**-t dt`` for ``0 < z < 1`` and any real ``a``."""
    log_z = math.log(z)
    total = 0.0
    inv_fact = 1.0
    for k in range(_MAX_TERMS):
        s = a + k
        if abs(s) < 1e-150:
            g = -log_z  # limit as s -> 0; avoids denormal s * log_z
        else:
            g = -math.expm1(s * log_z) / s
        term = inv_fact * g
        total += term if k % 2 == 0 else -term
        # terms decrease monotonically once s > 0
        if s > 0 and abs(term) <= _EPS * abs(total):
            return total
        inv_fact /= k + 1
    raise ArithmeticError(f"series for Gamma({a}, {z}) did not converge")


def _log_upper_gamma_quad(a, z):
    """Quadrature of ``Gamma(a, z) = z**a e**-z int_0^inf (1+u)**(a-1) e**(-z u) du``.

    The integrand falls off like ``exp(-(z + 1 - a) u)`` near the origin, so
    ``u`` is rescaled by that rate to keep the integral O(1).
    """
    rate = z + 1.0 - a
    value, _ = integrate.quad(
        lambda w: math.exp((a - 1.0) * math.log1p(w / rate) - z * w / rate),
        0.0,
        math.inf,
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )
    return a * math.log(z) - z + math.log(value / rate)


def log_upper_gamma(a, z):
    """Natural log of the upper incomplete gamma function ``Gamma(a, z)``.

    Parameters
    ----------
    a : float
        Shape, any real number.
    z : float
        Lower integration limit, ``z > 0`` (``z == 0`` allowed for ``a > 0``).
    """
    a = float(a)
    z = float(z)
    if z < 0 or math.isnan(z):
        raise ValueError(f"upper gamma needs z >= 0, got {z}")
    if z == 0.0:
        if a > 0:
            return special.gammaln(a)
        return math.inf

    if a >= 1.0:
        q = special.gammaincc(a, z)
        if q > 1e-280:
            return math.log(q) + special.gammaln(a)
        return a * math.log(z) - z + math.log(_gamma_cf(a, z))

    if a < _QUAD_SHAPE_LIMIT:
        return _log_upper_gamma_quad(a, z)
    if z >= 1.0:
        return a * math.log(z) - z + math.log(_gamma_cf(a, z))
    if a * math.log(z) > _LOG_OVERFLOW:
        return _log_upper_gamma_quad(a, z)
    at_one = math.exp(-1.0) * _gamma_cf(a, 1.0)
    return math.log(at_one + _partial_integral(a, z))


def upper_gamma(a, z):
    """Upper incomplete gamma ``Gamma(a, z) = int_z^inf t**(a-1) e**-t dt``."""
    return math.exp(log_upper_gamma(a, z))
