"""Modified Bessel function of the second kind, order one.

Two evaluation regions are used:

* ``x <= 2``: the ascending series for ``K1`` (log term times ``I1`` plus a
  digamma-weighted power series), evaluated as ``x*K1(x)`` so the ``1/x``
  pole never has to be formed.
* ``x > 2``: Steed's continued fraction (Temme's CF2) for ``K0`` and ``K1``,
  which is the large-argument form ``sqrt(pi/2x) e^-x`` times a correction
  that converges for every ``x > 2``.

Both regions are accurate to a few ulp.
"""

import math
import sys


__all__ = ["DomainError", "bessel_k1", "xi_k1_factor"]

_EULER_GAMMA = 0.57721566490153286061
_EPS = 1e-17
_MAXIT = 10000
_SERIES_CUTOFF = 2.0
_TINY = sys.float_info.min


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a model quantity."""


def _xk1_series(x):
    # x*K1(x) = 1 + x ln(x/2) I1(x) - (x^2/4) sum_k (psi(k+1)+psi(k+2)) q^k / (k!(k+1)!)
    q = 0.25 * x * x
    term = 1.0  # q^k / (k! (k+1)!)
    psi1 = -_EULER_GAMMA  # psi(k+1)
    psi2 = 1.0 - _EULER_GAMMA  # psi(k+2)
    i1_sum = 0.0
    psi_sum = 0.0
    k = 0
    while True:
        i1_sum += term
        psi_sum += (psi1 + psi2) * term
        k += 1
        term *= q / (k * (k + 1))
        psi1 += 1.0 / k
        psi2 += 1.0 / (k + 1)
        if term < _EPS * i1_sum:
            break
    i1 = 0.5 * x * i1_sum
    return 1.0 + x * math.log(0.5 * x) * i1 - q * psi_sum


def _k1_continued_fraction(x):
    # Steed's algorithm at order mu = 0; returns K1(x) for x > 2.
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(1, _MAXIT):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:  # pragma: no cover
        raise RuntimeError("K1 continued fraction did not converge")
    h *= a1
    k0 = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
    return k0 * (x + 0.5 - h) / x


def _check_finite(value, name):
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


def bessel_k1(x):
    """Modified Bessel function of the second kind of order one, ``K1(x)``.

    Parameters
    ----------
    x : float
        Positive, finite argument.

    Returns
    -------
    float
        ``K1(x)``. Values that would fall below the smallest normal double
        are returned as exactly ``0.0``.

    Raises
    ------
    DomainError
        If ``x <= 0``, NaN or infinite.

    Examples
    --------
    >>> round(bessel_k1(1.0), 12)
    0.601907230197
    """
    x = float(x)
    _check_finite(x, "x")
    if x <= 0.0:
        raise DomainError(f"K1 requires x > 0, got {x!r}")
    if x <= _SERIES_CUTOFF:
        return _xk1_series(x) / x
    value = _k1_continued_fraction(x)
    return value if value >= _TINY else 0.0


def xi_k1_factor(xi):
    """Composite factor ``sqrt(xi) * K1(sqrt(xi))``.

    Defined by continuity as 1 at ``xi = 0``; strictly decreasing towards 0
    as ``xi`` grows (returns 0 once ``K1`` underflows).
    """
    xi = float(xi)
    _check_finite(xi, "xi")
    if xi < 0.0:
        raise DomainError(f"xi must be nonnegative, got {xi!r}")
    if xi == 0.0:
        return 1.0
    x = math.sqrt(xi)
    if x <= _SERIES_CUTOFF:
        return min(_xk1_series(x), 1.0)
    return x * bessel_k1(x)


