"""Bessel functions J0, J1 and the positive zeros of J0.

Small and moderate arguments use the ascending power series summed in
50-digit decimal arithmetic (the alternating terms reach ~1e9 near
|x| = 25, far beyond what double precision can cancel). Large arguments use
the Hankel asymptotic expansion, whose optimally truncated error is of
order exp(-2|x|).
"""

import math
from decimal import Decimal, localcontext

from .errors import DomainError

SERIES_LIMIT = 25.0
_PRECISION = 50


def _check(x):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"Bessel argument must be finite, got {x!r}")
    return x


def _series(x, order):
    # J_order(x) = (x/2)^order * sum_k (-x^2/4)^k / (k! (k+order)!)
    with localcontext() as ctx:
        ctx.prec = _PRECISION
        half = Decimal(x) / 2
        q = -half * half
        term = Decimal(1)
        for j in range(1, order + 1):
            term = term * half / j
        total = term
        eps = Decimal(10) ** (-(_PRECISION - 5))
        k = 0
        while True:
            k += 1
            term = term * q / (k * (k + order))
            total += term
            if abs(term) < eps and k > abs(x):
                break
        return float(total)


def _hankel(x, order):
    mu = 4.0 * order * order
    p, q = 1.0, 0.0
    a = 1.0
    prev = math.inf
    k = 1
    while True:
        a *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(a) >= prev or abs(a) < 1e-18:
            break
        prev = abs(a)
        if k % 2:
            q += a if (k // 2) % 2 == 0 else -a
        else:
            p += -a if (k // 2) % 2 else a
        k += 1
    chi = x - (0.5 * order + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def bessel_j0(x):
    """Bessel function of the first kind of order 0."""
    x = abs(_check(x))
    if x <= SERIES_LIMIT:
        return _series(x, 0)
    return _hankel(x, 0)


def bessel_j1(x):
    """Bessel function of the first kind of order 1 (odd in x)."""
    x = _check(x)
    sign = -1.0 if x < 0 else 1.0
    x = abs(x)
    if x <= SERIES_LIMIT:
        return sign * _series(x, 1)
    return sign * _hankel(x, 1)


def j0_zero(k, xtol=1e-13):
    """k-th positive zero of J0 (k = 1, 2, ...), by bisection.

    The k-th zero lies in ((k - 1/2) pi, k pi), which brackets exactly one
    sign change since consecutive zeros are about pi apart.
    """
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f"zero index must be a positive integer, got {k!r}")
    k = int(k)
    lo, hi = (k - 0.5) * math.pi, k * math.pi
    flo = bessel_j0(lo)
    if flo * bessel_j0(hi) > 0:
        raise DomainError(f"bracket for zero {k} does not enclose a sign change")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fmid = bessel_j0(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def first_eigenvalue_ref():
    """Closed-form first Dirichlet eigenvalue of the unit disk, j0_1**2."""
    return j0_zero(1) ** 2


def phi1_ref(r):
    """Closed-form L2(B)-normalized first eigenfunction at radius r."""
    j = j0_zero(1)
    c = 1.0 / (math.sqrt(math.pi) * abs(bessel_j1(j)))
    return c * bessel_j0(j * r)
