"""Real special functions used by the closed-form measures and tests.

``erf`` and ``ln_gamma`` delegate to the C library through :mod:`math`.
``erfi`` is evaluated with a compensated Maclaurin series on ``|x| <= 3``
and through Dawson's integral above that, where the series terms would
grow too large to sum accurately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import dawsn

from ._exceptions import DomainError

__all__ = [
    "AccuracyBudget",
    "erf",
    "erfi",
    "ln_gamma",
    "kolmogorov_sf",
]

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_ERFI_SERIES_LIMIT = 3.0
_ERFI_MAX_ARG = 12.0


@dataclass(frozen=True)
class AccuracyBudget:
    """Truncation policy for the infinite series in this package.

    Parameters
    ----------
    abs_tol : float
        Terms smaller than this in absolute value end the summation.
    max_terms : int
        Hard cap on the number of terms.
    """

    abs_tol: float = 1e-12
    max_terms: int = 200

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")


def erf(x: float) -> float:
    """Error function ``(2/sqrt(pi)) * int_0^x exp(-z^2) dz``."""
    x = float(x)
    if not math.isfinite(x):
        if math.isnan(x):
            raise DomainError("erf argument is NaN")
        return math.copysign(1.0, x)
    return math.erf(x)


def _erfi_series(x: float) -> float:
    # sum_n x^(2n+1) / (n! (2n+1)); all terms share the sign of x
    x2 = x * x
    power = x
    terms = [x]
    n = 0
    while True:
        n += 1
        power *= x2 / n
        term = power / (2 * n + 1)
        terms.append(term)
        if abs(term) <= 1e-17 * abs(terms[0]) or abs(term) < 1e-300:
            break
    return _TWO_OVER_SQRT_PI * math.fsum(terms)


def erfi(x: float) -> float:
    """Imaginary error function ``(2/sqrt(pi)) * int_0^x exp(z^2) dz``.

    Raises
    ------
    DomainError
        If ``|x| > 12``; the result would exceed ~1e61 and callers in this
        package never need it.
    """
    x = float(x)
    if math.isnan(x) or abs(x) > _ERFI_MAX_ARG:
        raise DomainError(f"erfi is only supported on |x| <= {_ERFI_MAX_ARG}, got {x}")
    if x == 0.0:
        return 0.0
    ax = abs(x)
    if ax <= _ERFI_SERIES_LIMIT:
        value = _erfi_series(ax)
    else:
        value = _TWO_OVER_SQRT_PI * math.exp(ax * ax) * float(dawsn(ax))
    return math.copysign(value, x)


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"ln_gamma requires a finite x > 0, got {x}")
    return math.lgamma(x)


def kolmogorov_sf(d: float, n: int) -> float:
    """Asymptotic survival function of the one-sample KS statistic.

    Returns ``P(D_n > d)`` approximated by the limiting Kolmogorov law at
    ``t = d * sqrt(n)``::

        Q(t) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 t^2)

    No finite-sample correction is applied. For ``t < 1`` the alternating
    series converges slowly, so the equivalent Jacobi theta form of the
    limiting CDF is summed instead.

    Parameters
    ----------
    d : float
        Observed statistic, in ``[0, 1]``.
    n : int
        Sample size, ``n >= 1``.
    """
    d = float(d)
    if not 0.0 <= d <= 1.0:
        raise DomainError(f"KS statistic must lie in [0, 1], got {d}")
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n}")
    t = d * math.sqrt(n)
    if t == 0.0:
        return 1.0
    if t < 1.0:
        # K(t) = sqrt(2 pi)/t * sum_k exp(-(2k-1)^2 pi^2 / (8 t^2))
        scale = math.pi**2 / (8.0 * t * t)
        terms = []
        k = 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * scale)
            terms.append(term)
            if term < 1e-17:
                break
            k += 1
        cdf = math.sqrt(2.0 * math.pi) / t * math.fsum(terms)
        return min(1.0, max(0.0, 1.0 - cdf))
    terms = []
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * t * t)
        terms.append(term if k % 2 else -term)
        if term < 1e-12:
            break
        k += 1
    return min(1.0, max(0.0, 2.0 * math.fsum(terms)))
