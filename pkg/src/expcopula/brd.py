"""Bivariate Rayleigh distribution (BRD) built on the copula.

``X ~ Rayleigh(lambda1)`` and ``Y ~ Rayleigh(lambda2)`` are coupled by
the copula, so ``F(x, y) = C(F1(x), F2(y))`` and
``f(x, y) = f1(x) f2(y) c(F1(x), F2(y))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from . import copula as cop
from ._exceptions import DomainError, TruncationError
from .copula import CopulaParams
from .special import AccuracyBudget, ln_gamma

__all__ = [
    "BrdParams",
    "MomentOrder",
    "rayleigh_cdf",
    "rayleigh_pdf",
    "rayleigh_logpdf",
    "rayleigh_quantile",
    "joint_cdf",
    "joint_pdf",
    "joint_log_pdf",
    "conditional_pdf",
    "conditional_cdf_brd",
    "moment_series",
    "product_moment",
    "sample_brd",
]

MAX_MOMENT_ORDER = 10


@dataclass(frozen=True)
class BrdParams:
    lambda1: float
    lambda2: float
    alpha: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("lambda1", "lambda2"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a finite positive scale, got {value}")
            object.__setattr__(self, name, value)
        # validates feasibility and normalises delta at alpha == 0
        c = CopulaParams(self.alpha, self.delta)
        object.__setattr__(self, "alpha", c.alpha)
        object.__setattr__(self, "delta", c.delta)

    @property
    def copula(self) -> CopulaParams:
        return CopulaParams(self.alpha, self.delta)

    def as_dict(self) -> dict:
        return {"lambda1": self.lambda1, "lambda2": self.lambda2, "alpha": self.alpha, "delta": self.delta}


@dataclass(frozen=True)
class MomentOrder:
    r: int
    s: int

    def __post_init__(self) -> None:
        r, s = self.r, self.s
        if int(r) != r or int(s) != s or r < 0 or s < 0 or r + s < 1:
            raise DomainError(f"moment order needs integers r, s >= 0 with r + s >= 1, got ({r}, {s})")
        if r + s > MAX_MOMENT_ORDER:
            raise DomainError(f"moments beyond r + s = {MAX_MOMENT_ORDER} are not supported")


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def _check_scale(lam: float) -> float:
    lam = float(lam)
    if not (math.isfinite(lam) and lam > 0):
        raise DomainError(f"Rayleigh scale must be positive, got {lam}")
    return lam


def _nonneg(name: str, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr >= 0.0)):
        raise DomainError(f"{name} must be nonnegative")
    return arr


def rayleigh_cdf(x, lam: float):
    """``1 - exp(-x^2 / (2 lam^2))``."""
    lam = _check_scale(lam)
    x = _nonneg("x", x)
    return _out(-np.expm1(-0.5 * (x / lam) ** 2))


def rayleigh_pdf(x, lam: float):
    lam = _check_scale(lam)
    x = _nonneg("x", x)
    z = x / lam
    return _out(z / lam * np.exp(-0.5 * z * z))


def rayleigh_logpdf(x, lam: float):
    lam = _check_scale(lam)
    x = _nonneg("x", x)
    z = x / lam
    with np.errstate(divide="ignore"):
        return _out(np.log(z) - math.log(lam) - 0.5 * z * z)


def rayleigh_quantile(p, lam: float):
    """``lam * sqrt(-2 log(1 - p))`` for ``p`` in ``[0, 1)``."""
    lam = _check_scale(lam)
    p = np.asarray(p, dtype=float)
    if np.any(~((p >= 0.0) & (p < 1.0))):
        raise DomainError("Rayleigh quantile needs p in [0, 1)")
    return _out(lam * np.sqrt(-2.0 * np.log1p(-p)))


def joint_cdf(p: BrdParams, x, y):
    return cop.cdf(p.copula, rayleigh_cdf(x, p.lambda1), rayleigh_cdf(y, p.lambda2))


def _copula_factor(p: BrdParams, zx: np.ndarray, zy: np.ndarray) -> np.ndarray:
    """``delta alpha^2 g(F1) g(F2)`` written in terms of ``z = x^2 / (2 lambda^2)``.

    With ``S = exp(-z)`` we have ``1 - 2F = 2S - 1`` and ``F (1 - F) = S (1 - S)``,
    which avoids forming ``F`` (and losing digits) in the upper tail.
    """
    a = p.alpha
    sx, sy = np.exp(-zx), np.exp(-zy)
    gx = (2.0 * sx - 1.0) * np.exp(a * sx * -np.expm1(-zx))
    gy = (2.0 * sy - 1.0) * np.exp(a * sy * -np.expm1(-zy))
    return p.delta * a * a * gx * gy


def joint_log_pdf(p: BrdParams, x, y):
    """Log of the joint density; ``-inf`` where the density vanishes."""
    x, y = np.broadcast_arrays(_nonneg("x", x), _nonneg("y", y))
    zx = 0.5 * (x / p.lambda1) ** 2
    zy = 0.5 * (y / p.lambda2) ** 2
    with np.errstate(divide="ignore"):
        base = rayleigh_logpdf(x, p.lambda1) + rayleigh_logpdf(y, p.lambda2)
        correction = np.log1p(np.maximum(_copula_factor(p, zx, zy), -1.0))
    return _out(base + correction)


def joint_pdf(p: BrdParams, x, y):
    x, y = np.broadcast_arrays(_nonneg("x", x), _nonneg("y", y))
    zx = 0.5 * (x / p.lambda1) ** 2
    zy = 0.5 * (y / p.lambda2) ** 2
    marg = rayleigh_pdf(x, p.lambda1) * rayleigh_pdf(y, p.lambda2)
    return _out(marg * (1.0 + _copula_factor(p, zx, zy)))


def conditional_pdf(p: BrdParams, x, given_y):
    """Density of ``X`` given ``Y = given_y``."""
    x, y = np.broadcast_arrays(_nonneg("x", x), _nonneg("given_y", given_y))
    zx = 0.5 * (x / p.lambda1) ** 2
    zy = 0.5 * (y / p.lambda2) ** 2
    return _out(rayleigh_pdf(x, p.lambda1) * (1.0 + _copula_factor(p, zx, zy)))


def conditional_cdf_brd(p: BrdParams, x, given_y):
    """``P(X <= x | Y = given_y)``.

    Equals ``F1(x) + delta alpha (e^{alpha F1 (1 - F1)} - 1) g(F2(y))``,
    i.e. the copula's conditional CDF with the roles of ``u`` and ``v``
    exchanged (the copula is symmetric).
    """
    u = rayleigh_cdf(x, p.lambda1)
    v = rayleigh_cdf(given_y, p.lambda2)
    return cop.conditional_cdf(p.copula, v, u)


def _series_dps(budget: AccuracyBudget) -> int:
    # binomial terms reach 2^k in size; carry enough digits to absorb it
    return 30 + math.ceil(budget.max_terms * math.log10(2.0))


@lru_cache(maxsize=256)
def moment_series(alpha: float, m: int, budget: AccuracyBudget = AccuracyBudget()) -> float:
    """The scale-free sum ``S_m`` of the product-moment expansion.

    ``S_m = sum_k alpha^k/k! sum_t (-1)^t C(k, t) (2 (k+t+2)^{-(m+2)/2} - (k+t+1)^{-(m+2)/2})``

    so that ``E(X^r Y^s) = M_r M_s (1 + delta alpha^2 S_r S_s)`` with
    ``M_r`` the Rayleigh marginal moment. The inner alternating binomial
    sum cancels heavily, so it runs in extended precision. ``S_0`` is
    exactly zero by the symmetry of ``g`` about 1/2.

    Raises
    ------
    TruncationError
        If ``budget.max_terms`` terms do not bring the term size below
        ``budget.abs_tol``.
    """
    if m == 0:
        return 0.0
    with mpmath.workdps(_series_dps(budget)):
        a = mpmath.mpf(alpha)
        expo = -mpmath.mpf(m + 2) / 2
        total = mpmath.mpf(0)
        coef = mpmath.mpf(1)  # alpha^k / k!
        for k in range(budget.max_terms):
            if k:
                coef = coef * a / k
            inner = mpmath.fsum(
                (-1) ** t * mpmath.binomial(k, t) * (2 * mpmath.power(k + t + 2, expo) - mpmath.power(k + t + 1, expo))
                for t in range(k + 1)
            )
            term = coef * inner
            total += term
            if k > abs(alpha) and abs(term) < budget.abs_tol:
                return float(total)
    raise TruncationError(
        f"product-moment series for alpha={alpha}, m={m} did not converge in {budget.max_terms} terms"
    )


def product_moment(p: BrdParams, order: MomentOrder, budget: AccuracyBudget = AccuracyBudget()) -> float:
    """``E(X^r Y^s)`` from the series expansion."""
    r, s = int(order.r), int(order.s)
    prefactor = (
        p.lambda1**r
        * p.lambda2**s
        * 2.0 ** ((r + s) / 2.0)
        * math.exp(ln_gamma(1.0 + r / 2.0) + ln_gamma(1.0 + s / 2.0))
    )
    if p.copula.is_independence or r == 0 or s == 0:
        return prefactor
    a = p.alpha
    return prefactor * (1.0 + p.delta * a * a * moment_series(a, r, budget) * moment_series(a, s, budget))


def sample_brd(p: BrdParams, n: int, rng_seed: int | None = None) -> np.ndarray:
    """``(n, 2)`` draws of ``(x, y)`` via copula samples and marginal quantiles."""
    uv = cop.sample(p.copula, n, rng_seed)
    x = rayleigh_quantile(uv[:, 0], p.lambda1)
    y = rayleigh_quantile(uv[:, 1], p.lambda2)
    return np.column_stack([x, y])
