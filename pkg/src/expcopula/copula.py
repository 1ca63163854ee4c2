"""The exponential FGM-type copula and an FGM baseline.

The copula is

    C(u, v) = u v + delta * (1 - exp(alpha (u - u^2))) * (1 - exp(alpha (v - v^2)))

with density ``1 + delta alpha^2 g(u) g(v)`` where
``g(t) = (1 - 2t) exp(alpha (t - t^2))``. It is a valid copula exactly
when ``|delta| <= delta_star(alpha)``. At ``alpha == 0`` it collapses to
the independence copula for every ``delta``.

All evaluation functions are vectorised over ``u`` and ``v`` and return
floats for scalar input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._exceptions import DomainError

__all__ = [
    "ALPHA_LIMIT",
    "CopulaParams",
    "delta_star",
    "cdf",
    "pdf",
    "conditional_cdf",
    "conditional_quantile",
    "sample",
    "fgm_cdf",
    "fgm_pdf",
]

ALPHA_LIMIT = 100.0
# relative slack on the feasibility bound so delta == delta_star survives round trips
_FEASIBILITY_SLACK = 1e-12
_BISECTION_STEPS = 64


def delta_star(alpha: float) -> float:
    """Largest ``|delta|`` for which the copula density stays nonnegative.

    ``1/alpha^2`` for ``alpha <= 2`` and ``exp(1 - alpha/2) / (2 alpha)``
    above; the two branches meet at ``alpha = 2`` with value 1/4.

    Raises
    ------
    DomainError
        For ``alpha == 0`` (every delta is admissible) or ``|alpha| > 100``.
    """
    alpha = float(alpha)
    if alpha == 0.0:
        raise DomainError("delta_star is unbounded at alpha = 0 (independence copula)")
    if not abs(alpha) <= ALPHA_LIMIT:
        raise DomainError(f"|alpha| must not exceed {ALPHA_LIMIT}, got {alpha}")
    if alpha <= 2.0:
        return 1.0 / (alpha * alpha)
    return math.exp(1.0 - 0.5 * alpha) / (2.0 * alpha)


def is_feasible(alpha: float, delta: float) -> bool:
    """Whether ``(alpha, delta)`` defines a valid copula."""
    alpha, delta = float(alpha), float(delta)
    if not (math.isfinite(alpha) and math.isfinite(delta)) or abs(alpha) > ALPHA_LIMIT:
        return False
    if alpha == 0.0:
        return True
    return abs(delta) <= delta_star(alpha) * (1.0 + _FEASIBILITY_SLACK)


@dataclass(frozen=True)
class CopulaParams:
    """Validated ``(alpha, delta)`` pair.

    ``delta`` is reset to 0 when ``alpha == 0`` since it has no effect there.
    """

    alpha: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        alpha, delta = float(self.alpha), float(self.delta)
        if not math.isfinite(alpha) or abs(alpha) > ALPHA_LIMIT:
            raise DomainError(f"alpha must be finite with |alpha| <= {ALPHA_LIMIT}, got {alpha}")
        if not math.isfinite(delta):
            raise DomainError(f"delta must be finite, got {delta}")
        if alpha == 0.0:
            delta = 0.0
        elif not is_feasible(alpha, delta):
            raise DomainError(
                f"delta={delta!r} is infeasible for alpha={alpha!r}: "
                f"|delta| must not exceed delta_star={delta_star(alpha):.6g}"
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "delta", delta)

    @property
    def is_independence(self) -> bool:
        return self.alpha == 0.0 or self.delta == 0.0

    @property
    def delta_bound(self) -> float:
        """``delta_star(alpha)``, or ``inf`` at ``alpha == 0``."""
        return math.inf if self.alpha == 0.0 else delta_star(self.alpha)


def _unit(name: str, t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(~((arr >= 0.0) & (arr <= 1.0))):
        raise DomainError(f"{name} must lie in [0, 1]")
    return arr


def _out(value: np.ndarray):
    return float(value) if np.ndim(value) == 0 else value


def _one_minus_exp(alpha: float, t: np.ndarray) -> np.ndarray:
    # 1 - exp(alpha (t - t^2)) without cancellation near t = 0, 1
    return -np.expm1(alpha * t * (1.0 - t))


def g(alpha: float, t) -> np.ndarray:
    """Density factor ``(1 - 2t) exp(alpha (t - t^2))``."""
    t = np.asarray(t, dtype=float)
    return (1.0 - 2.0 * t) * np.exp(alpha * t * (1.0 - t))


def cdf(p: CopulaParams, u, v):
    """Copula value ``C(u, v)``."""
    u, v = _unit("u", u), _unit("v", v)
    value = u * v + p.delta * (_one_minus_exp(p.alpha, u) * _one_minus_exp(p.alpha, v))
    return _out(value)


def pdf(p: CopulaParams, u, v):
    """Copula density ``1 + delta alpha^2 g(u) g(v)``."""
    u, v = _unit("u", u), _unit("v", v)
    a = p.alpha
    value = 1.0 + p.delta * a * a * ((1.0 - 2.0 * u) * (1.0 - 2.0 * v)) * np.exp(
        a * (u * (1.0 - u) + v * (1.0 - v))
    )
    return _out(value)


def conditional_cdf(p: CopulaParams, u, v):
    """``P(V <= v | U = u)``, the partial derivative of ``C`` in ``u``."""
    u, v = _unit("u", u), _unit("v", v)
    a = p.alpha
    value = v + p.delta * a * g(a, u) * np.expm1(a * v * (1.0 - v))
    return _out(value)


def conditional_quantile(p: CopulaParams, u, q):
    """Invert :func:`conditional_cdf` in ``v`` by bisection on ``[0, 1]``.

    Bisection is used because the conditional density may touch zero when
    ``|delta| == delta_star``. Sixty-four halvings bring the bracket below
    the float spacing; the endpoint with the smaller residual is returned.
    """
    u, q = np.broadcast_arrays(_unit("u", u), _unit("q", q))
    if p.is_independence:
        return _out(q.astype(float, copy=True))
    lo = np.zeros(q.shape)
    hi = np.ones(q.shape)
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        below = conditional_cdf(p, u, mid) < q
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    res_lo = np.abs(conditional_cdf(p, u, lo) - q)
    res_hi = np.abs(conditional_cdf(p, u, hi) - q)
    v = np.where(res_lo <= res_hi, lo, hi)
    v = np.where(q == 0.0, 0.0, np.where(q == 1.0, 1.0, v))
    return _out(v)


def sample(p: CopulaParams, n: int, rng_seed: int | None = None) -> np.ndarray:
    """Draw ``n`` pairs by conditional inversion.

    Returns an ``(n, 2)`` array of ``(u, v)``. The same seed always gives
    the same draws.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    rng = np.random.default_rng(rng_seed)
    u = rng.random(int(n))
    w = rng.random(int(n))
    v = np.asarray(conditional_quantile(p, u, w), dtype=float).reshape(u.shape)
    return np.column_stack([u, v])


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not abs(theta) <= 1.0:
        raise DomainError(f"FGM parameter must satisfy |theta| <= 1, got {theta}")
    return theta


def fgm_cdf(theta: float, u, v):
    """Farlie-Gumbel-Morgenstern copula ``uv (1 + theta (1-u)(1-v))``."""
    theta = _check_theta(theta)
    u, v = _unit("u", u), _unit("v", v)
    return _out(u * v + theta * u * v * (1.0 - u) * (1.0 - v))


def fgm_pdf(theta: float, u, v):
    theta = _check_theta(theta)
    u, v = _unit("u", u), _unit("v", v)
    return _out(1.0 + theta * (1.0 - 2.0 * u) * (1.0 - 2.0 * v))
