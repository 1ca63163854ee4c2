"""Dependence measures and dependence-property checks for the copula.

Closed forms exist for Spearman's rho and Gini's gamma; Kendall's tau,
Blest's eta and Spearman's footrule follow from them through the linear
identities ``eta = rho = 1.5 tau`` and ``phi = 0.75 gamma``. The
quadrature oracle evaluates all five integrals directly and is kept
independent of the closed forms so the two can be checked against each
other.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy import stats
from scipy.optimize import minimize_scalar

from . import copula as cop
from ._exceptions import DataError, DomainError
from .copula import CopulaParams
from .quadrature import QuadratureSpec, gauss_legendre, refine
from .special import erf, erfi

__all__ = [
    "TABLE1_ALPHAS",
    "DependenceReport",
    "Table1Row",
    "QuadrantReport",
    "Tp2Report",
    "TailProbe",
    "spearman_rho_closed",
    "gini_gamma_closed",
    "related_measures",
    "measure_oracle",
    "fgm_measure_oracle",
    "empirical_measures",
    "table1",
    "range_comparison",
    "max_spearman_rho",
    "check_quadrant_dependence",
    "check_tp2",
    "tail_dependence_probe",
]

TABLE1_ALPHAS: tuple[float, ...] = (
    -3.0, -2.7, -2.4, -2.1, -1.8, -1.5, -1.2, -0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9,
    1.2, 1.5, 1.8, 2.0, 2.3, 2.6, 2.9, 3.2, 3.5, 3.8, 4.1, 4.4, 4.7, 5.0,
)

# Published Spearman-rho ranges of other FGM extensions, quoted for comparison only.
PUBLISHED_RHO_RANGES: tuple[tuple[str, float, float], ...] = (
    ("Huang-Kotz (type I)", -0.33, 0.375),
    ("Huang-Kotz (type II)", -0.33, 0.391),
    ("Bairamov-Kotz", -0.48, 0.502),
    ("Bekrizadeh et al.", -0.50, 0.43),
    ("polynomial-sine", -0.4927, 0.4927),
)

_MEASURES = ("rho", "gamma", "tau", "eta", "phi")


@dataclass(frozen=True)
class DependenceReport:
    """The five rank-based dependence measures.

    Fields that a method cannot produce (e.g. Gini's gamma from the
    empirical estimator) are ``None``.
    """

    rho: float | None
    gamma: float | None
    tau: float | None
    eta: float | None
    phi: float | None
    method: str

    def as_dict(self) -> dict:
        return asdict(self)

    def values(self) -> np.ndarray:
        return np.array([np.nan if getattr(self, m) is None else getattr(self, m) for m in _MEASURES])


def _bracket(alpha: float) -> tuple[float, float]:
    """Return ``sqrt(pi/|a|) e^{a/4} F(sqrt|a|/2)`` and ``sqrt(pi/(2|a|)) e^{a/2} F(sqrt(|a|/2))``.

    ``F`` is erf for ``a > 0`` and erfi for ``a < 0``.
    """
    f = erf if alpha > 0 else erfi
    s = abs(alpha)
    first = math.sqrt(math.pi / s) * math.exp(alpha / 4.0) * f(math.sqrt(s) / 2.0)
    second = math.sqrt(math.pi / (2.0 * s)) * math.exp(alpha / 2.0) * f(math.sqrt(s / 2.0))
    return first, second


def spearman_rho_closed(p: CopulaParams) -> float:
    """Spearman's rho, ``12 delta [1 - sqrt(pi/|a|) e^{a/4} F(sqrt|a|/2)]^2``."""
    if p.is_independence:
        return 0.0
    first, _ = _bracket(p.alpha)
    return 12.0 * p.delta * (1.0 - first) ** 2


def gini_gamma_closed(p: CopulaParams) -> float:
    """Gini's gamma in closed form (erf branch for ``alpha > 0``, erfi below)."""
    if p.is_independence:
        return 0.0
    first, second = _bracket(p.alpha)
    return 8.0 * p.delta * (1.0 - 2.0 * first + second)


def related_measures(p: CopulaParams) -> DependenceReport:
    rho = spearman_rho_closed(p)
    gamma = gini_gamma_closed(p)
    return DependenceReport(
        rho=rho, gamma=gamma, tau=2.0 * rho / 3.0, eta=rho, phi=0.75 * gamma, method="closed_form"
    )


def _integrals(cdf, density, spec: QuadratureSpec) -> np.ndarray:
    """All five measures from a copula ``cdf`` and ``density`` at one rule."""
    x, w = gauss_legendre(spec.nodes_per_axis, 0.0, 1.0, spec.panels)
    U, V = np.meshgrid(x, x, indexing="ij")
    C = cdf(U, V)
    c = density(U, V)
    rho = 12.0 * (w @ C @ w) - 3.0
    tau = 4.0 * (w @ (C * c) @ w) - 1.0
    eta = 24.0 * (w @ ((1.0 - U) * C) @ w) - 2.0
    diag = cdf(x, x)
    anti = cdf(x, 1.0 - x)
    gamma = 4.0 * (w @ anti - w @ (x - diag))
    phi = 6.0 * (w @ diag) - 2.0
    return np.array([rho, gamma, tau, eta, phi])


def measure_oracle(p: CopulaParams, spec: QuadratureSpec = QuadratureSpec()) -> DependenceReport:
    """Evaluate the five defining integrals by Gauss-Legendre quadrature.

    Kendall's tau uses ``4 int int C c du dv - 1``, valid because the
    copula is absolutely continuous.

    Raises
    ------
    ToleranceError
        If doubling the node count moves any measure by more than
        ``spec.abs_tol``.
    """
    values = refine(
        lambda s: _integrals(lambda u, v: cop.cdf(p, u, v), lambda u, v: cop.pdf(p, u, v), s), spec
    )
    return DependenceReport(*map(float, values), method="quadrature")


def fgm_measure_oracle(theta: float, spec: QuadratureSpec = QuadratureSpec()) -> DependenceReport:
    """Quadrature measures of the FGM copula, the range baseline."""
    values = refine(
        lambda s: _integrals(lambda u, v: cop.fgm_cdf(theta, u, v), lambda u, v: cop.fgm_pdf(theta, u, v), s),
        spec,
    )
    return DependenceReport(*map(float, values), method="quadrature")


def empirical_measures(data) -> DependenceReport:
    """Sample Spearman's rho and Kendall's tau of paired observations.

    Only ``rho`` and ``tau`` are filled. Kendall's tau is the tie-adjusted
    tau-b computed by an O(n log n) merge count.
    """
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DataError(f"expected an (n, 2) array of pairs, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise DataError("at least two pairs are needed")
    x, y = arr[:, 0], arr[:, 1]
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DataError("a column is constant; rank correlations are undefined")
    rho = float(stats.spearmanr(x, y).statistic)
    tau = float(stats.kendalltau(x, y).statistic)
    return DependenceReport(rho=rho, gamma=None, tau=tau, eta=None, phi=None, method="empirical")


class Table1Row(NamedTuple):
    alpha: float
    delta_upper: float
    rho_upper: float
    gamma_upper: float


def table1(alpha_list: Iterable[float] = TABLE1_ALPHAS) -> list[Table1Row]:
    """Upper dependence range of the copula at each ``alpha``.

    At ``alpha == 0`` the row is all zeros (independence copula).
    """
    rows = []
    for alpha in alpha_list:
        alpha = float(alpha)
        if alpha == 0.0:
            rows.append(Table1Row(0.0, 0.0, 0.0, 0.0))
            continue
        bound = cop.delta_star(alpha)
        p = CopulaParams(alpha, bound)
        rows.append(Table1Row(alpha, bound, spearman_rho_closed(p), gini_gamma_closed(p)))
    return rows


def max_spearman_rho() -> tuple[float, float]:
    """``(alpha, rho)`` maximising the upper Spearman rho over ``alpha > 0``."""
    res = minimize_scalar(
        lambda a: -spearman_rho_closed(CopulaParams(a, cop.delta_star(a))),
        bounds=(0.5, 10.0),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(res.x), float(-res.fun)


def range_comparison() -> list[dict]:
    """Spearman-rho ranges of this copula, FGM and published FGM extensions."""
    fgm = fgm_measure_oracle(1.0).rho
    alpha_max, rho_max = max_spearman_rho()
    rows = [
        {"family": "FGM", "rho_min": -fgm, "rho_max": fgm, "source": "quadrature"},
        *(
            {"family": name, "rho_min": lo, "rho_max": hi, "source": "published"}
            for name, lo, hi in PUBLISHED_RHO_RANGES
        ),
        {
            "family": "exponential FGM-type (this package)",
            "rho_min": -rho_max,
            "rho_max": rho_max,
            "source": f"closed form, maximised at alpha={alpha_max:.4f}",
        },
    ]
    return rows


def _interior_grid(grid_n: int) -> np.ndarray:
    if int(grid_n) != grid_n or grid_n < 2:
        raise DomainError(f"grid_n must be an integer >= 2, got {grid_n}")
    return np.linspace(0.0, 1.0, int(grid_n) + 2)[1:-1]


@dataclass(frozen=True)
class QuadrantReport:
    """Outcome of the quadrant-dependence grid check.

    ``verdict`` is read off the grid: ``"PQD"``, ``"NQD"``,
    ``"independent"`` or ``"mixed"``. ``violations`` counts grid points
    whose sign disagrees with the sign of ``delta``.
    """

    verdict: str
    expected: str
    violations: int
    min_excess: float
    max_excess: float
    grid_n: int

    @property
    def consistent(self) -> bool:
        return self.violations == 0 and self.verdict == self.expected


def check_quadrant_dependence(p: CopulaParams, grid_n: int = 101, tol: float = 1e-12) -> QuadrantReport:
    """Compare ``sign(C(u, v) - uv)`` with ``sign(delta)`` on an interior grid."""
    t = _interior_grid(grid_n)
    U, V = np.meshgrid(t, t, indexing="ij")
    excess = cop.cdf(p, U, V) - U * V
    if p.delta > 0:
        expected, violations = "PQD", int(np.sum(excess < -tol))
    elif p.delta < 0:
        expected, violations = "NQD", int(np.sum(excess > tol))
    else:
        expected, violations = "independent", int(np.sum(np.abs(excess) > tol))
    lo, hi = float(excess.min()), float(excess.max())
    if lo >= -tol and hi <= tol:
        verdict = "independent"
    elif lo >= -tol:
        verdict = "PQD"
    elif hi <= tol:
        verdict = "NQD"
    else:
        verdict = "mixed"
    return QuadrantReport(verdict, expected, violations, lo, hi, int(grid_n))


def log_density_cross_derivative(p: CopulaParams, u, v):
    """``d^2 log c / du dv`` for the copula density ``c``.

    With ``c = 1 + K g(u) g(v)`` and ``K = delta alpha^2`` this reduces to
    ``K g'(u) g'(v) / c^2`` where
    ``g'(t) = (alpha (1-2t)^2 - 2) exp(alpha (t - t^2))``.
    """
    a = p.alpha
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)

    def dg(t):
        return (a * (1.0 - 2.0 * t) ** 2 - 2.0) * np.exp(a * t * (1.0 - t))

    c = cop.pdf(p, u, v)
    return p.delta * a * a * dg(u) * dg(v) / (c * c)


@dataclass(frozen=True)
class Tp2Report:
    is_tp2: bool
    min_zeta: float
    violations: int
    grid_n: int


def check_tp2(p: CopulaParams, grid_n: int = 101, tol: float = 1e-10) -> Tp2Report:
    """Check log-supermodularity of the copula density on an interior grid.

    The density is TP2 iff ``d^2 log c / du dv >= 0`` everywhere; the grid
    minimum must be at least ``-tol``.
    """
    t = _interior_grid(grid_n)
    U, V = np.meshgrid(t, t, indexing="ij")
    zeta = log_density_cross_derivative(p, U, V)
    lo = float(np.min(zeta))
    return Tp2Report(lo >= -tol, lo, int(np.sum(zeta < -tol)), int(grid_n))


@dataclass(frozen=True)
class TailProbe:
    """Finite-``u`` tail-dependence quotients.

    ``lower`` maps each probe ``u < 1/2`` to ``C(u, u) / u``; ``upper`` maps
    each ``u > 1/2`` to ``(1 - 2u + C(u, u)) / (1 - u)``.
    """

    lower: dict[float, float]
    upper: dict[float, float]

    def max_quotient(self) -> float:
        return max(map(abs, [*self.lower.values(), *self.upper.values()]), default=0.0)


def tail_dependence_probe(
    p: CopulaParams,
    u_list: Sequence[float] = (1e-2, 1e-4, 1e-6, 1 - 1e-2, 1 - 1e-4, 1 - 1e-6),
) -> TailProbe:
    lower: dict[float, float] = {}
    upper: dict[float, float] = {}
    for u in map(float, u_list):
        if not 0.0 < u < 1.0 or u == 0.5:
            raise DomainError(f"tail probes need u in (0, 1/2) or (1/2, 1), got {u}")
        diag = cop.cdf(p, u, u)
        if u < 0.5:
            lower[u] = diag / u
        else:
            upper[u] = (1.0 - 2.0 * u + diag) / (1.0 - u)
    return TailProbe(lower, upper)
