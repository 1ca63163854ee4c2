"""Tensor-product Gauss-Legendre quadrature on rectangles."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from ._exceptions import DomainError, ToleranceError

__all__ = ["QuadratureSpec", "gauss_legendre", "integrate_1d", "integrate_2d", "refine"]


@dataclass(frozen=True)
class QuadratureSpec:
    """Node count and acceptance tolerance for the quadrature oracles.

    A result is accepted when the rule at ``nodes_per_axis`` and the rule
    at twice that many nodes agree to within ``abs_tol``.
    """

    nodes_per_axis: int = 128
    abs_tol: float = 1e-10
    panels: int = 1

    def __post_init__(self) -> None:
        if self.nodes_per_axis < 8:
            raise DomainError(f"nodes_per_axis must be >= 8, got {self.nodes_per_axis}")
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.panels < 1:
            raise DomainError(f"panels must be >= 1, got {self.panels}")

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(2 * self.nodes_per_axis, self.abs_tol, self.panels)


@lru_cache(maxsize=32)
def _reference_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float = 0.0, b: float = 1.0, panels: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Composite ``n``-point Gauss-Legendre nodes and weights on ``[a, b]``."""
    x, w = _reference_rule(n)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    a: float = 0.0,
    b: float = 1.0,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    x, w = gauss_legendre(spec.nodes_per_axis, a, b, spec.panels)
    return float(np.dot(w, f(x)))


def integrate_2d(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x_range: tuple[float, float] = (0.0, 1.0),
    y_range: tuple[float, float] = (0.0, 1.0),
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Integrate a vectorised ``f(x, y)`` over a rectangle."""
    x, wx = gauss_legendre(spec.nodes_per_axis, *x_range, spec.panels)
    y, wy = gauss_legendre(spec.nodes_per_axis, *y_range, spec.panels)
    X, Y = np.meshgrid(x, y, indexing="ij")
    return float(wx @ f(X, Y) @ wy)


def refine(compute: Callable[[QuadratureSpec], np.ndarray | float], spec: QuadratureSpec):
    """Evaluate ``compute`` at ``spec`` and at doubled nodes.

    Returns the refined value. ``compute`` may return an array of several
    integrals; every component must pass the agreement check.

    Raises
    ------
    ToleranceError
        If the two rules disagree by more than ``spec.abs_tol``.
    """
    coarse = np.asarray(compute(spec), dtype=float)
    fine = np.asarray(compute(spec.doubled()), dtype=float)
    gap = float(np.max(np.abs(fine - coarse)))
    if not gap <= spec.abs_tol:
        raise ToleranceError(
            f"quadrature refinement changed the result by {gap:.3e} "
            f"(> abs_tol={spec.abs_tol:.1e}) at {spec.nodes_per_axis} nodes/axis"
        )
    return fine if fine.ndim else float(fine)
