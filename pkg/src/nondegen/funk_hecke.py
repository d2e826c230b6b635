"""Eigenvalues of the Riesz kernel operator on the sphere.

Two independent sources:

* the closed Gamma-function formula, evaluated in the reflection-free form
  ``kappa_N 2^alpha G(N/2-alpha) G(l+alpha) / (G(alpha) G(l+N-alpha))``;
* the Funk-Hecke angular integral of ``|w-e|^-(N-2s) = (2-2t)^-(N-2s)/2``
  against the normalized Gegenbauer polynomial, integrated exactly by
  Gauss-Jacobi(s-1, (N-2)/2).

The closed form fixes the l-dependence; the quadrature fixes absolute size.
``normalization_audit`` measures the single constant relating the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StructuralMismatchError
from .params import ProblemParams
from .special_fns import (
    gauss_jacobi,
    gegenbauer_normalized,
    jacobi_on_interval,
    log_gamma,
    sphere_area,
)

__all__ = [
    "EigenvalueTable",
    "kappa",
    "eigenvalue_closed",
    "eigenvalue_quadrature",
    "closed_table",
    "quadrature_table",
    "normalization_audit",
    "a_constant",
    "ratio_law",
]


@dataclass(frozen=True)
class EigenvalueTable:
    params: ProblemParams
    values: np.ndarray
    source: str
    normalization: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v <= 0):
            raise StructuralMismatchError("eigenvalues must be positive")
        if np.any(np.diff(v) >= 0):
            raise StructuralMismatchError("eigenvalues must be strictly decreasing")
        object.__setattr__(self, "values", v)

    def ratios(self) -> np.ndarray:
        return self.values[1:] / self.values[:-1]


def kappa(N: int) -> float:
    """Prefactor of the printed eigenvalue formula (brace repaired to ``G(N/2)``)."""
    if N < 1:
        raise DomainError("N must be >= 1")
    if N == 1:
        return 2 * math.sqrt(math.pi)
    return math.exp(
        2 * (N - 1) * math.log(2.0)
        + 0.5 * (N - 1) * math.log(math.pi)
        + log_gamma((N - 1) / 2)
        + log_gamma(N / 2)
        - math.lgamma(N - 1)
    )


def ratio_law(params: ProblemParams, l) -> np.ndarray:
    """``(l + alpha) / (l + N - alpha)``, the predicted ``e_{l+1}/e_l``."""
    a = params.funk_alpha
    l = np.asarray(l, dtype=float)
    return (l + a) / (l + params.N - a)


def eigenvalue_closed(params: ProblemParams, l: int) -> float:
    if l < 0:
        raise DomainError("degree must be nonnegative")
    N, a = params.N, params.funk_alpha
    return math.exp(
        math.log(kappa(N))
        + a * math.log(2.0)
        + log_gamma(N / 2 - a)
        + log_gamma(l + a)
        - log_gamma(a)
        - log_gamma(l + N - a)
    )


def _circle_eigenvalue(params: ProblemParams, l: int, n: int) -> float:
    """N = 1: ``2 int_0^pi (2 sin(th/2))^-(1-2s) cos(l th) dth``."""
    eps = params.kernel_exponent
    panels = np.linspace(0.0, math.pi, 5)
    total = 0.0
    for k, (lo, hi) in enumerate(zip(panels[:-1], panels[1:])):
        if k == 0:
            th, w = jacobi_on_interval(n, 0.0, -eps, lo, hi)
            f = (2 * np.sin(th / 2) / th) ** (-eps) * np.cos(l * th)
        else:
            th, w = jacobi_on_interval(n, 0.0, 0.0, lo, hi)
            f = (2 * np.sin(th / 2)) ** (-eps) * np.cos(l * th)
        total += float(np.dot(w, f))
    return 2 * total


def eigenvalue_quadrature(params: ProblemParams, l: int, n: int = None) -> float:
    """Funk-Hecke eigenvalue of ``h -> int h(e) |w-e|^-(N-2s) de`` on degree-l harmonics."""
    if l < 0:
        raise DomainError("degree must be nonnegative")
    N, s = params.N, params.s
    eps = params.kernel_exponent
    if n is None:
        n = l // 2 + 8
    if N == 1:
        return _circle_eigenvalue(params, l, max(n, 48))
    if n < l / 2 + 2:
        raise DomainError("rule too small for exact integration")
    # (2-2t)^(-eps/2) (1-t^2)^((N-2)/2) = 2^(-eps/2) (1-t)^(a) (1+t)^((N-2)/2)
    a = (N - 2) / 2 - eps / 2
    rule = gauss_jacobi(n, a, (N - 2) / 2)
    vals = gegenbauer_normalized(l, (N - 1) / 2, rule.nodes)
    return sphere_area(N - 1) * 2 ** (-eps / 2) * float(np.dot(rule.weights, vals))


def closed_table(params: ProblemParams, lmax: int) -> EigenvalueTable:
    vals = [eigenvalue_closed(params, l) for l in range(lmax + 1)]
    return EigenvalueTable(params, np.array(vals), "closed_form")


def quadrature_table(params: ProblemParams, lmax: int) -> EigenvalueTable:
    vals = [eigenvalue_quadrature(params, l) for l in range(lmax + 1)]
    return EigenvalueTable(params, np.array(vals), "quadrature")


def normalization_audit(params: ProblemParams, lmax: int = 20, tol: float = 1e-6):
    """Constant ``k`` with ``quadrature ~ k * closed`` over l <= lmax.

    Returns ``(k, per_l_residuals)``. Raises when a residual exceeds ``tol``:
    the two sources would then disagree in their l-dependence.
    """
    if lmax < 3:
        raise DomainError("audit needs lmax >= 3")
    closed = np.array([eigenvalue_closed(params.clean(), l) for l in range(lmax + 1)])
    quad = quadrature_table(params, lmax).values
    # least squares for quad ~ k * closed
    k = float(np.dot(quad, closed) / np.dot(closed, closed))
    resid = np.abs(quad / (k * closed) - 1)
    if np.max(resid) > tol:
        raise StructuralMismatchError(
            f"quadrature and closed-form eigenvalues differ by more than a constant "
            f"(max residual {np.max(resid):.3g})"
        )
    return k, resid


def a_constant(params: ProblemParams) -> float:
    """``a = 1/c`` with ``c = gamma p alpha^(p-1) 4^-s`` from ``gamma p w^(p-1) = c J^(2s/N)``."""
    c = params.riesz_gamma * params.p * params.bubble_amplitude ** (params.p - 1) * 2 ** (-2 * params.s)
    return 1.0 / c
