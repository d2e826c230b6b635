"""Special functions and Gauss quadrature rules.

Everything downstream (Riesz potentials, Funk-Hecke eigenvalues, the zonal
Nystrom matrix) integrates against Jacobi-type weights, so the rules here are
built to full double precision: Golub-Welsch for a first guess, then Newton
polishing on the Jacobi recurrence with weights from the derivative formula.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .errors import DomainError

__all__ = [
    "QuadratureRule",
    "log_gamma",
    "gamma_ratio",
    "gegenbauer_normalized",
    "gauss_rule",
    "gauss_legendre",
    "gauss_jacobi",
    "jacobi_on_interval",
    "legendre_on_interval",
    "graded_rule",
    "gegenbauer_table",
    "dim_harmonic",
    "sphere_area",
]


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of an interpolatory rule.

    ``family`` is ``"Legendre"``, ``"Jacobi(a,b)"`` or ``"mapped-radial"``;
    ``exact_degree`` is the highest polynomial degree integrated exactly
    against the family weight.
    """

    nodes: np.ndarray
    weights: np.ndarray
    family: str
    exact_degree: int

    def __post_init__(self):
        if self.nodes.shape != self.weights.shape:
            raise DomainError("nodes and weights must have equal length")
        if self.nodes.size > 1 and np.any(np.diff(self.nodes) <= 0):
            raise DomainError("nodes must be strictly increasing")
        if np.any(self.weights <= 0):
            raise DomainError("weights must be positive")

    def __len__(self):
        return self.nodes.size

    def integrate(self, f):
        """Sum ``f(nodes) * weights`` in ascending node order."""
        return float(np.dot(self.weights, f(self.nodes)))


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for ``x > 0``."""
    if not x > 0:
        raise DomainError(f"log_gamma needs a positive argument, got {x!r}")
    return math.lgamma(x)


def gamma_ratio(num, den) -> float:
    """``prod Gamma(num_i) / prod Gamma(den_j)`` evaluated in the log domain."""
    total = 0.0
    for x in num:
        total += log_gamma(x)
    for x in den:
        total -= log_gamma(x)
    return math.exp(total)


def gegenbauer_normalized(l: int, lam: float, t):
    """Normalized Gegenbauer polynomial ``C_l^lam(t) / C_l^lam(1)``.

    ``lam = 0`` is the Chebyshev limit ``cos(l arccos t)``. Works on scalars
    and arrays; the result is 1 at ``t = 1`` and lies in [-1, 1] for
    ``lam >= 0``.
    """
    if l < 0:
        raise DomainError("degree must be nonnegative")
    if not lam > -0.5:
        raise DomainError("lambda must exceed -1/2")
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 1 + 1e-14):
        raise DomainError("t must lie in [-1, 1]")
    t_arr = np.clip(t_arr, -1.0, 1.0)
    if lam == 0:
        out = np.cos(l * np.arccos(t_arr))
        return float(out) if out.ndim == 0 else out
    prev = np.ones_like(t_arr)
    if l == 0:
        return float(prev) if prev.ndim == 0 else prev
    cur = t_arr.copy()
    # normalized form of 2(k+lam) t C_k - (k+2lam-1) C_{k-1} = (k+1) C_{k+1}
    for k in range(1, l):
        prev, cur = cur, (2 * (k + lam) * t_arr * cur - k * prev) / (2 * lam + k)
    return float(cur) if cur.ndim == 0 else cur


def _jacobi_p_and_dp(n, a, b, x):
    """Jacobi ``P_n^{(a,b)}(x)`` and its derivative, by the three-term recurrence."""

    def p(n, a, b, x):
        p0 = np.ones_like(x)
        if n == 0:
            return p0
        p1 = (a + 1) + (a + b + 2) * (x - 1) / 2
        for k in range(2, n + 1):
            c = 2 * k + a + b
            a1 = 2 * k * (k + a + b) * (c - 2)
            a2 = (c - 1) * (c * (c - 2) * x + a * a - b * b)
            a3 = 2 * (k + a - 1) * (k + b - 1) * c
            p0, p1 = p1, (a2 * p1 - a3 * p0) / a1
        return p1

    val = p(n, a, b, x)
    der = 0.5 * (n + a + b + 1) * p(n - 1, a + 1, b + 1, x) if n > 0 else np.zeros_like(x)
    return val, der


@lru_cache(maxsize=256)
def gauss_jacobi(n: int, a: float, b: float) -> QuadratureRule:
    """n-point Gauss rule for the weight ``(1-t)^a (1+t)^b`` on [-1, 1].

    Rules are cached; the returned arrays are read-only.
    """
    if n < 1:
        raise DomainError("rule size must be positive")
    if not (a > -1 and b > -1):
        raise DomainError(f"Jacobi weight not integrable for a={a}, b={b}")
    k = np.arange(n, dtype=float)
    ab = a + b
    denom = (2 * k + ab) * (2 * k + ab + 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = np.where(denom == 0, 0.0, (b * b - a * a) / denom)
    if n >= 1 and abs(ab + 2) > 0:
        diag[0] = (b - a) / (ab + 2)
    j = np.arange(1, n, dtype=float)
    c = 2 * j + ab
    with np.errstate(divide="ignore", invalid="ignore"):
        off2 = 4 * j * (j + a) * (j + b) * (j + ab) / (c * c * (c * c - 1))
    if n > 1:
        # j = 1 with the (a+b+1) factor cancelled; the generic form is 0/0 at a+b = -1
        off2[0] = 4 * (1 + a) * (1 + b) / ((ab + 2) ** 2 * (ab + 3))
    off = np.sqrt(off2)
    x = eigh_tridiagonal(diag, off, eigvals_only=True) if n > 1 else diag.copy()
    x = np.sort(x)
    for _ in range(3):
        val, der = _jacobi_p_and_dp(n, a, b, x)
        x = x - val / der
    _, der = _jacobi_p_and_dp(n, a, b, x)
    log_c = (
        gammaln(n + a + 1) + gammaln(n + b + 1) - gammaln(n + ab + 1) - gammaln(n + 1)
        + (ab + 1) * math.log(2.0)
    )
    w = np.exp(log_c) / ((1 - x) * (1 + x) * der * der)
    x.setflags(write=False)
    w.setflags(write=False)
    family = "Legendre" if a == 0 and b == 0 else f"Jacobi({a:g},{b:g})"
    return QuadratureRule(x, w, family, 2 * n - 1)


def gauss_legendre(n: int) -> QuadratureRule:
    return gauss_jacobi(n, 0.0, 0.0)


def gauss_rule(family: str, n: int, a: float = 0.0, b: float = 0.0) -> QuadratureRule:
    """Gauss rule by family name: ``"legendre"`` or ``"jacobi"`` (with a, b)."""
    fam = family.lower()
    if fam == "legendre":
        return gauss_legendre(n)
    if fam == "jacobi":
        return gauss_jacobi(n, a, b)
    raise DomainError(f"unknown quadrature family {family!r}")


def jacobi_on_interval(n, a, b, lo, hi):
    """Nodes/weights on [lo, hi] for the weight ``(hi-x)^a (x-lo)^b``."""
    rule = gauss_jacobi(n, a, b)
    half = 0.5 * (hi - lo)
    x = lo + half * (rule.nodes + 1)
    w = rule.weights * half ** (a + b + 1)
    return x, w


def legendre_on_interval(n, lo, hi):
    rule = gauss_legendre(n)
    half = 0.5 * (hi - lo)
    return lo + half * (rule.nodes + 1), rule.weights * half


def graded_rule(width, n, ratio, floor, sing_exp):
    """Distances on (0, width] graded geometrically toward 0.

    Panels [width*ratio^(k+1), width*ratio^k] get n Gauss-Legendre nodes until
    the panel size drops below ``floor * width``; the innermost panel uses a
    Jacobi rule carrying ``d^sing_exp``. Weights are for the raw integrand,
    which may behave like ``A d^sing_exp + B`` near 0 (or ``log d`` when
    ``sing_exp == 0``).
    """
    levels = max(1, math.ceil(math.log(floor) / math.log(ratio)))
    cuts = width * ratio ** np.arange(levels + 1)
    ds, ws = [], []
    for k in range(levels):
        d, w = legendre_on_interval(n, cuts[k + 1], cuts[k])
        ds.append(d)
        ws.append(w)
    d, w = jacobi_on_interval(n, 0.0, sing_exp, 0.0, cuts[-1])
    ds.append(d)
    ws.append(w * d ** (-sing_exp))
    return np.concatenate(ds), np.concatenate(ws)


def gegenbauer_table(lmax: int, lam: float, t) -> np.ndarray:
    """Rows ``C_l^lam(t)/C_l^lam(1)`` for l = 0..lmax, shape (lmax+1, len(t))."""
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    out = np.empty((lmax + 1,) + t.shape)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = t
    for k in range(1, lmax):
        if lam == 0:
            out[k + 1] = 2 * t * out[k] - out[k - 1]
        else:
            out[k + 1] = (2 * (k + lam) * t * out[k] - k * out[k - 1]) / (2 * lam + k)
    return out


def dim_harmonic(N: int, l: int) -> int:
    """Dimension of the degree-l spherical harmonics on the sphere S^N."""
    if N < 1 or l < 0:
        raise DomainError("need N >= 1 and l >= 0")
    if l == 0:
        return 1
    return (2 * l + N - 1) * math.factorial(l + N - 2) // (
        math.factorial(l) * math.factorial(N - 1)
    )


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere S^N in R^{N+1}; ``S^0`` has two points."""
    if N < 0:
        raise DomainError("sphere dimension must be nonnegative")
    return 2 * math.pi ** ((N + 1) / 2) / math.gamma((N + 1) / 2)
