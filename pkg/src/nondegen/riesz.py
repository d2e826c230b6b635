"""Riesz potentials of radial-harmonic fields, and the integral-equation checks.

For ``f(y) = g(|y|) Y_l(y/|y|)`` the potential ``gamma * int f(y)/|x-y|^(N-2s) dy``
is again of the form ``h_l(|x|) Y_l(x/|x|)`` with

    h_l(r) = gamma * int_0^inf g(rho) rho^(N-1) F_l(r, rho) drho,
    F_l(r, rho) = |S^(N-2)| int_{-1}^{1} (r^2 + rho^2 - 2 r rho t)^(-(N-2s)/2)
                  P_l(t) (1-t^2)^((N-3)/2) dt,

``P_l`` the Gegenbauer polynomial of order (N-2)/2 normalized to 1 at t = 1.

The angular integral is near-singular at t = 1 when rho is close to r. It is
evaluated after the substitution ``1 - t = sigma0 (e^x - 1)``,
``sigma0 = (r-rho)^2 / (2 r rho)``, which turns the peak into an exponential of
bounded rate on [0, log(1 + 2/sigma0)], uniformly in rho. The remaining
|r - rho|^(2s-1) (or logarithmic) singularity of ``F_l`` is handled by
geometrically graded panels on both sides of r, and the tail by the map
``rho = R/u`` with a Gauss-Jacobi weight matched to the profile's decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from .bubble import Bubble, KernelFunction, bubble_profile, kernel_profile
from .errors import DivergenceError, DomainError
from .params import ProblemParams
from .special_fns import (
    gauss_jacobi,
    gegenbauer_normalized,
    graded_rule,
    jacobi_on_interval,
    legendre_on_interval,
    sphere_area,
)

__all__ = [
    "RadialProfile",
    "RieszConfig",
    "riesz_gamma",
    "ring_integral",
    "riesz_radial",
    "riesz_radial_many",
    "bubble_residual",
    "bubble_residuals",
    "linearized_profile",
    "apply_linearized",
    "gaussian_fourier_potential",
]


@dataclass(frozen=True)
class RadialProfile:
    """A radial factor ``g`` with ``|g(r)| <= C (1+r)^(-decay_exponent)``.

    ``decay_exponent`` may be ``inf`` for faster-than-power decay.
    ``tail_start`` marks where ``g(r) r^nu`` becomes smooth in ``1/r`` (power
    law extrapolation of tabulated profiles); ``scale`` is the length on which
    the profile has structure near the origin.
    """

    evaluator: Callable
    decay_exponent: float
    tail_start: float = 0.0
    scale: float = 1.0

    def __call__(self, r):
        return self.evaluator(np.asarray(r, dtype=float))

    def check(self) -> None:
        """Validate finiteness on [0, 1e6] and the decay hint at 1e2..1e4."""
        grid = np.concatenate([[0.0], np.logspace(-3, 6, 200)])
        vals = self(grid)
        if not np.all(np.isfinite(vals)):
            raise DomainError("profile is not finite on [0, 1e6]")
        if math.isinf(self.decay_exponent):
            return
        r = np.array([1e2, 1e3, 1e4])
        v = np.abs(self(r))
        if np.any(v == 0):
            return
        c = v * r**self.decay_exponent
        if c.max() > 10 * c.min():
            raise DomainError("decay hint inconsistent with sampled values")


@dataclass(frozen=True)
class RieszConfig:
    n_angular: int = 64
    n_radial: int = 96
    r_split: tuple = (0.5, 2.0)
    n_grade: int = 24
    grade_ratio: float = 0.2
    grade_floor: float = 1e-13
    tail_factor: float = 4.0
    tail_min: float = 32.0
    target_tol: float = 1e-7

    def __post_init__(self):
        if min(self.n_angular, self.n_radial, self.n_grade) < 4:
            raise DomainError("all quadrature sizes must be >= 4")
        if not 1e-12 <= self.target_tol <= 1e-2:
            raise DomainError("target_tol must lie in [1e-12, 1e-2]")
        lo, hi = self.r_split
        if not 0 < lo < 1 < hi:
            raise DomainError("r_split must bracket 1")
        if not 0 < self.grade_ratio < 1:
            raise DomainError("grade_ratio must lie in (0, 1)")

    def refined(self, factor: int = 2) -> "RieszConfig":
        return RieszConfig(
            n_angular=self.n_angular * factor,
            n_radial=self.n_radial * factor,
            r_split=self.r_split,
            n_grade=self.n_grade * factor,
            grade_ratio=self.grade_ratio,
            grade_floor=self.grade_floor,
            tail_factor=self.tail_factor,
            tail_min=self.tail_min,
            target_tol=self.target_tol,
        )


def riesz_gamma(params: ProblemParams) -> float:
    """Constant making ``gamma * |x|^(2s-N) *`` invert the multiplier ``|xi|^(2s)``."""
    return params.riesz_gamma


def ring_integral(delta, c, eps, dim, l, n):
    """``int_{-1}^{1} (delta^2 + c (1-t))^(-eps/2) P_l(t) (1-t^2)^((dim-2)/2) dt``.

    This is the zonal integral over the sphere S^dim (without the factor
    |S^(dim-1)|), ``P_l`` normalized Gegenbauer of order (dim-1)/2. ``delta``
    and ``c`` are positive arrays of equal shape; ``n`` is the rule size.
    """
    delta = np.asarray(delta, dtype=float)[..., None]
    c = np.asarray(c, dtype=float)[..., None]
    a = 0.5 * (dim - 2)
    sigma0 = delta * delta / c
    big_x = np.log1p(2.0 / sigma0)
    rule = gauss_jacobi(n, a, a)
    half = 0.5 * big_x
    x = half * (rule.nodes + 1.0)
    xr = big_x - x
    log_pref = -eps * np.log(delta) + (1 + 2 * a) * np.log(sigma0) + (2 * a + 1) * np.log(half)
    log_f = log_pref + x * (1.0 - 0.5 * eps + a)
    if a != 0:
        log_f = log_f + a * (np.log(np.expm1(x) / x) + np.log(np.expm1(xr) / xr))
    f = np.exp(log_f)
    if l:
        t = 1.0 - sigma0 * np.expm1(x)
        f = f * gegenbauer_normalized(l, 0.5 * (dim - 1), np.clip(t, -1.0, 1.0))
    return f @ rule.weights


def _kernel_f(params: ProblemParams, l: int, r: float, rho, delta, n_angular: int):
    """``F_l(r, rho)`` for r > 0; ``delta = |r - rho|`` is passed in unrounded."""
    N, eps = params.N, params.kernel_exponent
    if N == 1:
        sign = -1.0 if l % 2 else 1.0
        return delta ** (-eps) + sign * (r + rho) ** (-eps)
    return sphere_area(N - 2) * ring_integral(delta, 2 * r * rho, eps, N - 1, l, n_angular)


def _radial_rule(params, g: RadialProfile, r: float, cfg: RieszConfig):
    """Nodes, weights and distances ``|r - rho|`` on [0, R], plus the tail start R."""
    eps = params.kernel_exponent
    sing = params.N - 1 - eps
    if sing <= -1:
        raise DivergenceError("kernel singularity is not integrable")
    scale = g.scale
    tail = max(cfg.tail_factor * r, cfg.tail_min * scale, g.tail_start)
    background = scale * 2.0 ** np.arange(-4, 64)
    rhos, ws, dists = [], [], []

    def plain(a, b):
        x, w = legendre_on_interval(cfg.n_radial, a, b)
        rhos.append(x)
        ws.append(w)
        dists.append(np.abs(r - x))

    if r == 0:
        first = scale / 16
        x, w = jacobi_on_interval(cfg.n_radial, 0.0, sing, 0.0, first)
        rhos.append(x)
        ws.append(w * x ** (-sing))
        dists.append(x)
        lo_free = first
    else:
        lo_split, hi_split = cfg.r_split[0] * r, cfg.r_split[1] * r
        d, w = graded_rule(r - lo_split, cfg.n_grade, cfg.grade_ratio, cfg.grade_floor, sing)
        rhos.append(r - d)
        ws.append(w)
        dists.append(d)
        d, w = graded_rule(hi_split - r, cfg.n_grade, cfg.grade_ratio, cfg.grade_floor, sing)
        rhos.append(r + d)
        ws.append(w)
        dists.append(d)
        pts = [0.0] + [b for b in background if b < lo_split] + [lo_split]
        for a, b in zip(pts[:-1], pts[1:]):
            plain(a, b)
        lo_free = hi_split
    tail = max(tail, lo_free)
    pts = [lo_free] + [b for b in background if lo_free < b < tail] + [tail]
    for a, b in zip(pts[:-1], pts[1:]):
        if b > a:
            plain(a, b)
    rho = np.concatenate(rhos)
    order = np.argsort(rho, kind="stable")
    return rho[order], np.concatenate(ws)[order], np.concatenate(dists)[order], tail


def _tail_rule(params, g: RadialProfile, l: int, r: float, tail: float, cfg: RieszConfig):
    """Tail [R, inf) through rho = R/u: nodes in rho and weights including the Jacobian."""
    nu = g.decay_exponent
    eps = params.kernel_exponent
    lexp = l if r > 0 else 0
    if math.isinf(nu):
        beta = 0.0
    else:
        beta = nu + eps + lexp - params.N - 1
        if beta <= -1:
            raise DivergenceError(
                f"integrand decays too slowly: decay {nu} with kernel exponent {eps}"
            )
    u, w = jacobi_on_interval(cfg.n_radial, 0.0, beta, 0.0, 1.0)
    rho = tail / u
    jac = tail / (u * u) * u ** (-beta)
    order = np.argsort(rho)
    return rho[order], (w * jac)[order]


def riesz_radial(params: ProblemParams, g: RadialProfile, l: int, r: float,
                 cfg: RieszConfig = None, prefactor: float = None) -> float:
    """Radial coefficient ``h_l(r)`` of the Riesz potential of ``g(|y|) Y_l``.

    ``prefactor`` defaults to the Riesz constant gamma.
    """
    cfg = cfg or RieszConfig()
    if l < 0 or (params.N == 1 and l > 1):
        raise DomainError(f"harmonic degree {l} not available for N={params.N}")
    if not r >= 0 or not math.isfinite(r):
        raise DomainError("radius must be finite and nonnegative")
    pref = params.riesz_gamma if prefactor is None else prefactor
    if r < 1e-100 * g.scale:
        # h_l(r) - h_l(0) = O(r^2) for l = 0 and h_l = O(r^l) otherwise; avoids 2 r rho underflow
        r = 0.0
    if r == 0 and l > 0:
        return 0.0
    N, eps = params.N, params.kernel_exponent
    rho, w, dist, tail = _radial_rule(params, g, r, cfg)
    t_rho, t_w = _tail_rule(params, g, l, r, tail, cfg)
    rho = np.concatenate([rho, t_rho])
    w = np.concatenate([w, t_w])
    dist = np.concatenate([dist, np.abs(t_rho - r)])
    vals = g(rho) * rho ** (N - 1)
    if r == 0:
        vals = vals * sphere_area(N - 1) * rho ** (-eps)
    else:
        vals = vals * _kernel_f(params, l, r, rho, dist, cfg.n_angular)
    return float(pref * np.dot(w, vals))


def riesz_radial_many(params, g, l, radii, cfg=None, prefactor=None) -> np.ndarray:
    return np.array([riesz_radial(params, g, l, float(r), cfg, prefactor) for r in radii])


def bubble_residuals(params: ProblemParams, radii, cfg: RieszConfig = None):
    """``(potential of w^p, w)`` at each radius."""
    p, decay = params.p, params.decay
    source = RadialProfile(lambda r: bubble_profile(params, r) ** p, decay * p)
    lhs = riesz_radial_many(params, source, 0, radii, cfg)
    return lhs, bubble_profile(params, np.asarray(radii, dtype=float))


def bubble_residual(params: ProblemParams, radii, cfg: RieszConfig = None) -> float:
    """Max relative defect of ``gamma I_2s(w^p) = w`` over the radii."""
    lhs, rhs = bubble_residuals(params, radii, cfg)
    return float(np.max(np.abs(lhs - rhs) / rhs))


def linearized_profile(params: ProblemParams, phi: RadialProfile) -> RadialProfile:
    """Profile of ``p w^(p-1) phi`` for a radial factor ``phi``."""
    p, a = params.p, params.bubble_amplitude
    weight_decay = params.decay * (p - 1)

    def ev(r):
        return p * bubble_profile(params, r) ** (p - 1) * phi(r)

    return RadialProfile(ev, phi.decay_exponent + weight_decay, phi.tail_start, phi.scale)


def _as_profile(params, phi):
    if isinstance(phi, KernelFunction):
        k = phi.k
        return RadialProfile(lambda r: kernel_profile(params, k, r), phi.decay_exponent), phi.harmonic_degree
    if isinstance(phi, Bubble):
        return RadialProfile(lambda r: bubble_profile(params, r), params.decay), 0
    prof, l = phi
    return prof, l


def apply_linearized(params: ProblemParams, phi, r: float, cfg: RieszConfig = None) -> float:
    """``gamma int p w^(p-1) phi(y) / |x-y|^(N-2s) dy`` as a radial coefficient at r.

    ``phi`` is a :class:`KernelFunction`, the centered :class:`Bubble`, or a
    ``(RadialProfile, l)`` pair.
    """
    prof, l = _as_profile(params, phi)
    return riesz_radial(params, linearized_profile(params, prof), l, r, cfg)


def gaussian_fourier_potential(N: int, s: float, r: float) -> float:
    """``(-Lap)^(-s) exp(-|x|^2)`` at radius r by Fourier inversion of ``|k|^(-2s) * FT``.

    Independent of the Riesz constant: uses the Hankel transform of the
    multiplier applied to ``pi^(N/2) exp(-k^2/4)``.
    """
    nu = N / 2 - 1

    def symbol(k):
        return k ** (-2 * s) * math.pi ** (N / 2) * math.exp(-k * k / 4)

    if r == 0:
        val, _ = integrate.quad(lambda k: symbol(k) * k ** (N - 1), 0, np.inf,
                                epsabs=0, epsrel=1e-13, limit=400)
        return val * sphere_area(N - 1) / (2 * math.pi) ** N

    def integrand(k):
        return symbol(k) * special.jv(nu, k * r) * k ** (N / 2)

    val, _ = integrate.quad(integrand, 0, 40, epsabs=0, epsrel=1e-13, limit=800)
    return val * (2 * math.pi) ** (-N / 2) * r ** (1 - N / 2)
