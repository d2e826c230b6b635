"""Stereographic projection and the transfer of fields from R^N to S^N.

Points on the sphere are arrays of shape (..., N+1); the excluded pole is
(0, ..., 0, -1). Two lifts are provided:

* ``kind="hls"``  phi(x) = J(x)^((N+2s)/(2N)) phi~(S(x)), the lift under which
  the Riesz double integral is invariant;
* ``kind="sobolev"`` phi(x) = J(x)^((N-2s)/(2N)) phi~(S(x)), which sends the
  bubble to a constant and coincides with the map phi -> h used for the
  kernel generators (h = J^(2s/N) o S^-1 * hls-lift).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bubble import KernelFunction, kernel_eval
from .errors import DivergenceError, DomainError, PoleError, SamplingError
from .params import ProblemParams
from .special_fns import gauss_legendre, jacobi_on_interval, legendre_on_interval

__all__ = [
    "SpherePoint",
    "LiftedField",
    "stereo_project",
    "stereo_inverse",
    "jacobian",
    "lift",
    "h_field",
    "conformal_distance_defect",
    "verify_id1",
    "sphere_samples",
    "fit_h1",
    "lift_kernel_to_h1",
    "sampled_sup",
]


@dataclass(frozen=True)
class SpherePoint:
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 1 or abs(np.linalg.norm(c) - 1) > 1e-12:
            raise DomainError("sphere point must be a unit vector")
        object.__setattr__(self, "coords", c)

    @property
    def is_pole(self) -> bool:
        return self.coords[-1] == -1.0


def stereo_project(x):
    """``S(x) = (2x, 1 - |x|^2) / (1 + |x|^2)``; x of shape (..., N)."""
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1, keepdims=True)
    den = 1.0 + r2
    return np.concatenate([2 * x / den, (1.0 - r2) / den], axis=-1)


def stereo_inverse(omega):
    """``x_i = omega_i / (1 + omega_{N+1})``; raises :class:`PoleError` at the pole."""
    omega = np.asarray(omega, dtype=float)
    den = 1.0 + omega[..., -1:]
    if np.any(den <= 0):
        raise PoleError("stereo_inverse is undefined at the pole")
    return omega[..., :-1] / den


def jacobian(x):
    """``J(x) = (2 / (1 + |x|^2))^N``."""
    x = np.asarray(x, dtype=float)
    N = x.shape[-1]
    return (2.0 / (1.0 + np.sum(x * x, axis=-1))) ** N


def _half_weight(x):
    """``(1 + |x|^2) / 2 = J^(-1/N)``, kept separate to avoid overflow near the pole."""
    return 0.5 * (1.0 + np.sum(x * x, axis=-1))


@dataclass(frozen=True)
class LiftedField:
    """A function on the sphere minus the pole, with provenance metadata."""

    evaluator: Callable
    bounded: bool
    provenance: str

    def __call__(self, omega):
        return self.evaluator(np.asarray(omega, dtype=float))


_LIFT_EXPONENTS = {"hls": lambda N, s: (N + 2 * s) / 2, "sobolev": lambda N, s: (N - 2 * s) / 2}


def lift(params: ProblemParams, phi: Callable, kind: str = "hls",
         decay: float = None, name: str = "field") -> LiftedField:
    """``phi~(omega) = J(x)^(-e/N) phi(x)``, ``x = S^-1(omega)``, e = (N +- 2s)/2.

    ``decay`` (if known) sets the boundedness flag: the lift is bounded when
    ``phi`` decays at least like ``|x|^(-2e)``.
    """
    try:
        expo = _LIFT_EXPONENTS[kind](params.N, params.s)
    except KeyError:
        raise DomainError(f"unknown lift kind {kind!r}") from None

    def ev(omega):
        x = stereo_inverse(omega)
        return _half_weight(x) ** expo * phi(x)

    bounded = decay is not None and decay >= 2 * expo
    return LiftedField(ev, bounded, f"{kind}-lift of {name}")


def h_field(params: ProblemParams, phi: Callable, decay: float = None,
            name: str = "field") -> LiftedField:
    """``h = J^(2s/N) o S^-1 * phi~`` for the hls-lift phi~ of ``phi``."""
    return lift(params, phi, kind="sobolev", decay=decay, name=name)


def conformal_distance_defect(x, y) -> np.ndarray:
    """Relative defect of ``|S(x)-S(y)|^2 = J(x)^(1/N) J(y)^(1/N) |x-y|^2``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lhs = np.sum((stereo_project(x) - stereo_project(y)) ** 2, axis=-1)
    rhs = np.sum((x - y) ** 2, axis=-1) / (_half_weight(x) * _half_weight(y))
    return np.abs(lhs - rhs) / rhs


def _safe(field, omega):
    """Evaluate a lifted field, using its limit 0 at (numerically) the pole."""
    omega = np.asarray(omega, dtype=float)
    at_pole = omega[..., -1] <= -1.0 + 1e-15
    safe = np.where(at_pole[..., None], np.eye(omega.shape[-1])[-1], omega)
    return np.where(at_pole, 0.0, field(safe))


def _panels(n, length, width=1.0):
    """Legendre panels of the given width covering [0, length]."""
    k = max(1, math.ceil(length / width))
    edges = np.linspace(0.0, length, k + 1)
    xs, ws = zip(*(legendre_on_interval(n, a, b) for a, b in zip(edges[:-1], edges[1:])))
    return np.concatenate(xs), np.concatenate(ws)


def _singular_half_line(n, sing, length, width=1.0):
    """Rule on [0, length] for integrands ``u^sing * smooth``; raw-integrand weights."""
    x0, w0 = jacobi_on_interval(n, 0.0, sing, 0.0, width)
    xs, ws = [x0], [w0 * x0 ** (-sing)]
    if length > width:
        x1, w1 = _panels(n, length - width, width)
        xs.append(x1 + width)
        ws.append(w1)
    return np.concatenate(xs), np.concatenate(ws)


def _euclid_double(params, phi, psi, box, n, panel=2.5):
    """``int int phi(x) psi(y) |x-y|^(-eps) dx dy`` over R^N x R^N, N in {1, 2}."""
    N, eps = params.N, params.kernel_exponent
    x1, w1 = _panels(n, 2 * box, panel)
    x1 = x1 - box
    if N == 1:
        xs = x1[:, None]
        wx = w1
    else:
        xs = np.stack(np.meshgrid(x1, x1, indexing="ij"), axis=-1).reshape(-1, 2)
        wx = np.outer(w1, w1).ravel()
    phi_x = phi(xs) * wx
    # radial distance u = |x - y| with the |u|^(N-1-eps) singularity in the rule
    u, wu = _singular_half_line(n, N - 1 - eps, 2 * box, panel)
    wu = wu * u ** (N - 1 - eps)
    if N == 1:
        dirs = np.array([[1.0], [-1.0]])
        wdir = np.array([1.0, 1.0])
    else:
        m = 4 * n
        th = 2 * np.pi * (np.arange(m) + 0.5) / m
        dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
        wdir = np.full(m, 2 * np.pi / m)
    total = 0.0
    for d, wd in zip(dirs, wdir):
        ys = xs[:, None, :] - u[None, :, None] * d
        total += wd * np.einsum("i,ij,j->", phi_x, psi(ys), wu)
    return float(total)


def _sphere_double(params, phi_t, psi_t, n):
    """``int int phi~(w) psi~(e) |w-e|^(-eps) dw de`` over S^N x S^N, N in {1, 2}."""
    N, eps = params.N, params.kernel_exponent
    # geodesic distance b from omega: |w - e| = 2 sin(b/2), weight sin(b)^(N-1)
    b, wb = _singular_half_line(n, N - 1 - eps, math.pi, width=math.pi / 4)
    radial = (2 * np.sin(b / 2)) ** (-eps) * np.sin(b) ** (N - 1)
    if N == 1:
        m = 8 * n
        th = 2 * np.pi * (np.arange(m) + 0.5) / m
        om = np.stack([np.sin(th), np.cos(th)], axis=-1)
        w_om = np.full(m, 2 * np.pi / m)
        inner = 0.0
        for sgn in (1.0, -1.0):
            th2 = th[:, None] + sgn * b[None, :]
            et = np.stack([np.sin(th2), np.cos(th2)], axis=-1)
            inner = inner + _safe(psi_t, et) @ (wb * radial)
        return float(np.dot(w_om * _safe(phi_t, om), inner))
    rule = gauss_legendre(2 * n)
    m = 4 * n
    az = 2 * np.pi * (np.arange(m) + 0.5) / m
    ct = rule.nodes
    st = np.sqrt(1 - ct * ct)
    om = np.stack(
        [st[:, None] * np.cos(az), st[:, None] * np.sin(az), np.repeat(ct[:, None], m, 1)],
        axis=-1,
    ).reshape(-1, 3)
    w_om = np.outer(rule.weights, np.full(m, 2 * np.pi / m)).ravel()
    # orthonormal frame (e1, e2) at each omega
    ref = np.where(np.abs(om[:, 2:3]) < 0.9, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    e1 = np.cross(om, ref)
    e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
    e2 = np.cross(om, e1)
    chi = 2 * np.pi * (np.arange(m) + 0.5) / m
    inner = np.zeros(om.shape[0])
    for c, s_ in zip(np.cos(chi), np.sin(chi)):
        dirv = c * e1 + s_ * e2
        eta = np.cos(b)[None, :, None] * om[:, None, :] + np.sin(b)[None, :, None] * dirv[:, None, :]
        inner += (2 * np.pi / m) * (_safe(psi_t, eta) @ (wb * radial))
    return float(np.dot(w_om * _safe(phi_t, om), inner))


def verify_id1(params: ProblemParams, phi: Callable, psi: Callable,
               box: float = 10.0, n: int = 24, decay: float = math.inf):
    """Both sides of the conformal invariance of the Riesz double integral.

    ``phi`` and ``psi`` act on points of shape (..., N) and must decay faster
    than ``|x|^(-N)``. Returns ``(lhs, rhs, rel_diff)``.
    """
    N = params.N
    if N not in (1, 2):
        raise DomainError("the double-integral identity is evaluated for N in {1, 2} only")
    if not decay > N + 2 * params.s:
        raise DivergenceError("fields must decay faster than |x|^-(N+2s)")
    lhs = _euclid_double(params, phi, psi, box, n)
    phi_t = lift(params, phi, name="phi")
    psi_t = lift(params, psi, name="psi")
    rhs = _sphere_double(params, phi_t, psi_t, n)
    scale = max(abs(lhs), abs(rhs))
    rel = 0.0 if scale == 0 else abs(lhs - rhs) / scale
    return lhs, rhs, rel


def _fibonacci(count):
    i = np.arange(count) + 0.5
    z = 1 - 2 * i / count
    r = np.sqrt(1 - z * z)
    golden = math.pi * (3 - math.sqrt(5))
    return np.stack([r * np.cos(golden * i), r * np.sin(golden * i), z], axis=-1)


def _product_grid(N, n):
    if N == 1:
        th = 2 * np.pi * (np.arange(n) + 0.5) / n
        return np.stack([np.cos(th), np.sin(th)], axis=-1)
    sub = _product_grid(N - 1, n)
    t = gauss_legendre(n).nodes
    r = np.sqrt(1 - t * t)
    pts = np.concatenate(
        [r[:, None, None] * sub[None, :, :], np.broadcast_to(t[:, None, None], (n, sub.shape[0], 1))],
        axis=-1,
    )
    return pts.reshape(-1, N + 1)


def sphere_samples(N: int, n: int = 24, margin: float = 1e-3, seed: int = None) -> np.ndarray:
    """Deterministic quasi-uniform points on S^N with ``omega_{N+1} >= -1 + margin``.

    N = 2 uses a Fibonacci spiral of n^2 points, other N a product grid;
    ``seed`` only permutes the order.
    """
    pts = _fibonacci(n * n) if N == 2 else _product_grid(N, n)
    pts = pts[pts[:, -1] >= -1 + margin]
    if seed is not None:
        pts = pts[np.random.default_rng(seed).permutation(len(pts))]
    return pts


def fit_h1(field: Callable, samples: np.ndarray):
    """Least-squares fit ``h(omega) ~ sum_j c_j omega_j``; returns (coeffs, relative L2 residual)."""
    samples = np.asarray(samples, dtype=float)
    vals = field(samples)
    scale = np.linalg.norm(samples, axis=0)
    if np.any(scale == 0):
        raise SamplingError("a coordinate vanishes on the whole sample set")
    design = samples / scale
    sv = np.linalg.svd(design, compute_uv=False)
    if sv[-1] < 1e-10 * sv[0]:
        raise SamplingError("sample set is rank deficient for the H_1 fit")
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    coef = coef / scale
    norm = np.linalg.norm(vals)
    resid = np.linalg.norm(samples @ coef - vals)
    return coef, (0.0 if norm == 0 else float(resid / norm))


def lift_kernel_to_h1(params: ProblemParams, k: int, samples: np.ndarray = None):
    """Fit the sphere function h of generator ``Z_k`` by coordinate functions."""
    z = KernelFunction(params, k)
    if samples is None:
        samples = sphere_samples(params.N)
    h = h_field(params, lambda x: kernel_eval(z, x), decay=z.decay_exponent, name=f"Z_{k}")
    return fit_h1(h, samples)


def sampled_sup(field: Callable, N: int, n: int, margin: float = 1e-6) -> float:
    """Max of |field| over a quasi-uniform sample set of resolution n."""
    return float(np.max(np.abs(field(sphere_samples(N, n, margin)))))
