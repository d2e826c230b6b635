"""Decay bootstrap: one application of the weighted Riesz operator and its exponents.

``(K v)(x) = int J(y)^(2s/N) v(y) / |x-y|^(N-2s) dy`` with ``J^(2s/N) = (2/(1+|y|^2))^(2s)``.
For radial ``v`` decaying like ``|y|^-nu`` the output decays like
``|x|^-min(nu+2s, N-2s)`` away from the borderline ``nu + 4s = N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .bubble import kernel_profile
from .errors import DomainError, FitError
from .params import ProblemParams
from .riesz import RadialProfile, RieszConfig, riesz_radial

__all__ = [
    "DecayFit",
    "TabulatedProfile",
    "apply_weighted_riesz",
    "weighted_riesz_profile",
    "fit_decay",
    "power_profile",
    "predicted_sequence",
    "predicted_steps",
    "bootstrap_check",
    "kernel_decay",
    "GRID",
    "FIT_WINDOW",
]

GRID = np.logspace(-2, 4, 160)
FIT_WINDOW = (10.0, 1e3)


@dataclass(frozen=True)
class DecayFit:
    r_min: float
    r_max: float
    exponent: float
    r_squared: float
    radii: np.ndarray
    values: np.ndarray

    @property
    def accepted(self) -> bool:
        return self.r_squared >= 0.999 and math.log10(self.r_max / self.r_min) >= 1.5


def fit_decay(radii, values) -> DecayFit:
    """Least-squares slope of ``log|value|`` against ``log r``; exponent is minus the slope."""
    r = np.asarray(radii, dtype=float)
    v = np.asarray(values, dtype=float)
    if r.shape != v.shape or r.ndim != 1:
        raise FitError("radii and values must be 1-D arrays of equal length")
    if r.size < 8:
        raise FitError("need at least 8 samples")
    if np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise FitError("radii must be positive and increasing")
    if math.log10(r[-1] / r[0]) < 1.5 - 1e-12:
        raise FitError("window must span at least 1.5 decades")
    if np.any(v == 0) or not np.all(np.isfinite(v)):
        raise FitError("zero or non-finite value in window; choose a larger r_min")
    if np.any(np.sign(v) != np.sign(v[0])):
        raise FitError("sign change in window; choose a larger r_min")
    x, y = np.log(r), np.log(np.abs(v))
    slope, icpt = np.polyfit(x, y, 1)
    res = y - (slope * x + icpt)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(res**2) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(float(r[0]), float(r[-1]), float(-slope), float(r2), r, v)


def power_profile(nu: float) -> RadialProfile:
    """The bounded radial field ``(1+r^2)^(-nu/2)``."""
    if nu < 0:
        raise DomainError("decay must be nonnegative")
    return RadialProfile(lambda r: (1.0 + r * r) ** (-0.5 * nu), nu)


def _weighted(params: ProblemParams, v: RadialProfile) -> RadialProfile:
    s = params.s

    def ev(r):
        return (2.0 / (1.0 + r * r)) ** (2 * s) * v(r)

    return RadialProfile(ev, v.decay_exponent + 4 * s, v.tail_start, v.scale)


def apply_weighted_riesz(params: ProblemParams, v: RadialProfile, r: float,
                         cfg: RieszConfig = None, scaled: bool = False) -> float:
    """``int J^(2s/N) v / |x-y|^(N-2s) dy`` at radius r; ``scaled`` multiplies by the
    constant ``c = gamma p alpha^(p-1) 4^-s`` of the linearized equation on the sphere."""
    if v.decay_exponent < 0:
        raise DomainError("input field must be bounded (decay >= 0)")
    pref = 1.0
    if scaled:
        pref = params.riesz_gamma * params.p * params.bubble_amplitude ** (params.p - 1) * 4.0 ** (-params.s)
    return riesz_radial(params, _weighted(params, v), 0, r, cfg, prefactor=pref)


class TabulatedProfile:
    """Radial field cached on a log grid: Pchip in log-log, power law beyond the grid."""

    def __init__(self, radii, values, tail_fit_decades: float = 1.0):
        r = np.asarray(radii, dtype=float)
        v = np.asarray(values, dtype=float)
        if np.any(v <= 0):
            raise FitError("tabulated field must be positive")
        self.radii, self.values = r, v
        self._interp = PchipInterpolator(np.log(r), np.log(v), extrapolate=False)
        mask = r >= r[-1] * 10 ** (-tail_fit_decades)
        # local slope over the last decade drives the extrapolation
        self.tail_exponent = float(-np.polyfit(np.log(r[mask]), np.log(v[mask]), 1)[0])
        self.r_lo, self.r_hi = r[0], r[-1]

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        lo, hi = r < self.r_lo, r > self.r_hi
        mid = ~(lo | hi)
        out[lo] = self.values[0]
        out[hi] = self.values[-1] * (r[hi] / self.r_hi) ** (-self.tail_exponent)
        out[mid] = np.exp(self._interp(np.log(r[mid])))
        return out

    def as_profile(self) -> RadialProfile:
        return RadialProfile(self, self.tail_exponent, tail_start=self.r_hi)


def weighted_riesz_profile(params: ProblemParams, v: RadialProfile, grid=GRID,
                           cfg: RieszConfig = None) -> TabulatedProfile:
    vals = np.array([apply_weighted_riesz(params, v, float(r), cfg) for r in grid])
    return TabulatedProfile(grid, vals)


def _window(table: TabulatedProfile, window):
    lo, hi = window
    mask = (table.radii >= lo * (1 - 1e-12)) & (table.radii <= hi * (1 + 1e-12))
    return fit_decay(table.radii[mask], table.values[mask])


def predicted_sequence(params: ProblemParams, nu: float, steps: int) -> list:
    out, cur = [], nu
    for _ in range(steps):
        cur = min(cur + 2 * params.s, params.N - 2 * params.s)
        out.append(cur)
    return out


def predicted_steps(params: ProblemParams, nu: float) -> int:
    """Applications needed to reach the saturated exponent N - 2s from nu."""
    gap = params.N - 2 * params.s - nu
    return max(0, math.ceil(gap / (2 * params.s) - 1e-12))


def bootstrap_check(params: ProblemParams, nu: float, steps: int, window=FIT_WINDOW,
                    cfg: RieszConfig = None, grid=GRID):
    """Iterate the weighted Riesz operator from ``(1+r^2)^(-nu/2)``.

    Returns ``[(step, measured, predicted, fit), ...]``.
    """
    if nu < 0:
        raise DomainError("starting decay must be nonnegative")
    if steps < 1:
        raise DomainError("need at least one step")
    pred = predicted_sequence(params, nu, steps)
    v = power_profile(nu)
    out = []
    for k in range(steps):
        table = weighted_riesz_profile(params, v, grid, cfg)
        fit = _window(table, window)
        out.append((k + 1, fit.exponent, pred[k], fit))
        v = table.as_profile()
    return out


def kernel_decay(params: ProblemParams, k: int, window=FIT_WINDOW, n: int = 40) -> DecayFit:
    """Fitted decay exponent of ``|Z_k|`` along a ray."""
    r = np.logspace(math.log10(window[0]), math.log10(window[1]), n)
    return fit_decay(r, kernel_profile(params, k, r))
