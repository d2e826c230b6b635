"""The extremal bubbles and the N+1 generators of the linearized kernel.

Kernel generators come from differentiating the bubble by hand:

    Z_0 = (N-2s)/2 w + x.grad w = a (N-2s)/2 (1-|x|^2) (1+|x|^2)^(-(N-2s)/2-1)
    Z_i = d w / d x_i           = -a (N-2s) x_i (1+|x|^2)^(-(N-2s)/2-1)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .params import ProblemParams

__all__ = [
    "Bubble",
    "KernelFunction",
    "bubble_amplitude",
    "bubble_eval",
    "bubble_profile",
    "kernel_eval",
    "kernel_profile",
]


def bubble_amplitude(params: ProblemParams) -> float:
    """Amplitude making ``w`` solve ``(-Lap)^s w = w^p``."""
    return params.bubble_amplitude


def bubble_profile(params: ProblemParams, r):
    """Radial profile ``w(r)`` of the centered unit-scale bubble."""
    r = np.asarray(r, dtype=float)
    return params.bubble_amplitude * (1.0 + r * r) ** (-0.5 * params.decay)


@dataclass(frozen=True)
class Bubble:
    params: ProblemParams
    mu: float = 1.0
    xi: tuple = None
    amplitude: float = field(init=False)

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError("bubble scale must be positive")
        xi = np.zeros(self.params.N) if self.xi is None else np.asarray(self.xi, dtype=float)
        if xi.shape != (self.params.N,):
            raise DomainError(f"center must have {self.params.N} coordinates")
        object.__setattr__(self, "xi", tuple(xi))
        object.__setattr__(self, "amplitude", self.params.bubble_amplitude)

    @property
    def decay_exponent(self) -> float:
        return self.params.decay

    def __call__(self, x):
        return bubble_eval(self, x)


def bubble_eval(b: Bubble, x):
    """``mu^((N-2s)/2) w(mu (x - xi))`` at points ``x`` of shape (..., N)."""
    x = np.asarray(x, dtype=float)
    d2 = np.sum((x - np.asarray(b.xi)) ** 2, axis=-1)
    return b.amplitude * (b.mu / (1.0 + b.mu * b.mu * d2)) ** (0.5 * b.params.decay)


@dataclass(frozen=True)
class KernelFunction:
    """Generator ``Z_k``: k = 0 is the dilation, k = i >= 1 is ``d w/d x_i``."""

    params: ProblemParams
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.params.N:
            raise DomainError(f"kernel index must lie in 0..{self.params.N}")

    @property
    def harmonic_degree(self) -> int:
        return 0 if self.k == 0 else 1

    @property
    def decay_exponent(self) -> float:
        return self.params.decay + self.harmonic_degree

    def __call__(self, x):
        return kernel_eval(self, x)


def kernel_profile(params: ProblemParams, k: int, r):
    """Radial coefficient of ``Z_k``.

    For k = 0 this is ``Z_0(r)``; for k >= 1 it is ``g`` in
    ``Z_i(x) = g(|x|) x_i/|x|`` (the same for every i).
    """
    r = np.asarray(r, dtype=float)
    a, eps = params.bubble_amplitude, params.decay
    base = (1.0 + r * r) ** (-0.5 * eps - 1.0)
    if k == 0:
        return a * 0.5 * eps * (1.0 - r * r) * base
    return -a * eps * r * base


def kernel_eval(z: KernelFunction, x):
    """Closed-form ``Z_k(x)`` at points of shape (..., N)."""
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    a, eps = z.params.bubble_amplitude, z.params.decay
    base = (1.0 + r2) ** (-0.5 * eps - 1.0)
    if z.k == 0:
        return a * 0.5 * eps * (1.0 - r2) * base
    return -a * eps * x[..., z.k - 1] * base
