"""Problem parameters (N, s) and the closed-form constants derived from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import DomainError
from .special_fns import log_gamma

__all__ = ["ProblemParams", "amplitude_value", "riesz_gamma_value", "DEFECTS"]

# name -> keyword overrides producing a deliberately wrong ProblemParams
DEFECTS = {
    "amplitude": {"amplitude_factor": 1.1},
    "gamma": {"gamma_factor": 1.1},
    "exponent": {"exponent_shift": 0.1},
}


def amplitude_value(N: int, s: float) -> float:
    """Bubble amplitude ``lambda^((N-2s)/(4s))``, ``lambda = 4^s G((N+2s)/2)/G((N-2s)/2)``.

    Accepts the boundary value ``s = 1`` so the classical constant
    ``(N(N-2))^((N-2)/4)`` can be checked.
    """
    log_lam = 2 * s * math.log(2.0) + log_gamma((N + 2 * s) / 2) - log_gamma((N - 2 * s) / 2)
    return math.exp(log_lam * (N - 2 * s) / (4 * s))


def riesz_gamma_value(N: int, s: float) -> float:
    """Riesz constant ``G((N-2s)/2) / (4^s pi^(N/2) G(s))`` of the inverse fractional Laplacian."""
    return math.exp(
        log_gamma((N - 2 * s) / 2)
        - 2 * s * math.log(2.0)
        - 0.5 * N * math.log(math.pi)
        - log_gamma(s)
    )


@dataclass(frozen=True)
class ProblemParams:
    """Dimension ``N`` and order ``s`` with every derived exponent and constant.

    The ``*_factor`` / ``exponent_shift`` fields exist only to inject defects
    into a run (falsifiability controls); at their defaults every derived
    value is a pure function of ``(N, s)``.
    """

    N: int
    s: float
    amplitude_factor: float = 1.0
    gamma_factor: float = 1.0
    exponent_shift: float = 0.0
    p: float = field(init=False)
    two_star: float = field(init=False)
    funk_alpha: float = field(init=False)
    bubble_amplitude: float = field(init=False)
    riesz_gamma: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 1:
            raise DomainError(f"N must be a positive integer, got {self.N!r}")
        if not 0 < self.s < 1:
            raise DomainError(f"s must lie in (0, 1), got {self.s!r}")
        if not self.N > 2 * self.s:
            raise DomainError(f"need N > 2s, got N={self.N}, s={self.s}")
        N, s = self.N, self.s
        object.__setattr__(self, "p", (N + 2 * s) / (N - 2 * s))
        object.__setattr__(self, "two_star", 2 * N / (N - 2 * s))
        object.__setattr__(self, "funk_alpha", N / 2 - s)
        object.__setattr__(self, "bubble_amplitude", self.amplitude_factor * amplitude_value(N, s))
        object.__setattr__(self, "riesz_gamma", self.gamma_factor * riesz_gamma_value(N, s))

    @property
    def decay(self) -> float:
        """``N - 2s``: decay exponent of the bubble at infinity."""
        return self.N - 2 * self.s

    @property
    def kernel_exponent(self) -> float:
        """Exponent of the Riesz kernel ``|x-y|^(-(N-2s))`` (shifted only under defect injection)."""
        return self.N - 2 * self.s + self.exponent_shift

    @property
    def is_perturbed(self) -> bool:
        return (self.amplitude_factor, self.gamma_factor, self.exponent_shift) != (1.0, 1.0, 0.0)

    def clean(self) -> "ProblemParams":
        return ProblemParams(self.N, self.s)

    def with_defect(self, name: str) -> "ProblemParams":
        try:
            return replace(self, **DEFECTS[name])
        except KeyError:
            raise DomainError(f"unknown defect {name!r}; choose from {sorted(DEFECTS)}") from None
