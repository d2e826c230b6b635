"""Numerical verification of the nondegeneracy of fractional Sobolev bubbles.

The bubble ``w(x) = alpha (1+|x|^2)^(-(N-2s)/2)`` solves the integral equation
``w = gamma * |x|^(2s-N) * w^p``; its linearization has exactly the N+1
dimensional kernel spanned by the dilation and translation generators. The
modules here check every link of that statement numerically.
"""

from .bubble import Bubble, KernelFunction, bubble_profile, kernel_profile
from .decay import DecayFit, apply_weighted_riesz, bootstrap_check, fit_decay
from .errors import (
    DivergenceError,
    DomainError,
    FitError,
    NondegenError,
    NumericalError,
    PoleError,
    SamplingError,
    StructuralMismatchError,
)
from .funk_hecke import (
    a_constant,
    eigenvalue_closed,
    eigenvalue_quadrature,
    normalization_audit,
)
from .params import ProblemParams
from .report import CheckRecord, Report
from .riesz import RadialProfile, RieszConfig, apply_linearized, bubble_residual, riesz_radial
from .spectral import (
    SpectralReport,
    ZonalOperatorMatrix,
    build_zonal_matrix,
    nondegeneracy_certificate,
    spectrum,
)
from .sphere_transform import lift, lift_kernel_to_h1, stereo_inverse, stereo_project, verify_id1

__version__ = "0.1.0"
