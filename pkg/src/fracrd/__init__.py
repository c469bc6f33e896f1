"""Fourier pseudo-spectral solver for space-fractional reaction-diffusion equations.

The time integrator is a stabilized semi-implicit second-order backward
difference scheme; see :mod:`fracrd.stepping` and :mod:`fracrd.stability`.
"""
from .errors import ComputationError, ConfigError, DivergedError, FormatError, FracRDError, IoError
from .spectral import (
    GridSpec,
    PhysicalField,
    SpectralField,
    apply_fractional_laplacian,
    forward_transform,
    hr_seminorm,
    inverse_transform,
    l2_norm,
    multiplier,
    project,
)
from .stability import StabilityQuery, Verdict, is_stable, kappa_threshold, practical_kappa, unconditional_kappa
from .stepping import StepperConfig, first_step, run, step, step_system
from .models import allen_cahn, fitzhugh_nagumo, gray_scott, initial_condition, manufactured
from .studies import convergence_order, error_vs_reference, spatial_study, temporal_study

__version__ = "0.1.0"
