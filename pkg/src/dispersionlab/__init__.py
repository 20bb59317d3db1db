"""Spectral theory and similarity solutions for odd-order linear dispersion.

Modules
-------
asymptotics   tail constants, bundle roots, weight exponents
kernel        the rescaled fundamental kernel, by shooting and by Fourier quadrature
spectral      eigenfunctions, adjoint polynomials, moments, pairings
evolution     convolution and eigen-expansion of the linear flow
vss           very singular similarity profiles and their branches
majorant      positive majorizing kernel and comparison flow
"""

__version__ = "0.1.0"

from .asymptotics import (
    AsymptoticParams, BundleRoot, RootClass, Side, WeightSpec,
    bundle_roots, dispersion_constants, envelope, weight_bounds,
)
from .data import InitialData, bump, gaussian, gaussian_derivative, moment_killed
from .errors import (
    AllMomentsVanish, DecayClassViolation, DegenerateSolution, DispersionLabError, KernelDomainExceeded,
    NonConvergence, PreconditionViolation, QuadratureFailure, RegularizationUnsupported, TailTooShort,
)
from .kernel import (
    KernelProfile, Normalization, ShootingConfig,
    derivative_table, kernel_via_fourier, normalize, solve_kernel,
)

__all__ = [
    "AsymptoticParams", "BundleRoot", "RootClass", "Side", "WeightSpec",
    "bundle_roots", "dispersion_constants", "envelope", "weight_bounds",
    "InitialData", "bump", "gaussian", "gaussian_derivative", "moment_killed",
    "AllMomentsVanish", "DecayClassViolation", "DegenerateSolution", "DispersionLabError",
    "KernelDomainExceeded", "NonConvergence", "PreconditionViolation", "QuadratureFailure",
    "RegularizationUnsupported", "TailTooShort",
    "KernelProfile", "Normalization", "ShootingConfig",
    "derivative_table", "kernel_via_fourier", "normalize", "solve_kernel",
]
