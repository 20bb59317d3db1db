"""Exception and warning classes shared across the package."""


class DispersionLabError(Exception):
    """Base class for numerical failures raised by this package."""


class NonConvergence(DispersionLabError):
    pass


class DegenerateSolution(DispersionLabError):
    pass


class QuadratureFailure(DispersionLabError):
    pass


class DecayClassViolation(DispersionLabError, ValueError):
    pass


class RegularizationUnsupported(DispersionLabError):
    pass


class AllMomentsVanish(DispersionLabError):
    pass


class TailTooShort(DispersionLabError):
    pass


class PreconditionViolation(DispersionLabError):
    pass


class KernelDomainExceeded(UserWarning):
    """Kernel evaluated outside its tabulated window; asymptotic extrapolation used."""
