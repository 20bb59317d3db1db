"""Linear dispersion semigroup: convolution, eigen-expansion and decay classes."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .data import InitialData
from .errors import AllMomentsVanish
from .kernel import KernelProfile, derivative_table
from .spectral import absolute_moment, eigenfunction, moments

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _nodes(data: InitialData, panel: float = 0.05):
    a, b = data.effective_support()
    npan = max(1, int(math.ceil((b - a) / panel)))
    edges = np.linspace(a, b, npan + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    z = (0.5 * (hi - lo) * _GL_X + 0.5 * (hi + lo)).ravel()
    w = (0.5 * (hi - lo) * _GL_W).ravel()
    return z, w * data(z)


def _convolve(kernel: KernelProfile, x: np.ndarray, z: np.ndarray, wu: np.ndarray, scale: float,
              chunk: int = 256) -> np.ndarray:
    """``scale^-1 int F((x - z)/scale) u(z) dz`` with precomputed weighted data."""
    out = np.empty(x.size)
    for s in range(0, x.size, chunk):
        xs = x[s:s + chunk]
        out[s:s + chunk] = kernel((xs[:, None] - z[None, :]) / scale) @ wu
    return out / scale


def evolve_convolution(u0: InitialData, t: float, x_grid, kernel: KernelProfile) -> np.ndarray:
    """``u(x,t) = t^(-1/(2k+1)) int F((x-z) t^(-1/(2k+1))) u0(z) dz``."""
    if t <= 0:
        raise ValueError("t must be positive")
    x = np.asarray(x_grid, dtype=float)
    scale = t ** (1.0 / (2 * kernel.k + 1))
    z, wu = _nodes(u0, min(0.05, 0.2 * scale))
    return _convolve(kernel, x, z, wu, scale)


@dataclass(frozen=True, eq=False)
class EvolutionState:
    """Rescaled solution ``w(y, tau) = sum_l exp(-l tau/(2k+1)) M_l psi_l(y)``."""

    k: int
    tau: float
    y_grid: np.ndarray
    moments: np.ndarray
    psi: np.ndarray
    truncation_error: float

    @property
    def coefficients(self) -> np.ndarray:
        l = np.arange(self.moments.size)
        return np.exp(-l * self.tau / (2 * self.k + 1)) * self.moments

    @property
    def w(self) -> np.ndarray:
        return self.coefficients @ self.psi

    @property
    def L(self) -> int:
        return self.moments.size - 1

    def advance(self, dtau: float) -> "EvolutionState":
        if dtau < 0:
            raise ValueError("the semigroup only runs forward")
        decay = math.exp(-(self.L + 1) * dtau / (2 * self.k + 1))
        return replace(self, tau=self.tau + dtau, truncation_error=self.truncation_error * decay)


def evolve_expansion(u0: InitialData, tau: float, L: int, kernel: KernelProfile,
                     y_grid=None, extra_terms: int = 4) -> EvolutionState:
    """Truncated eigen-expansion at rescaled time ``tau`` (``t = e^tau``).

    The error estimate sums ``|c_l| max|psi_l|`` over the next ``extra_terms``
    indices, a stand-in for the geometric majorant of the tail.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    prof = derivative_table(kernel, L + extra_terms)
    y = prof.grid if y_grid is None else np.asarray(y_grid, dtype=float)
    M = np.array([moments(u0, l) for l in range(L + extra_terms + 1)])
    psi = np.array([_psi_on(prof, l, y) for l in range(L + extra_terms + 1)])
    m = 2 * prof.k + 1
    tail = sum(
        math.exp(-l * tau / m) * abs(M[l]) * float(np.max(np.abs(psi[l])))
        for l in range(L + 1, L + extra_terms + 1)
    )
    return EvolutionState(prof.k, float(tau), y, M[: L + 1], psi[: L + 1], float(tail))


def _psi_on(prof: KernelProfile, l: int, y: np.ndarray) -> np.ndarray:
    if y is prof.grid:
        return eigenfunction(l, prof).psi_samples
    return (-1) ** l / math.sqrt(math.factorial(l)) * prof(y, order=l)


@dataclass(frozen=True)
class DecayClass:
    l_star: int
    coefficient: float
    rate: Fraction


def classify_decay(u0: InitialData, L: int = 12, k: int = 1, rel_threshold: float = 1e-8) -> DecayClass:
    """First non-vanishing moment and the resulting sup-norm decay exponent of ``u``.

    A moment counts as nonzero when it exceeds ``rel_threshold`` times the
    corresponding absolute moment of the data.
    """
    for l in range(L + 1):
        Ml = moments(u0, l)
        scale = absolute_moment(u0, l)
        if scale > 0 and abs(Ml) > rel_threshold * scale:
            return DecayClass(l, Ml, Fraction(-(1 + l), 2 * k + 1))
    raise AllMomentsVanish(f"all moments up to {L} vanish; the solution is zero at this resolution")


def measure_decay_exponent(u0: InitialData, kernel: KernelProfile, times=(4.0, 8.0, 16.0),
                           window: float = 6.0, n: int = 1201) -> float:
    """Least-squares slope of ``log max|u(., t)|`` against ``log t``.

    The maximum is taken over ``|x| <= window t^(1/(2k+1))``, a fixed window
    in the similarity variable.
    """
    m = 2 * kernel.k + 1
    sups = []
    for t in times:
        x = np.linspace(-window, window, n) * t ** (1.0 / m)
        sups.append(np.max(np.abs(evolve_convolution(u0, t, x, kernel))))
    slope, _ = np.polyfit(np.log(times), np.log(sups), 1)
    return float(slope)


def blowup_frame(u0: InitialData, tau: float, y_grid, kernel: KernelProfile) -> np.ndarray:
    """``w(y, tau) = u(y e^(-tau/m), 1 - e^(-tau))`` with ``m = 2k+1``.

    The adjoint polynomials describe the small-scale structure of this frame as
    ``tau`` grows; no zero classification is attempted here.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    y = np.asarray(y_grid, dtype=float)
    if tau == 0:
        return u0(y)
    m = 2 * kernel.k + 1
    s = (-math.expm1(-tau)) ** (1.0 / m)
    z, wu = _nodes(u0, min(0.05, 0.2 * s))
    return _convolve(kernel, y * math.exp(-tau / m), z, wu, s)
