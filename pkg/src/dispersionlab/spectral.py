"""Spectral pair of the rescaled dispersion operator and its adjoint.

``B v = (-1)^(k+1) v^(2k+1) + (y v' + v)/(2k+1)`` has eigenfunctions
``psi_l = ((-1)^l/sqrt(l!)) D^l F`` with eigenvalues ``-l/(2k+1)``.  The
adjoint ``B* = (-1)^(k+1) D^(2k+1) - (y/(2k+1)) D`` has polynomial
eigenfunctions, kept here with exact rational coefficients.  The two
families are paired through ``<v, w>_* = int v(y) w(-y) dy``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.special import erfc

from ._quad import simpson_weights
from .data import InitialData
from .errors import DecayClassViolation, RegularizationUnsupported
from .kernel import KernelProfile, derivative_table


def eigenvalue(l: int, k: int) -> Fraction:
    if l < 0 or k < 1:
        raise ValueError("need l >= 0 and k >= 1")
    return Fraction(-l, 2 * k + 1)


@dataclass(frozen=True, eq=False)
class EigenPair:
    l: int
    k: int
    lam: Fraction
    grid: np.ndarray
    psi_samples: np.ndarray


def _psi_scale(l: int) -> float:
    return (-1) ** l / math.sqrt(math.factorial(l))


def eigenfunction(l: int, kernel: KernelProfile) -> EigenPair:
    if l > kernel.max_order:
        raise ValueError(f"derivative table has order {kernel.max_order} < {l}; extend it first")
    return EigenPair(l, kernel.k, eigenvalue(l, kernel.k), kernel.grid, _psi_scale(l) * kernel.deriv_table[l])


def residual_B(pair: EigenPair, kernel: KernelProfile, window: tuple[float, float] = (-10.0, 10.0)) -> float:
    """Max of ``|B psi_l - lambda_l psi_l|`` over the window, from the recurrence table."""
    k, l, m = pair.k, pair.l, 2 * pair.k + 1
    prof = derivative_table(kernel, l + m)
    c = _psi_scale(l)
    y = prof.grid
    v, dv, dm = (c * prof.deriv_table[l + j] for j in (0, 1, m))
    Bv = (-1) ** (k + 1) * dm + (y * dv + v) / m
    sel = (y >= window[0]) & (y <= window[1])
    return float(np.max(np.abs(Bv - float(pair.lam) * v)[sel]))


# --------------------------------------------------------------------------
# adjoint polynomials


class SignConvention(str, enum.Enum):
    PLAIN = "plain"
    METRIC_ADJUSTED = "metric_adjusted"


@dataclass(frozen=True)
class AdjointPolynomial:
    """``psi*_l = sum coeffs[d] y^d / sqrt(l!)``.

    ``coeffs`` is exact; the common factor ``1/sqrt(l!)`` is kept apart as
    ``norm_sq = 1/l!`` so that pairings can be formed in rational arithmetic.
    """

    l: int
    k: int
    coeffs: tuple[Fraction, ...]
    sign_convention: SignConvention = SignConvention.METRIC_ADJUSTED

    @property
    def norm_sq(self) -> Fraction:
        return Fraction(1, math.factorial(self.l))

    @property
    def degree(self) -> int:
        nz = [d for d, c in enumerate(self.coeffs) if c != 0]
        return nz[-1] if nz else -1

    def nonzero_degrees(self) -> list[int]:
        return [d for d, c in enumerate(self.coeffs) if c != 0]

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        vals = np.polynomial.polynomial.polyval(y, [float(c) for c in self.coeffs])
        return vals * math.sqrt(float(self.norm_sq))


def _falling(n: int, j: int) -> int:
    out = 1
    for i in range(j):
        out *= n - i
    return out


def adjoint_polynomial(l: int, k: int, convention: SignConvention | str = SignConvention.METRIC_ADJUSTED) -> AdjointPolynomial:
    """Exact polynomial eigenfunction of ``B*`` for eigenvalue ``-l/(2k+1)``.

    ``psi*_l = (1/sqrt(l!)) sum_j ((-1)^(kj)/j!) D^((2k+1)j) y^l``, times
    ``(-1)^l`` under the metric-adjusted convention, which makes
    ``<psi_l, psi*_l>_* = 1``.
    """
    if l < 0 or k < 1:
        raise ValueError("need l >= 0 and k >= 1")
    convention = SignConvention(convention)
    m = 2 * k + 1
    coeffs = [Fraction(0)] * (l + 1)
    for j in range(l // m + 1):
        coeffs[l - m * j] = Fraction((-1) ** (k * j) * _falling(l, m * j), math.factorial(j))
    if convention is SignConvention.METRIC_ADJUSTED and l % 2:
        coeffs = [-c for c in coeffs]
    return AdjointPolynomial(l, k, tuple(coeffs), convention)


def apply_B_star(poly: AdjointPolynomial | Sequence, k: int | None = None) -> AdjointPolynomial:
    """``(-1)^(k+1) D^(2k+1) - (y/(2k+1)) D`` applied to the exact coefficients."""
    if isinstance(poly, AdjointPolynomial):
        coeffs, k_, l, conv = list(poly.coeffs), poly.k, poly.l, poly.sign_convention
    else:
        if k is None:
            raise ValueError("k is required for a raw coefficient sequence")
        coeffs, k_, l, conv = [Fraction(c) for c in poly], k, len(poly) - 1, SignConvention.PLAIN
    m = 2 * k_ + 1
    sign = (-1) ** (k_ + 1)
    out = [Fraction(0)] * len(coeffs)
    for d, c in enumerate(coeffs):
        if c == 0:
            continue
        out[d] -= Fraction(d, m) * c
        if d >= m:
            out[d - m] += sign * _falling(d, m) * c
    return AdjointPolynomial(l, k_, tuple(out), conv)


# --------------------------------------------------------------------------
# moments


def _check_decay(decay, l: int) -> None:
    if decay in ("compact", "exponential"):
        return
    q = float(decay)
    if l >= q - 1:
        raise DecayClassViolation(f"moment {l} diverges for data decaying like |z|^-{q:g}")


def moments(data: InitialData, l: int, *, epsrel: float = 1e-12) -> float:
    """``M_l = (1/sqrt(l!)) int z^l u(z) dz`` by adaptive quadrature."""
    _check_decay(data.decay, l)
    a, b = data.effective_support()
    if a == b:
        return 0.0
    pieces = np.linspace(a, b, max(2, int(math.ceil((b - a) / 0.5)) + 1))
    total = 0.0
    with warnings.catch_warnings():
        # vanishing moments cannot meet a purely relative tolerance
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for lo, hi in zip(pieces[:-1], pieces[1:]):
            val, _ = integrate.quad(lambda z: z**l * float(data(z)), lo, hi, epsabs=0.0, epsrel=epsrel, limit=200)
            total += val
    return total / math.sqrt(math.factorial(l))


def absolute_moment(data: InitialData, l: int) -> float:
    """``(1/sqrt(l!)) int |z|^l |u(z)| dz``, the scale used for moment thresholds."""
    _check_decay(data.decay, l)
    a, b = data.effective_support()
    if a == b:
        return 0.0
    val, _ = integrate.quad(lambda z: abs(z) ** l * abs(float(data(z))), a, b, limit=400)
    return val / math.sqrt(math.factorial(l))


# --------------------------------------------------------------------------
# pairing


class PairingMode(str, enum.Enum):
    ANALYTIC = "analytic_case_split"
    FILTERED = "filtered_quadrature"


@dataclass(frozen=True)
class TruncationPolicy:
    k: int = 1
    max_index: int = 12
    pairing_regularization: PairingMode = PairingMode.ANALYTIC
    filter_centres: tuple[float, ...] = (25.0, 28.0, 31.0, 34.0)
    filter_width: float = 3.0

    @property
    def nu(self) -> float:
        return (2 * self.k - 1) / (2 * (2 * self.k + 1))


def kernel_moment(n: int, k: int) -> Fraction:
    """Regularized ``int y^n F dy``: ``(mj)!/j! (-1)^(kj)`` when ``n = mj``, else 0."""
    m = 2 * k + 1
    if n % m:
        return Fraction(0)
    j = n // m
    return Fraction((-1) ** (k * j) * math.factorial(n), math.factorial(j))


def _poly_deriv(c: list[Fraction], times: int) -> list[Fraction]:
    for _ in range(times):
        c = [d * c[d] for d in range(1, len(c))] or [Fraction(0)]
    return c


def exact_pairing(beta: int, poly: AdjointPolynomial) -> tuple[Fraction, Fraction]:
    """``<psi_beta, psi*>_*`` as ``(rational part r, square s)`` with value ``r sqrt(s)``.

    Integration by parts moves ``D^beta`` onto the reflected polynomial, and the
    remaining integrals against F are the regularized kernel moments.
    """
    k = poly.k
    # q(y) = psi*(-y) up to the 1/sqrt(l!) factor
    refl = [c * (-1) ** d for d, c in enumerate(poly.coeffs)]
    dq = _poly_deriv(refl, beta)
    total = sum((c * kernel_moment(n, k) for n, c in enumerate(dq)), Fraction(0))
    # psi_beta = (-1)^beta D^beta F / sqrt(beta!), by parts gives another (-1)^beta
    return total, poly.norm_sq * Fraction(1, math.factorial(beta))


def _exact_sqrt(s: Fraction) -> Fraction | None:
    a, b = math.isqrt(s.numerator), math.isqrt(s.denominator)
    return Fraction(a, b) if a * a == s.numerator and b * b == s.denominator else None


def _filtered_pairing(samples: np.ndarray, grid: np.ndarray, poly: AdjointPolynomial,
                      policy: TruncationPolicy) -> tuple[float, float]:
    w = simpson_weights(grid)
    base = samples * poly(-grid) * w
    vals = []
    for c in policy.filter_centres:
        if c + 8 * policy.filter_width > grid[-1]:
            raise RegularizationUnsupported(f"filter centre {c:g} too close to the window edge {grid[-1]:g}")
        vals.append(float(np.sum(base * 0.5 * erfc((grid - c) / policy.filter_width))))
    vals = np.array(vals)
    return float(vals.mean()), float(vals.max() - vals.min())


def indefinite_pairing(f, g: AdjointPolynomial, policy: TruncationPolicy,
                       kernel: KernelProfile | None = None) -> float:
    """``<f, g>_*`` for an eigenfunction ``f`` (an EigenPair or its index) and adjoint polynomial ``g``.

    The analytic mode evaluates the pairing exactly through the regularized
    kernel moments, which realizes the case split: zero off the diagonal and
    one on it.  The filtered mode multiplies sampled data by a smooth cutoff
    ``erfc((y-c)/w)/2`` and averages over several centres ``c``.
    """
    mode = PairingMode(policy.pairing_regularization)
    if mode is PairingMode.ANALYTIC:
        if isinstance(f, EigenPair):
            beta = f.l
        elif isinstance(f, (int, np.integer)):
            beta = int(f)
        else:
            raise RegularizationUnsupported("analytic pairing needs an eigenfunction of B")
        r, s = exact_pairing(beta, g)
        return float(r * root) if (root := _exact_sqrt(s)) is not None else float(r) * math.sqrt(s)
    if isinstance(f, (int, np.integer)):
        if kernel is None:
            raise RegularizationUnsupported("filtered pairing of an index needs a kernel profile")
        f = eigenfunction(int(f), derivative_table(kernel, int(f)))
    if isinstance(f, EigenPair):
        grid, samples = f.grid, f.psi_samples
    elif isinstance(f, tuple) and len(f) == 2:
        grid, samples = (np.asarray(a, dtype=float) for a in f)
    else:
        raise RegularizationUnsupported(f"cannot pair object of type {type(f).__name__}")
    return _filtered_pairing(samples, grid, g, policy)[0]


def biorthonormality_matrix(L: int, k: int, kernel: KernelProfile | None = None,
                            policy: TruncationPolicy | None = None,
                            convention: SignConvention | str = SignConvention.METRIC_ADJUSTED) -> np.ndarray:
    """``(L+1) x (L+1)`` matrix of ``<psi_beta, psi*_gamma>_*``."""
    policy = policy or TruncationPolicy(k=k, max_index=L)
    polys = [adjoint_polynomial(g, k, convention) for g in range(L + 1)]
    out = np.zeros((L + 1, L + 1))
    filtered = PairingMode(policy.pairing_regularization) is PairingMode.FILTERED
    if filtered:
        if kernel is None:
            raise RegularizationUnsupported("filtered mode needs a kernel profile")
        kernel = derivative_table(kernel, L)
    for b in range(L + 1):
        f = eigenfunction(b, kernel) if filtered else b
        for g in range(L + 1):
            out[b, g] = indefinite_pairing(f, polys[g], policy, kernel)
    return out


def biorthonormality_deviation(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - np.eye(matrix.shape[0]))))
