"""Tail constants, exponential bundle roots and weight exponents.

The kernel equation ``(-1)^(k+1) F^(2k) + y F/(2k+1) = 0`` has solutions
behaving like ``exp(b |y|^alpha)`` with ``alpha = (2k+1)/(2k)``.  The
admissible coefficients ``b`` on each side, and the gaps between them, fix
the tail behaviour of the kernel and of the weights used for truncation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class Side(str, enum.Enum):
    PLUS = "plus_infinity"
    MINUS = "minus_infinity"


class RootClass(str, enum.Enum):
    GROWING = "growing"
    NEUTRAL = "neutral"
    DECAYING = "decaying"


def _check_k(k) -> int:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    return int(k)


def _side(side) -> Side:
    if isinstance(side, Side):
        return side
    s = str(side).lower()
    if s in ("+", "plus", "+inf", "plus_infinity", "right"):
        return Side.PLUS
    if s in ("-", "minus", "-inf", "minus_infinity", "left"):
        return Side.MINUS
    raise ValueError(f"unknown side {side!r}")


@dataclass(frozen=True)
class AsymptoticParams:
    k: int
    alpha: float
    d_k: float
    b_k: float
    b_k_table: float
    d_hat_k: float
    envelope_exp: float
    pure_exponential_left: bool

    @property
    def order(self) -> int:
        return 2 * self.k + 1


def dispersion_constants(k: int) -> AsymptoticParams:
    """Closed-form tail constants for the operator of order 2k+1.

    ``b_k`` is the angle of the least damped decaying root at minus infinity,
    ``pi/2 + pi/(2k)``.  ``b_k_table`` keeps the older tabulated form, which
    disagrees with the root census for every k (it gives ``3pi/2`` at k=1 and
    a zero damping rate at k=2).
    """
    k = _check_k(k)
    alpha = (2 * k + 1) / (2 * k)
    d_k = 2 * k * (1.0 / (2 * k + 1)) ** alpha
    b_k = math.pi / 2 + math.pi / (2 * k)
    if k % 2 == 0:
        b_tab = math.pi / k * ((k + 1) // 2)
    else:
        b_tab = math.pi / k * (k + 1) / 2 + math.pi / (2 * k)
    d_hat = d_k * math.sin(math.pi / (2 * k))  # = d_k |cos b_k|, exact at k=1
    return AsymptoticParams(
        k=k,
        alpha=alpha,
        d_k=d_k,
        b_k=b_k,
        b_k_table=b_tab,
        d_hat_k=d_hat,
        envelope_exp=(2 * k - 1) / (4 * k),
        pure_exponential_left=(k == 1),
    )


def envelope(y, params: AsymptoticParams, side=Side.PLUS, phase: float = 0.0):
    """Leading-order tail model of the kernel.

    On the plus side this is ``y^(-e) cos(d_k y^alpha + phase)``.  On the minus
    side the oscillation runs at rate ``d_k sin b_k`` under the damping
    ``exp(-d_hat_k |y|^alpha)``; for k=1 it is the pure decay
    ``|y|^(-1/4) exp(-d_1 |y|^(3/2))``.  ``y`` is read as a distance, so both
    signs are accepted.
    """
    side = _side(side)
    z = np.abs(np.asarray(y, dtype=float))
    if np.any(z < 1.0):
        raise ValueError("envelope is an asymptotic model and needs |y| >= 1")
    amp = z ** (-params.envelope_exp)
    za = z**params.alpha
    if side is Side.PLUS:
        out = amp * np.cos(params.d_k * za + phase)
    elif params.pure_exponential_left:
        out = amp * np.exp(-params.d_k * za)
    else:
        osc = np.cos(params.d_k * math.sin(params.b_k) * za + phase)
        out = amp * osc * np.exp(-params.d_hat_k * za)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class BundleRoot:
    m: int
    value: complex
    side: Side
    classification: RootClass


def bundle_roots(k: int, side) -> list[BundleRoot]:
    """All 2k coefficients b with ``F ~ exp(b |y|^alpha)`` on the given side.

    They solve ``b^(2k) = s (2k)^(2k) / (2k+1)^(2k+1)`` with ``s = (-1)^k`` at
    plus infinity and ``s = (-1)^(k+1)`` at minus infinity.  The values carry
    the full scale ``d_k``.  Conjugate pairs are stored as exact conjugates.
    """
    k = _check_k(k)
    side = _side(side)
    d_k = dispersion_constants(k).d_k
    sign = (-1) ** k if side is Side.PLUS else (-1) ** (k + 1)
    base = 0.0 if sign > 0 else math.pi
    n = 2 * k
    vals: list[complex] = [0j] * n
    for m in range(n):
        th = (base + 2 * math.pi * m) / n
        vals[m] = complex(d_k * math.cos(th), d_k * math.sin(th))
    # conjugate partner of index m
    for m in range(n):
        j = (n - m) % n if base == 0.0 else n - 1 - m
        if j == m:
            vals[m] = complex(vals[m].real, 0.0)
        elif j > m:
            vals[j] = vals[m].conjugate()
    tol = 1e-12 * d_k
    out = []
    for m, v in enumerate(vals):
        if abs(v.real) <= tol:
            v = complex(0.0, v.imag)
            cls = RootClass.NEUTRAL
        elif v.real > 0:
            cls = RootClass.GROWING
        else:
            cls = RootClass.DECAYING
        out.append(BundleRoot(m=m, value=v, side=side, classification=cls))
    return out


def root_census(k: int, side) -> dict[RootClass, int]:
    counts = {c: 0 for c in RootClass}
    for r in bundle_roots(k, side):
        counts[r.classification] += 1
    return counts


@dataclass(frozen=True)
class WeightSpec:
    side: Side
    exponent: float
    a_max: float
    d_gap: float


def _gap_rho(k: int, side: Side, d_k: float) -> float:
    if side is Side.PLUS:
        if k == 1:
            return math.inf  # no growing bundle on this side
        return d_k * math.cos((k - 2) * math.pi / (2 * k))
    if k % 2 == 0:
        return d_k * math.cos(((k - 1) // 2) * math.pi / k + math.pi / (2 * k))
    return d_k * math.cos((k - 1) / 2 * math.pi / k)


def _gap_rho_star(k: int, side: Side, d_k: float) -> float:
    if side is Side.PLUS:
        return _gap_rho(k, Side.MINUS, d_k)
    if k == 1:
        return math.inf
    if k % 2 == 0:
        return d_k * math.cos((k - 2) / 2 * math.pi / k)
    return d_k * math.cos(((k - 2) // 2) * math.pi / k + math.pi / (2 * k))


def weight_bounds(k: int) -> tuple[dict[Side, WeightSpec], dict[Side, WeightSpec]]:
    """Admissible exponential weights ``exp(-+a |y|^alpha)`` for rho and rho*.

    ``d_gap`` is the real-axis distance from the kept roots to the nearest
    growing root and ``a`` may range over ``(0, 2 d_gap)``.  Where a side has
    no growing bundle at all (k=1) the gap is reported as ``inf``.
    """
    k = _check_k(k)
    prm = dispersion_constants(k)
    rho, rho_star = {}, {}
    for side in Side:
        g = _gap_rho(k, side, prm.d_k)
        rho[side] = WeightSpec(side, prm.alpha, 2 * g, g)
        g = _gap_rho_star(k, side, prm.d_k)
        rho_star[side] = WeightSpec(side, prm.alpha, 2 * g, g)
    return rho, rho_star


def default_weight_exponent(k: int) -> float:
    """Half of the tightest finite ``a_max`` over both sides of rho."""
    rho, _ = weight_bounds(k)
    return min(0.5 * w.a_max for w in rho.values() if math.isfinite(w.a_max))


def bundle_vector(k: int, b: complex, y: float, gamma: float, n: int) -> np.ndarray:
    """Derivative ratios ``[1, f'/f, ..., f^(n-1)/f]`` of ``|y|^gamma exp(b |y|^alpha)``.

    Computed exactly from the power-sum form of the log-derivative, so the
    vector is accurate up to the neglected corrections of the bundle itself.
    """
    alpha = (2 * k + 1) / (2 * k)
    z = abs(float(y))
    sigma = 1.0 if y > 0 else -1.0
    dlog = {alpha - 1.0: b * alpha, -1.0: complex(gamma)}
    poly = {0.0: 1.0 + 0j}
    out = np.empty(n, dtype=complex)
    for j in range(n):
        out[j] = sum(c * z**e for e, c in poly.items())
        nxt: dict[float, complex] = {}
        for e, c in poly.items():
            if e != 0.0:
                nxt[e - 1.0] = nxt.get(e - 1.0, 0j) + c * e
            for e2, c2 in dlog.items():
                nxt[e + e2] = nxt.get(e + e2, 0j) + c * c2
        poly = {e: sigma * c for e, c in nxt.items() if c != 0}
    return out


def real_span(vectors) -> np.ndarray:
    """Real basis (columns) spanned by the real and imaginary parts of complex vectors."""
    cols = []
    seen: list[np.ndarray] = []
    for v in vectors:
        v = np.asarray(v, dtype=complex)
        if any(np.allclose(v, w.conj(), rtol=1e-12, atol=0) for w in seen):
            continue
        seen.append(v)
        cols.append(v.real)
        if np.max(np.abs(v.imag)) > 1e-14 * np.max(np.abs(v)):
            cols.append(v.imag)
    return np.array(cols).T
