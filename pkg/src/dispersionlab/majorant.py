"""Positive majorizing kernel and the order-preserving comparison evolution.

The kernel changes sign, so the linear flow is not order preserving.  A
strictly positive kernel ``Fbar`` with ``|F| <= D Fbar`` gives a positive
flow that dominates ``|u|`` whenever the data satisfy ``D |u0| <= ubar0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._quad import simpson_weights
from .asymptotics import default_weight_exponent, dispersion_constants
from .data import InitialData
from .errors import PreconditionViolation
from .kernel import KernelProfile, derivative_table


def _sigmoid(y):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(y, dtype=float)))


def majorant_shape(y, k: int, a: float) -> np.ndarray:
    """Unnormalized ``(1+y^2)^(-(2k-1)/(8k)) (s(y) + exp(-a (1+y^2)^(alpha/2)) s(-y))``."""
    prm = dispersion_constants(k)
    q = 1.0 + np.asarray(y, dtype=float) ** 2
    return q ** (-(2 * k - 1) / (8 * k)) * (_sigmoid(y) + np.exp(-a * q ** (prm.alpha / 2)) * _sigmoid(-y))


@dataclass(frozen=True, eq=False)
class MajorantKernel:
    """Majorant sampled on a finite grid and vanishing outside it.

    The right envelope decays like ``y^(-(2k-1)/(4k))``, which is not
    integrable, so unit mass is imposed on the grid window only.
    """

    k: int
    a: float
    omega1: float
    grid: np.ndarray
    values: np.ndarray
    scale: float  # multiplies majorant_shape to give values

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        inside = (y >= self.grid[0]) & (y <= self.grid[-1])
        return np.where(inside, self.scale * majorant_shape(y, self.k, self.a), 0.0)

    def scaled(self, c: float) -> "MajorantKernel":
        return MajorantKernel(self.k, self.a, self.omega1, self.grid, c * self.values, c * self.scale)

    @property
    def mass(self) -> float:
        return float(np.trapezoid(self.values, self.grid))


def majorant_kernel(k: int, kernel: KernelProfile, grid=None, a: float | None = None) -> MajorantKernel:
    """Build the majorant with ``omega1 = 1/int|F|`` over the kernel window, then fix unit mass on ``grid``."""
    if grid is None:
        grid = kernel.grid
    grid = np.asarray(grid, dtype=float)
    a = default_weight_exponent(k) if a is None else a
    omega1 = 1.0 / float(np.sum(simpson_weights(kernel.grid) * np.abs(kernel.values)))
    raw = omega1 * majorant_shape(grid, k, a)
    scale = omega1 / float(np.trapezoid(raw, grid))
    return MajorantKernel(k, a, omega1, grid, scale * majorant_shape(grid, k, a), scale)


class MajorantConstant(NamedTuple):
    D: float
    deficiency: float
    argmax: float


def majorant_constant(kernel: KernelProfile, majorant: MajorantKernel, oversample: int = 4) -> MajorantConstant:
    """``D = max |F|/Fbar`` over the common window, on a grid refined ``oversample`` times."""
    lo = max(kernel.grid[0], majorant.grid[0])
    hi = min(kernel.grid[-1], majorant.grid[-1])
    n = int(np.sum((kernel.grid >= lo) & (kernel.grid <= hi)))
    y = np.linspace(lo, hi, (n - 1) * oversample + 1)
    ratio = np.abs(kernel(y)) / majorant(y)
    i = int(np.argmax(ratio))
    return MajorantConstant(float(ratio[i]), float(ratio[i] - 1.0), float(y[i]))


class DerivativeBound(NamedTuple):
    c_bar: float
    per_order: list[float]
    D0: float


def derivative_bound_check(kernel: KernelProfile, beta_max: int, a: float | None = None) -> DerivativeBound:
    """Smallest ``c`` with ``|D^b F| <= c^b b^((alpha-1) b/alpha) exp(-a|y|^alpha)`` for ``y <= -1``
    and ``|D^b F| <= c^b y^(b/(2k))`` for ``y >= 1``, over ``1 <= b <= beta_max``.

    ``D0`` is the zeroth-order constant against the tail envelope
    ``(1+y^2)^(-(2k-1)/(8k))`` on the right and ``exp(-a|y|^alpha)`` on the left.
    """
    k = kernel.k
    prm = dispersion_constants(k)
    a = default_weight_exponent(k) if a is None else a
    prof = derivative_table(kernel, beta_max)
    y = prof.grid
    left, right = y <= -1, y >= 1
    wl = np.exp(-a * np.abs(y[left]) ** prm.alpha)
    env0 = np.where(y >= 0, (1 + y**2) ** (-(2 * k - 1) / (8 * k)), np.exp(-a * np.abs(y) ** prm.alpha))
    D0 = float(np.max(np.abs(prof.values) / env0))
    per = []
    for b in range(1, beta_max + 1):
        row = np.abs(prof.deriv_table[b])
        lhs = np.max(row[left] / (b ** ((prm.alpha - 1) * b / prm.alpha) * wl))
        rhs = np.max(row[right] / y[right] ** (b / (2 * k)))
        per.append(float(max(lhs, rhs) ** (1.0 / b)))
    return DerivativeBound(float(max(per)) if per else 0.0, per, D0)


def _nodes(data, panel: float):
    if isinstance(data, InitialData):
        a, b = data.effective_support()
        gx, gw = np.polynomial.legendre.leggauss(16)
        npan = max(1, int(math.ceil((b - a) / panel)))
        edges = np.linspace(a, b, npan + 1)
        lo, hi = edges[:-1, None], edges[1:, None]
        z = (0.5 * (hi - lo) * gx + 0.5 * (hi + lo)).ravel()
        w = (0.5 * (hi - lo) * gw).ravel()
        return z, w * data(z)
    z, v = (np.asarray(x, dtype=float) for x in data)
    return z, simpson_weights(z) * v


def check_precondition(u0_vals, ubar0_vals, D: float) -> None:
    """Raise unless ``ubar0 >= 0`` and ``D |u0| <= ubar0`` at every sample."""
    lhs = D * np.abs(np.asarray(u0_vals, dtype=float))
    rhs = np.asarray(ubar0_vals, dtype=float)
    if np.any(rhs < 0):
        raise PreconditionViolation("comparison data must be non-negative")
    excess = lhs - rhs * (1 + 1e-12)
    if np.any(excess > 0):
        raise PreconditionViolation(f"D |u0| exceeds ubar0 by up to {float(np.max(excess)):.3e}")


def majorant_evolution(majorant: MajorantKernel, ubar0, t: float, x_grid, *, u0=None, D: float | None = None) -> np.ndarray:
    """``ubar(x,t) = t^(-1/m) int Fbar((x-z) t^(-1/m)) ubar0(z) dz``.

    ``ubar0`` may be InitialData or a ``(z, values)`` pair.  When ``u0`` (a
    callable) and ``D`` are given, the domination precondition is checked on
    the sample points first.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if isinstance(ubar0, InitialData):
        zc = np.linspace(*ubar0.effective_support(), 4001)
        vals = ubar0(zc)
    else:
        zc, vals = (np.asarray(v, dtype=float) for v in ubar0)
    if np.any(vals < 0):
        raise PreconditionViolation("comparison data must be non-negative")
    if u0 is not None and D is not None:
        check_precondition(u0(zc), vals, D)
    s = t ** (1.0 / (2 * majorant.k + 1))
    z, wu = _nodes(ubar0, min(0.05, 0.2 * s))
    x = np.asarray(x_grid, dtype=float)
    return np.array([majorant((xi - z) / s) @ wu for xi in x]) / s


def compare(u, ubar, rtol: float = 1e-10) -> bool:
    """Pointwise domination ``|u| <= ubar`` with a relative slack for rounding."""
    u, ubar = np.abs(np.asarray(u)), np.asarray(ubar)
    return bool(np.all(u <= ubar + rtol * np.max(np.abs(ubar), initial=0.0)))
