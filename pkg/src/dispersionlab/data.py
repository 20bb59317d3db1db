"""Initial data with a declared decay class."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class InitialData:
    """A real function on the line.

    ``decay`` is ``"compact"``, ``"exponential"`` or a float ``q`` meaning
    ``|u(z)| = O(|z|^-q)``.  ``support`` bounds the region used for
    quadrature; when infinite it is found by scanning for the point where
    ``|u|`` drops below ``1e-17`` of its maximum.
    """

    func: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float] = (-math.inf, math.inf)
    decay: str | float = "exponential"
    name: str = "data"

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        out = np.asarray(self.func(z), dtype=float)
        a, b = self.support
        return np.where((z >= a) & (z <= b), out, 0.0)

    def scaled(self, c: float) -> "InitialData":
        f = self.func
        return InitialData(lambda z: c * f(z), self.support, self.decay, f"{c:g}*{self.name}")

    def plus(self, other: "InitialData", a: float = 1.0, b: float = 1.0) -> "InitialData":
        lo = min(self.support[0], other.support[0])
        hi = max(self.support[1], other.support[1])
        return InitialData(lambda z: a * self(z) + b * other(z), (lo, hi), _weaker(self.decay, other.decay))

    def effective_support(self) -> tuple[float, float]:
        a, b = self.support
        if math.isfinite(a) and math.isfinite(b):
            return a, b
        probe = np.linspace(-50, 50, 20001)
        vals = np.abs(self(probe))
        top = vals.max()
        if top == 0.0:
            return (0.0, 0.0)
        keep = probe[vals > 1e-17 * top]
        lo = keep[0] - 0.01 if not math.isfinite(a) else a
        hi = keep[-1] + 0.01 if not math.isfinite(b) else b
        return float(lo), float(hi)

    def sample(self, n: int = 4001) -> tuple[np.ndarray, np.ndarray]:
        a, b = self.effective_support()
        z = np.linspace(a, b, n)
        return z, self(z)


def _weaker(d1, d2):
    order = {"compact": math.inf, "exponential": 1e300}
    q1 = order.get(d1, d1) if isinstance(d1, str) else d1
    q2 = order.get(d2, d2) if isinstance(d2, str) else d2
    return d1 if q1 <= q2 else d2


def gaussian(width: float = 1.0, mass: float | None = None, centre: float = 0.0) -> InitialData:
    """``exp(-((z-centre)/width)^2)``, rescaled to the given mass if requested."""
    c = 1.0 if mass is None else mass / (width * math.sqrt(math.pi))
    return InitialData(lambda z: c * np.exp(-((z - centre) / width) ** 2), name=f"gaussian({width:g})")


def gaussian_derivative(width: float = 1.0) -> InitialData:
    """Zero mass, nonzero first moment."""
    return InitialData(lambda z: -2 * z / width**2 * np.exp(-((z / width) ** 2)), name=f"dgaussian({width:g})")


def moment_killed(width: float = 1.0, order: int = 3) -> InitialData:
    """Gaussian times a degree-``order`` polynomial with moments ``0..order-1`` zero.

    The polynomial is the Hermite polynomial ``He``-type orthogonal to lower
    powers under the Gaussian weight, so the first nonzero moment is ``order``.
    """
    from numpy.polynomial.hermite import hermval

    coef = np.zeros(order + 1)
    coef[order] = 1.0
    return InitialData(
        lambda z: hermval(z / width, coef) * np.exp(-((z / width) ** 2)),
        name=f"hermite{order}({width:g})",
    )


def bump(centre: float = 0.0, radius: float = 1.0, height: float = 1.0) -> InitialData:
    """Compactly supported ``C^inf`` bump."""

    def f(z):
        s = (np.asarray(z, dtype=float) - centre) / radius
        out = np.zeros_like(s)
        inside = np.abs(s) < 1
        out[inside] = height * np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
        return out

    return InitialData(f, (centre - radius, centre + radius), "compact", "bump")
