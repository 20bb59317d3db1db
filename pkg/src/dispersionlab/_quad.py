"""Piecewise-polynomial interpolation and regularized integrals of sampled data."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.interpolate import BPoly, PPoly, make_interp_spline


def hermite_interpolant(x, table) -> BPoly:
    """Piecewise Hermite interpolant in Bernstein form.

    ``table`` holds the values in row 0 and, optionally, first and second
    derivatives in rows 1 and 2.  With two derivative rows the pieces are
    quintic, with one they are cubic.  Without derivatives a quintic spline is
    used instead.
    """
    x = np.asarray(x, dtype=float)
    table = np.atleast_2d(np.asarray(table, dtype=float))
    if table.shape[0] == 1:
        spl = make_interp_spline(x, table[0], k=5 if x.size > 5 else 1)
        table = np.array([spl(x), spl(x, 1), spl(x, 2)])
    h = np.diff(x)
    f0, f1 = table[0, :-1], table[0, 1:]
    d0, d1 = table[1, :-1], table[1, 1:]
    if table.shape[0] == 2:
        c = np.array([f0, f0 + h * d0 / 3, f1 - h * d1 / 3, f1])
        return BPoly(c, x)
    s0, s1 = table[2, :-1], table[2, 1:]
    c = np.array([
        f0,
        f0 + h * d0 / 5,
        f0 + 2 * h * d0 / 5 + h**2 * s0 / 20,
        f1 - 2 * h * d1 / 5 + h**2 * s1 / 20,
        f1 - h * d1 / 5,
        f1,
    ])
    return BPoly(c, x)


def simpson_weights(x) -> np.ndarray:
    """Composite quadrature weights on an arbitrary grid (Simpson where possible)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    w = np.zeros(n)
    if n < 2:
        return w
    h = np.diff(x)
    if n == 2 or not np.allclose(h, h[0], rtol=1e-9, atol=0.0):
        w[:-1] += h / 2
        w[1:] += h / 2
        return w
    step = h[0]
    m = n if n % 2 == 1 else n - 1
    w[:m:2] += 2 * step / 3
    w[1:m:2] += 4 * step / 3
    w[0] -= step / 3
    w[m - 1] -= step / 3
    if m < n:
        w[-2:] += step / 2
    return w


class RegularizedValue(NamedTuple):
    value: float
    error: float
    crossings: int


def regularized_integral(x, table, *, levels: int = 8, tail_start: float | None = None) -> RegularizedValue:
    """Integral over the sampled window with oscillatory right tail summed by averaging.

    Partial integrals are taken at the sign changes of the integrand beyond
    ``tail_start`` (default: the middle of the window).  Consecutive partial
    sums are averaged ``levels`` times, which sums conditionally convergent
    and mildly divergent oscillatory tails.  When there are too few sign
    changes the plain window integral is returned.
    """
    x = np.asarray(x, dtype=float)
    poly = hermite_interpolant(x, table)
    prim = poly.antiderivative()
    base = float(prim(x[0]))
    full = float(prim(x[-1])) - base
    if tail_start is None:
        tail_start = 0.5 * (x[0] + x[-1])
    pp = PPoly.from_bernstein_basis(poly)
    roots = pp.roots(extrapolate=False)
    roots = np.unique(roots[np.isfinite(roots) & (roots > tail_start) & (roots < x[-1])])
    if roots.size < levels + 2:
        return RegularizedValue(full, float("nan"), int(roots.size))
    sums = prim(roots) - base
    history = [sums[-1]]
    for _ in range(levels):
        sums = 0.5 * (sums[:-1] + sums[1:])
        history.append(sums[-1])
    err = abs(history[-1] - history[-2])
    return RegularizedValue(float(history[-1]), float(err), int(roots.size))
