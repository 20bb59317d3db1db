"""Rescaled fundamental kernel of the odd-order dispersion operator.

``F`` solves ``(-1)^(k+1) F^(2k) + y F/(2k+1) = 0`` on the real line, decays
exponentially as ``y -> -inf`` and oscillates with a slowly decaying
amplitude as ``y -> +inf``.  Two independent constructions are provided:
shooting on the ODE and contour quadrature of the Fourier integral.
"""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from ._config import max_threads
from ._quad import hermite_interpolant, regularized_integral
from .asymptotics import Side, bundle_roots, bundle_vector, dispersion_constants, real_span, RootClass
from .errors import DegenerateSolution, KernelDomainExceeded, NonConvergence, QuadratureFailure


class Normalization(str, enum.Enum):
    UNIT_INTEGRAL = "unit_integral"
    UNIT_MAX = "unit_max"
    RAW = "raw"


def _norm_mode(mode) -> Normalization:
    aliases = {"integral": Normalization.UNIT_INTEGRAL, "max": Normalization.UNIT_MAX}
    if isinstance(mode, Normalization):
        return mode
    return aliases.get(str(mode), None) or Normalization(str(mode))


@dataclass(frozen=True)
class ShootingConfig:
    left_endpoint: float = -20.0
    right_endpoint: float = 60.0
    match_tolerance: float = 1e-8
    integrator_tolerance: float = 1e-11
    bundle_amplitude: float = 1.0
    max_match_iterations: int = 8
    grid_step: float = 0.01
    buffer: float = 20.0

    def __post_init__(self):
        if not self.left_endpoint < 0 < self.right_endpoint:
            raise ValueError("need left_endpoint < 0 < right_endpoint")
        if min(self.match_tolerance, self.integrator_tolerance, self.grid_step) <= 0:
            raise ValueError("tolerances and grid_step must be positive")
        if self.buffer < 0 or self.max_match_iterations < 1:
            raise ValueError("buffer must be >= 0 and max_match_iterations >= 1")


@dataclass(frozen=True, eq=False)
class KernelProfile:
    """Sampled kernel with a derivative table ``deriv_table[j] = D^j F(grid)``."""

    k: int
    grid: np.ndarray
    deriv_table: np.ndarray
    normalization: Normalization
    match_point: float
    tolerance: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def values(self) -> np.ndarray:
        return self.deriv_table[0]

    @property
    def max_order(self) -> int:
        return self.deriv_table.shape[0] - 1

    @property
    def window(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    def scaled(self, factor: float, normalization: Normalization | None = None) -> "KernelProfile":
        return KernelProfile(
            self.k, self.grid, self.deriv_table * factor,
            normalization or self.normalization, self.match_point, self.tolerance,
        )

    def _interp(self, order: int):
        if order not in self._cache:
            prof = self if self.max_order >= order + 2 else derivative_table(self, order + 2)
            self._cache[order] = hermite_interpolant(self.grid, prof.deriv_table[order:order + 3])
        return self._cache[order]

    def __call__(self, y, order: int = 0):
        """Evaluate ``D^order F`` anywhere; outside the window a fitted tail model is used."""
        y = np.asarray(y, dtype=float)
        lo, hi = self.window
        out = np.asarray(self._interp(order)(np.clip(y, lo, hi)), dtype=float)
        outside = (y < lo) | (y > hi)
        if np.any(outside):
            warnings.warn(
                f"kernel evaluated outside [{lo:g}, {hi:g}]; using the asymptotic tail model",
                KernelDomainExceeded, stacklevel=2,
            )
            for side, mask in ((Side.MINUS, y < lo), (Side.PLUS, y > hi)):
                if np.any(mask):
                    out = np.where(mask, self._tail_model(side, order)(y), out)
        return out if out.ndim else float(out)

    def _tail_model(self, side: Side, order: int):
        key = ("tail", side, order)
        if key in self._cache:
            return self._cache[key]
        prm = dispersion_constants(self.k)
        prof = self if self.max_order >= order else derivative_table(self, order)
        span = 5.0
        if side is Side.PLUS:
            sel = self.grid >= self.grid[-1] - span
            b = complex(0.0, prm.d_k)
        else:
            sel = self.grid <= self.grid[0] + span
            roots = [r.value for r in bundle_roots(self.k, Side.MINUS)
                     if r.classification is RootClass.DECAYING]
            b = max(roots, key=lambda v: (v.real, v.imag))
        expo = -prm.envelope_exp + order * (prm.alpha - 1.0)

        def basis(yy):
            z = np.abs(yy)
            ph = b * z**prm.alpha
            amp = z**expo * np.exp(ph.real)
            return np.stack([amp * np.cos(ph.imag), amp * np.sin(ph.imag)], axis=-1)

        coef, *_ = np.linalg.lstsq(basis(self.grid[sel]), prof.deriv_table[order, sel], rcond=None)
        model = lambda yy: basis(np.asarray(yy, dtype=float)) @ coef  # noqa: E731
        self._cache[key] = model
        return model


# --------------------------------------------------------------------------
# shooting


def _companion(k: int):
    m = 2 * k
    base = np.diag(np.ones(m - 1), 1)
    coef = (-1) ** k / (2 * k + 1)

    def A(y):
        M = base.copy()
        M[m - 1, 0] = coef * y
        return M

    return A


def _sweep(A, Y0, y0, y1, grid, rtol, seg=1.0):
    """Integrate ``Y' = A(y) Y`` from y0 to y1, re-orthonormalizing every ``seg``.

    Returns per-segment samples on the grid points inside each segment, the
    triangular factors and the final orthonormal basis.
    """
    n, m = Y0.shape
    nseg = max(1, int(math.ceil(abs(y1 - y0) / seg)))
    edges = np.linspace(y0, y1, nseg + 1)
    Q, _ = np.linalg.qr(Y0)
    pieces, factors = [], []

    def rhs(y, s):
        return (A(y) @ s.reshape(n, m)).ravel()

    for a, b in zip(edges[:-1], edges[1:]):
        lo, hi = min(a, b), max(a, b)
        te = grid[(grid >= lo) & (grid <= hi)]
        if b < a:
            te = te[::-1]
        t_eval = te if te.size and te[-1] == b else np.r_[te, b]
        sol = solve_ivp(rhs, (a, b), Q.ravel(), method="DOP853", rtol=rtol, atol=rtol * 1e-3, t_eval=t_eval)
        if sol.status != 0:
            raise NonConvergence(f"integrator failed on [{a:g}, {b:g}]: {sol.message}")
        Yend = sol.y[:, -1].reshape(n, m)
        pieces.append((te, sol.y[:, : te.size].reshape(n, m, te.size)))
        Q, R = np.linalg.qr(Yend)
        factors.append(R)
    return pieces, factors, Q


def _backmap(pieces, factors, c):
    out = []
    for (te, vals), R in zip(pieces[::-1], factors[::-1]):
        c = np.linalg.solve(R, c)
        out.append((te, np.einsum("nmt,m->nt", vals, c)))
    return out[::-1]


def _seed_basis(k: int, side: Side, y: float, keep) -> np.ndarray:
    prm = dispersion_constants(k)
    vecs = [bundle_vector(k, r.value, y, -prm.envelope_exp, 2 * k)
            for r in bundle_roots(k, side) if r.classification in keep]
    return real_span(vecs)


def _shoot_one_sided(k: int, cfg: ShootingConfig, grid: np.ndarray) -> np.ndarray:
    # k = 1: integrate rightward from the decaying Airy bundle
    prm = dispersion_constants(k)
    y0 = float(grid[0])
    z = -y0
    f = cfg.bundle_amplitude * z**-0.25 * math.exp(-prm.d_k * z**1.5)
    df = f * (0.25 / z + 1.5 * prm.d_k * math.sqrt(z))

    def rhs(y, s):
        return [s[1], -y * s[0] / 3.0]

    sol = solve_ivp(rhs, (y0, float(grid[-1])), [f, df], method="DOP853",
                    rtol=cfg.integrator_tolerance, atol=1e-300, t_eval=grid)
    if sol.status != 0:
        raise NonConvergence(sol.message)
    return sol.y


def _shoot_two_sided(k, cfg, grid, ahat):
    A = _companion(k)
    lo, hi = float(grid[0]), float(grid[-1])
    left0, right0 = lo - cfg.buffer, hi + cfg.buffer
    YL = _seed_basis(k, Side.MINUS, left0, {RootClass.DECAYING})
    YR = _seed_basis(k, Side.PLUS, right0, {RootClass.DECAYING, RootClass.NEUTRAL})
    pl, fl, QL = _sweep(A, YL, left0, ahat, grid, cfg.integrator_tolerance)
    pr, fr, QR = _sweep(A, YR, right0, ahat, grid, cfg.integrator_tolerance)
    M = np.hstack([QL, -QR])
    _, S, Vt = np.linalg.svd(M)
    if S[-1] < 1e-10 * S[0]:
        raise DegenerateSolution("matching system has a two-dimensional null space")
    c = Vt[-1]
    residual = float(np.linalg.norm(M @ c))
    nl = QL.shape[1]
    segs = _backmap(pl, fl, c[:nl]) + _backmap(pr, fr, c[nl:])
    ys = np.concatenate([te for te, _ in segs])
    vals = np.concatenate([v for _, v in segs], axis=1)
    order = np.argsort(ys, kind="stable")
    ys, vals = ys[order], vals[:, order]
    _, idx = np.unique(ys, return_index=True)
    table = vals[:, idx]
    if table.shape[1] != grid.size:
        raise NonConvergence("shooting lost grid points while assembling the profile")
    return table, residual


def _make_grid(cfg: ShootingConfig) -> np.ndarray:
    n = int(round((cfg.right_endpoint - cfg.left_endpoint) / cfg.grid_step))
    return np.linspace(cfg.left_endpoint, cfg.right_endpoint, n + 1)


def solve_kernel(k: int, cfg: ShootingConfig | None = None,
                 normalization: Normalization | str = Normalization.UNIT_INTEGRAL) -> KernelProfile:
    """Shoot the kernel ODE and return the normalized profile with derivatives 0..2k+1.

    For k=1 the second-order equation is integrated from the decaying left
    bundle.  For k >= 2 the decaying left bundles and the bounded right
    bundles are swept towards an interior point ``ahat`` with periodic
    re-orthonormalization, and the unique matching combination is taken;
    ``ahat`` is then moved to the location of the maximum of ``|F|``.
    """
    dispersion_constants(k)
    cfg = cfg or ShootingConfig()
    grid = _make_grid(cfg)
    if k == 1:
        table = _shoot_one_sided(k, cfg, grid)
        ahat = float(grid[np.argmax(np.abs(table[0]))])
    else:
        ahat = 0.0
        for _ in range(cfg.max_match_iterations):
            table, residual = _shoot_two_sided(k, cfg, grid, ahat)
            if residual > cfg.match_tolerance:
                raise NonConvergence(f"match residual {residual:.3e} exceeds tolerance")
            new = float(grid[np.argmax(np.abs(table[0]))])
            if abs(new - ahat) <= cfg.grid_step:
                break
            ahat = new
        else:
            raise NonConvergence("matching point did not settle")
    if not np.any(np.abs(table[0]) > 1e-300):
        raise DegenerateSolution("shooting produced the zero profile")
    raw = KernelProfile(k, grid, table, Normalization.RAW, ahat, cfg.integrator_tolerance)
    raw = derivative_table(raw, 2 * k + 1)
    return normalize(raw, normalization)


def derivative_table(profile: KernelProfile, max_order: int) -> KernelProfile:
    """Extend the table to ``max_order`` with the exact ODE recurrence.

    ``F^(2k+n) = ((-1)^k/(2k+1)) (y F^(n) + n F^(n-1))``.  Requires rows
    0..2k-1 to be present.  Orders already present are left untouched.
    """
    k = profile.k
    have = profile.max_order
    if max_order <= have:
        return profile
    if have < 2 * k - 1:
        raise ValueError(f"need derivatives up to order {2 * k - 1} to apply the recurrence")
    y = profile.grid
    rows = list(profile.deriv_table)
    coef = (-1) ** k / (2 * k + 1)
    for j in range(have + 1, max_order + 1):
        n = j - 2 * k
        nxt = y * rows[n]
        if n > 0:
            nxt = nxt + n * rows[n - 1]
        rows.append(coef * nxt)
    return KernelProfile(k, y, np.array(rows), profile.normalization, profile.match_point, profile.tolerance)


def regularized_mass(profile: KernelProfile) -> float:
    """Integral of F over the line, the oscillatory right tail summed by averaging."""
    prof = derivative_table(profile, 2)
    lo, hi = profile.window
    res = regularized_integral(prof.grid, prof.deriv_table[:3], tail_start=max(0.0, 0.5 * (lo + hi)))
    return res.value


def normalize(profile: KernelProfile, mode: Normalization | str) -> KernelProfile:
    mode = _norm_mode(mode)
    if mode is Normalization.RAW:
        return profile
    if mode is Normalization.UNIT_INTEGRAL:
        scale = regularized_mass(profile)
    else:
        scale = float(np.max(np.abs(profile.values)))
    if not np.isfinite(scale) or scale == 0.0:
        raise DegenerateSolution(f"cannot normalize: scale factor {scale!r}")
    return profile.scaled(1.0 / scale, mode)


def ode_residual(profile: KernelProfile) -> float:
    """Max ODE residual with ``F^(2k)`` taken by an 8th-order difference of row 2k-1.

    The recurrence rows satisfy the ODE identically, so this measures how
    consistent the integrated rows are with each other.  It is scaled by the
    maximum of ``|F^(2k)|`` on the grid.
    """
    k = profile.k
    prof = derivative_table(profile, 2 * k)
    row = prof.deriv_table[2 * k - 1]
    h = prof.grid[1] - prof.grid[0]
    w = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
    fd = np.convolve(row, w[::-1], mode="valid") / h
    target = prof.deriv_table[2 * k, 4:-4]
    scale = max(float(np.max(np.abs(prof.deriv_table[2 * k]))), 1e-300)
    return float(np.max(np.abs(fd - target)) / scale)


# --------------------------------------------------------------------------
# Fourier oracle

_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


def _fourier_point(y: float, k: int, orders: int, tol: float) -> np.ndarray:
    m = 2 * k + 1
    th = math.pi / (2 * m)
    if y > 0:
        # stationary point scale; keeps exp(y r sin th) bounded along the ray
        rs = (y / m) ** (1.0 / (m - 1))
        th = min(th, 2.0 / (y * rs))
    R = (40.0 / math.sin(m * th)) ** (1.0 / m) + abs(y) ** (1.0 / (m - 1)) + 1.0
    npan = int(math.ceil(R * max(1.0, abs(y)) ** 0.5 * 4)) + 20
    edges = np.linspace(0.0, R, npan + 1)
    a, b = edges[:-1, None], edges[1:, None]
    r = (0.5 * (b - a) * _GL_X + 0.5 * (a + b)).ravel()
    w = (0.5 * (b - a) * _GL_W).ravel()
    rot = np.exp(-1j * th)
    xi = r * rot
    base = np.exp(-1j * xi**m + 1j * y * xi) * rot
    tail = abs(base[-1]) * R ** orders
    if tail > tol:
        raise QuadratureFailure(f"Fourier integrand not negligible at truncation (y={y:g}, {tail:.2e})")
    out = np.empty(orders)
    for j in range(orders):
        out[j] = np.real(np.sum(w * base * (1j * xi) ** j)) / math.pi
    return out


def kernel_via_fourier(k: int, grid, tol: float = 1e-12) -> KernelProfile:
    """Kernel and derivatives 0..2k-1 from ``(1/2pi) int exp(-i xi^(2k+1) + i y xi) dxi``.

    The half-line integral is taken along a ray rotated into the lower half
    plane, where the integrand decays exponentially; the angle shrinks with
    ``y`` so the factor ``exp(i y xi)`` stays bounded.  Unit mass holds by
    construction.
    """
    dispersion_constants(k)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing with at least two points")
    workers = max_threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda y: _fourier_point(float(y), k, 2 * k, tol), grid))
    else:
        rows = [_fourier_point(float(y), k, 2 * k, tol) for y in grid]
    table = np.array(rows).T
    prof = KernelProfile(k, grid, table, Normalization.UNIT_INTEGRAL, float("nan"), tol)
    prof = derivative_table(prof, 2 * k + 1)
    return KernelProfile(prof.k, grid, prof.deriv_table, prof.normalization,
                         float(grid[np.argmax(np.abs(prof.values))]), tol)
