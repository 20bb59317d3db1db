"""Very singular self-similar solutions of the absorption dispersion equation.

``u_t = (-1)^(k+1) D^(2k+1) u - |u|^(p-1) u`` has solutions
``u = t^(-1/(p-1)) f(x t^(-1/(2k+1)))`` where ``f`` solves

    (-1)^(k+1) f^(m) + y f'/m + f/(p-1) - |f|^(p-1) f = 0,   m = 2k+1,

decays exponentially as ``y -> -inf`` and carries no algebraic tail
``y^(-m/(p-1))`` as ``y -> +inf``.  Such profiles bifurcate from the
eigenfunctions ``psi_l`` of the linear operator at ``p_l = 1 + m/(l+1)``.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.integrate import simpson, solve_bvp, solve_ivp
from scipy.optimize import brentq
from scipy.special import erfc

from ._quad import simpson_weights
from .asymptotics import Side, RootClass, bundle_roots, bundle_vector, dispersion_constants
from .errors import NonConvergence, TailTooShort
from .kernel import KernelProfile, derivative_table, solve_kernel
from .spectral import TruncationPolicy, adjoint_polynomial, eigenfunction


# --------------------------------------------------------------------------
# exponents and linear stability


def critical_exponents(k: int, L: int) -> list[Fraction]:
    """``p_l = 1 + (2k+1)/(l+1)`` for ``l = 0..L``; ``p_0 = 2k+2`` is the Fujita exponent."""
    dispersion_constants(k)
    return [1 + Fraction(2 * k + 1, l + 1) for l in range(L + 1)]


class Verdict(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    CRITICAL = "critical"


@dataclass(frozen=True)
class StabilityReport:
    p: Fraction
    k: int
    d_1: Fraction
    spectrum_head: list[Fraction]
    verdict: Verdict

    def zero_indices(self) -> list[int]:
        return [i for i, v in enumerate(self.spectrum_head) if v == 0]


def linearized_spectrum(p, k: int, L: int = 10) -> StabilityReport:
    """Spectrum ``d_1 - l/(2k+1)`` of the operator linearized about zero in the rescaled frame.

    ``p`` may be a Fraction, an int or a decimal string, in which case the
    arithmetic is exact.
    """
    p = Fraction(p) if not isinstance(p, float) else Fraction(p).limit_denominator(10**12)
    if p <= 1:
        raise ValueError("p must exceed 1")
    m = 2 * k + 1
    d1 = 1 / (p - 1) - Fraction(1, m)
    head = [d1 - Fraction(l, m) for l in range(L + 1)]
    verdict = Verdict.CRITICAL if d1 == 0 else (Verdict.STABLE if d1 < 0 else Verdict.UNSTABLE)
    return StabilityReport(p, k, d1, head, verdict)


def bifurcation_amplitude(l: int, k: int, epsilon: float, kappa_l: float) -> float:
    """``|C|`` with ``|C|^(p-1) = ((l+1)/(2k+1))^2 epsilon/kappa_l`` and ``p = p_l - epsilon``."""
    if kappa_l <= 0:
        raise ValueError("kappa_l must be positive")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    m = 2 * k + 1
    p = 1 + m / (l + 1) - epsilon
    a0 = ((l + 1) / m) ** 2
    return (a0 * epsilon / kappa_l) ** (1.0 / (p - 1))


class CentreDecay(NamedTuple):
    tau: np.ndarray
    coefficient: np.ndarray
    physical: np.ndarray


def centre_decay(l: int, k: int, gamma_l: float, tau_grid) -> CentreDecay:
    """``c_l(tau) = ((2k+1) gamma_l tau/(l+1))^(-(l+1)/(2k+1))`` and the matching ``u`` scale.

    With ``t = e^tau - 1`` the physical prediction is
    ``(1+t)^(-(l+1)/m) c_l(ln(1+t))``, which carries the extra logarithmic
    factor of the centre-subspace behaviour.
    """
    if gamma_l <= 0:
        raise ValueError("gamma_l must be positive")
    m = 2 * k + 1
    tau = np.asarray(tau_grid, dtype=float)
    c = (m * gamma_l * tau / (l + 1)) ** (-(l + 1) / m)
    return CentreDecay(tau, c, np.exp(-(l + 1) * tau / m) * c)


# --------------------------------------------------------------------------
# gamma and kappa pairings


@functools.lru_cache(maxsize=8)
def unit_kernel(k: int) -> KernelProfile:
    """Unit-mass kernel on the default shooting window (cached per k)."""
    return solve_kernel(k)


def _filtered_integral(y: np.ndarray, vals: np.ndarray, centres=(30.0, 34.0, 38.0, 42.0), width: float = 3.0) -> float:
    w = simpson_weights(y) * vals
    return float(np.mean([np.sum(w * 0.5 * erfc((y - c) / width)) for c in centres]))


def kappa(l: int, k: int, p: float, kernel: KernelProfile | None = None) -> float:
    """``<|psi_l|^(p-1) psi_l, psi*_l>_*`` with a smooth cutoff on the oscillatory tail."""
    kernel = kernel or unit_kernel(k)
    prof = derivative_table(kernel, l)
    psi = eigenfunction(l, prof).psi_samples
    nonlin = np.abs(psi) ** (p - 1) * psi
    if l == 0:
        return _filtered_integral(prof.grid, nonlin)
    poly = adjoint_polynomial(l, k)
    return _filtered_integral(prof.grid, nonlin * poly(-prof.grid))


def gamma_l(l: int, k: int, kernel: KernelProfile | None = None, policy: TruncationPolicy | None = None) -> float:
    """``gamma_l``: the pairing ``kappa`` at the critical power ``p_l - 1 = (2k+1)/(l+1)``.

    For ``l = 0`` this is ``int |F|^(2k+1) F`` with ``F`` of unit mass.  The
    policy is accepted for symmetry with the spectral module; only its
    filtered branch is meaningful because the integrand is not a pure
    eigenfunction.
    """
    return kappa(l, k, 1 + (2 * k + 1) / (l + 1), kernel)


# --------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class VSSConfig:
    left_endpoint: float | None = None
    right_endpoint: float | None = None
    tolerance: float = 1e-9
    tail_threshold: float = 0.1
    grid_step: float = 0.01

    def window(self, k: int) -> tuple[float, float]:
        lo, hi = (-14.0, 60.0) if k == 1 else (-15.0, 30.0)
        return (self.left_endpoint if self.left_endpoint is not None else lo,
                self.right_endpoint if self.right_endpoint is not None else hi)


@dataclass(frozen=True, eq=False)
class VSSProfile:
    k: int
    p: float
    grid: np.ndarray
    states: np.ndarray  # rows f, f', ..., f^(2k)
    sup_norm: float
    tail_metric: float
    right_endpoint: float
    amplitude: float = 0.0  # log10 of the left seed amplitude (k=1) or of the sup norm (k>=2)
    spurious_oscillation: bool = False
    trivial: bool = False
    tail_onset: float = math.nan
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def f(self) -> np.ndarray:
        return self.states[0]


def vss_rhs_top(k: int, p: float, y, states) -> np.ndarray:
    """``f^(m)`` from the profile equation given rows ``f..f^(2k)``."""
    m = 2 * k + 1
    c = 1.0 / (p - 1)
    f = states[0]
    return (-1) ** (k + 1) * (np.abs(f) ** (p - 1) * f - y * states[1] / m - c * f)


def vss_residual(profile: VSSProfile, window: tuple[float, float] | None = None) -> float:
    """Max ODE residual, relative to ``max|f^(m)|``, with ``f^(m)`` from an 8th-order difference."""
    if profile.trivial:
        return 0.0
    y = profile.grid
    top = profile.states[-1]
    h = y[1] - y[0]
    w = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
    fd = np.convolve(top, w[::-1], mode="valid") / h
    want = vss_rhs_top(profile.k, profile.p, y[4:-4], profile.states[:, 4:-4])
    sel = np.ones(fd.size, bool)
    if window is not None:
        sel = (y[4:-4] >= window[0]) & (y[4:-4] <= window[1])
    scale = max(float(np.max(np.abs(want[sel]))), 1e-300)
    return float(np.max(np.abs(fd - want)[sel]) / scale)


class TailSymmetry(NamedTuple):
    metric: float
    onset: float
    extrema: int


def tail_symmetry(profile, start: float | None = None, threshold: float = 0.1) -> TailSymmetry:
    """Reflection asymmetry of the oscillating tail.

    Extrema of ``f`` beyond ``start`` (default: half the right endpoint) are
    located; each consecutive pair scores ``||M_i| - |M_i+1|| / max(|M_i|, |M_i+1|)``,
    or 1 when the two do not alternate in sign.  The metric is the mean
    score, so 0 means a perfectly balanced envelope.  A tail without sign
    changes scores 1.  The onset is the first extremum after which every pair
    stays below ``threshold``.
    """
    if isinstance(profile, VSSProfile):
        y, f = profile.grid, profile.f
    else:
        y, f = (np.asarray(a, dtype=float) for a in profile)
    if start is None:
        start = 0.5 * y[-1]
    sel = y >= start
    y, f = y[sel], f[sel]
    if y.size < 5:
        raise TailTooShort("tail window holds fewer than five samples")
    df = np.diff(f)
    idx = np.where(np.sign(df[:-1]) * np.sign(df[1:]) < 0)[0] + 1
    if not np.any(np.sign(f[:-1]) * np.sign(f[1:]) < 0):
        return TailSymmetry(1.0, math.nan, int(idx.size))
    if idx.size < 3:
        raise TailTooShort(f"only {idx.size} extrema beyond y={start:g}")
    # parabolic refinement of the extreme values
    fm, f0, fp = f[idx - 1], f[idx], f[idx + 1]
    den = fm - 2 * f0 + fp
    shift = np.where(den != 0, 0.5 * (fm - fp) / np.where(den != 0, den, 1), 0.0)
    M = f0 - 0.25 * (fm - fp) * shift
    a, b = M[:-1], M[1:]
    scores = np.where(np.sign(a) * np.sign(b) < 0,
                      np.abs(np.abs(a) - np.abs(b)) / np.maximum(np.abs(a), np.abs(b)), 1.0)
    bad = np.where(scores >= threshold)[0]
    onset_i = 0 if bad.size == 0 else bad[-1] + 1
    onset = float(y[idx[onset_i]]) if onset_i < idx.size else math.nan
    return TailSymmetry(float(np.mean(scores)), onset, int(idx.size))


# --------------------------------------------------------------------------
# k = 1: shooting from the decaying left bundle


_D1 = 2.0 / (3.0 * math.sqrt(3.0))


def _shoot_k1(log_amp: float, p: float, L: float, R: float, rtol: float):
    c = 1.0 / (p - 1)
    z = -L
    lam = math.sqrt(z / 3.0)
    f0 = 10.0**log_amp * z ** (1.5 * c - 0.75) * math.exp(-_D1 * z**1.5)

    def rhs(y, s):
        f = s[0]
        return [s[1], s[2], -y * s[1] / 3.0 - c * f + abs(f) ** (p - 1) * f]

    def blowup(y, s):
        return abs(s[0]) - 50.0

    blowup.terminal = True
    sol = solve_ivp(rhs, (L, R), [f0, lam * f0, lam**2 * f0], method="DOP853", rtol=rtol,
                    atol=rtol * 1e-3, dense_output=True, events=blowup)
    return sol if sol.status == 0 else None


def _tail_offset(sol, lo: float, hi: float) -> float:
    """Bump-weighted mean of ``f`` over ``|f|``; vanishes when the tail has no algebraic part."""
    if sol is None:
        return math.nan
    y = np.linspace(lo, hi, 4301)
    f = sol.sol(y)[0]
    s = (2 * y - lo - hi) / (hi - lo)
    W = np.zeros_like(s)
    inside = np.abs(s) < 1
    W[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return float(simpson(f * W, x=y) / simpson(np.abs(f) * W, x=y))


class _K1Shooter:
    def __init__(self, p: float, cfg: VSSConfig):
        self.p = p
        self.L, self.R = cfg.window(1)
        self.rtol = cfg.tolerance
        self.cache: dict[float, float] = {}
        self.lo, self.hi = 15.0, self.R - 2.0

    def offset(self, la: float) -> float:
        if la not in self.cache:
            self.cache[la] = _tail_offset(_shoot_k1(la, self.p, self.L, self.R, self.rtol), self.lo, self.hi)
        return self.cache[la]

    def solve(self, guess: float) -> float:
        """Secant iteration from ``guess``; falls back to bracketing when it wanders off."""
        x0, x1 = guess, guess + 1e-3
        f0, f1 = self.offset(x0), self.offset(x1)
        for _ in range(12):
            if not (np.isfinite(f0) and np.isfinite(f1)) or f1 == f0:
                break
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
            if abs(x2 - guess) > 0.1:
                break
            x0, f0, x1 = x1, f1, x2
            f1 = self.offset(x1)
            if abs(x1 - x0) < 1e-8 and np.isfinite(f1):
                return x1
        return self.root_near(guess)

    def root_near(self, guess: float, step: float = 0.004, tries: int = 14) -> float:
        """Bracket a sign change of the offset by expanding alternately around ``guess``."""
        pts = [guess]
        for i in range(tries):
            d = step * 1.6**i
            pts = [guess - d] + pts + [guess + d]
            vals = [self.offset(x) for x in pts]
            # prefer the bracket closest to the guess
            best = None
            for a, b, fa, fb in zip(pts[:-1], pts[1:], vals[:-1], vals[1:]):
                if np.isfinite(fa) and np.isfinite(fb) and fa * fb <= 0:
                    dist = min(abs(a - guess), abs(b - guess))
                    if best is None or dist < best[0]:
                        best = (dist, a, b)
            if best is not None:
                _, a, b = best
                return brentq(self.offset, a, b, xtol=1e-10)
        raise NonConvergence(f"no admissible shooting amplitude near log10 A = {guess:.4f} at p = {self.p:g}")


def _k1_seed_from_kernel(l: int, p: float, C: float, kernel: KernelProfile, L: float) -> float:
    """log10 of the left seed amplitude matching ``C psi_l`` at ``y = L``."""
    c = 1.0 / (p - 1)
    z = -L
    prof = derivative_table(kernel, l)
    psi_L = abs(float((-1) ** l / math.sqrt(math.factorial(l)) * prof(L, order=l)))
    shape = z ** (1.5 * c - 0.75) * math.exp(-_D1 * z**1.5)
    return math.log10(abs(C) * psi_L / shape)


def _k1_profile(p: float, la: float, cfg: VSSConfig) -> VSSProfile:
    L, R = cfg.window(1)
    sol = _shoot_k1(la, p, L, R, cfg.tolerance)
    if sol is None:
        raise NonConvergence("converged amplitude blows up on re-integration")
    n = int(round((R - L) / cfg.grid_step))
    y = np.linspace(L, R, n + 1)
    states = sol.sol(y)
    return _finish_profile(1, p, y, states, la, cfg)


def _finish_profile(k, p, y, states, amplitude, cfg: VSSConfig) -> VSSProfile:
    """Pick the right endpoint among late zero crossings to minimize the tail metric."""
    f = states[0]
    cross = np.where(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]
    cands = [i + 1 for i in cross if y[i] >= 0.75 * y[-1]] or [y.size - 1]
    best = None
    start = 0.5 * y[-1]
    for i in cands[-6:]:
        try:
            ts = tail_symmetry((y[: i + 1], f[: i + 1]), start=start, threshold=cfg.tail_threshold)
        except TailTooShort:
            continue
        if best is None or ts.metric < best[0].metric:
            best = (ts, i)
    if best is None:
        ts, i = TailSymmetry(1.0, math.nan, 0), y.size - 1
    else:
        ts, i = best
    return VSSProfile(
        k=k, p=float(p), grid=y[: i + 1], states=states[:, : i + 1],
        sup_norm=float(np.max(np.abs(f[: i + 1]))), tail_metric=ts.metric, right_endpoint=float(y[i]),
        amplitude=float(amplitude), spurious_oscillation=ts.metric > cfg.tail_threshold,
        tail_onset=ts.onset,
    )


def trivial_profile(k: int, p: float, cfg: VSSConfig | None = None) -> VSSProfile:
    cfg = cfg or VSSConfig()
    L, R = cfg.window(k)
    y = np.linspace(L, R, int(round((R - L) / cfg.grid_step)) + 1)
    return VSSProfile(k, float(p), y, np.zeros((2 * k + 1, y.size)), 0.0, 0.0, R, trivial=True)


def _near_critical_start(l: int, k: int, eps: float) -> tuple[float, float]:
    p_l = 1 + (2 * k + 1) / (l + 1)
    p = p_l - eps
    C = bifurcation_amplitude(l, k, eps, kappa(l, k, p))
    return p, C


# converged (p, log10 A) pairs per branch, reused as warm starts
_K1_HISTORY: dict[tuple, list[tuple[float, float]]] = {}


def _continue_k1(l: int, p_target: float, cfg: VSSConfig, start=None, dp: float = 0.1):
    """Natural continuation in p from just below p_l (or from ``start``) to ``p_target``.

    Without a usable start the branch is entered at ``p_l - 0.1``, or at the
    target itself when that is closer to p_l, seeded by the bifurcation
    amplitude.  Steps may go either way in p.
    """
    L, _ = cfg.window(1)
    p_l = 1 + 3 / (l + 1)
    known = _K1_HISTORY.setdefault((l, cfg), [])
    if start is None:
        above = sorted((h for h in known if h[0] >= p_target), key=lambda h: -h[0])
        if above:
            start = above[-2:]
    if start is None:
        p0, C = _near_critical_start(l, 1, min(0.1, p_l - p_target))
        la = _K1Shooter(p0, cfg).solve(_k1_seed_from_kernel(l, p0, C, unit_kernel(1), L))
        hist = [(p0, la)]
    else:
        hist = list(start)
    p, la = hist[-1]
    step = dp
    while abs(p - p_target) > 1e-12:
        q = max(p_target, p - step) if p > p_target else min(p_target, p + step)
        if len(hist) >= 2:
            (pa, a), (pb, b) = hist[-2], hist[-1]
            guess = b + (a - b) / (pa - pb) * (q - pb) if pa != pb else b
        else:
            guess = la
        try:
            la_new = _K1Shooter(q, cfg).solve(guess)
        except NonConvergence:
            step *= 0.5
            if step < 1e-5:
                raise
            continue
        hist.append((q, la_new))
        p, la = q, la_new
    known.extend(h for h in hist if h not in known)
    return hist


def solve_vss(k: int, p: float, cfg: VSSConfig | None = None, l: int = 0, start=None) -> VSSProfile:
    """Profile on the l-th branch at exponent ``p``.

    For ``p >= p_l`` the branch does not exist and the zero profile is
    returned with ``trivial=True``.  k=1 shoots from the decaying left bundle
    on the log-amplitude, the root being where the tail loses its algebraic
    component; the branch is followed from ``p_l - 0.1``.  For k >= 2 a
    collocation problem with the admissible bundles imposed at both ends is
    started from a mass-constrained solve near ``p_l`` and continued in p.
    """
    cfg = cfg or VSSConfig()
    dispersion_constants(k)
    if p <= 1:
        raise ValueError("p must exceed 1")
    p_l = 1 + (2 * k + 1) / (l + 1)
    if p >= p_l:
        return trivial_profile(k, p, cfg)
    if k == 1:
        if p_l - p < 0.1 and start is None:
            # close to the bifurcation point: seed directly from the linear prediction
            L, _ = cfg.window(1)
            C = bifurcation_amplitude(l, 1, p_l - p, kappa(l, 1, p))
            la = _K1Shooter(p, cfg).solve(_k1_seed_from_kernel(l, p, C, unit_kernel(1), L))
        else:
            la = _continue_k1(l, p, cfg, start)[-1][1]
        return _k1_profile(p, la, cfg)
    if l != 0:
        raise NotImplementedError("branches with l >= 1 are only available for k = 1")
    return _BVPBranch(k, cfg).solve_at(p)


# --------------------------------------------------------------------------
# k >= 2: collocation with bundle conditions


def _constraint_rows(k: int, p: float, y: float) -> np.ndarray:
    """Rows annihilating the admissible bundle directions of the linearized equation at ``y``."""
    m = 2 * k + 1
    c = 1.0 / (p - 1)
    gam = m * (c - 0.5) / (2 * k)
    side = Side.PLUS if y > 0 else Side.MINUS
    keep = {RootClass.DECAYING} | ({RootClass.NEUTRAL} if side is Side.PLUS else set())
    cols = []
    for r in bundle_roots(k, side):
        if r.classification in keep:
            v = bundle_vector(k, r.value, y, gam, m)
            cols += [v.real, v.imag]
    U, S, _ = np.linalg.svd(np.array(cols).T)
    rank = int(np.sum(S > 1e-10 * S[0]))
    return U[:, rank:].T


class _BVPBranch:
    """Collocation continuation of the l=0 branch for k >= 2.

    The first point fixes the mass and leaves p free, which keeps Newton away
    from the zero solution near the bifurcation.  Later points fix p and are
    seeded with the nearest converged profile.
    """

    def __init__(self, k: int, cfg: VSSConfig):
        self.k, self.cfg = k, cfg
        self.m = 2 * k + 1
        self.L, self.R = cfg.window(k)
        self.points: list[tuple[float, object]] = []  # (p, sol)

    def _fun(self, y, s, p):
        m = self.m
        f = s[0]
        top = (-1) ** (self.k + 1) * (np.abs(f) ** (p - 1) * f - y * s[1] / m - f / (p - 1))
        return np.vstack([s[1:m], top])

    def _start(self):
        k, m, L, R = self.k, self.m, self.L, self.R
        kern = derivative_table(unit_kernel(k), 2 * k)
        sel = (kern.grid >= L) & (kern.grid <= R)
        y = kern.grid[sel][::10]
        rows = kern.deriv_table[: 2 * k + 1, sel][:, ::10]
        G = np.concatenate([[0.0], np.cumsum(0.5 * (rows[0][1:] + rows[0][:-1]) * np.diff(y))])
        p0, C = _near_critical_start(0, k, 0.01)
        NL, NR = _constraint_rows(k, p0, L), _constraint_rows(k, p0, R)
        mu = C * G[-1]

        def fun(y, s, prm):
            return np.vstack([self._fun(y, s[:m], prm[0]), s[0]])

        def bc(sa, sb, prm):
            return np.r_[NL @ sa[:m], sa[m], NR @ sb[:m], sb[m] - mu]

        with np.errstate(over="ignore", invalid="ignore"):
            sol = solve_bvp(fun, bc, y, C * np.vstack([rows, G]), p=[p0], tol=1e-7, max_nodes=20000)
        if sol.status != 0:
            raise NonConvergence(f"collocation failed near the bifurcation point: {sol.message}")
        self.points.append((float(sol.p[0]), _Trimmed(sol, m)))

    def _solve(self, p, guess):
        k, L, R = self.k, self.L, self.R
        NL, NR = _constraint_rows(k, p, L), _constraint_rows(k, p, R)

        def bc(sa, sb):
            return np.r_[NL @ sa, NR @ sb]

        with np.errstate(over="ignore", invalid="ignore"):
            sol = solve_bvp(lambda y, s: self._fun(y, s, p), bc, guess.x, guess.y, tol=1e-7, max_nodes=20000)
        if sol.status != 0:
            raise NonConvergence(f"collocation failed at p = {p:g}: {sol.message}")
        if np.max(np.abs(sol.y[0])) < 1e-6:
            raise NonConvergence(f"collocation collapsed to the zero profile at p = {p:g}")
        return sol

    def solve_at(self, p_target: float, dp: float = 0.1) -> VSSProfile:
        if not self.points:
            self._start()
        p, sol = min(self.points, key=lambda t: abs(t[0] - p_target))
        while abs(p - p_target) > 1e-12:
            q = p_target if abs(p_target - p) <= dp else p + math.copysign(dp, p_target - p)
            try:
                new = self._solve(q, sol)
            except NonConvergence:
                dp *= 0.5
                if dp < 1e-4:
                    raise
                continue
            p, sol = q, new
            self.points.append((p, sol))
            dp = min(0.1, 1.5 * dp)
        y = np.linspace(self.L, self.R, int(round((self.R - self.L) / self.cfg.grid_step)) + 1)
        states = sol.sol(y)[: self.m]
        return _finish_profile(self.k, p, y, states, math.log10(float(np.max(np.abs(states[0])))), self.cfg)


class _Trimmed:
    """Drop the mass row of a parametrized collocation result."""

    def __init__(self, sol, m):
        self.x = sol.x
        self.y = sol.y[:m]
        self.sol = lambda y: sol.sol(y)[:m]


# --------------------------------------------------------------------------
# branches


@dataclass(frozen=True)
class Branch:
    l: int
    k: int
    points: list[tuple[float, float]]
    p_l: Fraction
    status: str = "complete"
    profiles: list[VSSProfile] = field(default_factory=list, repr=False)

    @property
    def p(self) -> np.ndarray:
        return np.array([q for q, _ in self.points])

    @property
    def sup_norm(self) -> np.ndarray:
        return np.array([s for _, s in self.points])


def trace_branch(l: int, k: int, p_range: tuple[float, float], step: float,
                 cfg: VSSConfig | None = None, keep_profiles: bool = False) -> Branch:
    """Natural-parameter continuation of the l-th branch over ``p_range``.

    The sweep starts at the upper end (closest to ``p_l``) and walks down,
    each solve seeded by extrapolating the previous ones.  On failure the
    step is halved down to ``1e-5``; below that the partial branch is
    returned with ``status='partial'``.  Points are reported in increasing p.
    """
    cfg = cfg or VSSConfig()
    p_l = critical_exponents(k, l)[l]
    lo, hi = sorted(p_range)
    if step <= 0:
        raise ValueError("step must be positive")
    if hi >= p_l:
        raise ValueError(f"range must lie below p_l = {p_l}")
    if hi - lo <= 0:
        return Branch(l, k, [], p_l)
    n = int(round((hi - lo) / step))
    targets = [hi - i * step for i in range(n + 1)]
    if targets[-1] > lo + 1e-12:
        targets.append(lo)
    points, profiles = [], []
    status = "complete"
    if k == 1:
        hist = None
        for q in targets:
            try:
                hist = _continue_k1(l, q, cfg, start=hist[-2:] if hist else None, dp=step)
            except NonConvergence:
                status = "partial"
                break
            prof = _k1_profile(q, hist[-1][1], cfg)
            points.append((q, prof.sup_norm))
            if keep_profiles:
                profiles.append(prof)
    else:
        if l != 0:
            raise NotImplementedError("branches with l >= 1 are only available for k = 1")
        br = _BVPBranch(k, cfg)
        for q in targets:
            try:
                prof = br.solve_at(q)
            except NonConvergence:
                status = "partial"
                break
            points.append((q, prof.sup_norm))
            if keep_profiles:
                profiles.append(prof)
    order = np.argsort([q for q, _ in points])
    return Branch(l, k, [points[i] for i in order], p_l, status, [profiles[i] for i in order] if keep_profiles else [])
