from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dispersionlab import vss
from dispersionlab.errors import TailTooShort


@given(st.integers(1, 5), st.integers(0, 20))
def test_critical_exponents_decrease(k, L):
    p = vss.critical_exponents(k, L)
    assert p[0] == 2 * k + 2
    assert all(a > b > 1 for a, b in zip(p, p[1:]))


@pytest.mark.parametrize("p,verdict", [(5, "stable"), (4, "critical"), ("3.5", "unstable"), (3, "unstable")])
def test_linearized_verdicts(p, verdict):
    assert vss.linearized_spectrum(p, 1).verdict.value == verdict


@given(st.fractions(Fraction(11, 10), Fraction(20)), st.integers(1, 4))
def test_spectrum_shift(p, k):
    rep = vss.linearized_spectrum(p, k, 5)
    assert rep.d_1 == 1 / (p - 1) - Fraction(1, 2 * k + 1)
    assert all(a - b == Fraction(1, 2 * k + 1) for a, b in zip(rep.spectrum_head, rep.spectrum_head[1:]))


def test_spectrum_rejects_small_p():
    with pytest.raises(ValueError):
        vss.linearized_spectrum(1, 1)


def test_bifurcation_amplitude_formula():
    C = vss.bifurcation_amplitude(0, 1, 0.05, 0.03)
    assert C ** (4 - 0.05 - 1) == pytest.approx(0.05 / 9 / 0.03)
    with pytest.raises(ValueError):
        vss.bifurcation_amplitude(0, 1, 0.05, -1.0)


def test_centre_decay_shape():
    cd = vss.centre_decay(0, 1, 0.03, np.array([1.0, 10.0, 100.0]))
    assert np.all(np.diff(cd.coefficient) < 0)
    assert cd.coefficient[2] / cd.coefficient[1] == pytest.approx(10 ** (-1 / 3))


def test_gamma_l1_positive():
    assert vss.gamma_l(1, 1) > 0


def test_tail_symmetry_on_synthetic_tails():
    y = np.linspace(0, 40, 8001)
    clean = np.cos(y) / np.sqrt(1 + y)
    assert vss.tail_symmetry((y, clean)).metric < 0.1
    lifted = clean + 0.3 / np.sqrt(1 + y)
    assert vss.tail_symmetry((y, lifted)).metric > 0.1
    assert vss.tail_symmetry((y, 1 + y)).metric == 1.0
    with pytest.raises(TailTooShort):
        vss.tail_symmetry((y[:3001], np.cos(0.2 * y[:3001])), start=5.0)


@given(st.floats(0.01, 100.0))
def test_tail_symmetry_scale_invariant(a):
    y = np.linspace(0, 40, 4001)
    f = np.cos(y) / np.sqrt(1 + y) + 0.05
    assert vss.tail_symmetry((y, a * f)).metric == pytest.approx(vss.tail_symmetry((y, f)).metric, rel=1e-9)


def test_trivial_above_threshold():
    prof = vss.solve_vss(1, 4.2)
    assert prof.trivial and prof.sup_norm == 0 and vss.vss_residual(prof) == 0


def test_k1_profile_solves_ode():
    prof = vss.solve_vss(1, 3.5)
    assert vss.vss_residual(prof, (-10, 30)) < 1e-5
    assert prof.tail_metric < 0.1 and not prof.spurious_oscillation


def test_k1_second_branch():
    prof = vss.solve_vss(1, 2.4, l=1)
    assert prof.tail_metric < 0.1 and prof.sup_norm > 0


@pytest.mark.parametrize("k,p", [(2, 5.5), (3, 7.8)])
def test_higher_order_profiles(k, p):
    prof = vss.solve_vss(k, p)
    assert prof.tail_metric < 0.1
    assert vss.vss_residual(prof) < 1e-4


def test_higher_order_sup_norm_grows_as_p_falls():
    br = vss.trace_branch(0, 2, (5.3, 5.9), 0.3)
    assert br.status == "complete" and np.all(np.diff(br.sup_norm) < 0)


def test_higher_order_l1_unavailable():
    with pytest.raises(NotImplementedError):
        vss.solve_vss(2, 3.0, l=1)


def test_branch_range_checks():
    with pytest.raises(ValueError):
        vss.trace_branch(0, 1, (3.0, 4.5), 0.1)
    with pytest.raises(ValueError):
        vss.trace_branch(0, 1, (3.0, 3.5), 0.0)


def test_config_window_override():
    assert vss.VSSConfig(right_endpoint=40.0).window(1) == (-14.0, 40.0)


def test_continuation_close_to_threshold_matches_direct_seed():
    br = vss.trace_branch(0, 1, (3.96, 3.98), 0.02)
    direct = [vss.solve_vss(1, p).sup_norm for p in br.p]
    assert np.allclose(br.sup_norm, direct, rtol=1e-5)
