import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import simpson

from dispersionlab.data import InitialData, bump, gaussian
from dispersionlab.errors import PreconditionViolation
from dispersionlab.majorant import (check_precondition, compare, derivative_bound_check, majorant_constant,
                                   majorant_evolution, majorant_kernel, majorant_shape)


@pytest.fixture(scope="module")
def maj(kernel1):
    return majorant_kernel(1, kernel1)


def test_positive_unit_mass(maj):
    assert np.all(maj.values > 0)
    assert maj.mass == pytest.approx(1.0, abs=1e-12)
    assert maj(np.array([maj.grid[-1] + 1.0]))[0] == 0.0


def test_dominates_kernel(kernel1, maj):
    D = majorant_constant(kernel1, maj)
    assert D.D > 1
    assert np.all(np.abs(kernel1.values) <= D.D * maj.values * (1 + 1e-9))


@pytest.mark.xfail(strict=True, reason="1/int|F| over the window is below one; see the decisions ledger")
def test_omega1_exceeds_one(maj):
    assert maj.omega1 > 1


def test_shape_tails():
    y = np.array([100.0, 400.0])
    v = majorant_shape(y, 1, 0.1)
    assert v[0] / v[1] == pytest.approx(4 ** 0.25, rel=1e-4)
    # on the left the logistic factor dominates the weighted term
    assert majorant_shape(-30.0, 1, 0.5) == pytest.approx(901 ** -0.125 / (1 + np.exp(30.0)), rel=1e-9)


def test_derivative_bounds(kernel1):
    bounds = [derivative_bound_check(kernel1, b).c_bar for b in range(1, 7)]
    assert all(np.isfinite(bounds))
    assert all(a <= b for a, b in zip(bounds, bounds[1:]))
    assert np.isfinite(derivative_bound_check(kernel1, 0).D0)


def test_zero_data(maj):
    zero = InitialData(lambda z: 0 * z, (-1.0, 1.0), "compact")
    ubar = majorant_evolution(maj, zero, 1.0, np.linspace(-5, 5, 11))
    assert np.all(ubar >= 0) and compare(np.zeros(11), ubar)


def test_precondition(maj):
    u0 = gaussian(0.5)
    with pytest.raises(PreconditionViolation):
        majorant_evolution(maj, gaussian(0.5), 2.0, [0.0], u0=u0, D=3.0)
    with pytest.raises(PreconditionViolation):
        check_precondition([1.0], [-1.0], 1.0)
    check_precondition([1.0, -2.0], [3.0, 6.0], 3.0)


def test_mass_carried_over(maj):
    u0 = bump(0.0, 1.0)
    x = np.linspace(-25, 65, 18001)
    ubar = majorant_evolution(maj, u0, 1.0, x)
    z, v = u0.sample(20001)
    assert simpson(ubar, x=x) == pytest.approx(simpson(v, x=z), rel=1e-3)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.0, 2.0), st.floats(0.3, 3.0))
def test_order_preserving(maj, extra, t):
    small = bump(0.0, 1.0)
    big = InitialData(lambda z: small(z) * (1 + extra), small.support, "compact")
    x = np.linspace(-6, 6, 25)
    assert np.all(majorant_evolution(maj, small, t, x) <= majorant_evolution(maj, big, t, x) + 1e-14)
