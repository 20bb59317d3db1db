import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import adjoint_coeffs
from dispersionlab.data import InitialData, gaussian
from dispersionlab.errors import DecayClassViolation, RegularizationUnsupported
from dispersionlab.spectral import (PairingMode, SignConvention, TruncationPolicy, adjoint_polynomial,
                                    apply_B_star, biorthonormality_matrix, eigenfunction, eigenvalue,
                                    exact_pairing, indefinite_pairing, kernel_moment, moments, residual_B)


def test_cubic_adjoint_polynomial():
    # y^3 - 6 for the plain convention; the sign flips for the metric-adjusted one
    assert adjoint_polynomial(3, 1, "plain").coeffs == (-6, 0, 0, 1)
    assert adjoint_polynomial(3, 1).coeffs == (6, 0, 0, -1)


@given(st.integers(0, 40), st.integers(1, 4))
def test_adjoint_matches_back_substitution(l, k):
    assert list(adjoint_polynomial(l, k, SignConvention.PLAIN).coeffs) == adjoint_coeffs(l, k)


@given(st.integers(0, 40), st.integers(1, 4))
def test_adjoint_nonzero_degrees(l, k):
    m = 2 * k + 1
    assert adjoint_polynomial(l, k).nonzero_degrees() == sorted(range(l % m, l + 1, m))


def test_apply_B_star_on_raw_sequence():
    out = apply_B_star([0, 0, 0, 1], k=1)
    assert out.coeffs == (Fraction(6), 0, 0, Fraction(-1))
    with pytest.raises(ValueError):
        apply_B_star([1, 2])


def test_kernel_moments():
    assert kernel_moment(0, 1) == 1
    assert kernel_moment(3, 1) == -6
    assert kernel_moment(1, 2) == 0
    assert kernel_moment(10, 2) == Fraction(math.factorial(10), 2)


def test_plain_convention_pairing_sign():
    for b in range(6):
        r, s = exact_pairing(b, adjoint_polynomial(b, 1, "plain"))
        assert r * r * s == 1 and (r > 0) == (b % 2 == 0)


def test_biorthonormality_k2_exact():
    assert np.array_equal(biorthonormality_matrix(8, 2), np.eye(9))


def test_filtered_pairing_needs_kernel():
    policy = TruncationPolicy(pairing_regularization=PairingMode.FILTERED)
    with pytest.raises(RegularizationUnsupported):
        indefinite_pairing(1, adjoint_polynomial(1, 1), policy)
    with pytest.raises(RegularizationUnsupported):
        indefinite_pairing("x", adjoint_polynomial(1, 1), TruncationPolicy())


def test_eigen_residual(kernel1):
    for l in range(5):
        assert residual_B(eigenfunction(l, kernel1), kernel1) < 1e-10


def test_eigenfunction_needs_table(kernel1):
    with pytest.raises(ValueError):
        eigenfunction(kernel1.max_order + 1, kernel1)


def test_eigenvalues():
    assert eigenvalue(4, 2) == Fraction(-4, 5)
    assert TruncationPolicy(k=2).nu == pytest.approx(3 / 10)


@pytest.mark.parametrize("l,expected", [(0, math.sqrt(math.pi)), (1, 0.0), (2, math.sqrt(math.pi) / 2 / math.sqrt(2))])
def test_gaussian_moments(l, expected):
    assert moments(gaussian(1.0), l) == pytest.approx(expected, abs=1e-12)


def test_algebraic_decay_limits_moments():
    data = InitialData(lambda z: 1 / (1 + z**2) ** 2, decay=4.0)
    assert moments(data, 1) == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(DecayClassViolation):
        moments(data, 3)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 2.0), st.floats(-3, 3))
def test_moments_linear(w, a):
    g = gaussian(w)
    assert moments(g.scaled(a), 2) == pytest.approx(a * moments(g, 2), rel=1e-9, abs=1e-12)
