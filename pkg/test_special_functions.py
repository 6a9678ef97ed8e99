#!/usr/bin/env python3
"""
Tests for the Lanczos Γ and the Mittag-Leffler evaluator
"""

import sys
import math
import cmath

import numpy as np
import pytest
from scipy import special

from errors import DomainError, ValidationError
from special_functions import (_mittag_leffler_mp, gamma, gamma_s, log_gamma, log_gamma_s, mittag_leffler,
                               mittag_leffler_array, mittag_leffler_partial, mittag_leffler_tail_bound)


@pytest.mark.parametrize("x", [0.5, 1.0, 2.5, 7.0, 20.0, 60.5])
def test_gamma_matches_math(x):
    assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-12)


def test_gamma_reflection():
    assert gamma(-0.5) == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-13)
    assert gamma(-2.5) == pytest.approx(math.gamma(-2.5), rel=1e-12)


def test_gamma_complex_against_scipy():
    z = np.array([0.3 + 2j, 4 - 1j, -1.5 + 0.5j])
    assert np.allclose(gamma(z), special.gamma(z), rtol=1e-12)


def test_nine_coefficient_lanczos_meets_its_target():
    re, im = np.meshgrid(np.linspace(0.5, 30.0, 25), np.linspace(-10.0, 10.0, 21))
    z = (re + 1j * im).ravel()
    reference = special.loggamma(z)
    # compare through exp so the log branches may differ by 2πi
    deviation = np.abs(np.exp(log_gamma(z) - reference) - 1.0)
    assert np.all(deviation <= 1e-12 * np.maximum(1.0, np.abs(reference)))


def test_log_gamma_large_argument():
    assert log_gamma(500.0).real == pytest.approx(math.lgamma(500.0), rel=1e-14)


def test_gamma_s():
    assert gamma_s(0.5, 4.0) == pytest.approx(math.gamma(3.0))
    assert gamma_s(-1.0, 2.0) == pytest.approx(1.0 / math.gamma(3.0))
    assert log_gamma_s(2.0, 300.0) == pytest.approx(math.lgamma(601.0))
    with pytest.raises(DomainError):
        gamma_s(1.0, -1.0)


@pytest.mark.parametrize("z", [0.0, 1.5, -2.0, 1j, 2 - 3j, 8.0])
def test_mittag_leffler_closed_forms(z):
    assert mittag_leffler(1.0, z) == pytest.approx(cmath.exp(z))
    assert mittag_leffler(2.0, z * z) == pytest.approx(cmath.cosh(z), rel=1e-12)


def test_mittag_leffler_half():
    # E_{1/2}(z) = e^{z²} erfc(-z)
    for z in (0.5, -1.0, 2.0):
        assert mittag_leffler(0.5, z) == pytest.approx(math.exp(z * z) * math.erfc(-z), rel=1e-12)


def test_mittag_leffler_taylor_region():
    z = 0.8 + 0.3j
    expected = mittag_leffler_partial(0.7, z, 80)
    assert mittag_leffler(0.7, z) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("alpha,z", [(0.7, 6.0), (0.7, -6.0), (0.6, 5j), (1.5, 7.0), (1.3, -6.0 + 2j)])
def test_mittag_leffler_far_field(alpha, z):
    assert mittag_leffler(alpha, z) == pytest.approx(_mittag_leffler_mp(alpha, complex(z)), rel=1e-7)


def test_mittag_leffler_array_matches_scalar():
    z = np.array([[0.1, 2.0], [-3.0, 1j]])
    values = mittag_leffler_array(0.8, z)
    assert values.shape == (2, 2)
    assert values[1, 0] == pytest.approx(mittag_leffler(0.8, -3.0))


@pytest.mark.parametrize("alpha, z, n_terms", [(0.8, 2.0, 20), (0.5, 1.5j, 30), (1.0, -3.0, 25)])
def test_mittag_leffler_tail_bound(alpha, z, n_terms):
    error = abs(mittag_leffler(alpha, z) - mittag_leffler_partial(alpha, z, n_terms))
    first_omitted = abs(z) ** n_terms / math.gamma(1.0 + alpha * n_terms)
    assert first_omitted <= error * 1.5
    assert error <= mittag_leffler_tail_bound(alpha, z, n_terms)


def test_mittag_leffler_rejects_index():
    with pytest.raises(ValidationError):
        mittag_leffler(0.0, 1.0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
