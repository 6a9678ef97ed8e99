#!/usr/bin/env python3
"""
Tests for moment functions and their growth attestation
"""

import sys
import math
from fractions import Fraction

import numpy as np
import pytest

from errors import DomainError, ValidationError
from moments import MomentFunction, fit_growth_sandwich, fit_order, moment_product, moment_quotient


def test_gamma_atom():
    m = MomentFunction.gamma(1)
    assert m(3) == pytest.approx(6.0)
    assert m.order == 1
    assert m.k == 1.0


def test_product_and_quotient_orders():
    m1 = MomentFunction.gamma(Fraction(1, 2))
    m2 = MomentFunction.gamma(2)
    assert moment_product(m1, m2).order == Fraction(5, 2)
    assert moment_quotient(m2, m1).order == Fraction(3, 2)
    assert (m2 / m1)(2) == pytest.approx(math.gamma(5.0) / math.gamma(2.0))


def test_equal_atoms_merge():
    m = MomentFunction.gamma(1) * MomentFunction.gamma(1)
    assert m.atoms == ((Fraction(1), 2),)
    assert m.expression == "Gamma_1^2"
    assert (m / MomentFunction.gamma(1)) == MomentFunction.gamma(1)


def test_reciprocal_has_negative_order():
    m = MomentFunction.gamma(Fraction(1, 3)).reciprocal()
    assert m.order == Fraction(-1, 3)
    assert m.k is None
    assert m(6) == pytest.approx(1.0 / math.gamma(3.0))


def test_constant():
    m = MomentFunction.constant()
    assert m(10) == 1.0
    assert m.expression == "1"


def test_log_beyond_float_range():
    m = MomentFunction.gamma(1).power(3)
    assert m.log(500) == pytest.approx(3 * math.lgamma(501.0))


def test_negative_argument():
    with pytest.raises(DomainError):
        MomentFunction.gamma(1)(-1)
    with pytest.raises(DomainError):
        MomentFunction.gamma(1).log(np.array([1.0, -2.0]))


def test_bad_order():
    with pytest.raises(ValidationError):
        MomentFunction.gamma(math.inf)
    with pytest.raises(ValidationError):
        MomentFunction.gamma("half")


@pytest.mark.parametrize("m", [
    MomentFunction.gamma(1),
    MomentFunction.gamma(Fraction(1, 2)).power(3),
    MomentFunction.gamma(Fraction(2, 3)) / MomentFunction.gamma(Fraction(1, 3)),
])
def test_growth_sandwich(m):
    sandwich = fit_growth_sandwich(m)
    assert sandwich.holds
    assert sandwich.a <= sandwich.A


@pytest.mark.parametrize("m,order", [
    (MomentFunction.gamma(1).power(2), 2.0),
    (MomentFunction.gamma(Fraction(1, 2)), 0.5),
    (MomentFunction.gamma(Fraction(3, 2)) * MomentFunction.gamma(Fraction(1, 2)), 2.0),
])
def test_fit_order(m, order):
    assert fit_order(m) == pytest.approx(order, abs=0.02)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
