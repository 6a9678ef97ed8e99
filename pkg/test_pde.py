#!/usr/bin/env python3
"""
Tests for the Cauchy problem: formal solutions, regimes, closed forms and Gevrey estimates
"""

import sys
import math
import cmath
from fractions import Fraction

import numpy as np
import pytest

from core import CoverPoint
from errors import AccuracyError, DomainError, ValidationError
from initial_data import Exp, LogBranch, Polynomial, PowerBranch, Rational
import pde
from moments import MomentFunction
from pde import (CONVERGENT_1B, ENTIRE_1A, SUMMABLE_1C, SUMMABLE_2, TRANSLATION_2A, BorelSum, CauchyProblem,
                 borel_closed_form, case1_directions, case2_directions, classify, derivative_series, exact_sum,
                 formal_residual, formal_solution, gevrey_estimate, roots_of_unity_average)
from transforms import borel_sum


def problem(p, q, r, a=1.0, phi=None):
    return CauchyProblem(p, q, r, a, phi if phi is not None else Polynomial([1]))


def test_formal_solution_coefficients():
    geometric = formal_solution(problem(1, 0, 0, 2.0))
    assert geometric.truncate(4) == pytest.approx([1, 2, 4, 8, 16])
    euler = formal_solution(problem(2, 0, 0))
    assert euler.coefficient(5) == pytest.approx(120.0)
    entire = formal_solution(problem(0, 0, 0, 1.0, Exp(1.0)))
    assert entire.coefficient(3, z=0.5) == pytest.approx(math.exp(0.5) / 6.0)


def test_formal_solution_stride():
    fs = formal_solution(problem(2, 2, 0))
    assert fs.stride == 3
    assert fs.coefficient(1) == 0
    assert fs.coefficient(2) == 0
    # a^n (n!)^{p-1} (q+1)^{n(p-1)} at n = 2
    assert fs.coefficient(6) == pytest.approx(2.0 * 9.0)


def test_formal_solution_with_derivatives():
    fs = formal_solution(problem(0, 0, 2, 1.0, Rational(1.0)))
    # φ^{(2n)}(0)/n! = (2n)!/n!
    assert fs.coefficient(3) == pytest.approx(math.factorial(6) / math.factorial(3))


@pytest.mark.parametrize("p,q,r,tag,k", [
    (0, 0, 0, ENTIRE_1A, None),
    (1, 3, 0, CONVERGENT_1B, None),
    (2, 0, 0, SUMMABLE_1C, 1.0),
    (3, 1, 0, SUMMABLE_1C, 1.0),
    (0, 0, 1, TRANSLATION_2A, None),
    (2, 1, 1, SUMMABLE_2, 1.0),
    (0, 0, 2, SUMMABLE_2, 1.0),
    (1, 0, 2, SUMMABLE_2, 0.5),
    (2, 2, 3, SUMMABLE_2, 0.75),
])
def test_classify(p, q, r, tag, k):
    regime = classify(problem(p, q, r, 1.0, Rational(1.0)))
    assert regime.tag == tag
    if k is None:
        assert regime.k is None
    else:
        assert regime.k == pytest.approx(k)


def test_expected_gevrey_order():
    assert classify(problem(3, 0, 0)).expected_gevrey_order == pytest.approx(2.0)
    assert classify(problem(0, 0, 2, 1.0, Rational(1.0))).expected_gevrey_order == pytest.approx(1.0)
    assert classify(problem(0, 0, 2, 1.0, Exp(1.0))).expected_gevrey_order == pytest.approx(-1.0)
    assert classify(problem(0, 0, 2, 1.0, Polynomial([1, 1, 1]))).expected_gevrey_order is None


def test_entire_phi_note():
    regime = classify(problem(0, 0, 2, 1.0, Exp(1.0)))
    assert regime.tag == SUMMABLE_2
    assert "entire" in regime.note
    assert case2_directions(problem(0, 0, 2, 1.0, Exp(1.0)), 0.0) == []


def test_problem_validation():
    with pytest.raises(ValidationError):
        problem(2, 0, 0, 0.0)
    with pytest.raises(ValidationError):
        problem(-1, 0, 0)
    with pytest.raises(ValidationError):
        CauchyProblem(1.5, 0, 0, 1.0, Polynomial([1]))
    with pytest.raises(ValidationError):
        problem(2, 0, 0, 1.0, lambda z: z)
    # exp grows with order 1 > r/(p-1+r) = 2/3
    with pytest.raises(ValidationError):
        problem(2, 0, 2, 1.0, Exp(1.0))


def test_problem_json():
    cp = CauchyProblem.from_json({"p": 2, "q": 1, "r": 0, "a": [0.0, 1.0],
                                  "phi": {"variant": "Rational", "params": {"z0": 2.0}}})
    assert cp.a == 1j
    assert CauchyProblem.from_json(cp.to_json()) == cp
    with pytest.raises(ValidationError):
        CauchyProblem.from_json({"p": 2, "q": 0, "r": 0, "b": 1})
    with pytest.raises(ValidationError):
        CauchyProblem.from_json({"p": 2, "q": 0})
    with pytest.raises(ValidationError):
        CauchyProblem.from_json({"p": True, "q": 0, "r": 0})


def test_moment_functions():
    assert problem(3, 0, 0).moment_function() == MomentFunction.gamma(1).power(2)
    case2 = problem(0, 0, 2, 1.0, Rational(1.0)).moment_function()
    assert case2 == MomentFunction.gamma(2) / MomentFunction.gamma(1)
    assert float(case2.order) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        problem(1, 0, 0).moment_function()


def test_exact_sums():
    t = 0.3 + 0.1j
    assert exact_sum(problem(0, 1, 0, 2.0, Exp(1.0)), t, 0.5) == pytest.approx(
        math.exp(0.5) * cmath.exp(t * t))
    assert exact_sum(problem(1, 0, 0, 2.0), t, 0.0) == pytest.approx(1.0 / (1.0 - 2.0 * t))
    assert exact_sum(problem(0, 0, 1, 1.0, Rational(1.0)), t, 0.2) == pytest.approx(1.0 / (0.8 - t))
    with pytest.raises(DomainError):
        exact_sum(problem(1, 0, 0, 2.0), 0.6, 0.0)
    with pytest.raises(DomainError):
        exact_sum(problem(2, 0, 0), t, 0.0)


def test_exact_sum_against_partial_sums():
    cp = problem(1, 1, 0, 0.5)
    t = 0.4
    assert exact_sum(cp, t, 0.0) == pytest.approx(formal_solution(cp).partial_sum(t, count=80))


def test_translation_follows_the_branch():
    cp = problem(0, 0, 1, 1.0, PowerBranch(1.0, 0.5))
    # continuation along z -> z + t stays on the principal sheet for small t
    assert exact_sum(cp, 0.3j, 0.0) == pytest.approx(cmath.sqrt(1.0 - 0.3j))


def test_case1_borel_closed_form_matches_the_series():
    cp = problem(2, 1, 0, 0.5, Rational(1.0))
    fs = formal_solution(cp)
    m = cp.moment_function()
    for s in (0.4, 0.5j, CoverPoint(0.3, 2.0)):
        assert borel_closed_form(cp, s, 0.3) == pytest.approx(borel_sum(m, fs, s, 0.3), rel=1e-12)


@pytest.mark.parametrize("phi,s", [
    (Exp(1.0), 0.25),
    (Rational(1.0), 0.3),
    (Rational(1.0), CoverPoint(0.2, 1.0)),
    (LogBranch(2.0), 0.5),
])
def test_case2_borel_closed_form_matches_the_series(phi, s):
    cp = problem(0, 0, 2, 1.0, phi)
    fs = formal_solution(cp)
    m = cp.moment_function()
    assert borel_closed_form(cp, s, 0.1) == pytest.approx(borel_sum(m, fs, s, 0.1), rel=1e-10)


def test_case2_borel_of_a_pole():
    cp = problem(0, 0, 2, 1.0, Rational(1.0))
    # (1/2)[1/(1-√s) + 1/(1+√s)] = 1/(1-s)
    assert borel_closed_form(cp, 0.5, 0.0) == pytest.approx(2.0)


def test_case1_directions():
    assert case1_directions(problem(2, 1, 0, 1.0)) == pytest.approx([0.0, math.pi])
    assert case1_directions(problem(2, 0, 0, 1j)) == pytest.approx([-math.pi / 2])


def test_case2_directions():
    cp = problem(0, 0, 2, 1.0, Rational(1.0))
    assert case2_directions(cp, 0.5) == pytest.approx([0.0, -2 * math.pi])
    shifted = case2_directions(cp, 0.5j)
    assert shifted[0] == pytest.approx(2 * math.atan2(-0.5, 1.0))
    with pytest.raises(DomainError):
        case2_directions(cp, 1.0)


def test_borel_sum_translates():
    cp = problem(0, 0, 2, 1.0, Rational(1.0))
    full = BorelSum(cp, 0.0)
    parts = [full.translate(l) for l in range(2)]
    s = CoverPoint(0.3, 0.4)
    assert parts[0](s) + parts[1](s) == pytest.approx(full(s))
    assert parts[1].singular_directions() == pytest.approx([-2 * math.pi])
    with pytest.raises(ValidationError):
        full.translate(2)
    with pytest.raises(DomainError):
        BorelSum(problem(2, 0, 0)).translate(0)
    with pytest.raises(DomainError):
        BorelSum(problem(1, 0, 0))


@pytest.mark.parametrize("p,q,r,phi,order", [
    (2, 0, 0, Polynomial([1]), 1.0),
    (1, 0, 0, Polynomial([1]), 0.0),
    (3, 0, 0, Polynomial([1]), 2.0),
    (2, 1, 0, Polynomial([1]), 0.5),
    (0, 0, 2, Rational(1.0), 1.0),
    (1, 0, 2, Rational(1.0), 2.0),
])
def test_gevrey_estimate(p, q, r, phi, order):
    cp = problem(p, q, r, 1.0, phi)
    estimate = gevrey_estimate(formal_solution(cp), 0.0, 40)
    assert not estimate.degenerate
    assert float(estimate) == pytest.approx(order, abs=0.05)
    assert float(estimate) == pytest.approx(classify(cp).expected_gevrey_order, abs=0.05)


def test_gevrey_estimate_degenerate_and_short():
    fs = formal_solution(problem(0, 0, 2, 1.0, Polynomial([1, 1, 1])))
    estimate = gevrey_estimate(fs, 0.0, 20)
    assert estimate.degenerate
    assert estimate.order == 0.0
    with pytest.raises(ValidationError):
        gevrey_estimate(fs, 0.0, 10)


PHI = Polynomial([1, 2, Fraction(-1, 3), 1, Fraction(1, 5)])


@pytest.mark.parametrize("p", range(4))
@pytest.mark.parametrize("q", range(3))
@pytest.mark.parametrize("r", range(4))
def test_formal_residual_vanishes(p, q, r):
    cp = CauchyProblem(p, q, r, 1, PHI)
    for coefficients in formal_residual(cp, 4 * (q + 1) + q):
        assert all(c == 0 for c in coefficients)


def test_formal_residual_with_fractional_coefficient():
    cp = CauchyProblem(2, 1, 1, Fraction(-2, 3), PHI)
    residual = formal_residual(cp, 9)
    assert len(residual) == 9 - 1
    assert all(c == 0 for coefficients in residual for c in coefficients)
    with pytest.raises(ValidationError):
        formal_residual(problem(2, 0, 0, 1.0, Exp(1.0)), 5)
    with pytest.raises(ValidationError):
        formal_residual(problem(2, 0, 0, 1j), 5)


@pytest.mark.parametrize("p, q, r", [(0, 0, 1), (2, 0, 0), (3, 1, 2), (1, 2, 3), (2, 2, 1)])
def test_shipped_coefficients_match_exact_ones(p, q, r):
    cp = CauchyProblem(p, q, r, Fraction(3, 2), PHI)
    fs = formal_solution(cp)
    z = Fraction(3, 10)
    for n in range(6):
        exact = fs.meta['exact_coefficient'](n)
        expected = float(sum(c * z ** i for i, c in enumerate(exact)))
        assert fs.term(n, float(z)) == pytest.approx(expected, rel=1e-12, abs=1e-300)
        assert fs.coefficient(n * (q + 1), float(z)) == pytest.approx(expected, rel=1e-12, abs=1e-300)


def test_formal_residual_reads_the_shipped_series(monkeypatch):
    shipped = formal_solution

    def perturbed(cp):
        return shipped(cp).map_coefficients(lambda n, c: c * (1.0 + 1e-6) if n == 2 else c)

    monkeypatch.setattr(pde, "formal_solution", perturbed)
    with pytest.raises(AccuracyError):
        formal_residual(CauchyProblem(2, 0, 1, 1, PHI), 6)


@pytest.mark.parametrize("r", [2, 3])
def test_roots_of_unity_average(r):
    phi = Exp(1.0)
    for w in (0.3, 0.5j, 0.2 - 0.4j):
        assert roots_of_unity_average(phi, 0.1, w, r) == pytest.approx(
            derivative_series(phi, 0.1, w, r), rel=1e-10)


def test_roots_of_unity_average_of_a_pole():
    phi = Rational(1.0)
    w = 0.4
    assert roots_of_unity_average(phi, 0.0, w, 2) == pytest.approx(derivative_series(phi, 0.0, w, 2, terms=200))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
