#!/usr/bin/env python3
"""
Tests for directions, cover points, sectors and formal series
"""

import sys
import math
import cmath
from fractions import Fraction

import numpy as np
import pytest

from core import (CoverPoint, Direction, FormalSeries, GrowthClass, Sector, attest_growth, cover_power,
                  disc_sector_contains, parse_complex, principal_root, sector_contains)
from errors import DomainError, ValidationError


def test_direction_is_not_reduced():
    d = Direction(3 * math.pi)
    assert d.theta == pytest.approx(3 * math.pi)
    assert d.shifted(-math.pi).theta == pytest.approx(2 * math.pi)
    assert d.unit() == pytest.approx(-1 + 0j)
    with pytest.raises(ValidationError):
        Direction(math.nan)


def test_cover_point_from_complex():
    point = CoverPoint.from_complex(-1 + 0j, arg=-math.pi)
    assert point.modulus == pytest.approx(1.0)
    assert point.arg == pytest.approx(-math.pi)
    with pytest.raises(ValidationError):
        CoverPoint.from_complex(1j, arg=0.0)


def test_cover_point_inverse_of_origin():
    with pytest.raises(DomainError):
        CoverPoint(0.0, 0.0).inverse()
    inverse = CoverPoint(2.0, 0.5).inverse()
    assert inverse.modulus == pytest.approx(0.5)
    assert inverse.arg == pytest.approx(-0.5)


def test_cover_power_follows_the_sheet():
    # √ on the second sheet differs by a sign
    first = cover_power(4.0, 0.2, 0.5)
    second = cover_power(4.0, 0.2 + 2 * math.pi, 0.5)
    assert first == pytest.approx(2 * cmath.exp(0.1j))
    assert second == pytest.approx(-first)
    assert cover_power(0.0, 1.0, 2.5) == 0


def test_principal_root():
    root = principal_root(-8, 3)
    assert root ** 3 == pytest.approx(-8 + 0j)
    assert cmath.phase(root) == pytest.approx(math.pi / 3)


def test_sector_membership_on_the_cover():
    s = Sector(2 * math.pi, 1.0, 5.0)
    assert sector_contains(s, CoverPoint(1.0, 2 * math.pi + 0.3))
    # same complex value, other sheet
    assert not sector_contains(s, CoverPoint(1.0, 0.3))
    assert not sector_contains(s, CoverPoint(6.0, 2 * math.pi))
    assert not sector_contains(s, CoverPoint(0.0, 2 * math.pi))
    assert disc_sector_contains(s, 0.5, CoverPoint(0.2, 4.0))


def test_sector_rejects_bad_geometry():
    with pytest.raises(ValidationError):
        Sector(0.0, 0.0)
    with pytest.raises(ValidationError):
        Sector(0.0, 1.0, -1.0)


@pytest.mark.parametrize("d", [0.0, 2.5, -7.0])
def test_sector_membership_is_monotone(d):
    rng = np.random.default_rng(5)
    openings = [0.3, 1.0, 2.5, 7.0]
    radii = [0.5, 2.0, math.inf]
    points = [CoverPoint(float(rng.uniform(0.01, 4.0)), d + float(rng.uniform(-4.0, 4.0))) for _ in range(200)]
    for narrow, wide in zip(openings, openings[1:]):
        for small, large in zip(radii, radii[1:]):
            inner = Sector(d, narrow, small)
            outer = Sector(d, wide, large)
            for t in points:
                if sector_contains(inner, t):
                    assert sector_contains(outer, t)
                    assert sector_contains(Sector(d, wide, small), t)
                    assert sector_contains(Sector(d, narrow, large), t)


def test_cover_point_rotate_and_scale():
    t = CoverPoint(2.0, 3.0)
    turned = t.rotate(2 * math.pi)
    assert turned.value == pytest.approx(t.value)
    assert turned.arg == pytest.approx(3.0 + 2 * math.pi)
    assert t.scale(0.25) == CoverPoint(0.5, 3.0)
    moved = t.inverse().scale(4.0).rotate(1.0)
    assert (moved.modulus, moved.arg) == pytest.approx((2.0, -2.0))


def test_attest_growth_order_one():
    s = Sector(0.0, 1.0)
    result = GrowthClass(1.0).attest(lambda p: cmath.exp(p.value), s)
    assert result.holds
    assert result.C2 <= 1.0


def test_attest_growth_detects_faster_growth():
    s = Sector(0.0, 0.5)
    result = attest_growth(lambda p: cmath.exp(p.value ** 2), s, 1.0, r_max=10.0)
    assert not result.holds


def test_formal_series_stride():
    fs = FormalSeries(lambda n, z: 2.0 ** n, stride=3)
    assert fs.coefficient(6) == 4
    assert fs.coefficient(4) == 0
    assert fs.truncate(4) == [1, 0, 0, 2, 0]
    assert fs.partial_sum(0.5, order=6) == pytest.approx(1 + 2 * 0.125 + 4 * 0.5 ** 6)
    with pytest.raises(ValidationError):
        fs.coefficient(-1)
    with pytest.raises(ValidationError):
        FormalSeries(lambda n, z: 1.0, stride=0)


def test_formal_series_map_coefficients():
    fs = FormalSeries(lambda n, z: float(math.factorial(n)), label="euler")
    mapped = fs.map_coefficients(lambda n, c: c / math.factorial(n), convergent=True)
    assert mapped.convergent
    assert np.allclose(mapped.terms(0.0, 6), np.ones(6))


@pytest.mark.parametrize("value,expected", [
    (2, 2 + 0j),
    (1.5, 1.5 + 0j),
    ([0.0, -1.0], -1j),
])
def test_parse_complex(value, expected):
    assert parse_complex(value) == expected


@pytest.mark.parametrize("value", [True, "1", [1, 2, 3], [1, "2"], Fraction(1, 2)])
def test_parse_complex_rejects(value):
    with pytest.raises(ValidationError):
        parse_complex(value)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
