#!/usr/bin/env python3
"""
Tests for the closed forms: equilateral triangle, Bessel zeros, sectors and rectangles.
"""

import math

import pytest

from closed_forms import (
    SeriesValue,
    bessel_first_zero,
    equilateral_exact,
    equilateral_fields,
    rect_center_torsion,
    rect_F,
    rect_F_limit,
    rect_lambda1,
    rect_torsion,
    rect_torsion_bounds,
    sector_lambda1,
    sector_torsion,
)
from errors import AngleOutOfRange, DomainError
from geometry import Rectangle, Sector

SQRT3 = math.sqrt(3.0)


def test_equilateral_values():
    """F of the equilateral triangle is pi^2/15 and T P^2/A^3 is 3/5"""
    values = equilateral_exact()
    area = SQRT3 / 4.0
    assert values["lambda1"] * values["T"] / area == pytest.approx(math.pi ** 2 / 15.0)
    assert values["F"] == pytest.approx(math.pi ** 2 / 15.0)
    assert values["T"] * 9.0 / area ** 3 == pytest.approx(0.6)


def test_equilateral_fields_vanish_on_boundary():
    for x, y in ((0.3, 0.0), (0.25, SQRT3 / 4.0), (0.75, SQRT3 / 4.0)):
        fields = equilateral_fields(x, y)
        assert fields["u_E"] == pytest.approx(0.0, abs=1e-12)
        assert fields["phi_E"] == pytest.approx(0.0, abs=1e-12)
    center = equilateral_fields(0.5, SQRT3 / 6.0)
    # u = d1 d2 d3 / h, so u = h^2/27 at the incenter
    assert center["u_E"] == pytest.approx(1.0 / 36.0)
    assert center["phi_E"] != 0.0


def test_bessel_zeros():
    print("🔍 Locating Bessel zeros...")
    expected = {0.0: 2.404825557695773, 0.5: math.pi, 1.0: 3.831705970207512, 2.0: 5.135622301840683}
    for nu, zero in expected.items():
        found = bessel_first_zero(nu)
        print(f"   j_({nu},1) = {found:.12f}")
        assert found == pytest.approx(zero, abs=1e-9)
    assert bessel_first_zero(12.0) > 12.0
    with pytest.raises(DomainError):
        bessel_first_zero(-1.0)


def test_sector_values():
    quarter = Sector(math.pi / 2, 1.0)
    assert sector_lambda1(quarter) == pytest.approx(5.135622301840683 ** 2, rel=1e-9)

    narrow = Sector(math.pi / 6, 1.0)
    coarse = sector_torsion(narrow, 16)
    fine = sector_torsion(narrow, 256)
    assert fine.value > 0
    assert abs(coarse.value - fine.value) <= coarse.tail_bound + fine.tail_bound
    with pytest.raises(AngleOutOfRange):
        sector_torsion(Sector(2.0, 1.0))


def test_square_values():
    """Square (-1, 1)^2: T = 0.56231, F = 0.69372, u(0) = 0.29469"""
    square = Rectangle(1.0, 1.0)
    assert rect_lambda1(square) == pytest.approx(math.pi ** 2 / 2.0)
    torsion = rect_torsion(square, 128)
    F = rect_F(square, 128)
    center = rect_center_torsion(square)
    print(f"📦 Square: T={torsion.value:.6f}, F={F.value:.6f}, u(0)={center.value:.6f}")
    assert torsion.value == pytest.approx(0.56231, abs=5e-5)
    assert F.value == pytest.approx(0.69372, abs=5e-5)
    assert center.value == pytest.approx(0.294686, abs=1e-5)
    assert torsion.lower <= torsion.value <= torsion.upper


def test_rectangle_consistency():
    """F from its own series agrees with lambda1 T / area"""
    rect = Rectangle(2.5, 1.0)
    torsion = rect_torsion(rect)
    F = rect_F(rect)
    assert F.value == pytest.approx(rect_lambda1(rect) * torsion.value / rect.area, rel=1e-12)

    bounds = rect_torsion_bounds(rect)
    assert bounds["polya_szego_lower"] <= torsion.upper
    assert torsion.lower <= bounds["upper"]
    assert bounds["F_lower"] <= F.value <= bounds["F_upper"]


def test_rectangle_limit():
    """Long rectangles approach pi^2/12 from below"""
    assert rect_F_limit() == pytest.approx(math.pi ** 2 / 12.0)
    long_ = rect_F(Rectangle(100.0, 1.0), 256)
    assert long_.value < math.pi ** 2 / 12.0
    assert long_.value == pytest.approx(math.pi ** 2 / 12.0, rel=1e-2)
    longer = rect_F(Rectangle(200.0, 1.0), 256)
    assert long_.value < longer.value
    assert longer.value == pytest.approx(math.pi ** 2 / 12.0, rel=5e-3)


def test_series_value_guards():
    assert SeriesValue(1.0, 0.5, 3).lower == 0.5
    with pytest.raises(DomainError):
        SeriesValue(1.0, -0.1, 3)
    with pytest.raises(DomainError):
        rect_torsion(Rectangle(1.0, 1.0), 0)


def test_bessel_zero_lower_bound():
    """j_(nu,1) > nu + |a_1| (nu/2)^(1/3), and the zeros increase with the order"""
    for nu in range(1, 21):
        bound = nu + 2.338107 * 2.0 ** (-1.0 / 3.0) * nu ** (1.0 / 3.0)
        assert bessel_first_zero(nu) > bound, nu
    zeros = [bessel_first_zero(0.5 * k) for k in range(41)]
    assert all(lo < hi for lo, hi in zip(zeros, zeros[1:]))


RECTANGLE_GRID = [(1.0, 1.0), (2.0, 1.0), (1.0, 3.0), (0.5, 0.7), (5.0, 1.0),
                  (10.0, 0.5), (0.2, 4.0), (1.5, 1.25), (3.0, 2.0), (100.0, 1.0)]


def test_rectangle_tail_bounds():
    """Doubling the terms moves each value by at most the coarse tail bound"""
    for a, b in RECTANGLE_GRID:
        rect = Rectangle(a, b)
        for series in (rect_torsion, rect_F, rect_center_torsion):
            coarse, fine = series(rect, 16), series(rect, 32)
            assert abs(fine.value - coarse.value) <= coarse.tail_bound, (series.__name__, a, b)
            assert fine.tail_bound <= coarse.tail_bound


def test_rectangle_series_agree():
    """rect_F and lambda1 T / (4ab) differ by no more than their tails"""
    for a, b in RECTANGLE_GRID:
        rect = Rectangle(a, b)
        lam = rect_lambda1(rect)
        torsion = rect_torsion(rect)
        F = rect_F(rect)
        allowed = F.tail_bound + lam * torsion.tail_bound / (4.0 * a * b) + 1e-12 * F.value
        assert abs(F.value - lam * torsion.value / (4.0 * a * b)) <= allowed, (a, b)


def main():
    """Run all closed form tests"""
    print("🧪 CLOSED FORM TESTS")
    print("=" * 50)
    test_equilateral_values()
    test_equilateral_fields_vanish_on_boundary()
    test_bessel_zeros()
    test_bessel_zero_lower_bound()
    test_sector_values()
    test_square_values()
    test_rectangle_consistency()
    test_rectangle_tail_bounds()
    test_rectangle_series_agree()
    test_rectangle_limit()
    test_series_value_guards()
    print("\n✅ All closed form tests passed!")


if __name__ == "__main__":
    main()
