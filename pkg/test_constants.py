#!/usr/bin/env python3
"""
Tests for the constant enclosures and rational interval arithmetic.
"""

from fractions import Fraction

import mpmath
import pytest

from constants import (
    C1,
    CONSTANT_IDS,
    RationalInterval,
    enclose,
    interval_arith,
    interval_root,
    precision_bits,
)
from errors import DivisionByIntervalContainingZero, DomainError, UnknownConstant


def _mp_fraction(value) -> Fraction:
    man, exp = mpmath.mpf(value).man_exp
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def _reference(cid: str) -> Fraction:
    with mpmath.workdps(60):
        pi = mpmath.pi
        table = {
            "pi": pi,
            "pi_1_3": mpmath.cbrt(pi),
            "pi_2_3": pi ** (mpmath.mpf(2) / 3),
            "pi_4_3": pi ** (mpmath.mpf(4) / 3),
            "pi_2": pi ** 2,
            "pi_5": pi ** 5,
            "sqrt_pi": mpmath.sqrt(pi),
            "zeta5": mpmath.zeta(5),
            "cbrt2": mpmath.cbrt(2),
            "cbrt4": mpmath.cbrt(4),
            "sqrt2": mpmath.sqrt(2),
            "sqrt3": mpmath.sqrt(3),
            "sqrt5": mpmath.sqrt(5),
            "sqrt15": mpmath.sqrt(15),
            "airy_a1": -mpmath.airyaizero(1),
            "atan_1_8": mpmath.atan(mpmath.mpf(1) / 8),
            "atan_1_2": mpmath.atan(mpmath.mpf(1) / 2),
            "atan_1_3": mpmath.atan(mpmath.mpf(1) / 3),
            "atan_1_6": mpmath.atan(mpmath.mpf(1) / 6),
        }
        return _mp_fraction(table[cid])


def test_enclosures_contain_reference_values():
    """Every irrational constant lies inside its enclosure of width <= 1e-20"""
    print("🔒 Testing enclosures against 60-digit references...")
    for cid in CONSTANT_IDS:
        if cid in ("c1", "k"):
            continue
        interval = enclose(cid)
        reference = _reference(cid)
        print(f"   {cid}: width {float(interval.width):.1e}")
        assert interval.lo <= reference <= interval.hi, cid
        assert interval.width <= Fraction(1, 10 ** 20)


def test_rational_constants_are_points():
    assert enclose("c1") == RationalInterval.point(Fraction(2338107, 1000000))
    assert enclose("k").is_point()
    assert C1 <= enclose("airy_a1").lo


def test_airy_zero_is_bracketed_by_sign_change():
    """Ai is positive just right of a_1 and negative just left of it"""
    for eps in (Fraction(1, 10 ** 6), Fraction(1, 10 ** 20), Fraction(1, 10 ** 40)):
        enc = enclose("airy_a1", eps)
        assert enc.width <= eps
        with mpmath.workdps(100):
            assert mpmath.airyai(-mpmath.mpf(enc.lo.numerator) / enc.lo.denominator) > 0
            assert mpmath.airyai(-mpmath.mpf(enc.hi.numerator) / enc.hi.denominator) < 0


def test_finer_enclosures_are_nested():
    coarse = enclose("pi", Fraction(1, 10 ** 6))
    fine = enclose("pi", Fraction(1, 10 ** 30))
    assert fine.subset_of(coarse)
    assert fine.width <= Fraction(1, 10 ** 30)


def test_aliases_and_unknown_ids():
    assert enclose("π") == enclose("pi")
    assert enclose("ζ(5)") == enclose("zeta5")
    with pytest.raises(UnknownConstant):
        enclose("euler_gamma")


def test_precision_levels():
    assert precision_bits(Fraction(1, 2 ** 16)) == 16
    assert precision_bits(Fraction(1, 2 ** 17)) == 32
    with pytest.raises(DomainError):
        precision_bits(0)


def test_interval_arithmetic():
    """Interval operations enclose the exact image sets"""
    x = RationalInterval(Fraction(1), Fraction(2))
    y = RationalInterval(Fraction(-1), Fraction(3))
    assert interval_arith(x, y, "+") == RationalInterval(0, 5)
    assert interval_arith(x, y, "-") == RationalInterval(-2, 3)
    assert interval_arith(x, y, "*") == RationalInterval(-2, 6)
    assert y ** 2 == RationalInterval(0, 9)
    assert RationalInterval(-3, -2) ** 2 == RationalInterval(4, 9)
    assert interval_arith(x, 3, "**") == RationalInterval(1, 8)
    assert x / RationalInterval(2, 4) == RationalInterval(Fraction(1, 4), 1)
    with pytest.raises(DivisionByIntervalContainingZero):
        interval_arith(x, y, "/")
    with pytest.raises(DomainError):
        RationalInterval(2, 1)


def test_interval_roots():
    assert interval_root(RationalInterval.point(Fraction(1, 4)), 2) == RationalInterval.point(Fraction(1, 2))
    root = interval_root(RationalInterval.point(2), 2, bits=64)
    assert root.lo ** 2 <= 2 <= root.hi ** 2
    assert root.width <= Fraction(1, 2 ** 64)


def main():
    """Run all constants tests"""
    print("🧪 CONSTANTS TESTS")
    print("=" * 50)
    test_enclosures_contain_reference_values()
    test_rational_constants_are_points()
    test_airy_zero_is_bracketed_by_sign_change()
    test_finer_enclosures_are_nested()
    test_aliases_and_unknown_ids()
    test_precision_levels()
    test_interval_arithmetic()
    test_interval_roots()
    print("\n✅ All constants tests passed!")


if __name__ == "__main__":
    main()
