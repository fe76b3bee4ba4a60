#!/usr/bin/env python3
"""
Tests for exact polynomials, the Taylor shift and the negativity certifier.
"""

import json
import random
from fractions import Fraction

import numpy as np
import pytest

from errors import DepthExhausted, DomainError, UnknownName, ZeroWidthInterval
from polycert import (
    LEMMA_NAMES,
    RationalPoly,
    build_lemma_polynomial,
    certificate_to_json,
    certify_lemma,
    certify_nonpositive,
    eval_exact,
    failure_to_json,
    lemma_targets,
    parse_rational,
    poly_from_json,
    poly_to_json,
    reduced_constant,
    taylor_shift,
)


def test_taylor_shift():
    """Q(x) = P(x + c) exactly"""
    x = RationalPoly.x()
    shifted = taylor_shift(x ** 2, Fraction(1, 2))
    assert shifted.coeffs == (Fraction(1, 4), Fraction(1), Fraction(1))

    p = RationalPoly((3, -2, 0, Fraction(5, 7), -1))
    c = Fraction(3, 11)
    q = taylor_shift(p, c)
    for t in (Fraction(0), Fraction(1, 3), Fraction(-2), Fraction(9, 4)):
        assert q(t) == p(t + c)
    assert taylor_shift(q, -c) == p


def test_exact_evaluation():
    p = RationalPoly((Fraction(1, 3), -2, 0, 1))
    assert eval_exact(p, Fraction(1, 2)) == Fraction(1, 3) - 1 + Fraction(1, 8)
    assert eval_exact(p, 0) == Fraction(1, 3)
    assert p(Fraction(-3, 2)) == eval_exact(p, Fraction(-3, 2))


def test_reduced_constant_scan():
    # -1 + x on (0, 1/2]: c1 = 1, c0 = -1 + 1/2
    assert reduced_constant(RationalPoly((-1, 1)), Fraction(1, 2)) == Fraction(-1, 2)
    # negative leading coefficients never raise the constant
    assert reduced_constant(RationalPoly((-1, 0, -5)), Fraction(10)) == -1


def test_certify_simple_success():
    """x^2 - 1 <= 0 on (0, 1/2]"""
    print("📐 Certifying x^2 - 1 on (0, 1/2]...")
    poly = RationalPoly.from_terms({0: -1, 2: 1})
    certificate = certify_nonpositive(poly, Fraction(1, 2))
    print(f"   pieces: {len(certificate.intervals)}, depth: {certificate.depth}")
    assert certificate.success
    assert certificate.tiles_exactly()
    assert certificate.intervals[0].lo == 0
    assert certificate.intervals[-1].hi == Fraction(1, 2)


def test_certify_exhausts_depth_past_root():
    """x^2 - 1 on (0, 2] cannot be certified; the witness sits at the root"""
    poly = RationalPoly.from_terms({0: -1, 2: 1})
    with pytest.raises(DepthExhausted) as info:
        certify_nonpositive(poly, 2, max_depth=5)
    witness = info.value
    print(f"   witness: ({witness.lo}, {witness.hi}], c0 = {witness.reduced_constant}")
    assert witness.lo == 1
    assert witness.hi > 1
    assert witness.reduced_constant > 0
    assert witness.depth == 5

    payload = failure_to_json(2, witness)
    assert payload["success"] is False
    assert payload["failure_witness"]["lo"] == "1/1"
    # P(17/16) = 33/256 > 0 disproves the claim on the witness piece
    assert witness.point == Fraction(17, 16)
    assert payload["failure_witness"]["point"] == "17/16"

    # -(x - 1/2)^2 is nonpositive but its scan on (0, 1] is positive; no positive point exists
    with pytest.raises(DepthExhausted) as info:
        certify_nonpositive(RationalPoly((Fraction(-1, 4), 1, -1)), 1, max_depth=0)
    assert info.value.reduced_constant == Fraction(3, 4)
    assert info.value.point is None
    assert failure_to_json(1, info.value)["failure_witness"]["point"] is None


def test_certify_rejects_bad_intervals():
    poly = RationalPoly((-1,))
    with pytest.raises(ZeroWidthInterval):
        certify_nonpositive(poly, 0)
    with pytest.raises(DomainError):
        certify_nonpositive(poly, Fraction(-1, 2))


def test_certificate_soundness_on_random_polynomials():
    """Every certified polynomial is nonpositive on 10^4 sample points; every witness point is positive"""
    print("🎲 Checking certificates on random polynomials...")
    rng = random.Random(1729)
    certified = witnessed = 0
    for _ in range(1000):
        degree = rng.randint(0, 12)
        coeffs = [Fraction(-rng.randint(1, 40), 10)]
        coeffs += [Fraction(rng.randint(-30, 30), 10) for _ in range(degree)]
        poly = RationalPoly(tuple(coeffs))
        dx = Fraction(rng.randint(1, 200), 100)
        try:
            certificate = certify_nonpositive(poly, dx, max_depth=12)
        except DepthExhausted as e:
            if e.point is not None:
                witnessed += 1
                assert e.lo < e.point <= e.hi
                assert eval_exact(poly, e.point) > 0
            continue
        certified += 1
        assert certificate.tiles_exactly()
        xs = np.linspace(float(dx) / 10 ** 4, float(dx), 10 ** 4)
        values = np.polynomial.polynomial.polyval(xs, [float(c) for c in poly.coeffs])
        # floats near zero are settled exactly, clamped into (0, dx]
        for x in xs[values > -1e-9]:
            assert eval_exact(poly, min(Fraction(float(x)), dx)) <= 0
    print(f"   certified {certified} of 1000, {witnessed} failures with a positive point")
    assert certified > 0
    assert witnessed > 0


def test_lemma_polynomials_certify():
    """Every lemma target certifies within the default depth"""
    print("🧾 Certifying lemma polynomials...")
    for name, dx in lemma_targets():
        certificate = certify_lemma(name, dx, 40)
        print(f"   {name} on (0, {dx}]: {len(certificate.intervals)} pieces, depth {certificate.depth}")
        assert certificate.success
        assert certificate.depth <= 40


def test_upper_rounding_bounds_interval_coefficients():
    for name in ("P1_acute", "P1_mono", "negP1prime_mono", "Q_mgeq3"):
        interval = build_lemma_polynomial(name, rounding="interval")
        upper = build_lemma_polynomial(name)
        padded = upper.coeffs + (Fraction(0),) * (len(interval.coeffs) - len(upper.coeffs))
        for bound, coeff in zip(padded, interval.coeffs):
            assert bound >= coeff.hi


def test_acute_lemma_coefficient():
    # x^5 coefficient of P1 is -6K with K = 2.3 * 2^(1/3) / pi^(2/3)
    interval = build_lemma_polynomial("P1_acute", rounding="interval")
    assert float(interval.coeffs[5].mid) == pytest.approx(-8.1057, abs=1e-3)


def test_lemma_names():
    assert len(LEMMA_NAMES) == 6
    with pytest.raises(UnknownName):
        build_lemma_polynomial("P3_acute")
    with pytest.raises(DomainError):
        build_lemma_polynomial("P1_acute", rounding="lower")


def test_json_exchange():
    poly = RationalPoly((Fraction(-3, 4), 0, 2))
    text = json.dumps(poly_to_json(poly))
    assert poly_from_json(text) == poly
    assert poly_from_json({"coeffs": ["-3/4", "0", "2"]}) == poly
    assert parse_rational(" 285/1000 ") == Fraction(57, 200)
    with pytest.raises(DomainError):
        parse_rational("1/0")
    with pytest.raises(DomainError):
        parse_rational("abc")

    payload = certificate_to_json(certify_nonpositive(RationalPoly((-1, 1)), Fraction(1, 2)))
    assert payload["success"] is True
    assert payload["pieces"][0] == {"lo": "0/1", "hi": "1/2", "reduced_constant": "-1/2"}


def main():
    """Run all certifier tests"""
    print("🧪 CERTIFIER TESTS")
    print("=" * 50)
    test_taylor_shift()
    test_exact_evaluation()
    test_reduced_constant_scan()
    test_certify_simple_success()
    test_certify_exhausts_depth_past_root()
    test_certify_rejects_bad_intervals()
    test_certificate_soundness_on_random_polynomials()
    test_lemma_polynomials_certify()
    test_upper_rounding_bounds_interval_coefficients()
    test_acute_lemma_coefficient()
    test_lemma_names()
    test_json_exchange()
    print("\n✅ All certifier tests passed!")


if __name__ == "__main__":
    main()
