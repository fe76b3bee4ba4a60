#!/usr/bin/env python3
"""
Example usage of the verification toolkit as a library.
"""

import logging
import math
from fractions import Fraction

from closed_forms import equilateral_exact, rect_F
from constants import enclose
from geometry import Rectangle, Triangle
from harness import case_function, replay_case
from pde_oracle import spectral
from polycert import certify_lemma
from settings import VerifySettings

logging.basicConfig(level=logging.INFO)


def main():
    # Example 1: exact corner value of the acute case-1a function
    print("=== Example 1: g(1/2, 29/10) ===")
    g = case_function("acute-1a.g", (Fraction(1, 2), Fraction(29, 10)))
    print(f"g = {g} = {float(g):.6f}")

    print("\n" + "=" * 60 + "\n")

    # Example 2: a certified enclosure of zeta(5)
    print("=== Example 2: zeta(5) enclosure ===")
    zeta5 = enclose("zeta5")
    print(f"zeta(5) in {zeta5}, width {float(zeta5.width):.1e}")

    print("\n" + "=" * 60 + "\n")

    # Example 3: certify the small-angle polynomial
    print("=== Example 3: P2_acute <= 0 on (0, 285/1000] ===")
    certificate = certify_lemma("P2_acute", Fraction(285, 1000))
    print(f"{len(certificate.intervals)} pieces, depth {certificate.depth}, success {certificate.success}")

    print("\n" + "=" * 60 + "\n")

    # Example 4: oracle against the equilateral closed form
    print("=== Example 4: Equilateral triangle ===")
    result = spectral(Triangle(0.5, math.sqrt(3.0) / 2.0), max_level=6)
    exact = equilateral_exact()
    print(f"F oracle {result.F:.6f} vs exact {exact['F']:.6f}")

    print("\n" + "=" * 60 + "\n")

    # Example 5: rectangle series and one replay
    print("=== Example 5: Square and the obtuse-1 replay ===")
    print(f"F(R_1,1) = {rect_F(Rectangle(1.0, 1.0)).value:.6f}")
    report = replay_case("obtuse-1", VerifySettings(threads=1))
    print(f"obtuse-1: {report.verdict}")


if __name__ == "__main__":
    main()
