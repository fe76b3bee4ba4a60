#!/usr/bin/env python3
"""
Triangles in both normalizations, rectangles, sectors and kites.

Chart 𝒯 puts the longest side on [0, 1] (M <= N <= 1); chart 𝒯′ puts the
shortest side there (1 <= M <= N). In both the apex is (a, b) with 0 <= a <= 1/2.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Tuple, Union

from errors import AngleOutOfRange, DegenerateTriangle, DomainError, OutOfRegion, UnknownRegion

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]

ANGLE_TOL = 1e-10
DEGENERATE_B = 1e-6
# slack for float inputs in region tests; exact inputs are tested exactly
FLOAT_REGION_TOL = Fraction(1, 10 ** 12)


@dataclass(frozen=True)
class Triangle:
    """Triangle with vertices (0, 0), (1, 0) and apex (a, b)."""

    a: Number
    b: Number

    def __post_init__(self):
        if not self.b > 0:
            raise DegenerateTriangle(f"apex ordinate must be positive, got b={self.b}")

    @classmethod
    def from_side_lengths(cls, x: float, y: float, z: float, chart: str = "T") -> "Triangle":
        """
        Place a triangle with the given sides in a chart.

        Args:
            x, y, z: Side lengths in any order
            chart: 'T' scales the longest side to 1, 'T_prime' the shortest

        Returns:
            The apex-parametrized triangle
        """
        short, middle, long_ = sorted(float(s) for s in (x, y, z))
        if short <= 0 or short + middle <= long_:
            raise DegenerateTriangle(f"sides {x}, {y}, {z} do not form a triangle")
        if chart in ("T", "𝒯"):
            base, m, n = long_, short, middle
        elif chart in ("T_prime", "𝒯′", "T_prime_acute", "𝒯′_acute"):
            base, m, n = short, middle, long_
        else:
            raise UnknownRegion(f"unknown chart {chart!r}")
        m, n = m / base, n / base
        a = (1.0 + m * m - n * n) / 2.0
        b = math.sqrt(max(m * m - a * a, 0.0))
        return cls(a, b)

    def vertices(self) -> Tuple[Tuple[float, float], ...]:
        return (0.0, 0.0), (1.0, 0.0), (float(self.a), float(self.b))

    def side_lengths(self) -> Tuple[float, float, float]:
        a, b = float(self.a), float(self.b)
        return 1.0, math.hypot(a, b), math.hypot(a - 1.0, b)


@dataclass(frozen=True)
class TriangleData:
    M: float
    N: float
    alpha: float
    beta: float
    gamma: float
    area: float
    perimeter: float
    diameter: float
    h_base: float
    inradius: float

    @property
    def angles(self) -> Tuple[float, float, float]:
        return self.alpha, self.beta, self.gamma


@dataclass(frozen=True)
class Rectangle:
    """The rectangle (-a, a) x (-b, b)."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError(f"half-widths must be positive, got a={self.a}, b={self.b}")

    @property
    def area(self) -> float:
        return 4.0 * self.a * self.b

    @property
    def perimeter(self) -> float:
        return 4.0 * (self.a + self.b)


@dataclass(frozen=True)
class Sector:
    """Circular sector with vertex at the origin, symmetric about the positive x-axis."""

    angle: float
    radius: float

    def __post_init__(self):
        if not 0 < self.angle < math.pi:
            raise AngleOutOfRange(f"sector angle must lie in (0, pi), got {self.angle}")
        if not self.radius > 0:
            raise DomainError(f"sector radius must be positive, got {self.radius}")

    @property
    def area(self) -> float:
        return self.radius ** 2 * self.angle / 2.0


@dataclass(frozen=True)
class Kite:
    """Kite with vertices (-p, 0), (0, s), (q, 0), (0, -s); always tangential."""

    p: float
    q: float
    s: float

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0 and self.s > 0):
            raise DomainError(f"kite parameters must be positive, got {self.p}, {self.q}, {self.s}")

    @property
    def area(self) -> float:
        return self.s * (self.p + self.q)

    @property
    def perimeter(self) -> float:
        return 2.0 * (math.hypot(self.p, self.s) + math.hypot(self.q, self.s))

    @property
    def inradius(self) -> float:
        return 2.0 * self.area / self.perimeter


class TriangleClass(str, Enum):
    EQUILATERAL = "Equilateral"
    ACUTE = "Acute"
    RIGHT = "Right"
    OBTUSE = "Obtuse"
    ISOSCELES_ACUTE = "IsoscelesAcute"
    ISOSCELES_OBTUSE = "IsoscelesObtuse"
    DEGENERATE = "Degenerate"


def derive(tri: Triangle) -> TriangleData:
    """
    Compute every metric quantity of a triangle.

    Angles come from atan2 of cross and dot products: alpha at (0, 0),
    beta at (1, 0) and gamma at the apex, between sides M and N.
    """
    a, b = float(tri.a), float(tri.b)
    if b <= 0:
        raise DegenerateTriangle(f"apex ordinate must be positive, got b={b}")
    M = math.hypot(a, b)
    N = math.hypot(a - 1.0, b)
    alpha = math.atan2(b, a)
    beta = math.atan2(b, 1.0 - a)
    gamma = math.atan2(b, b * b - a * (1.0 - a))
    area = b / 2.0
    perimeter = 1.0 + M + N
    diameter = max(1.0, M, N)
    return TriangleData(
        M=M, N=N, alpha=alpha, beta=beta, gamma=gamma,
        area=area, perimeter=perimeter, diameter=diameter,
        h_base=2.0 * area / diameter, inradius=2.0 * area / perimeter,
    )


def classify(tri: Triangle) -> TriangleClass:
    """Classify by the largest angle, with equality tests at ANGLE_TOL."""
    data = derive(tri)
    if float(tri.b) < DEGENERATE_B:
        return TriangleClass.DEGENERATE
    angles = sorted(data.angles)
    if abs(angles[0] - angles[2]) <= ANGLE_TOL:
        return TriangleClass.EQUILATERAL
    largest = angles[2]
    if abs(largest - math.pi / 2) <= ANGLE_TOL:
        return TriangleClass.RIGHT
    isosceles = abs(angles[0] - angles[1]) <= ANGLE_TOL or abs(angles[1] - angles[2]) <= ANGLE_TOL
    if largest > math.pi / 2:
        return TriangleClass.ISOSCELES_OBTUSE if isosceles else TriangleClass.OBTUSE
    return TriangleClass.ISOSCELES_ACUTE if isosceles else TriangleClass.ACUTE


def rechart(tri: Triangle, chart: str) -> Triangle:
    """Same shape, normalized in the other chart."""
    return Triangle.from_side_lengths(*tri.side_lengths(), chart=chart)


# --- regions -----------------------------------------------------------------

def _in_T(a, b, tol):
    return -tol <= a <= Fraction(1, 2) + tol and b >= -tol and (a - 1) ** 2 + b ** 2 <= 1 + tol


def _in_T_prime(a, b, tol):
    return -tol <= a <= Fraction(1, 2) + tol and b >= -tol and a ** 2 + b ** 2 >= 1 - tol


def _in_T_obtuse(a, b, tol):
    return (-tol <= a <= Fraction(1, 2) + tol and -tol <= b <= Fraction(1, 2) + tol
            and b ** 2 <= a - a ** 2 + tol)


def _sqrt3_half_below(b, tol):
    # b >= sqrt(3)/2
    return b >= 0 and 4 * b ** 2 >= 3 - tol


def _acute_case_1(a, b, tol):
    return _in_T_prime(a, b, tol) and b <= 4 + tol


def _acute_case_1a(a, b, tol):
    return _in_T_prime(a, b, tol) and _sqrt3_half_below(b, tol) and b <= Fraction(29, 10) + tol


def _acute_case_1b(a, b, tol):
    return _in_T_prime(a, b, tol) and 1 - tol <= b <= 4 + tol


def _acute_case_2(a, b, tol):
    return _in_T_prime(a, b, tol) and b >= 3 - tol


def _obtuse_case_1(a, b, tol):
    return _in_T_obtuse(a, b, tol) and b ** 2 - 3 * b + 1 - Fraction(5, 2) * (a - a ** 2) <= tol


def _obtuse_case_2(a, b, tol):
    return _in_T_obtuse(a, b, tol) and b * (1 - a + a ** 2) <= 2 * a * (1 - a) + tol


def _obtuse_case_3(a, b, tol):
    return (_in_T_obtuse(a, b, tol) and b * (1 - a + a ** 2) >= 2 * a * (1 - a) - tol
            and b <= Fraction(3, 10) + tol)


_REGIONS: Dict[str, Callable] = {
    "T": _in_T,
    "T_prime_acute": _in_T_prime,
    "T_obtuse": _in_T_obtuse,
    "acute-case-1": _acute_case_1,
    "acute-case-1a": _acute_case_1a,
    "acute-case-1b": _acute_case_1b,
    "acute-case-2": _acute_case_2,
    "obtuse-case-1": _obtuse_case_1,
    "obtuse-case-2": _obtuse_case_2,
    "obtuse-case-3": _obtuse_case_3,
}

_REGION_ALIASES = {
    "𝒯": "T",
    "𝒯′_acute": "T_prime_acute",
    "𝒯'_acute": "T_prime_acute",
    "𝒯_obtuse": "T_obtuse",
}

REGION_IDS = tuple(_REGIONS)


def canonical_region(region_id: str) -> str:
    region = _REGION_ALIASES.get(region_id, region_id)
    if region not in _REGIONS:
        raise UnknownRegion(f"unknown region {region_id!r}")
    return region


def in_region(point: Tuple[Number, Number], region_id: str) -> bool:
    """
    Closed-region membership.

    Args:
        point: (a, b); ints and Fractions are tested exactly, floats with a
            1e-12 slack on each defining inequality
        region_id: One of REGION_IDS or its symbolic alias

    Returns:
        True when every defining inequality holds
    """
    check = _REGIONS[canonical_region(region_id)]
    a, b = point
    exact = all(isinstance(v, (int, Fraction)) for v in point)
    tol = Fraction(0) if exact else FLOAT_REGION_TOL
    return bool(check(Fraction(a), Fraction(b), tol))


def require_region(point: Tuple[Number, Number], region_id: str) -> None:
    if not in_region(point, region_id):
        raise OutOfRegion(f"{point} is not in region {region_id}")
