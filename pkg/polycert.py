#!/usr/bin/env python3
"""
Exact rational polynomials and the negativity certifier.

The certifier proves P(x) <= 0 on (0, dx] by the coefficient reduction scan
(c_n = a_n, c_i = a_i + dx * max(c_{i+1}, 0)); when the scan's constant c_0 is
positive the interval is halved, the right half is recentred by an exact Taylor
shift, and both halves are scanned again.
"""

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from constants import C1, K_AIRY, RationalInterval, enclose
from errors import DepthExhausted, DomainError, UnknownName, ZeroWidthInterval

logger = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 40
# Coefficients of the lemma polynomials are rounded up onto this dyadic grid.
COEFF_BITS = 96


def _trim(coeffs: Sequence) -> Tuple:
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class RationalPoly:
    """Dense univariate polynomial, coeffs[i] multiplies x**i."""

    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = _trim(Fraction(c) for c in (self.coeffs or (0,)))
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_terms(cls, terms: Dict[int, Union[int, Fraction]]) -> "RationalPoly":
        size = max(terms) + 1 if terms else 1
        coeffs = [Fraction(0)] * size
        for power, value in terms.items():
            coeffs[power] += Fraction(value)
        return cls(tuple(coeffs))

    @classmethod
    def x(cls) -> "RationalPoly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return -1 if self.is_zero() else len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def support(self) -> List[int]:
        return [i for i, c in enumerate(self.coeffs) if c != 0]

    def __call__(self, x) -> Fraction:
        return eval_exact(self, x)

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RationalPoly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        return self + (-other)

    def __mul__(self, other) -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            return RationalPoly(tuple(c * Fraction(other) for c in self.coeffs))
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RationalPoly":
        result = RationalPoly((1,))
        for _ in range(n):
            result = result * self
        return result

    def derivative(self) -> "RationalPoly":
        return RationalPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:] or (0,))

    def to_json(self) -> List[str]:
        return poly_to_json(self)


def eval_exact(poly: RationalPoly, x) -> Fraction:
    """Horner evaluation in exact arithmetic."""
    x = Fraction(x)
    total = Fraction(0)
    for c in reversed(poly.coeffs):
        total = total * x + c
    return total


def taylor_shift(poly: RationalPoly, c) -> RationalPoly:
    """
    Return Q with Q(x) = P(x + c), by repeated synthetic division.

    Args:
        poly: Polynomial to recentre
        c: Exact shift

    Returns:
        The shifted polynomial, exact
    """
    c = Fraction(c)
    b = list(poly.coeffs)
    n = len(b) - 1
    if c == 0 or n < 1:
        return RationalPoly(tuple(b))
    for i in range(n):
        for j in range(n - 1, i - 1, -1):
            b[j] += c * b[j + 1]
    return RationalPoly(tuple(b))


# --- interval-coefficient polynomials ---------------------------------------

@dataclass(frozen=True)
class IntervalPoly:
    """Polynomial whose coefficients are rational intervals."""

    coeffs: Tuple[RationalInterval, ...]

    @classmethod
    def from_terms(cls, terms: Dict[int, object]) -> "IntervalPoly":
        size = max(terms) + 1
        coeffs = [RationalInterval.point(0)] * size
        for power, value in terms.items():
            coeffs[power] = coeffs[power] + RationalInterval.coerce(value)
        return cls(tuple(coeffs))

    def __add__(self, other: "IntervalPoly") -> "IntervalPoly":
        zero = RationalInterval.point(0)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (zero,) * (n - len(self.coeffs))
        b = other.coeffs + (zero,) * (n - len(other.coeffs))
        return IntervalPoly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "IntervalPoly":
        return IntervalPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntervalPoly") -> "IntervalPoly":
        return self + (-other)

    def __mul__(self, other: "IntervalPoly") -> "IntervalPoly":
        out = [RationalInterval.point(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_point() and a.lo == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return IntervalPoly(tuple(out))

    def __pow__(self, n: int) -> "IntervalPoly":
        result = IntervalPoly((RationalInterval.point(1),))
        for _ in range(n):
            result = result * self
        return result

    def derivative(self) -> "IntervalPoly":
        return IntervalPoly(tuple(c * i for i, c in enumerate(self.coeffs))[1:])

    def taylor_shift(self, c) -> "IntervalPoly":
        b = list(self.coeffs)
        for i in range(len(b) - 1):
            for j in range(len(b) - 2, i - 1, -1):
                b[j] = b[j] + b[j + 1] * Fraction(c)
        return IntervalPoly(tuple(b))

    def upper(self, bits: int = COEFF_BITS) -> RationalPoly:
        """Rational polynomial whose coefficients bound these from above."""
        return RationalPoly(tuple(c.rounded(bits).hi for c in self.coeffs))

    def lower(self, bits: int = COEFF_BITS) -> RationalPoly:
        return RationalPoly(tuple(c.rounded(bits).lo for c in self.coeffs))

    def midpoint(self) -> RationalPoly:
        return RationalPoly(tuple(c.mid for c in self.coeffs))


# --- certifier ---------------------------------------------------------------

@dataclass(frozen=True)
class CertifiedPiece:
    lo: Fraction
    hi: Fraction
    reduced_constant: Fraction


@dataclass(frozen=True)
class Certificate:
    """Proof that P <= 0 on (0, dx]: a tiling by scanned subintervals."""

    dx: Fraction
    intervals: Tuple[CertifiedPiece, ...]
    depth: int
    failure_witness: Optional[Fraction] = None

    @property
    def success(self) -> bool:
        return self.failure_witness is None and self.tiles_exactly()

    def tiles_exactly(self) -> bool:
        if not self.intervals:
            return False
        edge = Fraction(0)
        for piece in self.intervals:
            if piece.lo != edge or piece.hi <= piece.lo or piece.reduced_constant > 0:
                return False
            edge = piece.hi
        return edge == self.dx


def reduced_constant(poly: RationalPoly, dx: Fraction) -> Fraction:
    """
    Single descending scan bounding P from above on (0, dx].

    Every tail sum_{j >= i} a_j x^(j-i) is at most c_i on (0, dx].
    """
    c = Fraction(0)
    for i, a in enumerate(reversed(poly.coeffs)):
        c = a if i == 0 else a + dx * max(c, Fraction(0))
    return c


def _positive_point(poly: RationalPoly, lo: Fraction, hi: Fraction, samples: int = 16) -> Optional[Fraction]:
    """First of hi, lo + k(hi - lo)/samples where P is positive, scanning right to left."""
    step = (hi - lo) / samples
    for k in range(samples, 0, -1):
        x = lo + k * step
        if eval_exact(poly, x) > 0:
            return x
    return None


def certify_nonpositive(poly: RationalPoly, dx, max_depth: int = DEFAULT_MAX_DEPTH) -> Certificate:
    """
    Certify P(x) <= 0 for every x in (0, dx].

    Args:
        poly: Polynomial with exact rational coefficients
        dx: Right end of the interval
        max_depth: Maximum number of halvings

    Returns:
        Certificate whose pieces tile (0, dx] exactly

    Raises:
        DepthExhausted: with the failing subinterval as witness
    """
    dx = Fraction(dx)
    if dx == 0:
        raise ZeroWidthInterval("certification interval (0, 0] is empty")
    if dx < 0:
        raise DomainError(f"dx must be positive, got {dx}")
    if max_depth < 0:
        raise DomainError("max_depth must be nonnegative")

    pieces: List[CertifiedPiece] = []
    deepest = 0
    # explicit stack keeps pieces in left-to-right order
    stack = [(poly, Fraction(0), dx, 0)]
    while stack:
        current, offset, width, depth = stack.pop()
        c0 = reduced_constant(current, width)
        if c0 <= 0:
            pieces.append(CertifiedPiece(offset, offset + width, c0))
            deepest = max(deepest, depth)
            continue
        if depth >= max_depth:
            lo, hi = offset, offset + width
            raise DepthExhausted(lo, hi, c0, depth, _positive_point(poly, lo, hi))
        half = width / 2
        stack.append((taylor_shift(current, half), offset + half, half, depth + 1))
        stack.append((current, offset, half, depth + 1))

    certificate = Certificate(dx=dx, intervals=tuple(pieces), depth=deepest)
    logger.debug(f"Certified degree-{poly.degree} polynomial on (0, {dx}] "
                 f"with {len(pieces)} pieces, depth {deepest}")
    return certificate


# --- lemma polynomials -------------------------------------------------------

LEMMA_NAMES = (
    "P1_acute", "P2_acute", "P1_mono", "negP1prime_mono",
    "negP1prime_mono_shifted", "Q_mgeq3",
)

ACUTE_SHIFT = Fraction(49, 100)
MONO_HALF = Fraction(444, 1000)


def _ipoly(terms: Dict[int, object]) -> IntervalPoly:
    return IntervalPoly.from_terms(terms)


def _interval_lemma(name: str) -> IntervalPoly:
    pi = enclose("pi")
    pi_1_3 = enclose("pi_1_3")
    pi_2_3 = enclose("pi_2_3")
    cbrt2 = enclose("cbrt2")
    zeta5 = enclose("zeta5")
    pi_5 = enclose("pi_5")

    if name in ("P1_acute", "P2_acute"):
        k_const = K_AIRY * cbrt2 / pi_2_3
        tan_upper = _ipoly({3: 1, 9: Fraction(1, 3), 15: Fraction(2, 5)})
        tan_lower = _ipoly({3: 1, 9: Fraction(1, 3), 15: Fraction(2, 15)})
        one = _ipoly({0: 1})
        bracket = _ipoly({0: 1, 2: k_const}) ** 2
        p1 = _ipoly({3: 5}) * (one + _ipoly({0: 4}) * tan_upper ** 2) - _ipoly({0: 3}) * tan_lower * bracket
        return p1 if name == "P1_acute" else p1.taylor_shift(ACUTE_SHIFT)

    if name in ("P1_mono", "negP1prime_mono", "negP1prime_mono_shifted"):
        c2 = -124 * zeta5 / pi_5
        tan_part = _ipoly({6: Fraction(1, 3), 9: c2, 12: Fraction(2, 15), 18: Fraction(17, 315)})
        bracket = _ipoly({0: pi, 2: C1 * pi_1_3 / cbrt2}) ** 2
        p1 = tan_part * bracket
        if name == "P1_mono":
            return p1
        neg_prime = -p1.derivative()
        if name == "negP1prime_mono":
            return neg_prime
        return neg_prime.taylor_shift(MONO_HALF)

    if name == "Q_mgeq3":
        c_const = C1 / (cbrt2 * pi_2_3)
        d_const = 372 * zeta5 / pi_5
        left = _ipoly({0: 1, 6: Fraction(1, 3), 12: Fraction(2, 5)}) ** 2
        right = (_ipoly({0: 1, 6: Fraction(-1, 8)}) ** 4
                 * _ipoly({0: 1, 2: c_const}) ** 2
                 * _ipoly({0: 1, 3: -d_const}))
        return left - right

    raise UnknownName(f"unknown lemma polynomial {name!r}")


def build_lemma_polynomial(name: str, rounding: str = "upper"):
    """
    Build one of the lemma polynomials.

    Args:
        name: One of LEMMA_NAMES
        rounding: 'upper' for a rational polynomial with every coefficient rounded
            up, or 'interval' for the interval-coefficient polynomial

    Returns:
        RationalPoly (upper) or IntervalPoly (interval)
    """
    if name not in LEMMA_NAMES:
        raise UnknownName(f"unknown lemma polynomial {name!r}")
    if rounding == "interval":
        return _interval_lemma(name)
    if rounding != "upper":
        raise DomainError(f"unknown rounding {rounding!r}")
    # shifted polynomials are shifts of the already rounded parent, which keeps
    # the upper bound valid for every positive argument
    if name == "P2_acute":
        return taylor_shift(_interval_lemma("P1_acute").upper(), ACUTE_SHIFT)
    if name == "negP1prime_mono_shifted":
        return taylor_shift(_interval_lemma("negP1prime_mono").upper(), MONO_HALF)
    return _interval_lemma(name).upper()


def lemma_targets() -> List[Tuple[str, Fraction]]:
    """Every (polynomial, dx) pair the replays certify."""
    return [
        ("P2_acute", Fraction(285, 1000)),
        ("negP1prime_mono", MONO_HALF),
        ("negP1prime_mono_shifted", MONO_HALF),
        ("Q_mgeq3", Fraction(686, 1000)),
    ]


@lru_cache(maxsize=None)
def certify_lemma(name: str, dx: Fraction, max_depth: int = DEFAULT_MAX_DEPTH) -> Certificate:
    certificate = certify_nonpositive(build_lemma_polynomial(name), dx, max_depth)
    logger.info(f"Certified {name} <= 0 on (0, {dx}]: "
                f"{len(certificate.intervals)} pieces, depth {certificate.depth}")
    return certificate


# --- exchange format ---------------------------------------------------------

def _fraction_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"not a rational number: {text!r}") from e


def poly_to_json(poly: RationalPoly) -> List[str]:
    return [_fraction_str(c) for c in poly.coeffs]


def poly_from_json(data: Union[str, Iterable]) -> RationalPoly:
    if isinstance(data, str):
        data = json.loads(data)
    if isinstance(data, dict):
        data = data.get("coeffs", [])
    return RationalPoly(tuple(parse_rational(c) for c in data))


def certificate_to_json(certificate: Certificate) -> Dict:
    return {
        "success": certificate.success,
        "dx": _fraction_str(certificate.dx),
        "depth": certificate.depth,
        "pieces": [
            {
                "lo": _fraction_str(p.lo),
                "hi": _fraction_str(p.hi),
                "reduced_constant": _fraction_str(p.reduced_constant),
            }
            for p in certificate.intervals
        ],
        "failure_witness": None,
    }


def failure_to_json(dx, error: DepthExhausted) -> Dict:
    return {
        "success": False,
        "dx": _fraction_str(Fraction(dx)),
        "depth": error.depth,
        "pieces": [],
        "failure_witness": {
            "lo": _fraction_str(error.lo),
            "hi": _fraction_str(error.hi),
            "reduced_constant": _fraction_str(error.reduced_constant),
            "point": None if error.point is None else _fraction_str(error.point),
        },
    }
