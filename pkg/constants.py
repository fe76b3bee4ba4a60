#!/usr/bin/env python3
"""
Directed-rounded rational enclosures for the irrational constants used by the
Pólya functional bounds, plus the rational interval arithmetic built on them.

Every enclosure is computed from a series or a root with an explicit remainder
bound, or for the first Airy zero from a sign change of Ai, and then rounded outward
onto a dyadic grid, so the true constant always lies inside [lo, hi].
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Union

import mpmath
from sympy import integer_nthroot

from errors import (
    ConvergenceFailure,
    DivisionByIntervalContainingZero,
    DomainError,
    UnknownConstant,
)

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]

# Precision levels are multiples of this many bits; each level is nested in the last.
LEVEL_BITS = 16
DEFAULT_EPS = Fraction(1, 10 ** 20)

C1 = Fraction(2338107, 1000000)   # rational lower bound for -a_1, below the airy_a1 enclosure
K_AIRY = Fraction(23, 10)         # the weaker constant used for the small-angle lemma


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float) and not math.isfinite(x):
        raise DomainError(f"cannot enclose non-finite value {x}")
    return Fraction(x)


def _floor_to(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction((x.numerator * scale) // x.denominator, scale)


def _ceil_to(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(-((-x.numerator * scale) // x.denominator), scale)


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval [lo, hi] with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = _frac(self.lo), _frac(self.hi)
        if lo > hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: Number) -> "RationalInterval":
        x = _frac(x)
        return cls(x, x)

    @classmethod
    def coerce(cls, x) -> "RationalInterval":
        return x if isinstance(x, RationalInterval) else cls.point(x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def __contains__(self, x) -> bool:
        return self.lo <= _frac(x) <= self.hi

    def subset_of(self, other: "RationalInterval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: "RationalInterval") -> "RationalInterval":
        return RationalInterval(max(self.lo, other.lo), min(self.hi, other.hi))

    def rounded(self, bits: int) -> "RationalInterval":
        """Round outward onto the grid 2^-bits."""
        return RationalInterval(_floor_to(self.lo, bits), _ceil_to(self.hi, bits))

    def __neg__(self) -> "RationalInterval":
        return RationalInterval(-self.hi, -self.lo)

    def __add__(self, other) -> "RationalInterval":
        other = RationalInterval.coerce(other)
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalInterval":
        other = RationalInterval.coerce(other)
        return RationalInterval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other) -> "RationalInterval":
        return RationalInterval.coerce(other) - self

    def __mul__(self, other) -> "RationalInterval":
        other = RationalInterval.coerce(other)
        products = (self.lo * other.lo, self.lo * other.hi,
                    self.hi * other.lo, self.hi * other.hi)
        return RationalInterval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalInterval":
        other = RationalInterval.coerce(other)
        if other.contains_zero():
            raise DivisionByIntervalContainingZero(f"{self} / {other}")
        return self * RationalInterval(1 / other.hi, 1 / other.lo)

    def __rtruediv__(self, other) -> "RationalInterval":
        return RationalInterval.coerce(other) / self

    def __pow__(self, n: int) -> "RationalInterval":
        if not isinstance(n, int):
            raise DomainError("only integer powers are supported")
        if n < 0:
            return RationalInterval.point(1) / (self ** -n)
        if n == 0:
            return RationalInterval.point(1)
        lo_n, hi_n = self.lo ** n, self.hi ** n
        if n % 2 == 1 or self.lo >= 0:
            return RationalInterval(lo_n, hi_n)
        if self.hi <= 0:
            return RationalInterval(hi_n, lo_n)
        return RationalInterval(Fraction(0), max(lo_n, hi_n))

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"


def interval_arith(x: RationalInterval, y, op: str) -> RationalInterval:
    """
    Apply one interval operation.

    Args:
        x: Left operand
        y: Right operand (an interval, or an integer exponent for '**')
        op: One of '+', '-', '*', '/', '**'

    Returns:
        An interval enclosing the exact image set
    """
    x = RationalInterval.coerce(x)
    if op == "**":
        return x ** int(y)
    y = RationalInterval.coerce(y)
    if op == "+":
        return x + y
    if op == "-":
        return x - y
    if op in ("*", "×"):
        return x * y
    if op in ("/", "÷"):
        return x / y
    raise DomainError(f"unknown interval operation {op!r}")


# --- roots ------------------------------------------------------------------

def _root_floor(q: Fraction, n: int, bits: int) -> Fraction:
    scale = 1 << bits
    r, _ = integer_nthroot((q.numerator * scale ** n) // q.denominator, n)
    return Fraction(int(r), scale)


def _root_ceil(q: Fraction, n: int, bits: int) -> Fraction:
    scale = 1 << bits
    num, rem = divmod(q.numerator * scale ** n, q.denominator)
    r, exact = integer_nthroot(num, n)
    if exact and rem == 0:
        return Fraction(int(r), scale)
    return Fraction(int(r) + 1, scale)


def interval_root(x, n: int, bits: int = 80) -> RationalInterval:
    """
    Enclose the n-th root of a nonnegative interval, endpoints on the grid 2^-bits.

    Perfect powers on the grid come back exact (root of [1/4, 1/4] is [1/2, 1/2]).
    """
    x = RationalInterval.coerce(x)
    if x.hi < 0:
        raise DomainError(f"root of negative interval {x}")
    lo = _root_floor(max(x.lo, Fraction(0)), n, bits)
    hi = _root_ceil(x.hi, n, bits)
    return RationalInterval(lo, hi)


# --- series -----------------------------------------------------------------

def arctan_enclosure(q: Number, tol: Fraction) -> RationalInterval:
    """Enclose arctan(q) for 0 <= q <= 1 by the alternating Gregory series."""
    q = _frac(q)
    if not 0 <= q <= 1:
        raise DomainError(f"arctan series needs 0 <= q <= 1, got {q}")
    if q == 0:
        return RationalInterval.point(0)
    q2 = q * q
    power = q
    total = Fraction(0)
    k = 0
    while True:
        term = power / (2 * k + 1)
        total = total + term if k % 2 == 0 else total - term
        k += 1
        power *= q2
        following = power / (2 * k + 1)
        if following <= tol:
            other = total + following if k % 2 == 0 else total - following
            return RationalInterval(min(total, other), max(total, other))


def _pi_raw(bits: int) -> RationalInterval:
    tol = Fraction(1, 1 << (bits + 8))
    a = arctan_enclosure(Fraction(1, 5), tol)
    b = arctan_enclosure(Fraction(1, 239), tol)
    return (16 * a - 4 * b).rounded(bits + 4)


def _zeta5_raw(bits: int) -> RationalInterval:
    tol = Fraction(1, 1 << bits)
    n_terms = int(math.exp((math.log(1.25) + bits * math.log(2)) / 6.0)) + 2
    while True:
        grid = bits + 4 + n_terms.bit_length()
        lo_sum = hi_sum = Fraction(0)
        for n in range(1, n_terms + 1):
            term = Fraction(1, n ** 5)
            lo_sum = _floor_to(lo_sum + term, grid)
            hi_sum = _ceil_to(hi_sum + term, grid)
        # convexity of x^-5: trapezoid from below, midpoint from above
        tail_lo = Fraction(1, 4 * (n_terms + 1) ** 4) + Fraction(1, 2 * (n_terms + 1) ** 5)
        tail_hi = Fraction(4, (2 * n_terms + 1) ** 4)
        result = RationalInterval(lo_sum + tail_lo, hi_sum + tail_hi)
        if result.width <= tol:
            return result.rounded(bits + 4)
        n_terms *= 2


def _airy_raw(bits: int) -> RationalInterval:
    # -a_1 is bracketed by a sign change of Ai; |Ai'(a_1)| ≈ 0.70, so |Ai| at both ends is
    # about 0.7 * pad, far above the evaluation error at twice the working precision
    dps = int(bits * 0.30103) + 15
    with mpmath.workdps(dps):
        value = -mpmath.airyaizero(1)
        center = Fraction(mpmath.nstr(value, dps))
    pad = Fraction(1, 10 ** (dps - 8))
    lo, hi = center - pad, center + pad
    with mpmath.workdps(2 * dps):
        right_of_zero = mpmath.airyai(-mpmath.mpf(lo.numerator) / lo.denominator)
        left_of_zero = mpmath.airyai(-mpmath.mpf(hi.numerator) / hi.denominator)
    if not (right_of_zero > 0 > left_of_zero):
        raise ConvergenceFailure(f"Ai does not change sign across [{float(lo)}, {float(hi)}]")
    return RationalInterval(lo, hi).rounded(bits + 4)


def _root_const(value: int, n: int) -> Callable[[int], RationalInterval]:
    def build(bits: int) -> RationalInterval:
        return interval_root(RationalInterval.point(value), n, bits + 4)
    return build


def _pi_power(num: int, den: int) -> Callable[[int], RationalInterval]:
    def build(bits: int) -> RationalInterval:
        pi = _pi_raw(bits + 16)
        base = pi if den == 1 else interval_root(pi, den, bits + 16)
        return (base ** num).rounded(bits + 4)
    return build


def _atan_const(q: Fraction) -> Callable[[int], RationalInterval]:
    def build(bits: int) -> RationalInterval:
        return arctan_enclosure(q, Fraction(1, 1 << (bits + 4))).rounded(bits + 4)
    return build


def _exact(value: Fraction) -> Callable[[int], RationalInterval]:
    return lambda bits: RationalInterval.point(value)


_RAW_BUILDERS: Dict[str, Callable[[int], RationalInterval]] = {
    "pi": _pi_raw,
    "pi_1_3": _pi_power(1, 3),
    "pi_2_3": _pi_power(2, 3),
    "pi_4_3": _pi_power(4, 3),
    "pi_2": _pi_power(2, 1),
    "pi_5": _pi_power(5, 1),
    "sqrt_pi": _pi_power(1, 2),
    "zeta5": _zeta5_raw,
    "cbrt2": _root_const(2, 3),
    "cbrt4": _root_const(4, 3),
    "sqrt2": _root_const(2, 2),
    "sqrt3": _root_const(3, 2),
    "sqrt5": _root_const(5, 2),
    "sqrt15": _root_const(15, 2),
    "airy_a1": _airy_raw,
    "c1": _exact(C1),
    "k": _exact(K_AIRY),
    "atan_1_8": _atan_const(Fraction(1, 8)),
    "atan_1_2": _atan_const(Fraction(1, 2)),
    "atan_1_3": _atan_const(Fraction(1, 3)),
    "atan_1_6": _atan_const(Fraction(1, 6)),
}

_ALIASES = {
    "π": "pi", "π^(1/3)": "pi_1_3", "π^(2/3)": "pi_2_3", "π^(4/3)": "pi_4_3",
    "π²": "pi_2", "π^2": "pi_2", "π⁵": "pi_5", "π^5": "pi_5", "√π": "sqrt_pi",
    "ζ(5)": "zeta5", "zeta(5)": "zeta5", "2^(1/3)": "cbrt2", "2^(2/3)": "cbrt4",
    "√2": "sqrt2", "√3": "sqrt3", "√5": "sqrt5", "-a1": "airy_a1", "−a₁": "airy_a1",
    "c₁": "c1",
}

CONSTANT_IDS = tuple(sorted(_RAW_BUILDERS))


def canonical_id(constant_id: str) -> str:
    cid = _ALIASES.get(constant_id, constant_id)
    if cid not in _RAW_BUILDERS:
        raise UnknownConstant(f"unknown constant {constant_id!r}")
    return cid


def precision_bits(eps) -> int:
    """Smallest multiple of LEVEL_BITS whose grid 2^-bits is no wider than eps."""
    eps = _frac(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    bits = LEVEL_BITS
    while Fraction(1, 1 << bits) > eps:
        bits += LEVEL_BITS
    return bits


@lru_cache(maxsize=None)
def _enclosure_at(cid: str, bits: int) -> RationalInterval:
    raw = _RAW_BUILDERS[cid](bits)
    if bits > LEVEL_BITS:
        raw = raw.intersect(_enclosure_at(cid, bits - LEVEL_BITS))
    if raw.width > Fraction(1, 1 << bits):
        raise ConvergenceFailure(f"enclosure of {cid} too wide at {bits} bits")
    return raw


def enclose(constant_id: str, eps=DEFAULT_EPS) -> RationalInterval:
    """
    Enclose a named constant.

    Args:
        constant_id: Canonical id (see CONSTANT_IDS) or a symbolic alias such as "π"
        eps: Maximum width of the returned interval

    Returns:
        RationalInterval containing the constant, width <= eps
    """
    return _enclosure_at(canonical_id(constant_id), precision_bits(eps))


def warm_up(eps=DEFAULT_EPS) -> Dict[str, RationalInterval]:
    """Fill the enclosure table for every constant at the given precision."""
    table = {cid: enclose(cid, eps) for cid in CONSTANT_IDS}
    logger.info(f"Enclosure table ready: {len(table)} constants at eps={float(eps):.1e}")
    return table
