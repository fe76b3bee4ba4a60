#!/usr/bin/env python3
"""
Exact formulas and convergent series: the equilateral triangle, circular
sectors, rectangles and first zeros of Bessel functions.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict

import mpmath
import numpy as np
from scipy.optimize import brentq

from errors import AngleOutOfRange, ConvergenceFailure, DomainError
from geometry import Rectangle, Sector

logger = logging.getLogger(__name__)

DEFAULT_TERMS = 64
SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class SeriesValue:
    """Truncated series with a certified bound on the truncation error."""

    value: float
    tail_bound: float
    terms_used: int

    def __post_init__(self):
        if self.tail_bound < 0:
            raise DomainError("tail bound must be nonnegative")
        if self.terms_used < 1:
            raise DomainError("a series value needs at least one term")

    @property
    def lower(self) -> float:
        return self.value - self.tail_bound

    @property
    def upper(self) -> float:
        return self.value + self.tail_bound


def _check_terms(n_terms: int) -> int:
    if int(n_terms) < 1:
        raise DomainError(f"n_terms must be at least 1, got {n_terms}")
    return int(n_terms)


# --- equilateral triangle ------------------------------------------------------

def equilateral_exact() -> Dict[str, float]:
    """Torsion, first eigenvalue and F of the unit-side equilateral triangle."""
    return {
        "T": SQRT3 / 320.0,
        "lambda1": 16.0 * math.pi ** 2 / 3.0,
        "F": math.pi ** 2 / 15.0,
    }


def equilateral_fields(x: float, y: float) -> Dict[str, float]:
    """
    Torsion function and first eigenfunction of the equilateral triangle with
    vertices (0, 0), (1, 0), (1/2, sqrt(3)/2).

    u_E solves -Δu = 1; phi_E is unnormalized and positive inside.
    """
    u = y * (SQRT3 * x - y) * (SQRT3 * (1.0 - x) - y) / (2.0 * SQRT3)
    t = y / SQRT3
    phi = (math.sin(4.0 * math.pi * t)
           + math.sin(2.0 * math.pi * (x - t))
           - math.sin(2.0 * math.pi * (x + t)))
    return {"u_E": u, "phi_E": phi}


# --- sectors -------------------------------------------------------------------

def sector_torsion(s: Sector, n_terms: int = DEFAULT_TERMS) -> SeriesValue:
    """
    Torsional rigidity of the sector of opening angle alpha and radius r.

    T = (r^4/16)(tan α − α − (128 α^4/π^5) Σ_{odd n} 1/(n²(n+2α/π)²(n−2α/π)))

    Args:
        s: Sector with angle in (0, pi/2)
        n_terms: Number of odd indices summed

    Returns:
        SeriesValue; the tail uses n − 2α/π >= 2n/3 for n >= 3 and the
        midpoint comparison for the convex n^-5
    """
    alpha, r = float(s.angle), float(s.radius)
    if not 0 < alpha < math.pi / 2:
        raise AngleOutOfRange(f"sector torsion needs 0 < angle < pi/2, got {alpha}")
    n_terms = _check_terms(n_terms)

    x = 2.0 * alpha / math.pi
    n = 2.0 * np.arange(n_terms) + 1.0
    series = math.fsum(1.0 / (n ** 2 * (n + x) ** 2 * (n - x)))
    coeff = 128.0 * alpha ** 4 / math.pi ** 5
    scale = r ** 4 / 16.0
    value = scale * (math.tan(alpha) - alpha - coeff * series)

    n0 = 2 * n_terms + 1
    tail = scale * coeff * 1.5 / (8.0 * (n0 - 1) ** 4)
    return SeriesValue(value=value, tail_bound=tail, terms_used=n_terms)


def sector_lambda1(s: Sector) -> float:
    """First Dirichlet eigenvalue of a sector: j_{π/α}² / r²."""
    j = bessel_first_zero(math.pi / float(s.angle))
    return j * j / float(s.radius) ** 2


# --- Bessel zeros --------------------------------------------------------------

def _bessel_j_series(nu: float, x: float):
    """
    Ascending series of J_nu(x) in mpmath with a bound on the omitted tail.

    Returns:
        (value, tail_bound) as mpmath numbers
    """
    dps = 30 + int(x / 2.0)
    with mpmath.workdps(dps):
        nu_m = mpmath.mpf(nu)
        half = mpmath.mpf(x) / 2
        q = half * half
        term = half ** nu_m / mpmath.gamma(nu_m + 1)
        total = mpmath.mpf(0)
        k = 0
        while True:
            total += term
            ratio = q / ((k + 1) * (k + 1 + nu_m))
            nxt = -term * ratio
            k += 1
            if ratio < mpmath.mpf(1) / 2:
                tail = abs(nxt) / (1 - ratio)
                if tail <= abs(total) * mpmath.mpf(10) ** (-25) or tail < mpmath.mpf(10) ** (-dps + 5):
                    return +total, +tail
            term = nxt
            if k > 100000:
                raise ConvergenceFailure(f"Bessel series for nu={nu} at x={x} did not settle")


def _bessel_sign(nu: float, x: float) -> int:
    value, tail = _bessel_j_series(nu, x)
    if abs(value) <= tail:
        return 0
    return 1 if value > 0 else -1


def bessel_first_zero(nu: float) -> float:
    """
    First positive zero j_{nu,1} of J_nu.

    J_nu is positive on (0, nu], so the scan for a sign change starts there;
    the bracketed root is polished by Brent's method.

    Raises:
        ConvergenceFailure: no sign change below nu + 5 nu^(1/3) + 10
    """
    nu = float(nu)
    if nu < 0:
        raise DomainError(f"order must be nonnegative, got {nu}")
    cutoff = nu + 5.0 * nu ** (1.0 / 3.0) + 10.0
    step = 0.125
    left = max(nu, step)
    if _bessel_sign(nu, left) <= 0:
        raise ConvergenceFailure(f"J_{nu} is not positive at the scan start {left}")
    right = left + step
    while right <= cutoff:
        sign = _bessel_sign(nu, right)
        if sign == 0:
            return right
        if sign < 0:
            break
        left = right
        right += step
    else:
        raise ConvergenceFailure(f"no sign change of J_{nu} below x={cutoff:.3f}")

    root = brentq(lambda t: float(_bessel_j_series(nu, t)[0]), left, right, xtol=1e-12, rtol=4 * np.finfo(float).eps)
    logger.debug(f"j_({nu},1) = {root:.12f}")
    return root


# --- rectangles ----------------------------------------------------------------

def rect_lambda1(r: Rectangle) -> float:
    return (math.pi / (2.0 * r.a)) ** 2 + (math.pi / (2.0 * r.b)) ** 2


def _rect_double_sum(a: float, b: float, n_terms: int) -> float:
    odd = 2.0 * np.arange(n_terms) + 1.0
    n = odd[:, None]
    m = odd[None, :]
    terms = 1.0 / (n ** 2 * m ** 2 * (b * b * n ** 2 + a * a * m ** 2))
    return float(np.sum(terms))


def _rect_double_tail(a: float, b: float, n_terms: int) -> float:
    # summand <= 1/(b² n⁴ m²) or 1/(a² m⁴ n²); Σ_{n>=N} (2n+1)^-4 <= 1/(6 (2N)³)
    quartic_tail = 1.0 / (6.0 * (2.0 * n_terms) ** 3)
    square_sum = math.pi ** 2 / 8.0
    return quartic_tail * square_sum * (1.0 / (b * b) + 1.0 / (a * a))


def rect_torsion(r: Rectangle, n_terms: int = DEFAULT_TERMS) -> SeriesValue:
    """
    Torsional rigidity of (-a, a) x (-b, b) by the double series

        T = (4^5 a³ b³ / π^6) Σ_{n,m>=0} 1/((2n+1)²(2m+1)²(b²(2n+1)² + a²(2m+1)²)),

    truncated to n, m < n_terms.
    """
    n_terms = _check_terms(n_terms)
    a, b = float(r.a), float(r.b)
    prefactor = 4.0 ** 5 * a ** 3 * b ** 3 / math.pi ** 6
    value = prefactor * _rect_double_sum(a, b, n_terms)
    tail = prefactor * _rect_double_tail(a, b, n_terms)
    return SeriesValue(value=value, tail_bound=tail, terms_used=n_terms)


def rect_F(r: Rectangle, n_terms: int = DEFAULT_TERMS) -> SeriesValue:
    """F(R) = (64 (a² + b²)/π^4) Σ_{n,m} 1/((2n+1)²(2m+1)²(b²(2n+1)² + a²(2m+1)²))."""
    n_terms = _check_terms(n_terms)
    a, b = float(r.a), float(r.b)
    prefactor = 64.0 * (a * a + b * b) / math.pi ** 4
    value = prefactor * _rect_double_sum(a, b, n_terms)
    tail = prefactor * _rect_double_tail(a, b, n_terms)
    return SeriesValue(value=value, tail_bound=tail, terms_used=n_terms)


def _sech(z: float) -> float:
    e = math.exp(-z)
    return 2.0 * e / (1.0 + e * e)


def rect_center_torsion(r: Rectangle, n_terms: int = DEFAULT_TERMS) -> SeriesValue:
    """
    Torsion function of the rectangle at its center.

    Written as the infinite strip value b²/2 corrected by an alternating
    series in sech((2n+1)πa/(2b)), with b the shorter half-width.
    """
    n_terms = _check_terms(n_terms)
    long_, short = max(r.a, r.b), min(r.a, r.b)
    coeff = 16.0 * short ** 2 / math.pi ** 3
    ratio = math.pi * long_ / (2.0 * short)
    terms = [(-1) ** n * _sech((2 * n + 1) * ratio) / (2 * n + 1) ** 3 for n in range(n_terms)]
    value = short ** 2 / 2.0 - coeff * math.fsum(terms)
    tail = coeff * _sech((2 * n_terms + 1) * ratio) / (2 * n_terms + 1) ** 3
    return SeriesValue(value=value, tail_bound=tail, terms_used=n_terms)


def rect_torsion_bounds(r: Rectangle) -> Dict[str, float]:
    """
    Elementary two-sided torsion bounds for rectangles and the F window they give.

    series_lower keeps the first term of the double series; the other two
    are the classical bounds a³b³/(a²+b²) <= T <= 4a³b³/(3(a²+b²)).
    """
    a, b = float(r.a), float(r.b)
    core = a ** 3 * b ** 3 / (a * a + b * b)
    return {
        "series_lower": 4.0 ** 5 / math.pi ** 6 * core,
        "polya_szego_lower": core,
        "upper": 4.0 * core / 3.0,
        "F_lower": math.pi ** 2 / 16.0,
        "F_upper": math.pi ** 2 / 12.0,
    }


def rect_F_limit() -> float:
    """lim F(R_{a,1}) as a -> ∞, as the product (64/π^4)(π²/8)(π^4/96) = π²/12."""
    return (64.0 / math.pi ** 4) * (math.pi ** 2 / 8.0) * (math.pi ** 4 / 96.0)
