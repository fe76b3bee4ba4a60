#!/usr/bin/env python3
"""
Analytic bounds on torsion, first eigenvalue and F.

Every bound takes raw scalars so it can be evaluated on synthetic inputs such as
region boundary curves. Expressions that are rational in rational inputs are
also evaluated exactly; the exact value is the one verdicts rely on.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Mapping, Optional, Union

import numpy as np

from closed_forms import bessel_first_zero
from constants import C1, enclose
from errors import AngleOutOfRange, DomainError, ValidityViolation
from geometry import Triangle

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]

ZETA5 = float(enclose("zeta5"))
CBRT2 = 2.0 ** (1.0 / 3.0)
TORSION_CAP = 2.0 / 3.0
EIGEN_CAPS = {
    "triangle": math.pi ** 2 / 9.0,
    "tangential_quadrilateral": math.pi ** 2 / 8.0,
}


class BoundKind(str, Enum):
    LOWER_ON_T = "LowerOnT"
    LOWER_ON_LAMBDA = "LowerOnLambda"
    LOWER_ON_F = "LowerOnF"
    UPPER_ON_F = "UpperOnF"
    UPPER_ON_LAMBDA = "UpperOnLambda"


@dataclass(frozen=True)
class BoundValue:
    """A bound with the condition under which it holds."""

    value: float
    kind: BoundKind
    validity: str
    exact: Optional[Fraction] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def __float__(self) -> float:
        return self.value


def _exact_inputs(*values) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


def _rational_bound(expr, kind: BoundKind, validity: str, *args) -> BoundValue:
    if _exact_inputs(*args):
        exact = expr(*(Fraction(v) for v in args))
        return BoundValue(float(exact), kind, validity, exact=exact)
    return BoundValue(float(expr(*(float(v) for v in args))), kind, validity)


# --- torsion -------------------------------------------------------------------

def torsion_lb_equilateral_test(a: Number, b: Number) -> BoundValue:
    """T(△_{a,b}) >= b³/(80(1 − a + a² + b²)), equality only for the equilateral triangle."""
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    return _rational_bound(
        lambda a, b: b ** 3 / (80 * (1 - a + a * a + b * b)),
        BoundKind.LOWER_ON_T, "all triangles", a, b,
    )


def torsion_lb_obtuse_test(a: Number, b: Number) -> BoundValue:
    """T(△_{a,b}) >= (1 − a) a b³ / (48 (a − a² + b²)), from the product test function."""
    if not 0 < a < 1:
        raise DomainError(f"a must lie in (0, 1), got {a}")
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    return _rational_bound(
        lambda a, b: (1 - a) * a * b ** 3 / (48 * (a - a * a + b * b)),
        BoundKind.LOWER_ON_T, "0 < a < 1", a, b,
    )


def torsion_lb_sector_closed(h: float, gamma: float, M: Optional[float] = None) -> BoundValue:
    """
    T >= (h^4/16)(tan γ − γ − 124 ζ(5) γ^4/π^5) for the triangle holding S(γ, h).

    Args:
        h: Sector radius (the altitude from the vertex of angle gamma)
        gamma: Vertex angle
        M: Shorter leg, when the M >= 2 condition is being used

    Raises:
        ValidityViolation: neither M >= 2 nor 0 <= gamma <= pi/4 holds
    """
    gamma = float(gamma)
    if not 0 < gamma < math.pi / 2:
        raise AngleOutOfRange(f"gamma must lie in (0, pi/2), got {gamma}")
    if M is not None and M >= 2:
        validity = "M >= 2"
    elif gamma <= math.pi / 4:
        validity = "0 <= gamma <= pi/4"
    else:
        raise ValidityViolation(f"sector torsion bound needs M >= 2 or gamma <= pi/4 (gamma={gamma}, M={M})")
    value = (float(h) ** 4 / 16.0) * (math.tan(gamma) - gamma - 124.0 * ZETA5 * gamma ** 4 / math.pi ** 5)
    return BoundValue(value, BoundKind.LOWER_ON_T, validity)


# --- eigenvalues ---------------------------------------------------------------

def bessel_zero_minorant(nu: float) -> float:
    """Lower bound j_{nu,1} >= nu + c1 2^(-1/3) nu^(1/3)."""
    return nu + float(C1) / CBRT2 * nu ** (1.0 / 3.0)


def eig_lb_sector(theta: float, b: float, minorized: bool = False) -> BoundValue:
    """
    λ1(△) >= (θ/b) j_{π/θ}², θ the smallest angle and b/2 the area.

    With minorized=True the zero is replaced by its Airy-type minorant.
    """
    theta = float(theta)
    if not 0 < theta < math.pi:
        raise AngleOutOfRange(f"theta must lie in (0, pi), got {theta}")
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    nu = math.pi / theta
    j = bessel_zero_minorant(nu) if minorized else bessel_first_zero(nu)
    return BoundValue(
        theta / float(b) * j * j, BoundKind.LOWER_ON_LAMBDA,
        "theta is the smallest angle", details={"nu": nu, "zero": j, "minorized": minorized},
    )


def eig_lb_diameter_height(d: Number, h: Number) -> BoundValue:
    """λ1 >= π² (1/d + 1/h)²; the exact field holds (1/d + 1/h)² for rational inputs."""
    if not (d > 0 and h > 0):
        raise DomainError(f"diameter and height must be positive, got {d}, {h}")
    ratio = None
    if _exact_inputs(d, h):
        ratio = (1 / Fraction(d) + 1 / Fraction(h)) ** 2
    value = math.pi ** 2 * (1.0 / float(d) + 1.0 / float(h)) ** 2
    return BoundValue(value, BoundKind.LOWER_ON_LAMBDA, "triangles",
                      details={"over_pi_squared": ratio})


def altitude_iso(M: float, N: float) -> float:
    """Altitude h = (M/√2) √(1 + M/N) of the isosceles sector construction."""
    if not 0 < M <= N:
        raise DomainError(f"altitude_iso needs 0 < M <= N, got M={M}, N={N}")
    return M / math.sqrt(2.0) * math.sqrt(1.0 + M / N)


# --- F upper bounds ------------------------------------------------------------

def _metric(metrics: Any, name: str, *aliases: str) -> float:
    for key in (name,) + aliases:
        if isinstance(metrics, Mapping) and key in metrics:
            return float(metrics[key])
        if hasattr(metrics, key):
            return float(getattr(metrics, key))
    raise DomainError(f"metrics lack {name!r}")


def upper_chain(metrics: Any, domain_kind: str = "triangle") -> BoundValue:
    """
    F = (λ1 |D|²/P²)(T P²/|D|³), each factor against its known cap.

    Args:
        metrics: Mapping or object with lambda1, T, area and P (or perimeter)
        domain_kind: 'triangle' or 'tangential_quadrilateral'

    Returns:
        UpperOnF bound equal to the product of the caps; details carry both
        measured factors and whether each respects its cap
    """
    if domain_kind not in EIGEN_CAPS:
        raise DomainError(f"unknown domain kind {domain_kind!r}")
    lam = _metric(metrics, "lambda1")
    torsion = _metric(metrics, "T")
    area = _metric(metrics, "area")
    perimeter = _metric(metrics, "P", "perimeter")
    if min(lam, torsion, area, perimeter) <= 0:
        raise DomainError("upper_chain needs positive metrics")

    eig_factor = lam * area ** 2 / perimeter ** 2
    torsion_factor = torsion * perimeter ** 2 / area ** 3
    eig_cap = EIGEN_CAPS[domain_kind]
    details = {
        "eigen_factor": eig_factor,
        "torsion_factor": torsion_factor,
        "eigen_cap": eig_cap,
        "torsion_cap": TORSION_CAP,
        "eigen_within_cap": eig_factor <= eig_cap * (1.0 + 1e-12),
        "torsion_within_cap": torsion_factor <= TORSION_CAP * (1.0 + 1e-12),
        "F": eig_factor * torsion_factor,
    }
    return BoundValue(eig_cap * TORSION_CAP, BoundKind.UPPER_ON_F, domain_kind, details=details)


def thinning_upper(area: float, P: float) -> BoundValue:
    """F(D) <= (π²/24)(1 + 2√π |D|^(1/2)/P)² for tangential domains."""
    if not (area > 0 and P > 0):
        raise DomainError("area and perimeter must be positive")
    value = math.pi ** 2 / 24.0 * (1.0 + 2.0 * math.sqrt(math.pi) * math.sqrt(area) / P) ** 2
    return BoundValue(value, BoundKind.UPPER_ON_F, "P R / 2 = area")


def aux_functionals(spectral: Any, metrics: Any) -> Dict[str, float]:
    """Ψ = T/(|D| R²), Φ = T/(|D| M(D)), λ1 R² and λ1 M(D)."""
    lam = _metric(spectral, "lambda1")
    torsion = _metric(spectral, "T")
    torsion_max = _metric(spectral, "torsion_max")
    inradius = _metric(metrics, "inradius", "R")
    area = _metric(metrics, "area")
    return {
        "Psi": torsion / (area * inradius ** 2),
        "Phi": torsion / (area * torsion_max),
        "herschProtter": lam * inradius ** 2,
        "payne": lam * torsion_max,
    }


# --- geometric side conditions -------------------------------------------------

def _inside(p: np.ndarray, verts: np.ndarray, tol: float) -> np.ndarray:
    signs = []
    for i in range(3):
        v0, v1 = verts[i], verts[(i + 1) % 3]
        cross = (v1[0] - v0[0]) * (p[:, 1] - v0[1]) - (v1[1] - v0[1]) * (p[:, 0] - v0[0])
        signs.append(cross)
    signs = np.array(signs)
    return np.all(signs >= -tol, axis=0) | np.all(signs <= tol, axis=0)


def sector_in_triangle(tri: Triangle, vertex: str = "apex", radius: Optional[float] = None,
                       samples: int = 256) -> bool:
    """
    Sampled check that the sector at a vertex, spanned by its two sides, lies
    in the triangle.

    Args:
        tri: The triangle
        vertex: 'origin', 'right' (the vertex (1, 0)) or 'apex'
        radius: Sector radius; defaults to the distance to the opposite side
        samples: Number of arc points
    """
    verts = np.array(tri.vertices(), dtype=float)
    index = {"origin": 0, "right": 1, "apex": 2}.get(vertex)
    if index is None:
        raise DomainError(f"unknown vertex {vertex!r}")
    v = verts[index]
    p, q = verts[(index + 1) % 3], verts[(index + 2) % 3]
    if radius is None:
        edge = q - p
        radius = abs(edge[0] * (v[1] - p[1]) - edge[1] * (v[0] - p[0])) / np.hypot(*edge)
    phi1 = math.atan2(p[1] - v[1], p[0] - v[0])
    phi2 = math.atan2(q[1] - v[1], q[0] - v[0])
    span = (phi2 - phi1 + math.pi) % (2.0 * math.pi) - math.pi
    phis = phi1 + span * np.linspace(0.0, 1.0, samples)
    arc = np.column_stack([v[0] + radius * np.cos(phis), v[1] + radius * np.sin(phis)])
    return bool(np.all(_inside(arc, verts, 1e-12 * max(1.0, radius))))


def obtuse_case1_a_star() -> float:
    """Abscissa where the obtuse case-1 boundary meets the right-triangle circle."""
    return (3.0 - math.sqrt(24.0 * math.sqrt(15.0) - 87.0)) / 6.0


def obtuse_case3_beta_max() -> float:
    """Angle at (1, 0) where the case-2 curve b = 2a(1−a)/(1−a+a²) meets the circle."""
    a = (1.0 - math.sqrt(8.0 * math.sqrt(2.0) - 11.0)) / 2.0
    b = 2.0 * a * (1.0 - a) / (1.0 - a + a * a)
    return math.atan2(b, 1.0 - a)
