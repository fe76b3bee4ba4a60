#!/usr/bin/env python3
"""
Replays of the lower and upper bound cases, moduli-space sweeps and the
rectangle checks, with CSV/JSON report writers.
"""

import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
import yaml

from bounds import (
    ZETA5,
    eig_lb_diameter_height,
    eig_lb_sector,
    obtuse_case1_a_star,
    obtuse_case3_beta_max,
    sector_in_triangle,
    thinning_upper,
    torsion_lb_equilateral_test,
    torsion_lb_obtuse_test,
    upper_chain,
)
from closed_forms import DEFAULT_TERMS, rect_center_torsion, rect_F, rect_lambda1
from constants import C1, K_AIRY, RationalInterval, enclose, interval_root
from errors import DepthExhausted, DomainError, OutOfRegion, PolyaVerifyError, UnknownCase, UnknownName
from geometry import Kite, Rectangle, Triangle, classify, derive, in_region, require_region
from pde_oracle import spectral
from polycert import certify_lemma
from settings import VerifySettings

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]

CASES_FILE = Path(__file__).with_name("cases.yaml")

LOWER_TARGET = math.pi ** 2 / 24.0
UPPER_TARGET = math.pi ** 2 / 12.0

EXACT = "exact-rational"
CERTIFICATE = "certificate"
GRID = "grid+modulus"
ORACLE = "oracle"
RIGOROUS_METHODS = (EXACT, CERTIFICATE)

VERIFIED = "Verified"
VERIFIED_NUMERICALLY = "VerifiedNumerically"
FAILED = "Failed"

SAMPLE_SEED = 20240611
UPPER_LEVEL = 6
THINNING_LEVEL = 6
GRID_MAX_DEPTH = 28
GRID_BITS = 80
# relative slack on caps attained with equality (equilateral, square)
CAP_SLACK = 2e-3
# oracle tolerance for analytic bounds in sweeps; gaps are bound minus oracle value
BOUND_SLACK = 1e-3
UPPER_GAPS = ("thinning_upper", "upper_chain")

CSV_HEADER = ["a", "b", "class", "lambda1", "T", "torsion_max", "F", "margin_low", "margin_high"]


# --- report types ------------------------------------------------------------

@dataclass(frozen=True)
class CaseContext:
    """Chart quantities shared by the case chains."""

    chart: str
    point: Tuple[Number, Number]
    gamma_b: Optional[float] = None
    beta_b: Optional[float] = None
    a_b: Optional[Number] = None
    x_b: Optional[Number] = None

    @classmethod
    def build(cls, chart: str, point: Tuple[Number, Number]) -> "CaseContext":
        """
        Args:
            chart: 'T_prime' (gamma_b = atan(1/b)) or 'T' (a_b, x_b, beta_b for b <= 1/2)
            point: (a, b); rational inputs keep a_b and x_b exact when possible
        """
        _, b = point
        if not b > 0:
            raise DomainError(f"b must be positive, got {b}")
        if chart in ("T_prime", "T_prime_acute"):
            return cls(chart=chart, point=point, gamma_b=math.atan(1.0 / float(b)))
        if chart != "T":
            raise DomainError(f"unknown chart {chart!r}")
        if b > Fraction(1, 2):
            return cls(chart=chart, point=point)
        a_b = _half_chord(b)
        x_b = (1 - a_b) / b
        return cls(chart=chart, point=point, a_b=a_b, x_b=x_b, beta_b=math.atan(1.0 / float(x_b)))


def _exact_sqrt(q: Fraction) -> Optional[Fraction]:
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def _half_chord(b: Number) -> Number:
    """a_b = 1/2 − √(1/4 − b²), exact when the root is rational."""
    if isinstance(b, (int, Fraction)):
        root = _exact_sqrt(Fraction(1, 4) - Fraction(b) ** 2)
        if root is not None:
            return Fraction(1, 2) - root
    return 0.5 - math.sqrt(0.25 - float(b) ** 2)


@dataclass
class Evidence:
    check: str
    method: str
    passed: bool
    worst_margin: Optional[float] = None
    detail: str = ""


@dataclass
class CaseReport:
    case_id: str
    region: str
    evidence: List[Evidence] = field(default_factory=list)
    annotations: List[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if not self.evidence or not all(e.passed for e in self.evidence):
            return FAILED
        if all(e.method in RIGOROUS_METHODS for e in self.evidence):
            return VERIFIED
        return VERIFIED_NUMERICALLY

    def to_dict(self) -> Dict[str, Any]:
        return {
            "case_id": self.case_id,
            "region": self.region,
            "verdict": self.verdict,
            "evidence": [asdict(e) for e in self.evidence],
            "annotations": list(self.annotations),
        }


@dataclass
class SweepRow:
    a: float
    b: float
    cls: str
    lambda1: float = math.nan
    T: float = math.nan
    torsion_max: float = math.nan
    F: float = math.nan
    margin_low: float = math.nan
    margin_high: float = math.nan
    bound_gaps: Dict[str, float] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def encloses(self) -> bool:
        return self.error is None and self.margin_low > 0 and self.margin_high > 0

    @property
    def bound_violations(self) -> List[str]:
        """Bounds that miss the oracle by more than BOUND_SLACK, lower bounds above it or upper below."""
        bad = []
        for name, gap in sorted(self.bound_gaps.items()):
            if name in UPPER_GAPS:
                if gap < -BOUND_SLACK:
                    bad.append(name)
            elif gap > BOUND_SLACK:
                bad.append(name)
        return bad

    def csv_fields(self) -> List[str]:
        values = [self.a, self.b, self.cls, self.lambda1, self.T, self.torsion_max,
                  self.F, self.margin_low, self.margin_high]
        return [v if isinstance(v, str) else f"{v:.12g}" for v in values]


# --- case registry -----------------------------------------------------------

@lru_cache(maxsize=None)
def _registry() -> Tuple[Dict[str, Any], ...]:
    with open(CASES_FILE, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    return tuple(data.get("cases", []))


def list_cases() -> List[Dict[str, Any]]:
    return [dict(case) for case in _registry()]


def _case_entry(case_id: str) -> Dict[str, Any]:
    for case in _registry():
        if case["id"] == case_id:
            return case
    raise UnknownCase(f"unknown case {case_id!r}; known: {[c['id'] for c in _registry()]}")


# --- case functions ----------------------------------------------------------

PI = math.pi
C1_F = float(C1)
CBRT2 = 2.0 ** (1.0 / 3.0)
SMALL_ANGLE_K = float(K_AIRY) * CBRT2 / PI ** (2.0 / 3.0)
AIRY_C = C1_F / (CBRT2 * PI ** (2.0 / 3.0))


def _sector_defect(x: float) -> float:
    return math.tan(x) - x - 124.0 * ZETA5 * x ** 4 / PI ** 5


def _acute_1a_g(a: Number, b: Number) -> Number:
    s = (a - 1) ** 2 + b ** 2
    factor = Fraction(3, 5) if _rational(a, b) else 0.6
    return factor * (s + b) ** 2 / (s * (s + a))


def _acute_1b_f(x: float) -> float:
    tan_lower = x + x ** 3 / 3.0 + 2.0 * x ** 5 / 15.0
    tan_upper = x + x ** 3 / 3.0 + 2.0 * x ** 5 / 5.0
    return (0.6 * tan_lower / (x * (1.0 + 4.0 * tan_upper ** 2))
            * (1.0 + SMALL_ANGLE_K * x ** (2.0 / 3.0)) ** 2)


def _acute_high_f(x: float) -> float:
    ratio = PI / x
    return _sector_defect(x) * x * (ratio + C1_F / CBRT2 * ratio ** (1.0 / 3.0)) ** 2


def _mgeq3_f(b: float) -> float:
    g = math.atan(1.0 / b)
    return (0.75 * b * b / g * (1.0 + b / math.sqrt(b * b + 1.0)) ** 2
            * (1.0 + AIRY_C * g ** (2.0 / 3.0)) ** 2
            * (1.0 / b - g - 124.0 * ZETA5 * g ** 4 / PI ** 5))


def _mgeq3_h(x: float) -> float:
    return (3.0 * math.cos(x / 2.0) ** 4 / (x * math.tan(x) ** 2)
            * (1.0 + AIRY_C * x ** (2.0 / 3.0)) ** 2 * _sector_defect(x))


def _mgeq3_g(x: float) -> float:
    return ((1.0 - x * x / 8.0) ** 4 / (1.0 + x * x / 3.0 + 2.0 * x ** 4 / 5.0) ** 2
            * (1.0 + AIRY_C * x ** (2.0 / 3.0)) ** 2
            * (1.0 - 372.0 * ZETA5 * x / PI ** 5))


def _obtuse_1_f(a: Number, b: Number) -> Number:
    factor = Fraction(3, 5) if _rational(a, b) else 0.6
    return factor * (1 + b) ** 2 / (1 - a + a * a + b * b)


def _obtuse_2_f(a: Number, b: Number) -> Number:
    return (1 - a) * a * (1 + b) ** 2 / (a - a * a + b * b)


def _obtuse_3_prefactor(b: float) -> float:
    s = math.sqrt(1.0 - 4.0 * b * b)
    return 16.0 * (1.0 + s) / (math.sqrt(2.0) + math.sqrt(2.0) * s + 2.0 * math.sqrt(1.0 + s)) ** 2


def _rational(*values) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


ATAN_1_8 = math.atan(1.0 / 8.0)
ATAN_1_2 = math.atan(0.5)
ATAN_1_3 = math.atan(1.0 / 3.0)

# name -> (function, region id for (a, b) points or a closed scalar domain)
_CASE_FUNCTIONS: Dict[str, Tuple[Callable, Union[str, Tuple[float, float]]]] = {
    "acute-1a.g": (_acute_1a_g, "acute-case-1a"),
    "acute-1b.f": (_acute_1b_f, (ATAN_1_8, ATAN_1_2)),
    "acute-high.f": (_acute_high_f, (0.0, 0.7)),
    "mgeq3.f": (_mgeq3_f, (3.0, math.inf)),
    "mgeq3.h": (_mgeq3_h, (0.0, ATAN_1_3)),
    "mgeq3.g": (_mgeq3_g, (0.0, ATAN_1_3)),
    "obtuse-1.f": (_obtuse_1_f, "obtuse-case-1"),
    "obtuse-2.f": (_obtuse_2_f, "obtuse-case-2"),
    "obtuse-3.prefactor": (_obtuse_3_prefactor, (0.0, 0.5)),
}

CASE_FUNCTION_NAMES = tuple(_CASE_FUNCTIONS)
# open at zero
_OPEN_AT_ZERO = {"acute-high.f", "mgeq3.h", "mgeq3.g"}


def case_function(name: str, point) -> Number:
    """
    Evaluate one of the named case functions.

    Args:
        name: One of CASE_FUNCTION_NAMES
        point: (a, b) for region-based functions, a scalar otherwise

    Returns:
        A Fraction when the expression is rational and the inputs are exact,
        a float otherwise

    Raises:
        UnknownName: unknown function
        OutOfRegion: point outside the function's region or domain
    """
    if name not in _CASE_FUNCTIONS:
        raise UnknownName(f"unknown case function {name!r}")
    func, domain = _CASE_FUNCTIONS[name]
    if isinstance(domain, str):
        a, b = point
        require_region((a, b), domain)
        return func(a, b)
    x = point[0] if isinstance(point, (tuple, list)) else point
    lo, hi = domain
    if not lo <= float(x) <= hi or (float(x) == 0.0 and name in _OPEN_AT_ZERO):
        raise OutOfRegion(f"{name} is defined on [{lo}, {hi}], got {x}")
    return func(float(x))


# --- evidence helpers --------------------------------------------------------

def _compare(check: str, value, bound, strict: bool = False, detail: str = "") -> Evidence:
    """Exact check value >= bound (or >)."""
    margin = Fraction(value) - Fraction(bound)
    passed = margin > 0 if strict else margin >= 0
    return Evidence(check, EXACT, passed, float(margin), detail)


def _identity(check: str, expr) -> Evidence:
    """Exact check that a sympy expression vanishes identically."""
    numerator = sympy.expand(sympy.numer(sympy.together(expr)))
    passed = numerator == 0
    detail = "" if passed else f"residual numerator {numerator}"
    return Evidence(check, EXACT, bool(passed), 0.0 if passed else None, detail)


def _sign(check: str, expr, nonnegative: bool = True) -> Evidence:
    """Exact sign of a sympy expression, read from its factored form and the symbol assumptions."""
    factored = sympy.factor(sympy.together(expr))
    verdict = factored.is_nonnegative if nonnegative else factored.is_nonpositive
    passed = verdict is True
    return Evidence(check, EXACT, passed, 0.0 if passed else None, f"factored: {factored}")


def _certificate(name: str, dx: Fraction, max_depth: int) -> Evidence:
    check = f"{name} <= 0 on (0, {dx}]"
    try:
        certificate = certify_lemma(name, dx, max_depth)
    except DepthExhausted as e:
        return Evidence(check, CERTIFICATE, False, -float(e.reduced_constant),
                        f"witness ({e.lo}, {e.hi}] at depth {e.depth}")
    worst = max(p.reduced_constant for p in certificate.intervals)
    return Evidence(check, CERTIFICATE, certificate.success, -float(worst),
                    f"{len(certificate.intervals)} pieces, depth {certificate.depth}")


@dataclass
class GridOutcome:
    cells: int
    depth: int
    worst_margin: Optional[Fraction]
    witness: Optional[Tuple[RationalInterval, ...]] = None

    @property
    def success(self) -> bool:
        return self.witness is None


def _split(cell: Tuple[RationalInterval, ...]) -> List[Tuple[RationalInterval, ...]]:
    axis = max(range(len(cell)), key=lambda i: cell[i].width)
    piece = cell[axis]
    left = RationalInterval(piece.lo, piece.mid)
    right = RationalInterval(piece.mid, piece.hi)
    return [cell[:axis] + (half,) + cell[axis + 1:] for half in (left, right)]


def grid_lower_bound(evaluate: Callable, box: Sequence[RationalInterval], threshold=1,
                     max_depth: int = GRID_MAX_DEPTH,
                     skip: Optional[Callable] = None) -> GridOutcome:
    """
    Show evaluate >= threshold on a box by interval evaluation over cells,
    halving the widest side of any cell whose enclosure dips below.

    Args:
        evaluate: Maps a tuple of RationalIntervals to a RationalInterval
            enclosing the function on that cell
        box: Starting cell
        threshold: Rational lower bound to establish
        max_depth: Maximum halvings of one cell
        skip: Predicate for cells lying outside the region

    Returns:
        GridOutcome; witness is the first cell that could not be settled
    """
    threshold = Fraction(threshold)
    stack = [(tuple(box), 0)]
    cells, deepest, worst = 0, 0, None
    while stack:
        cell, depth = stack.pop()
        if skip is not None and skip(cell):
            continue
        margin = evaluate(cell).lo - threshold
        if margin >= 0:
            cells += 1
            deepest = max(deepest, depth)
            worst = margin if worst is None else min(worst, margin)
            continue
        if depth >= max_depth:
            return GridOutcome(cells, depth, worst, witness=cell)
        stack.extend((half, depth + 1) for half in reversed(_split(cell)))
    logger.debug(f"Grid settled {cells} cells, depth {deepest}")
    return GridOutcome(cells, deepest, worst)


def _grid_evidence(check: str, outcome: GridOutcome) -> Evidence:
    if not outcome.success:
        witness = ", ".join(f"[{c.lo}, {c.hi}]" for c in outcome.witness)
        return Evidence(check, GRID, False, None, f"unsettled cell {witness} at depth {outcome.depth}")
    return Evidence(check, GRID, True, float(outcome.worst_margin),
                    f"{outcome.cells} cells, depth {outcome.depth}")


def _sample_range(func: Callable, lo: float, hi: float, count: int = 2001) -> np.ndarray:
    xs = np.linspace(lo, hi, count)
    return np.array([func(float(x)) for x in xs])


# --- lower-bound cases -------------------------------------------------------

def _g_interval(cell: Tuple[RationalInterval, RationalInterval]) -> RationalInterval:
    a, b = cell
    s = (a - 1) ** 2 + b ** 2
    return Fraction(3, 5) * (s + b) ** 2 / (s * (s + a))


def _outside_acute_chart(cell) -> bool:
    a, b = cell
    return a.hi ** 2 + b.hi ** 2 < 1


def _replay_acute_1a(report: CaseReport, settings: VerifySettings) -> None:
    corner = case_function("acute-1a.g", (Fraction(1, 2), Fraction(29, 10)))
    report.evidence.append(_compare("g(1/2, 29/10) > 1", corner, 1, strict=True, detail=f"g = {corner}"))
    box = (RationalInterval(0, Fraction(1, 2)), RationalInterval(Fraction(866, 1000), Fraction(29, 10)))
    outcome = grid_lower_bound(_g_interval, box, 1, skip=_outside_acute_chart)
    report.evidence.append(_grid_evidence("g(a, b) >= 1 on [0, 1/2] x [0.866, 2.9] within the chart", outcome))
    report.annotations.append("acute-case-1a and acute-case-1b overlap on 1 <= b <= 2.9; both are replayed")


def _replay_acute_1b(report: CaseReport, settings: VerifySettings) -> None:
    depth = settings.cert_max_depth
    shift, width = Fraction(49, 100), Fraction(285, 1000)
    report.evidence.append(_certificate("P2_acute", width, depth))
    report.evidence.append(_compare("atan(1/8) >= 0.12", enclose("atan_1_8").lo, Fraction(12, 100)))
    report.evidence.append(_compare("0.12 >= 0.49^3", Fraction(12, 100), shift ** 3))
    report.evidence.append(_compare("0.464 >= atan(1/2)", Fraction(464, 1000), enclose("atan_1_2").hi))
    report.evidence.append(_compare("0.775^3 >= 0.464", (shift + width) ** 3, Fraction(464, 1000)))
    report.evidence.append(_compare("c1 > k", C1, K_AIRY, strict=True))
    values = _sample_range(_acute_1b_f, ATAN_1_8, ATAN_1_2)
    report.annotations.append(f"dense sample: min f = {values.min():.6f} on [atan(1/8), atan(1/2)]")


def _replay_acute_2(report: CaseReport, settings: VerifySettings) -> None:
    depth = settings.cert_max_depth
    half = Fraction(444, 1000)
    report.evidence.append(_certificate("negP1prime_mono", half, depth))
    report.evidence.append(_certificate("negP1prime_mono_shifted", half, depth))
    report.evidence.append(_compare("(2 * 0.444)^3 >= 0.7", (2 * half) ** 3, Fraction(7, 10)))
    report.evidence.append(_certificate("Q_mgeq3", Fraction(686, 1000), depth))
    report.evidence.append(_compare("0.686^3 >= atan(1/3)", Fraction(686, 1000) ** 3, enclose("atan_1_3").hi))
    report.evidence.append(_compare("0.7 > 2 atan(1/6)", Fraction(7, 10), 2 * enclose("atan_1_6").hi, strict=True))

    # gamma_b = atan(1/b) must stay in the ranges the lemmas above cover
    for corner in ((Fraction(0), Fraction(3)), (Fraction(1, 2), Fraction(3))):
        report.evidence.append(Evidence(f"{corner[0]}, {corner[1]} in acute-case-2", EXACT,
                                        in_region(corner, "acute-case-2"), 0.0))
    context = CaseContext.build("T_prime", (Fraction(1, 2), Fraction(3)))
    report.evidence.append(Evidence("gamma_b(3) = atan(1/3)", EXACT, context.gamma_b == ATAN_1_3, 0.0))
    w = sympy.symbols("w", nonnegative=True)
    report.evidence.append(_sign("1/3 - 1/b >= 0 for b = 3(1 + w) >= 3, so gamma_b <= atan(1/3)",
                                 sympy.Rational(1, 3) - 1 / (3 * (1 + w))))
    report.evidence.append(_compare("0.7 > atan(1/3), so gamma_b lies in (0, 0.7)", Fraction(7, 10),
                                    enclose("atan_1_3").hi, strict=True))

    xs = np.linspace(0.01, 0.7, 2001)
    high = np.array([_acute_high_f(float(x)) for x in xs])
    report.annotations.append(
        f"dense sample: sector bound increasing on [0.01, 0.7]: {bool(np.all(np.diff(high) > 0))}")
    bs = np.linspace(3.0, 60.0, 2001)
    f_values = np.array([_mgeq3_f(float(b)) for b in bs])
    report.annotations.append(f"dense sample: min f(b) = {f_values.min():.6f} on [3, 60]")


def _replay_obtuse_1(report: CaseReport, settings: VerifySettings) -> None:
    a, b = sympy.symbols("a b", real=True)
    p = b ** 2 - 3 * b + 1 - sympy.Rational(5, 2) * (a - a ** 2)
    report.evidence.append(_identity("3(1+b)^2 - 5(1-a+a^2+b^2) = -2 p(a, b)",
                                     3 * (1 + b) ** 2 - 5 * (1 - a + a ** 2 + b ** 2) + 2 * p))
    report.evidence.append(_identity("1-a+a^2+b^2 = (a-1/2)^2 + b^2 + 3/4",
                                     1 - a + a ** 2 + b ** 2 - ((a - sympy.Rational(1, 2)) ** 2 + b ** 2
                                                                + sympy.Rational(3, 4))))
    points = [(Fraction(i, 40), Fraction(j, 80)) for i in range(1, 21) for j in range(1, 41)]
    inside = [pt for pt in points if in_region(pt, "obtuse-case-1")]
    worst = min(case_function("obtuse-1.f", pt) for pt in inside)
    report.evidence.append(_compare(f"f >= 1 at {len(inside)} rational points of the region", worst, 1))

    a_star = obtuse_case1_a_star()
    on_circle = [0.6 * (1.0 + math.sqrt(t - t * t)) ** 2 for t in np.linspace(a_star, 0.5, 501)]
    report.annotations.append(
        f"boundary b = sqrt(a - a^2), a in [{a_star:.6f}, 1/2]: min f = {min(on_circle):.9f}")


def _replay_obtuse_2(report: CaseReport, settings: VerifySettings) -> None:
    a, b = sympy.symbols("a b", real=True)
    report.evidence.append(_identity(
        "(1-a)a(1+b)^2 - (a-a^2+b^2) = b(2(a-a^2) - b(1-a+a^2))",
        (1 - a) * a * (1 + b) ** 2 - (a - a ** 2 + b ** 2) - b * (2 * (a - a ** 2) - b * (1 - a + a ** 2))))
    report.evidence.append(_identity("a - a^2 = a(1 - a)", a - a ** 2 - a * (1 - a)))
    for t in (Fraction(1, 20), Fraction(1, 10), Fraction(3, 20), Fraction(1, 5)):
        curve_b = 2 * t * (1 - t) / (1 - t + t * t)
        value = case_function("obtuse-2.f", (t, curve_b))
        report.evidence.append(Evidence(f"f(a, 2a(1-a)/(1-a+a^2)) = 1 at a = {t}", EXACT,
                                        value == 1, float(value - 1)))


def _prefactor_interval(cell: Tuple[RationalInterval]) -> RationalInterval:
    (b,) = cell
    s = interval_root(1 - 4 * b ** 2, 2, GRID_BITS)
    root = interval_root(1 + s, 2, GRID_BITS)
    return 16 / (2 + enclose("sqrt2") * root) ** 2


def _replay_obtuse_3(report: CaseReport, settings: VerifySettings) -> None:
    depth = settings.cert_max_depth
    context = CaseContext.build("T", (Fraction(1, 10), Fraction(3, 10)))
    report.evidence.append(Evidence("a_b(3/10) = 1/10", EXACT, context.a_b == Fraction(1, 10), 0.0))
    report.evidence.append(_compare("x_b(3/10) >= 3", context.x_b, 3))
    # x_b = (1/2 + r)/b with r = sqrt(1/4 - b^2); b = 3/(10(1 + w)) sweeps (0, 3/10] as w >= 0
    w = sympy.symbols("w", nonnegative=True)
    b_w = sympy.Rational(3, 10) / (1 + w)
    report.evidence.append(_sign("r^2 - (2/5)^2 >= 0 for b <= 3/10",
                                 sympy.Rational(1, 4) - b_w ** 2 - sympy.Rational(4, 25)))
    report.evidence.append(_sign("(1/2 + 2/5)/b - 3 >= 0 for b <= 3/10", sympy.Rational(9, 10) / b_w - 3))
    report.evidence.append(_compare("0.686^3 >= atan(1/3)", Fraction(686, 1000) ** 3, enclose("atan_1_3").hi))
    report.evidence.append(_certificate("Q_mgeq3", Fraction(686, 1000), depth))
    report.evidence.append(_certificate("negP1prime_mono", Fraction(444, 1000), depth))

    t = sympy.symbols("t", positive=True)
    s = t ** 2 - 1
    sqrt2 = sympy.sqrt(2)
    printed = 16 * (1 + s) / (sqrt2 + sqrt2 * s + 2 * sympy.sqrt(1 + s)) ** 2
    report.evidence.append(_identity("prefactor = 16/(2 + sqrt(2) sqrt(1+s))^2", printed - 16 / (2 + sqrt2 * t) ** 2))
    # s = sqrt(1 - 4b^2) <= 1, so t = sqrt(1 + s) lies in (0, sqrt 2]; t = sqrt(2)/(1 + w) sweeps it
    b_real = sympy.symbols("b", real=True)
    report.evidence.append(_sign("1 - 4b^2 - 1 <= 0", -4 * b_real ** 2, nonnegative=False))
    report.evidence.append(_sign("prefactor - 1 >= 0 for t <= sqrt 2, equality at b = 0",
                                 16 / (2 + sqrt2 * (sqrt2 / (1 + w))) ** 2 - 1))
    box = (RationalInterval(Fraction(1, 100), Fraction(1, 2)),)
    report.evidence.append(_grid_evidence("prefactor >= 1 on [0.01, 1/2] by interval grid",
                                          grid_lower_bound(_prefactor_interval, box)))

    beta_max = obtuse_case3_beta_max()
    report.annotations.append(f"largest angle at (1, 0) on the case-2 curve: {beta_max:.6f} <= pi/4: "
                              f"{beta_max <= math.pi / 4}")
    points = [(a, b) for a in np.linspace(0.02, 0.5, 25) for b in np.linspace(0.02, 0.3, 15)
              if in_region((float(a), float(b)), "obtuse-case-3")]
    contained = all(sector_in_triangle(Triangle(float(a), float(b)), "right", radius=math.hypot(1.0 - a, b))
                    for a, b in points)
    report.annotations.append(f"sector at (1, 0) checked on {len(points)} sampled region points: {contained}")
    report.annotations.append("region replayed is the curve band intersected with b <= 3/10")


# --- upper-bound cases -------------------------------------------------------

def _sample_triangles(count: int, b_floor: float = 0.1) -> List[Triangle]:
    rng = np.random.default_rng(SAMPLE_SEED)
    triangles = []
    while len(triangles) < count:
        a = float(rng.uniform(0.0, 0.5))
        b = float(rng.uniform(b_floor, math.sqrt(3.0) / 2.0))
        if in_region((a, b), "T"):
            triangles.append(Triangle(a, b))
    return triangles


def _sample_kites(count: int) -> List[Kite]:
    rng = np.random.default_rng(SAMPLE_SEED + 1)
    kites = [Kite(1.0, 1.0, 1.0)]
    while len(kites) < count:
        p, q = rng.uniform(0.5, 1.5, size=2)
        s = rng.uniform(0.4, 1.5)
        kites.append(Kite(float(p), float(q), float(s)))
    return kites


def _metrics(shape) -> Dict[str, float]:
    if isinstance(shape, Triangle):
        data = derive(shape)
        return {"area": data.area, "P": data.perimeter}
    return {"area": shape.area, "P": shape.perimeter}


def _oracle_runs(shapes: Sequence, level: int, threads: int) -> List[Tuple[Any, Optional[Any]]]:
    def run(shape):
        try:
            return shape, spectral(shape, level)
        except PolyaVerifyError as e:
            logger.warning(f"Oracle failed on {shape}: {e}")
            return shape, None

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, shapes))


def _upper_chain_evidence(report: CaseReport, runs, domain_kind: str) -> None:
    eig_worst, torsion_worst, product_worst = math.inf, math.inf, math.inf
    done = 0
    for shape, result in runs:
        if result is None:
            continue
        metrics = {**_metrics(shape), "lambda1": result.lambda1, "T": result.T}
        chain = upper_chain(metrics, domain_kind)
        eig_cap = chain.details["eigen_cap"] * (1.0 + CAP_SLACK)
        eig_worst = min(eig_worst, eig_cap - chain.details["eigen_factor"])
        torsion_worst = min(torsion_worst, chain.details["torsion_cap"] - chain.details["torsion_factor"])
        product_worst = min(product_worst, chain.value * (1.0 + CAP_SLACK) - result.F)
        done += 1
    skipped = len(runs) - done
    if skipped:
        report.annotations.append(f"{skipped} sampled shapes skipped after oracle errors")
    if done == 0:
        report.evidence.append(Evidence("oracle samples", ORACLE, False, None, "no sample completed"))
        return
    report.evidence.append(Evidence("lambda1 area^2 / P^2 within its cap", ORACLE, eig_worst >= 0, eig_worst,
                                    f"{done} shapes"))
    report.evidence.append(Evidence("T P^2 / area^3 < 2/3", ORACLE, torsion_worst > 0, torsion_worst,
                                    f"{done} shapes"))
    report.evidence.append(Evidence("F within the product of the caps", ORACLE, product_worst >= 0, product_worst,
                                    f"{done} shapes"))


def _replay_upper_triangle(report: CaseReport, settings: VerifySettings) -> None:
    report.evidence.append(_compare("1/12 > (1/9)(2/3)", Fraction(1, 12), Fraction(1, 9) * Fraction(2, 3),
                                    strict=True, detail="2 pi^2/27 < pi^2/12"))
    shapes = _sample_triangles(settings.upper_sample_count)
    _upper_chain_evidence(report, _oracle_runs(shapes, UPPER_LEVEL, settings.threads), "triangle")


def _replay_upper_tangential(report: CaseReport, settings: VerifySettings) -> None:
    product = Fraction(1, 8) * Fraction(2, 3)
    report.evidence.append(Evidence("(1/8)(2/3) = 1/12", EXACT, product == Fraction(1, 12), 0.0,
                                    "pi^2/8 * 2/3 = pi^2/12"))
    shapes = _sample_kites(max(2, settings.upper_sample_count // 10))
    runs = _oracle_runs(shapes, UPPER_LEVEL, settings.threads)
    _upper_chain_evidence(report, runs, "tangential_quadrilateral")
    gaps = [thinning_upper(shape.area, shape.perimeter).value - result.F
            for shape, result in runs if result is not None]
    if gaps:
        report.evidence.append(Evidence("F below the thinning bound", ORACLE, min(gaps) >= 0, min(gaps),
                                        f"{len(gaps)} kites"))


def _pair_sum(x: Fraction, n_terms: int) -> Fraction:
    """(1 + x²) Σ 1/(p² q² (p² + x² q²)) over odd p, q < 2 n_terms."""
    odd = [2 * i + 1 for i in range(n_terms)]
    total = sum((Fraction(1, p * p * q * q) / (p * p + x * x * q * q) for p in odd for q in odd), Fraction(0))
    return (1 + x * x) * total


def _replay_rect_monotone(report: CaseReport, settings: VerifySettings) -> None:
    pairs = [(n, m) for n in range(64) for m in range(n)]
    gaps = [(2 * n + 1) ** 2 * (2 * m + 1) ** 2 * ((2 * n + 1) ** 2 - (2 * m + 1) ** 2) for n, m in pairs]
    report.evidence.append(Evidence("alpha > beta > 0 for all index pairs n > m, n < 64", EXACT,
                                    min(gaps) > 0, float(min(gaps)), f"{len(pairs)} pairs"))

    x, alpha, beta = sympy.symbols("x alpha beta", positive=True)
    g = (1 + x ** 2) / (alpha + beta * x ** 2) + (1 + x ** 2) / (beta + alpha * x ** 2)
    claimed = (2 * (alpha - beta) ** 2 * (alpha + beta) * x * (x ** 4 - 1)
               / ((beta + alpha * x ** 2) ** 2 * (alpha + beta * x ** 2) ** 2))
    report.evidence.append(_identity("g'(x) = 2(alpha-beta)^2(alpha+beta)x(x^4-1)/(...)", sympy.diff(g, x) - claimed))
    report.evidence.append(_identity("x(x^4 - 1) = x(x - 1)(x + 1)(x^2 + 1)",
                                     x * (x ** 4 - 1) - x * (x - 1) * (x + 1) * (x ** 2 + 1)))

    xs = [Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3), Fraction(5), Fraction(10)]
    sums = [_pair_sum(v, 6) for v in xs]
    steps = [right - left for left, right in zip(sums, sums[1:])]
    report.evidence.append(Evidence("truncated sums nondecreasing at x = 1, 3/2, 2, 3, 5, 10", EXACT,
                                    min(steps) >= 0, float(min(steps)), "36 terms each"))
    pi6 = enclose("pi_2") ** 3
    report.evidence.append(_compare("64 * 24 > pi^6", 64 * 24, pi6.hi, strict=True,
                                    detail="F(R) >= 64/pi^4 > pi^2/24"))
    limit = Fraction(64) * Fraction(1, 8) * Fraction(1, 96)
    report.evidence.append(Evidence("64 (1/8)(1/96) = 1/12", EXACT, limit == Fraction(1, 12), 0.0,
                                    "limit pi^2/12 as a -> infinity"))

    scan = rect_monotonicity_scan([1.0 + 0.5 * i for i in range(19)], settings.series_terms)
    report.annotations.append(f"series scan a in [1, 10]: nondecreasing {scan['nondecreasing']}, "
                              f"worst step {scan['worst_step']:.3e}, "
                              f"gap to pi^2/12 at a = 10: {scan['limit_gap']:.6f}")


def _replay_sharpness_thinning(report: CaseReport, settings: VerifySettings) -> None:
    heights = (0.2, 0.1, 0.05)
    triangles = [Triangle(0.5, b) for b in heights]
    runs = _oracle_runs(triangles, THINNING_LEVEL, settings.threads)
    if any(result is None for _, result in runs):
        report.evidence.append(Evidence("oracle on thin isosceles triangles", ORACLE, False, None,
                                        "an oracle run failed"))
        return
    values = [result.F for _, result in runs]
    steps = [left - right for left, right in zip(values, values[1:])]
    report.evidence.append(Evidence("F decreases as b shrinks", ORACLE, min(steps) > 0, min(steps),
                                    ", ".join(f"F({b}) = {v:.6f}" for b, v in zip(heights, values))))
    caps = [thinning_upper(**_thin_metrics(tri)).value - v for tri, v in zip(triangles, values)]
    report.evidence.append(Evidence("F below the thinning bound", ORACLE, min(caps) > 0, min(caps)))
    floors = [v - LOWER_TARGET for v in values]
    report.evidence.append(Evidence("F above pi^2/24", ORACLE, min(floors) > 0, min(floors)))
    report.evidence.append(Evidence("F(1/2, 0.05) < 0.48", ORACLE, values[-1] < 0.48, 0.48 - values[-1]))


def _thin_metrics(tri: Triangle) -> Dict[str, float]:
    data = derive(tri)
    return {"area": data.area, "P": data.perimeter}


_REPLAYS: Dict[str, Callable[[CaseReport, VerifySettings], None]] = {
    "acute-1a": _replay_acute_1a,
    "acute-1b": _replay_acute_1b,
    "acute-2": _replay_acute_2,
    "obtuse-1": _replay_obtuse_1,
    "obtuse-2": _replay_obtuse_2,
    "obtuse-3": _replay_obtuse_3,
    "upper-triangle": _replay_upper_triangle,
    "upper-tangential": _replay_upper_tangential,
    "rect-monotone": _replay_rect_monotone,
    "sharpness-thinning": _replay_sharpness_thinning,
}


def replay_case(case_id: str, settings: Optional[VerifySettings] = None) -> CaseReport:
    """
    Run one case's verification chain.

    Sub-check failures are recorded as failed evidence; library errors raised
    inside a chain become a failed evidence item carrying the message.
    """
    entry = _case_entry(case_id)
    settings = settings or VerifySettings()
    regions = entry.get("regions") or []
    report = CaseReport(case_id=case_id, region=", ".join(regions) or entry.get("title", ""))
    try:
        _REPLAYS[case_id](report, settings)
    except PolyaVerifyError as e:
        logger.error(f"Replay {case_id} stopped: {e}")
        report.evidence.append(Evidence("chain completed", EXACT, False, None, f"{type(e).__name__}: {e}"))
    logger.info(f"Replay {case_id}: {report.verdict} ({len(report.evidence)} checks)")
    return report


def replay_all(settings: Optional[VerifySettings] = None) -> List[CaseReport]:
    settings = settings or VerifySettings()
    ids = [case["id"] for case in _registry()]
    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        reports = list(pool.map(lambda cid: replay_case(cid, settings), ids))
    return sorted(reports, key=lambda r: r.case_id)


# --- sweeps ------------------------------------------------------------------

def _bound_gaps(tri: Triangle, result) -> Dict[str, float]:
    data = derive(tri)
    a, b = float(tri.a), float(tri.b)
    metrics = {"lambda1": result.lambda1, "T": result.T, "area": data.area, "P": data.perimeter}
    candidates = {
        "torsion_lb_equilateral_test": lambda: torsion_lb_equilateral_test(a, b).value - result.T,
        "torsion_lb_obtuse_test": lambda: torsion_lb_obtuse_test(a, b).value - result.T,
        "eig_lb_diameter_height": lambda: eig_lb_diameter_height(data.diameter, data.h_base).value - result.lambda1,
        "eig_lb_sector": lambda: eig_lb_sector(min(data.angles), 2.0 * data.area).value - result.lambda1,
        "thinning_upper": lambda: thinning_upper(data.area, data.perimeter).value - result.F,
        "upper_chain": lambda: upper_chain(metrics).value - result.F,
    }
    gaps = {}
    for name, gap in candidates.items():
        try:
            gaps[name] = gap()
        except PolyaVerifyError:
            continue
    return gaps


def _sweep_row(a: float, b: float, max_level: int) -> SweepRow:
    tri = Triangle(a, b)
    row = SweepRow(a=a, b=b, cls=classify(tri).value)
    try:
        result = spectral(tri, max_level)
    except PolyaVerifyError as e:
        logger.warning(f"Sweep row ({a:.6f}, {b:.6f}) failed: {e}")
        row.error = f"{type(e).__name__}: {e}"
        return row
    row.lambda1, row.T, row.torsion_max, row.F = result.lambda1, result.T, result.torsion_max, result.F
    row.margin_low = result.F - LOWER_TARGET
    row.margin_high = UPPER_TARGET - result.F
    row.bound_gaps = _bound_gaps(tri, result)
    if row.bound_violations:
        logger.warning(f"Row ({a:.6f}, {b:.6f}) bounds off the oracle: {row.bound_violations}")
    if not row.encloses:
        logger.warning(f"Row ({a:.6f}, {b:.6f}) leaves (pi^2/24, pi^2/12): F={result.F:.10g}")
    return row


def sweep_points(na: int, nb: int, b_min: float, b_max: float, chart: str = "T") -> List[Tuple[float, float]]:
    """Admissible grid points, sorted by (a, b)."""
    region = {"T": "T", "T_prime": "T_prime_acute"}.get(chart, chart)
    if na < 1 or nb < 1:
        raise DomainError("grid sizes must be at least 1")
    a_values = [0.5] if na == 1 else list(np.linspace(0.0, 0.5, na))
    b_values = [b_min] if nb == 1 else list(np.linspace(b_min, b_max, nb))
    points = [(float(a), float(b)) for a in a_values for b in b_values
              if b > 0 and in_region((float(a), float(b)), region)]
    return sorted(points)


def sweep_triangles(na: int, nb: int, b_min: float, b_max: float, chart: str = "T",
                    max_level: int = 7, threads: int = 1) -> List[SweepRow]:
    """
    Oracle F over a grid of the moduli space with every applicable bound gap.

    Rows whose solve fails carry the error and the sweep continues.
    """
    if b_min < 1e-3:
        raise DomainError(f"b_min must be at least 1e-3 for oracle rows, got {b_min}")
    points = sweep_points(na, nb, b_min, b_max, chart)
    logger.info(f"Sweeping {len(points)} admissible points at max level {max_level} on {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        rows = list(pool.map(lambda p: _sweep_row(p[0], p[1], max_level), points))
    failures = sum(1 for r in rows if r.error)
    violations = sum(1 for r in rows if r.error is None and not r.encloses)
    bound_violations = sum(1 for r in rows if r.bound_violations)
    logger.info(f"Sweep done: {len(rows)} rows, {failures} solver failures, {violations} enclosure violations, "
                f"{bound_violations} bound violations")
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], path: Union[str, Path]) -> Path:
    """Write the CSV and a sibling JSON holding the bound gaps."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.csv_fields())
    gaps = [{"a": r.a, "b": r.b, "bound_gaps": r.bound_gaps, "bound_violations": r.bound_violations,
             "error": r.error} for r in rows]
    path.with_suffix(".json").write_text(json.dumps(gaps, indent=2, sort_keys=True), encoding="utf-8")
    return path


def write_report(payload: Any, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
    return path


# --- rectangles --------------------------------------------------------------

def rect_monotonicity_scan(a_values: Sequence[float], n_terms: int = DEFAULT_TERMS) -> Dict[str, Any]:
    """
    F(R_{a,1}) along a sorted list of a >= 1.

    Returns:
        Per-value F and tail, whether the sequence is nondecreasing within twice
        the tails, whether the first value is the minimum and the last value's
        gap to pi^2/12
    """
    a_values = [float(a) for a in a_values]
    if not a_values:
        raise DomainError("a_values is empty")
    if any(a < 1.0 for a in a_values) or a_values != sorted(a_values):
        raise DomainError("a_values must be sorted and at least 1")
    series = [rect_F(Rectangle(a, 1.0), n_terms) for a in a_values]
    steps = [right.value - left.value + 2.0 * (left.tail_bound + right.tail_bound)
             for left, right in zip(series, series[1:])]
    values = [s.value for s in series]
    return {
        "values": [{"a": a, "F": s.value, "tail": s.tail_bound} for a, s in zip(a_values, series)],
        "nondecreasing": all(step >= 0 for step in steps),
        "worst_step": min(steps) if steps else 0.0,
        "minimum_at_first": values[0] <= min(values) + 2.0 * series[0].tail_bound,
        "limit_gap": UPPER_TARGET - values[-1],
        "limit_gap_relative": (UPPER_TARGET - values[-1]) / UPPER_TARGET,
        "lower_floor_ok": all(v >= 64.0 / math.pi ** 4 for v in values),
    }


def g_threshold() -> float:
    """Smallest a with (π²/8)(1 + 1/a²) <= 1.45."""
    return math.sqrt(5.0 * math.pi ** 2 / (58.0 - 5.0 * math.pi ** 2))


def rect_G(a: float, n_terms: int = DEFAULT_TERMS) -> float:
    """G(R_{a,1}) = λ1 ||u||∞, the torsion maximum sitting at the center."""
    rect = Rectangle(a, 1.0)
    return rect_lambda1(rect) * rect_center_torsion(rect, n_terms).value


def g_remark_check(a_values: Optional[Sequence[float]] = None, n_terms: int = DEFAULT_TERMS) -> Dict[str, Any]:
    """
    G(R_{a,1}) on a grid of a in [1, 10] against the square, with the strip
    bound (π²/8)(1 + 1/a²) used beyond the threshold.
    """
    if a_values is None:
        a_values = [1.0 + 0.25 * i for i in range(37)]
    square = Rectangle(1.0, 1.0)
    center = rect_center_torsion(square, n_terms)
    g_square = rect_lambda1(square) * center.value
    g_square_lower = rect_lambda1(square) * center.lower
    threshold = g_threshold()
    rows = []
    for a in a_values:
        g = rect_G(a, n_terms)
        strip = math.pi ** 2 / 8.0 * (1.0 + 1.0 / (a * a))
        rows.append({"a": a, "G": g, "strip_bound": strip, "beyond_threshold": a >= threshold})
    beyond = [r for r in rows if r["beyond_threshold"]]
    return {
        "G_square": g_square,
        "G_square_at_least_1_45": g_square_lower >= 1.45,
        "threshold": threshold,
        "rows": rows,
        "strip_bound_ok": all(r["strip_bound"] <= 1.45 for r in beyond),
        "square_dominates": all(r["G"] <= g_square for r in beyond),
    }
