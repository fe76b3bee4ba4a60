#!/usr/bin/env python3
"""
Tests for case replays, case functions, sweeps, report writers and rectangle checks.
"""

import csv
import json
import math
import tempfile
from fractions import Fraction
from pathlib import Path

import pytest

from constants import RationalInterval
from errors import DomainError, OutOfRegion, UnknownCase, UnknownName
from harness import (
    BOUND_SLACK,
    CSV_HEADER,
    EXACT,
    FAILED,
    ORACLE,
    VERIFIED,
    VERIFIED_NUMERICALLY,
    CaseContext,
    CaseReport,
    Evidence,
    SweepRow,
    case_function,
    g_remark_check,
    g_threshold,
    grid_lower_bound,
    list_cases,
    rect_monotonicity_scan,
    replay_case,
    sweep_points,
    sweep_triangles,
    write_report,
    write_sweep_csv,
)
from settings import VerifySettings

SMALL = VerifySettings(upper_sample_count=2, threads=1)


def test_case_registry():
    cases = list_cases()
    ids = [case["id"] for case in cases]
    print(f"📚 Registry: {ids}")
    assert ids[:6] == ["acute-1a", "acute-1b", "acute-2", "obtuse-1", "obtuse-2", "obtuse-3"]
    assert len(ids) == 10
    with pytest.raises(UnknownCase):
        replay_case("acute-3", SMALL)


def test_acute_corner_value():
    """g(1/2, 29/10) is an exact rational just above 1"""
    g = case_function("acute-1a.g", (Fraction(1, 2), Fraction(29, 10)))
    assert g == Fraction(501126, 495785)
    assert g > 1
    assert isinstance(case_function("acute-1a.g", (0.5, 2.9)), float)


def test_case_function_domains():
    with pytest.raises(UnknownName):
        case_function("acute-9.f", 0.1)
    with pytest.raises(OutOfRegion):
        case_function("obtuse-1.f", (Fraction(1, 2), Fraction(3, 5)))
    with pytest.raises(OutOfRegion):
        case_function("mgeq3.h", 0.0)
    with pytest.raises(OutOfRegion):
        case_function("mgeq3.f", 2.0)
    assert case_function("mgeq3.f", 3.0) >= 1.0

    t = Fraction(1, 10)
    curve_b = 2 * t * (1 - t) / (1 - t + t * t)
    assert case_function("obtuse-2.f", (t, curve_b)) == 1


def test_case_context():
    context = CaseContext.build("T", (Fraction(1, 10), Fraction(3, 10)))
    assert context.a_b == Fraction(1, 10)
    assert context.x_b == 3
    assert context.beta_b == pytest.approx(math.atan(1.0 / 3.0))

    prime = CaseContext.build("T_prime", (0.5, 2.0))
    assert prime.gamma_b == pytest.approx(math.atan(0.5))
    assert CaseContext.build("T", (0.5, 0.8)).a_b is None
    with pytest.raises(DomainError):
        CaseContext.build("T", (0.1, 0.0))
    with pytest.raises(DomainError):
        CaseContext.build("S", (0.1, 0.2))


def test_verdicts():
    report = CaseReport("x", "T")
    assert report.verdict == FAILED
    report.evidence.append(Evidence("exact", EXACT, True, 0.5))
    assert report.verdict == VERIFIED
    report.evidence.append(Evidence("solve", ORACLE, True, 0.1))
    assert report.verdict == VERIFIED_NUMERICALLY
    report.evidence.append(Evidence("bad", EXACT, False, -0.1))
    assert report.verdict == FAILED
    assert report.to_dict()["verdict"] == FAILED


def test_exact_replays_verify():
    """Cases settled by identities, rational checks and certificates"""
    print("🔁 Replaying exact cases...")
    for case_id in ("obtuse-1", "obtuse-2", "rect-monotone", "acute-1b", "acute-2"):
        report = replay_case(case_id, SMALL)
        print(f"   {case_id}: {report.verdict} ({len(report.evidence)} checks)")
        failed = [e.check for e in report.evidence if not e.passed]
        assert failed == []
        assert report.verdict == VERIFIED


def test_grid_replays_verify_numerically():
    print("🔁 Replaying grid cases...")
    for case_id in ("acute-1a", "obtuse-3"):
        report = replay_case(case_id, SMALL)
        print(f"   {case_id}: {report.verdict}")
        assert report.verdict == VERIFIED_NUMERICALLY
        assert report.annotations


def test_replay_chains_cover_whole_ranges():
    """obtuse-3 and acute-2 carry exact sign checks over their full parameter ranges"""
    obtuse = {e.check: e for e in replay_case("obtuse-3", SMALL).evidence}
    for check in ("r^2 - (2/5)^2 >= 0 for b <= 3/10",
                  "(1/2 + 2/5)/b - 3 >= 0 for b <= 3/10",
                  "1 - 4b^2 - 1 <= 0",
                  "prefactor - 1 >= 0 for t <= sqrt 2, equality at b = 0"):
        assert obtuse[check].method == EXACT
        assert obtuse[check].passed, obtuse[check].detail
    assert not any(check.startswith("2(1 + s)") for check in obtuse)

    acute = {e.check: e for e in replay_case("acute-2", SMALL).evidence}
    assert acute["gamma_b(3) = atan(1/3)"].passed
    assert acute["1/3 - 1/b >= 0 for b = 3(1 + w) >= 3, so gamma_b <= atan(1/3)"].passed
    assert acute["0.7 > atan(1/3), so gamma_b lies in (0, 0.7)"].passed
    assert acute["1/2, 3 in acute-case-2"].passed


def test_upper_triangle_replay():
    report = replay_case("upper-triangle", SMALL)
    print(f"🔁 upper-triangle: {report.verdict}")
    assert report.verdict == VERIFIED_NUMERICALLY


def test_grid_lower_bound():
    identity = lambda cell: cell[0]
    box = (RationalInterval(1, 2),)
    assert grid_lower_bound(identity, box, 1).success
    outcome = grid_lower_bound(identity, box, Fraction(3, 2), max_depth=4)
    assert not outcome.success
    assert outcome.witness[0].lo == 1
    assert outcome.depth == 4


def test_sweep_points():
    points = sweep_points(3, 3, 0.2, 0.8, "T")
    expected = [(0.25, 0.2), (0.25, 0.5), (0.5, 0.2), (0.5, 0.5), (0.5, 0.8)]
    assert len(points) == len(expected)
    for point, target in zip(points, expected):
        assert point == pytest.approx(target)
    with pytest.raises(DomainError):
        sweep_triangles(3, 3, 1e-4, 0.8)


def test_sweep_and_writers():
    """A two-point sweep lands inside (pi^2/24, pi^2/12) and round-trips through CSV"""
    rows = sweep_triangles(1, 2, 0.5, 0.8, max_level=5)
    assert [(r.a, r.b) for r in rows] == [(0.5, 0.5), (0.5, 0.8)]
    assert all(r.encloses for r in rows)
    assert "upper_chain" in rows[0].bound_gaps
    assert all(r.bound_violations == [] for r in rows)
    rows.append(SweepRow(a=0.5, b=0.001, cls="Acute", error="DegenerateShape: too thin"))

    with tempfile.TemporaryDirectory() as tmp:
        path = write_sweep_csv(rows, Path(tmp) / "out" / "sweep.csv")
        with path.open(newline="", encoding="utf-8") as f:
            table = list(csv.reader(f))
        assert table[0] == CSV_HEADER
        assert len(table) == 4
        assert table[3][3] == "nan"
        gaps = json.loads(path.with_suffix(".json").read_text(encoding="utf-8"))
        assert gaps[2]["error"].startswith("DegenerateShape")

        report_path = write_report({"b": 1, "a": [1, 2]}, Path(tmp) / "report.json")
        assert json.loads(report_path.read_text(encoding="utf-8")) == {"a": [1, 2], "b": 1}


def test_bound_violations():
    """Lower bounds may exceed the oracle and upper bounds undercut it only by BOUND_SLACK"""
    row = SweepRow(a=0.5, b=0.5, cls="Acute", bound_gaps={
        "upper_chain": -0.1,
        "thinning_upper": -BOUND_SLACK / 2,
        "torsion_lb_equilateral_test": BOUND_SLACK / 2,
        "eig_lb_diameter_height": 0.01,
        "eig_lb_sector": -5.0,
    })
    assert row.bound_violations == ["eig_lb_diameter_height", "upper_chain"]
    assert SweepRow(a=0.5, b=0.5, cls="Acute", bound_gaps={"upper_chain": 0.2}).bound_violations == []


def test_rectangle_scan():
    scan = rect_monotonicity_scan([1.0, 2.0, 4.0, 8.0, 100.0])
    print(f"📦 F(R_100,1) is {scan['limit_gap_relative']:.4%} below pi^2/12")
    assert scan["nondecreasing"]
    assert scan["worst_step"] >= 0
    assert scan["minimum_at_first"]
    assert scan["lower_floor_ok"]
    assert 0 < scan["limit_gap_relative"] < 0.01
    with pytest.raises(DomainError):
        rect_monotonicity_scan([2.0, 1.0])
    with pytest.raises(DomainError):
        rect_monotonicity_scan([0.5, 1.0])
    with pytest.raises(DomainError):
        rect_monotonicity_scan([])


def test_torsion_maximum_remark():
    assert g_threshold() == pytest.approx(2.388, abs=1e-3)
    assert math.pi ** 2 / 8.0 * (1.0 + 1.0 / g_threshold() ** 2) == pytest.approx(1.45, rel=1e-14)
    check = g_remark_check()
    assert check["G_square"] == pytest.approx(1.4542, abs=1e-3)
    assert check["G_square_at_least_1_45"]
    assert check["strip_bound_ok"]
    assert check["square_dominates"]


def main():
    """Run all harness tests"""
    print("🧪 HARNESS TESTS")
    print("=" * 50)
    test_case_registry()
    test_acute_corner_value()
    test_case_function_domains()
    test_case_context()
    test_verdicts()
    test_exact_replays_verify()
    test_grid_replays_verify_numerically()
    test_replay_chains_cover_whole_ranges()
    test_upper_triangle_replay()
    test_grid_lower_bound()
    test_sweep_points()
    test_sweep_and_writers()
    test_bound_violations()
    test_rectangle_scan()
    test_torsion_maximum_remark()
    print("\n✅ All harness tests passed!")


if __name__ == "__main__":
    main()
