#!/usr/bin/env python3
"""
Command-line entry point.

Examples:
  python polya_verify.py compute --shape triangle --a 0.5 --b 0.8660254 --level 6
  python polya_verify.py compute --shape rect --a 1 --b 1 --terms 128
  python polya_verify.py sweep --grid 60x60 --bmin 0.02 --bmax 0.8660254 --out reports/sweep.csv
  python polya_verify.py certify --poly p2.json --dx 285/1000 --depth 40
  python polya_verify.py replay --case acute-1b --out reports/acute-1b.json
  python polya_verify.py replay --all
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from closed_forms import rect_center_torsion, rect_F, rect_lambda1, rect_torsion
from errors import DepthExhausted, DomainError, PolyaVerifyError
from geometry import Rectangle, Triangle, classify
from harness import FAILED, replay_all, replay_case, sweep_triangles, write_report, write_sweep_csv
from pde_oracle import spectral
from polycert import certificate_to_json, certify_nonpositive, failure_to_json, parse_rational, poly_from_json
from settings import VerifySettings, load_settings, with_overrides

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_DEPTH = 2


def _emit(payload: Any, out: Optional[str]) -> None:
    if out:
        path = write_report(payload, out)
        print(f"Wrote {path}")
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))


def _parse_grid(text: str):
    try:
        na, nb = (int(part) for part in text.lower().split("x"))
    except ValueError as e:
        raise DomainError(f"grid must look like NAxNB, got {text!r}") from e
    return na, nb


def rectangle_payload(a: float, b: float, terms: int, fem_level: Optional[int] = None) -> Dict[str, Any]:
    """Series values for R_{a,b}, plus the oracle when a level is given."""
    rect = Rectangle(a, b)
    torsion = rect_torsion(rect, terms)
    F = rect_F(rect, terms)
    center = rect_center_torsion(rect, terms)
    payload = {
        "a": a,
        "b": b,
        "lambda1": rect_lambda1(rect),
        "T": torsion.value,
        "T_tail": torsion.tail_bound,
        "F": F.value,
        "F_tail": F.tail_bound,
        "torsion_max": center.value,
        "terms": terms,
    }
    if fem_level is not None:
        payload["fem"] = spectral(rect, fem_level).to_dict()
    return payload


def cmd_compute(args, settings: VerifySettings) -> int:
    if args.shape == "triangle":
        tri = Triangle(args.a, args.b)
        payload = spectral(tri, args.level or settings.fem_max_level).to_dict()
        payload.update({"a": args.a, "b": args.b, "class": classify(tri).value})
    else:
        payload = rectangle_payload(args.a, args.b, args.terms or settings.series_terms, args.level)
    _emit(payload, args.out)
    return EXIT_OK


def cmd_sweep(args, settings: VerifySettings) -> int:
    na, nb = _parse_grid(args.grid) if args.grid else (settings.grid_na, settings.grid_nb)
    rows = sweep_triangles(
        na, nb,
        args.bmin if args.bmin is not None else settings.b_min,
        args.bmax if args.bmax is not None else settings.b_max,
        chart=args.chart,
        max_level=args.level or settings.fem_max_level,
        threads=settings.threads,
    )
    out = args.out or str(Path(settings.output_dir) / "sweep.csv")
    path = write_sweep_csv(rows, out)
    violations = [r for r in rows if r.error is None and not r.encloses]
    off_bounds = [r for r in rows if r.bound_violations]
    failures = [r for r in rows if r.error]
    print(f"Wrote {path}: {len(rows)} rows, {len(violations)} violations, "
          f"{len(off_bounds)} bound violations, {len(failures)} solver failures")
    return EXIT_FAILED if violations or off_bounds else EXIT_OK


def cmd_certify(args, settings: VerifySettings) -> int:
    poly = poly_from_json(Path(args.poly).read_text(encoding="utf-8"))
    dx = parse_rational(args.dx)
    depth = args.depth if args.depth is not None else settings.cert_max_depth
    try:
        certificate = certify_nonpositive(poly, dx, depth)
    except DepthExhausted as e:
        logger.warning(f"Certification failed: {e}")
        _emit(failure_to_json(dx, e), args.out)
        return EXIT_DEPTH
    _emit(certificate_to_json(certificate), args.out)
    return EXIT_OK


def cmd_replay(args, settings: VerifySettings) -> int:
    if args.all:
        reports = replay_all(settings)
    else:
        reports = [replay_case(args.case, settings)]
    for report in reports:
        print(f"{report.case_id}: {report.verdict}")
    payload = [r.to_dict() for r in reports] if args.all else reports[0].to_dict()
    _emit(payload, args.out)
    return EXIT_FAILED if any(r.verdict == FAILED for r in reports) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Verification toolkit for the Polya functional")
    parser.add_argument("--config", help="key=value settings file")
    parser.add_argument("--log-level", help="overrides LOG_LEVEL and the settings file")
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", help="lambda1, T and F of one shape")
    compute.add_argument("--shape", choices=["triangle", "rect"], required=True)
    compute.add_argument("--a", type=float, required=True)
    compute.add_argument("--b", type=float, required=True)
    compute.add_argument("--level", type=int, help="finite element max level")
    compute.add_argument("--terms", type=int, help="series terms for rectangles")
    compute.add_argument("--out")
    compute.set_defaults(handler=cmd_compute)

    sweep = sub.add_parser("sweep", help="oracle sweep over the triangle moduli space")
    sweep.add_argument("--grid", help="NAxNB, e.g. 60x60")
    sweep.add_argument("--bmin", type=float)
    sweep.add_argument("--bmax", type=float)
    sweep.add_argument("--chart", choices=["T", "T_prime"], default="T")
    sweep.add_argument("--level", type=int)
    sweep.add_argument("--out", help="CSV path; a .json with bound gaps is written beside it")
    sweep.set_defaults(handler=cmd_sweep)

    certify = sub.add_parser("certify", help="certify P <= 0 on (0, dx]")
    certify.add_argument("--poly", required=True, help="JSON file with rational coefficients")
    certify.add_argument("--dx", required=True, help="rational right end, e.g. 285/1000")
    certify.add_argument("--depth", type=int)
    certify.add_argument("--out")
    certify.set_defaults(handler=cmd_certify)

    replay = sub.add_parser("replay", help="replay a case chain")
    group = replay.add_mutually_exclusive_group(required=True)
    group.add_argument("--case")
    group.add_argument("--all", action="store_true")
    replay.add_argument("--out")
    replay.set_defaults(handler=cmd_replay)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(args.config)
        settings = with_overrides(settings, log_level=args.log_level)
        logging.basicConfig(level=getattr(logging, settings.log_level))
        return args.handler(args, settings)
    except DepthExhausted as e:
        logger.error(f"{e}")
        return EXIT_DEPTH
    except PolyaVerifyError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
