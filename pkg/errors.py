#!/usr/bin/env python3
"""
Exception hierarchy for the Pólya functional verification toolkit.
"""

from fractions import Fraction
from typing import Optional


class PolyaVerifyError(Exception):
    """Base class for every error raised by the toolkit."""


class DegenerateTriangle(PolyaVerifyError):
    pass


class UnknownRegion(PolyaVerifyError):
    pass


class UnknownConstant(PolyaVerifyError):
    pass


class DivisionByIntervalContainingZero(PolyaVerifyError):
    pass


class AngleOutOfRange(PolyaVerifyError):
    pass


class ConvergenceFailure(PolyaVerifyError):
    pass


class DomainError(PolyaVerifyError):
    pass


class ValidityViolation(PolyaVerifyError):
    pass


class UnknownName(PolyaVerifyError):
    pass


class ZeroWidthInterval(PolyaVerifyError):
    pass


class DepthExhausted(PolyaVerifyError):
    """
    The certifier ran out of subdivision depth.

    The witness is the subinterval whose scan failed together with its reduced
    constant. point is a rational in (lo, hi] where the polynomial is positive,
    or None when sampling the subinterval found none.
    """

    def __init__(self, lo: Fraction, hi: Fraction, reduced_constant: Fraction,
                 depth: int, point: Optional[Fraction] = None):
        self.lo = lo
        self.hi = hi
        self.reduced_constant = reduced_constant
        self.depth = depth
        self.point = point
        super().__init__(
            f"certification failed on ({lo}, {hi}] at depth {depth}: "
            f"reduced constant {float(reduced_constant):.6g} > 0"
        )


class DegenerateShape(PolyaVerifyError):
    pass


class LevelTooHigh(PolyaVerifyError):
    pass


class SolverDivergence(PolyaVerifyError):
    pass


class NonContracting(PolyaVerifyError):
    pass


class OutOfRegion(PolyaVerifyError):
    pass


class UnknownCase(PolyaVerifyError):
    pass


class ConfigError(PolyaVerifyError):
    pass
