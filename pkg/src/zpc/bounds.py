"""Proportion bounds implied by a same-ordinate pair constant C, and the
thin-box hypothesis check around the critical line."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DomainError
from .zero_store import BETA_TOL, ZeroRecord, ZeroSet

# Largest box half-width parameter for which the (2/3, 2/3, 1/3) conclusions
# are known to follow.
THEOREM3_B = 0.3185
THEOREM3_CONCLUSIONS = {"simple": 2 / 3, "critical": 2 / 3, "simple_and_critical": 1 / 3}


def _clamp(x: Fraction) -> tuple[float, bool]:
    if x < 0:
        return 0.0, True
    if x > 1:
        return 1.0, True
    return float(x), False


@dataclass(frozen=True)
class ProportionBounds:
    """Asymptotic lower bounds for the proportions of simple zeros, zeros on
    the critical line, and simple zeros on the line."""

    c: float
    simple: float
    critical: float
    simple_and_critical: Optional[float]
    valid: bool
    clamped: bool = False

    def to_dict(self) -> dict:
        return {"c": self.c, "simple": self.simple, "critical": self.critical,
                "simple_and_critical": self.simple_and_critical, "valid": self.valid,
                "clamped": self.clamped}


def theorem2_bounds(c: float) -> ProportionBounds:
    """Bounds 2 - C, 2 - C and (for C < 3/2) 3 - 2C.

    ``valid`` is False outside 1 <= C < 2; C < 1 is impossible because the
    same-ordinate sum is at least N(T).  Out-of-range linear forms are
    clamped to [0, 1] and flagged.
    """
    if not math.isfinite(c):
        raise DomainError("C must be finite")
    cf = Fraction(c)
    valid = 1 <= cf < 2
    simple, cl1 = _clamp(2 - cf)
    both = None
    cl2 = False
    if 1 <= cf < Fraction(3, 2):
        both, cl2 = _clamp(3 - 2 * cf)
    return ProportionBounds(float(c), simple, simple, both, valid, cl1 or cl2)


@dataclass(frozen=True)
class BoxRegion:
    """|sigma - 1/2| < b / (2 log T) and T < t <= 2T."""

    b: float
    T: float

    def __post_init__(self):
        if not self.b > 0:
            raise DomainError("b must be positive")
        if not self.T >= 10:
            raise DomainError("T must be >= 10")

    @property
    def half_width(self) -> float:
        return self.b / (2 * math.log(self.T))


def in_box_region(record: ZeroRecord, box: BoxRegion) -> bool:
    """Strict in sigma and left-open in t.  Real parts within BETA_TOL of the
    edge count as on it, since b / (2 log T) is rarely representable."""
    return abs(record.beta - 0.5) < box.half_width - BETA_TOL and box.T < record.gamma <= 2 * box.T


@dataclass(frozen=True)
class Theorem3Report:
    b: float
    T: float
    in_window: int
    inside: int
    violations: list = field(default_factory=list)
    hypothesis_holds: bool = False
    conclusions: Optional[dict] = None
    note: str = ""

    def to_dict(self) -> dict:
        return {"b": self.b, "T": self.T, "in_window": self.in_window, "inside": self.inside,
                "violations": self.violations, "hypothesis_holds": self.hypothesis_holds,
                "conclusions": self.conclusions, "note": self.note}


def theorem3_report(zeros: ZeroSet, b: float, T: float) -> Theorem3Report:
    """Check that every record with T < gamma <= 2T lies in the box B_b.

    When it does and b <= 0.3185 the known consequences are attached; they
    are asymptotic statements conditional on the hypothesis, quoted rather
    than derived here.
    """
    box = BoxRegion(b, T)
    window = [r for r in zeros.records if T < r.gamma <= 2 * T]
    bad = [r for r in window if not in_box_region(r, box)]
    holds = not bad
    conclusions = dict(THEOREM3_CONCLUSIONS) if holds and b <= THEOREM3_B else None
    if not holds:
        note = f"{len(bad)} record(s) outside the box"
    elif conclusions is None:
        note = f"hypothesis holds but b = {b} exceeds {THEOREM3_B}; no conclusions attached"
    else:
        note = "asymptotic, hypothesis-conditional lower bounds"
    if not zeros.covers(T, 2 * T):
        note += "; zero set does not cover the whole window"
    return Theorem3Report(
        b=b, T=T, in_window=len(window), inside=len(window) - len(bad),
        violations=[{"gamma": r.gamma, "beta": r.beta, "multiplicity": r.multiplicity} for r in bad],
        hypothesis_holds=holds, conclusions=conclusions, note=note)
