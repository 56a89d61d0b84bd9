"""Exact points and anticlockwise arcs on the circle R/Z."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

from app.engine.errors import PreconditionError

Rational = Union[Fraction, int]


def frac_mod(q: Rational) -> Fraction:
    q = Fraction(q)
    return q - math.floor(q)


def parse_rational(text: str) -> Fraction:
    """Parse the "p/q" or "n" literal format shared by every JSON document."""
    text = text.strip()
    if not text or any(c in text for c in ".eE "):
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(text)


def format_rational(q: Rational) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, order=True)
class CirclePoint:
    value: Fraction

    def __post_init__(self):
        v = Fraction(self.value)
        if not 0 <= v < 1:
            raise ValueError(f"circle coordinate {v} outside [0,1); use canonicalize()")
        object.__setattr__(self, "value", v)

    def __str__(self) -> str:
        return format_rational(self.value)


def canonicalize(q: Rational) -> CirclePoint:
    return CirclePoint(frac_mod(q))


def offset(base: Rational, x: Rational) -> Fraction:
    """Anticlockwise distance from base to x, in [0,1)."""
    return frac_mod(Fraction(x) - Fraction(base))


class Closure(str, Enum):
    OPEN = "open"
    CLOSED = "closed"
    LEFT_CLOSED = "left_closed"  # [a,b)
    RIGHT_CLOSED = "right_closed"  # (a,b]


@dataclass(frozen=True)
class Arc:
    """Anticlockwise arc from start to end.

    When wraps is set the arc makes a full turn: with closed closure it is the
    whole circle, with open closure it is the circle punctured at start.
    """

    start: Fraction
    end: Fraction
    closure: Closure = Closure.OPEN
    wraps: bool = False

    def __post_init__(self):
        object.__setattr__(self, "start", frac_mod(self.start))
        object.__setattr__(self, "end", frac_mod(self.end))
        if self.wraps and self.start != self.end:
            raise ValueError("a full-turn arc must start and end at the same point")

    @classmethod
    def full_circle(cls) -> "Arc":
        return cls(Fraction(0), Fraction(0), Closure.CLOSED, wraps=True)

    @classmethod
    def punctured(cls, p: Rational) -> "Arc":
        return cls(Fraction(p), Fraction(p), Closure.OPEN, wraps=True)

    @property
    def is_full(self) -> bool:
        return self.wraps and self.closure == Closure.CLOSED

    @property
    def length(self) -> Fraction:
        if self.wraps:
            return Fraction(1)
        return offset(self.start, self.end)

    @property
    def is_empty(self) -> bool:
        return not self.wraps and self.start == self.end and self.closure != Closure.CLOSED

    def closed(self) -> "Arc":
        return Arc(self.start, self.end, Closure.CLOSED, self.wraps)

    def interior(self) -> "Arc":
        return Arc(self.start, self.end, Closure.OPEN, self.wraps)

    def coordinate(self, x: Rational) -> Fraction:
        """Position of x along the arc: 0 at start, length at end of a proper arc."""
        return offset(self.start, x)

    def point_at(self, u: Rational) -> Fraction:
        return frac_mod(self.start + Fraction(u))

    def midpoint(self) -> Fraction:
        return self.point_at(self.length / 2)

    def contains(self, x: Rational) -> bool:
        x = frac_mod(x)
        if self.wraps:
            return self.closure == Closure.CLOSED or x != self.start
        length = self.length
        d = offset(self.start, x)
        if x == self.start:
            return self.closure in (Closure.CLOSED, Closure.LEFT_CLOSED)
        if x == self.end:
            return self.closure in (Closure.CLOSED, Closure.RIGHT_CLOSED)
        return 0 < d < length

    def __contains__(self, x: Rational) -> bool:
        return self.contains(x)

    def __str__(self) -> str:
        left = "[" if self.closure in (Closure.CLOSED, Closure.LEFT_CLOSED) else "("
        right = "]" if self.closure in (Closure.CLOSED, Closure.RIGHT_CLOSED) else ")"
        return f"{left}{format_rational(self.start)},{format_rational(self.end)}{right}"


def arc_between(a: Union[CirclePoint, Rational], b: Union[CirclePoint, Rational], closure: Closure = Closure.OPEN) -> Arc:
    a = a.value if isinstance(a, CirclePoint) else a
    b = b.value if isinstance(b, CirclePoint) else b
    return Arc(Fraction(a), Fraction(b), Closure(closure))


def cyclic_less(u: Union[CirclePoint, Rational], v: Union[CirclePoint, Rational], arc: Arc) -> bool:
    """True iff the open anticlockwise arc (u, v) lies inside arc."""
    u = u.value if isinstance(u, CirclePoint) else frac_mod(u)
    v = v.value if isinstance(v, CirclePoint) else frac_mod(v)
    if arc.is_full:
        raise PreconditionError("cyclic order inside the full circle is undefined")
    if u not in arc or v not in arc:
        raise PreconditionError(f"points {u}, {v} must lie in {arc}")
    if u == v:
        return False
    if arc.wraps:
        # punctured circle: the puncture is the only excluded point
        return offset(arc.start, u) < offset(arc.start, v)
    return arc.coordinate(u) < arc.coordinate(v)


def strictly_between(a: Rational, x: Rational, b: Rational) -> bool:
    """x lies in the open anticlockwise arc (a, b); (a, a) is the punctured circle."""
    a, x, b = frac_mod(a), frac_mod(x), frac_mod(b)
    if x == a:
        return False
    if a == b:
        return True
    return 0 < offset(a, x) < offset(a, b)
