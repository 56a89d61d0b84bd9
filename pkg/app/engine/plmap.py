"""Finite piecewise-linear circle homeomorphisms stored through their lifts."""
from __future__ import annotations

import logging
import math
from bisect import bisect_right
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

from app.engine.circle import CirclePoint, Rational, frac_mod, offset
from app.engine.errors import MapFormatError

logger = logging.getLogger(__name__)

Vertex = Tuple[Fraction, Fraction]


def _slope(p: Vertex, q: Vertex) -> Fraction:
    return (q[1] - p[1]) / (q[0] - p[0])


class PLMap:
    """Circle homeomorphism x -> F(x) mod 1 with F affine between vertices.

    The lift satisfies F(x + 1) = F(x) + degree. Instances are immutable and
    always held in canonical form (no collinear vertices, first y in [0,1)),
    so equality is syntactic.
    """

    __slots__ = ("degree", "vertices", "_xs", "_ys", "_inverse")

    def __init__(self, degree: int, vertices: Iterable[Sequence[Rational]]):
        if degree not in (1, -1):
            raise MapFormatError(f"degree must be 1 or -1, got {degree}")
        pts = [(Fraction(x), Fraction(y)) for x, y in vertices]
        if not pts:
            raise MapFormatError("a map needs at least one vertex")
        if len(pts) > 1 and pts[-1][0] == pts[0][0] + 1:
            # closing vertex x0 + 1, accepted when it repeats the lift relation
            if pts[-1][1] != pts[0][1] + degree:
                raise MapFormatError("closing vertex breaks F(x+1) = F(x) + degree", len(pts) - 1)
            pts = pts[:-1]
        for i, (x, _) in enumerate(pts):
            if not 0 <= x < 1:
                raise MapFormatError(f"x = {x} outside [0,1)", i)
            if i and x <= pts[i - 1][0]:
                raise MapFormatError("x coordinates must be strictly increasing", i)
        closed = pts + [(pts[0][0] + 1, pts[0][1] + degree)]
        for i in range(1, len(closed)):
            step = (closed[i][1] - closed[i - 1][1]) * degree
            if step <= 0:
                raise MapFormatError("lift is not strictly monotone (not a homeomorphism)", i % len(pts))
        self.degree = degree
        self.vertices = self._canonical(degree, pts)
        self._xs = [v[0] for v in self.vertices] + [self.vertices[0][0] + 1]
        self._ys = [v[1] for v in self.vertices] + [self.vertices[0][1] + degree]
        self._inverse: Optional[PLMap] = None

    @staticmethod
    def _canonical(degree: int, pts: list) -> Tuple[Vertex, ...]:
        n = len(pts)
        kept = []
        for i, v in enumerate(pts):
            prev = pts[i - 1] if i else (pts[-1][0] - 1, pts[-1][1] - degree)
            nxt = pts[i + 1] if i + 1 < n else (pts[0][0] + 1, pts[0][1] + degree)
            if _slope(prev, v) != _slope(v, nxt):
                kept.append(v)
        if not kept:
            # affine lift of slope +-1: a rotation or a reflection
            x0, y0 = pts[0]
            kept = [(Fraction(0), y0 - degree * x0)]
        shift = math.floor(kept[0][1])
        return tuple((x, y - shift) for x, y in kept)

    # construction helpers

    @classmethod
    def identity(cls) -> "PLMap":
        return cls(1, [(0, 0)])

    @classmethod
    def rotation(cls, r: Rational) -> "PLMap":
        return cls(1, [(0, frac_mod(r))])

    @classmethod
    def reflection(cls, c: Rational = 0) -> "PLMap":
        """The orientation reversing involution x -> c - x."""
        return cls(-1, [(0, frac_mod(c))])

    @classmethod
    def through_points(cls, degree: int, pairs: Iterable[Tuple[Rational, Rational]]) -> "PLMap":
        """The PL map, affine in between, sending each x to its paired y."""
        table = {}
        for x, y in pairs:
            x, y = frac_mod(x), frac_mod(y)
            if table.get(x, y) != y:
                raise MapFormatError(f"point {x} is sent to two different images")
            table[x] = y
        xs = sorted(table)
        if not xs:
            raise MapFormatError("no correspondences given")
        lifted = [table[xs[0]]]
        for a, b in zip(xs, xs[1:]):
            if degree == 1:
                lifted.append(lifted[-1] + offset(table[a], table[b]))
            else:
                lifted.append(lifted[-1] - offset(table[b], table[a]))
        return cls(degree, list(zip(xs, lifted)))

    # evaluation

    def lift(self, t: Rational) -> Fraction:
        t = Fraction(t)
        n = math.floor(t - self._xs[0])
        s = t - n
        i = bisect_right(self._xs, s) - 1
        x0, x1 = self._xs[i], self._xs[i + 1]
        y0, y1 = self._ys[i], self._ys[i + 1]
        return y0 + (y1 - y0) * (s - x0) / (x1 - x0) + n * self.degree

    def __call__(self, x: Rational) -> Fraction:
        return frac_mod(self.lift(x))

    def breakpoints(self) -> Tuple[Fraction, ...]:
        return tuple(self._xs[:-1])

    def slopes(self) -> Tuple[Fraction, ...]:
        return tuple(
            (self._ys[i + 1] - self._ys[i]) / (self._xs[i + 1] - self._xs[i]) for i in range(len(self.vertices))
        )

    # algebra

    def inverse(self) -> "PLMap":
        if self._inverse is None:
            swapped = []
            for x, y in self.vertices:
                n = math.floor(y)
                swapped.append((y - n, x - n * self.degree))
            swapped.sort()
            inv = PLMap(self.degree, swapped)
            inv._inverse = self
            self._inverse = inv
        return self._inverse

    def compose(self, other: "PLMap") -> "PLMap":
        """The map self o other (apply other first)."""
        other_inv = other.inverse()
        xs = set(other.breakpoints())
        xs.update(other_inv(x) for x in self.breakpoints())
        return PLMap(self.degree * other.degree, [(x, self.lift(other.lift(x))) for x in sorted(xs)])

    def __matmul__(self, other: "PLMap") -> "PLMap":
        return self.compose(other)

    def power(self, n: int) -> "PLMap":
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = PLMap.identity()
        while n:
            if n & 1:
                result = result @ base
            n >>= 1
            if n:
                base = base @ base
        return result

    def conjugate_by(self, h: "PLMap") -> "PLMap":
        """h o self o h^-1."""
        return h @ self @ h.inverse()

    def is_identity(self) -> bool:
        return self.degree == 1 and self.vertices == ((Fraction(0), Fraction(0)),)

    def is_involution(self) -> bool:
        return (self @ self).is_identity()

    def max_denominator(self) -> int:
        return max(max(x.denominator, y.denominator) for x, y in self.vertices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PLMap):
            return NotImplemented
        return self.degree == other.degree and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash((self.degree, self.vertices))

    def __repr__(self) -> str:
        body = ", ".join(f"({x},{y})" for x, y in self.vertices)
        return f"PLMap(degree={self.degree}, vertices=[{body}])"


def evaluate(f: PLMap, x: Union[CirclePoint, Rational]) -> CirclePoint:
    value = x.value if isinstance(x, CirclePoint) else x
    return CirclePoint(f(value))


def compose(f: PLMap, g: PLMap) -> PLMap:
    return f @ g


def invert(f: PLMap) -> PLMap:
    return f.inverse()


def is_involution(f: PLMap) -> bool:
    return f.is_involution()
