"""Lazily evaluable circle maps.

Constructed involutions and conjugators generally have infinitely many
breakpoints accumulating at fixed points of the dynamics, so they are kept as
expression trees of combinators and evaluated exactly point by point.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from app.engine.circle import Arc, CirclePoint, Closure, Rational, frac_mod, offset
from app.engine.dynamics import FixKind, SignatureWord, fixed_points, signature
from app.engine.errors import IterationCapExceeded, PreconditionError, SignatureMismatchError
from app.engine.matching import ComponentMatching, Pin
from app.engine.plmap import PLMap

logger = logging.getLogger(__name__)

DEFAULT_ITERATION_CAP = 1_000_000


class EvalMap:
    """Base class of the expression tree nodes."""

    node: str = ""

    def __call__(self, x: Rational) -> Fraction:
        raise NotImplementedError

    @property
    def degree(self) -> int:
        raise NotImplementedError

    def inverse(self) -> "EvalMap":
        return InverseOf(self)


@dataclass(frozen=True, eq=False)
class PL(EvalMap):
    map: PLMap
    node = "pl"

    def __call__(self, x: Rational) -> Fraction:
        return self.map(x)

    @property
    def degree(self) -> int:
        return self.map.degree

    def inverse(self) -> "PL":
        return PL(self.map.inverse())


def as_evalmap(m: Union[PLMap, EvalMap]) -> EvalMap:
    return PL(m) if isinstance(m, PLMap) else m


def identity_map() -> PL:
    return PL(PLMap.identity())


@dataclass(frozen=True, eq=False)
class Affine(EvalMap):
    """Affine bijection between closed arcs, start to start or start to end."""

    source: Arc
    target: Arc
    reversing: bool = False
    node = "affine"

    def __call__(self, x: Rational) -> Fraction:
        x = frac_mod(x)
        if x not in self.source.closed():
            raise PreconditionError(f"{x} outside the affine piece {self.source}")
        ls, lt = self.source.length, self.target.length
        s = Fraction(0) if ls == 0 else self.source.coordinate(x) / ls
        if self.reversing:
            return frac_mod(self.target.start + (1 - s) * lt)
        return frac_mod(self.target.start + s * lt)

    @property
    def degree(self) -> int:
        return -1 if self.reversing else 1

    def inverse(self) -> "Affine":
        return Affine(self.target, self.source, self.reversing)


def reflect_arc(arc: Arc) -> Affine:
    """The affine orientation reversing involution of a closed arc."""
    return Affine(arc.closed(), arc.closed(), reversing=True)


@dataclass(frozen=True, eq=False)
class Compose(EvalMap):
    """Composite applied right to left: Compose((a, b))(x) = a(b(x))."""

    maps: Tuple[EvalMap, ...]
    node = "compose"

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(as_evalmap(m) for m in self.maps))

    def __call__(self, x: Rational) -> Fraction:
        x = frac_mod(x)
        for m in reversed(self.maps):
            x = m(x)
        return x

    @property
    def degree(self) -> int:
        d = 1
        for m in self.maps:
            d *= m.degree
        return d

    def inverse(self) -> "Compose":
        return Compose(tuple(m.inverse() for m in reversed(self.maps)))


def compose(*maps: Union[PLMap, EvalMap]) -> EvalMap:
    if len(maps) == 1:
        return as_evalmap(maps[0])
    return Compose(tuple(maps))


@dataclass(frozen=True, eq=False)
class InverseOf(EvalMap):
    inner: EvalMap
    node = "inverse"
    _resolved: Optional[EvalMap] = field(default=None, compare=False, repr=False)

    def _target(self) -> EvalMap:
        if self._resolved is None:
            if isinstance(self.inner, InverseOf):
                resolved = self.inner.inner
            else:
                resolved = type(self.inner).inverse(self.inner)
                if isinstance(resolved, InverseOf):
                    raise PreconditionError(f"{self.inner.node} node has no declared inverse")
            object.__setattr__(self, "_resolved", resolved)
        return self._resolved

    def __call__(self, x: Rational) -> Fraction:
        return self._target()(x)

    @property
    def degree(self) -> int:
        return self.inner.degree

    def inverse(self) -> EvalMap:
        return self.inner


def _image_arc(m: EvalMap, arc: Arc) -> Arc:
    a, b = m(arc.start), m(arc.end)
    if m.degree == -1:
        a, b = b, a
    return Arc(a, b, Closure.CLOSED, arc.wraps)


@dataclass(frozen=True, eq=False)
class Piecewise(EvalMap):
    """Maps defined piece by piece on closed arcs covering the circle.

    Pieces have disjoint interiors and must agree exactly wherever they meet.
    A partial map covers only part of the circle.
    """

    pieces: Tuple[Tuple[Arc, EvalMap], ...]
    partial: bool = False
    node = "piecewise"

    def __post_init__(self):
        pieces = tuple((arc.closed(), as_evalmap(m)) for arc, m in self.pieces)
        object.__setattr__(self, "pieces", pieces)
        if not pieces:
            raise PreconditionError("piecewise map without pieces")
        total = sum((arc.length for arc, _ in pieces), Fraction(0))
        if total != 1 and not self.partial:
            raise PreconditionError(f"pieces cover a total length of {total}, not the circle")
        for i, (arc, m) in enumerate(pieces):
            for x in (arc.start, arc.end):
                for j, (other, n) in enumerate(pieces):
                    if j != i and x in other and m(x) != n(x):
                        raise PreconditionError(
                            f"pieces {i} and {j} disagree at {x}: {m(x)} != {n(x)}")

    def __call__(self, x: Rational) -> Fraction:
        x = frac_mod(x)
        for arc, m in self.pieces:
            if x in arc:
                return m(x)
        raise PreconditionError(f"{x} is not covered by any piece")

    @property
    def degree(self) -> int:
        return self.pieces[0][1].degree

    def inverse(self) -> "Piecewise":
        return Piecewise(tuple((_image_arc(m, arc), m.inverse()) for arc, m in self.pieces), self.partial)


@dataclass(frozen=True, eq=False)
class EquivariantExtension(EvalMap):
    """Conjugacy k with k o f = g o k on an invariant arc, grown from a fundamental domain.

    On the arc between x0 and f(x0) (half-open, closed at the end nearer the arc
    start) k is affine onto the arc between y0 and g(y0); elsewhere
    k = g^n o k0 o f^-n for the unique n landing f^-n(x) in that domain. The
    endpoints of the source arc go to the endpoints of the target arc, swapped
    when reversing.
    """

    source: Arc
    f: EvalMap
    target: Arc
    g: EvalMap
    x0: Fraction
    y0: Fraction
    reversing: bool = False
    cap: int = DEFAULT_ITERATION_CAP
    node = "extension"

    def __post_init__(self):
        object.__setattr__(self, "f", as_evalmap(self.f))
        object.__setattr__(self, "g", as_evalmap(self.g))
        object.__setattr__(self, "x0", frac_mod(self.x0))
        object.__setattr__(self, "y0", frac_mod(self.y0))
        if self.x0 not in self.source.interior() or self.y0 not in self.target.interior():
            raise PreconditionError("base points must be interior to their arcs")
        u0, u1 = self._u(self.x0), self._u(self.f(self.x0))
        v0, v1 = self._v(self.y0), self._v(self.g(self.y0))
        if u0 == u1 or v0 == v1:
            raise PreconditionError("generator fixes the base point of the fundamental domain")
        if ((u1 > u0) == (v1 > v0)) == self.reversing:
            raise SignatureMismatchError("generators move points in incompatible directions")

    def _u(self, x: Fraction) -> Fraction:
        return offset(self.source.start, x)

    def _v(self, y: Fraction) -> Fraction:
        return offset(self.target.start, y)

    def base(self, z: Fraction) -> Fraction:
        u0, u1 = self._u(self.x0), self._u(self.f(self.x0))
        v0, v1 = self._v(self.y0), self._v(self.g(self.y0))
        v = v0 + (self._u(z) - u0) * (v1 - v0) / (u1 - u0)
        return frac_mod(self.target.start + v)

    def __call__(self, x: Rational) -> Fraction:
        z = frac_mod(x)
        if z == self.source.start:
            return self.target.end if self.reversing else self.target.start
        if z == self.source.end and not self.source.wraps:
            return self.target.start if self.reversing else self.target.end
        if z not in self.source.interior():
            raise PreconditionError(f"{z} outside the invariant arc {self.source}")
        f_inv = self.f.inverse()
        u0, u1 = self._u(self.x0), self._u(self.f(self.x0))
        lo, hi = min(u0, u1), max(u0, u1)
        forward = u1 > u0
        n = 0
        u = self._u(z)
        while not lo <= u < hi:
            if abs(n) >= self.cap:
                raise IterationCapExceeded(frac_mod(x), abs(n))
            if (u >= hi) == forward:
                z, n = f_inv(z), n + 1
            else:
                z, n = self.f(z), n - 1
            u = self._u(z)
        y = self.base(z)
        step = self.g if n > 0 else self.g.inverse()
        for _ in range(abs(n)):
            y = step(y)
        return y

    @property
    def degree(self) -> int:
        return -1 if self.reversing else 1

    def inverse(self) -> "EquivariantExtension":
        return EquivariantExtension(self.target, self.g, self.source, self.f, self.y0, self.x0,
                                    self.reversing, self.cap)


def eval_map(m: Union[EvalMap, PLMap], x: Union[CirclePoint, Rational]) -> CirclePoint:
    value = x.value if isinstance(x, CirclePoint) else x
    return CirclePoint(as_evalmap(m)(value))


# constructions


def affine_through(source: Arc, target: Arc, knots: Sequence[Tuple[Fraction, Fraction]],
                   reversing: bool) -> List[Tuple[Arc, EvalMap]]:
    """Pieces of the PL bijection source -> target through interior knots."""
    ordered = sorted(knots, key=lambda k: source.coordinate(k[0]))
    xs = [source.start] + [k[0] for k in ordered] + [source.end]
    if reversing:
        ys = [target.end] + [k[1] for k in ordered] + [target.start]
    else:
        ys = [target.start] + [k[1] for k in ordered] + [target.end]
    pieces = []
    for i in range(len(xs) - 1):
        if xs[i] == xs[i + 1] and not (source.wraps and len(xs) == 2):
            continue
        a = Arc(xs[i], xs[i + 1], Closure.CLOSED, source.wraps and len(xs) == 2)
        b = Arc(ys[i + 1], ys[i], Closure.CLOSED) if reversing else Arc(ys[i], ys[i + 1], Closure.CLOSED)
        pieces.append((a, Affine(a, b, reversing)))
    return pieces


def _component_pieces(src: SignatureWord, dst: SignatureWord, i: int, j: int, reversing: bool,
                      pins: Sequence[Pin]) -> List[Tuple[Arc, EvalMap]]:
    if src.blocks[i].kind == FixKind.POINT:
        return []
    source, target = src.component_arc(i), dst.component_arc(j)
    knots = [(a, b) for a, b in pins
             if a in source.interior() and b in target.interior()]
    return affine_through(source, target, knots, reversing)


def equivariant_conjugator(f: PLMap, g: PLMap, matching: ComponentMatching,
                           cap: int = DEFAULT_ITERATION_CAP,
                           src: Optional[SignatureWord] = None,
                           dst: Optional[SignatureWord] = None) -> EvalMap:
    """A map k with k o f = g o k sending each fixed component of f onto its match.

    Fixed arcs go across affinely (through pinned points when present); every
    gap is conjugated by an equivariant extension based at gap midpoints.
    """
    src = src or signature(f)
    dst = dst or signature(g)
    if src.is_identity or dst.is_identity:
        if src.is_identity and dst.is_identity:
            return identity_map() if not matching.reversing else PL(PLMap.reflection(0))
        raise SignatureMismatchError("only the identity is conjugate to the identity")
    if len(src) != len(dst) or len(src) != matching.m:
        raise SignatureMismatchError(f"words of lengths {len(src)} and {len(dst)} cannot match")
    factor = matching.degree
    pieces: List[Tuple[Arc, EvalMap]] = []
    for i in range(matching.m):
        j, gj = matching.component(i), matching.gap(i)
        if src.blocks[i].kind != dst.blocks[j].kind:
            raise SignatureMismatchError(f"component {i} ({src.blocks[i].kind.value}) cannot go to a "
                                         f"{dst.blocks[j].kind.value}")
        if dst.blocks[gj].sign != factor * src.blocks[i].sign:
            raise SignatureMismatchError(f"gap {i} sign {src.blocks[i].sign:+d} cannot go to gap {gj} "
                                         f"sign {dst.blocks[gj].sign:+d}")
        pieces.extend(_component_pieces(src, dst, i, j, matching.reversing, matching.pins))
        source, target = src.gap(i), dst.gap(gj)
        ext = EquivariantExtension(source, f, target, g, source.midpoint(), target.midpoint(),
                                   matching.reversing, cap)
        pieces.append((source.closed(), ext))
    logger.debug("conjugator assembled from %d pieces", len(pieces))
    return Piecewise(tuple(pieces))


def reverse_on_arc(f: Union[PLMap, EvalMap], arc: Arc, cap: int = DEFAULT_ITERATION_CAP) -> EvalMap:
    """An orientation reversing involution r of the closed arc with r f r = f^-1 there.

    f is conjugated on the arc to a model map M that is itself reversed by the
    affine reflection of the arc; the reflection is transported back.
    """
    f = as_evalmap(f)
    if arc.is_full or arc.length == 0:
        raise PreconditionError(f"{arc} is not a proper invariant arc")
    if isinstance(f, PL):
        fix = fixed_points(f.map)
        for c in fix.components:
            if c.start in arc.interior() or c.end in arc.interior() or (
                    not c.is_point and arc.midpoint() in c.arc()):
                raise PreconditionError(f"fixed point {c} inside {arc}")
    mid = arc.midpoint()
    if f(mid) == mid:
        raise PreconditionError(f"fixed point {mid} inside {arc}")
    length = arc.length
    knee = length / 3 if offset(arc.start, f(mid)) > offset(arc.start, mid) else 2 * length / 3
    model = PLMap.through_points(1, [(arc.start, arc.start), (arc.point_at(knee), arc.point_at(length - knee))]
                                 if arc.wraps else
                                 [(arc.start, arc.start), (arc.point_at(knee), arc.point_at(length - knee)),
                                  (arc.end, arc.end)])
    phi = EquivariantExtension(arc, f, arc, PL(model), mid, mid, False, cap)
    r = reflect_arc(arc)
    return Compose((phi.inverse(), r, phi))
