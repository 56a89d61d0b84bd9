"""Exact dynamical invariants of PL circle maps.

Fixed sets are solved segmentwise on the lift, signature words record the
direction of motion between fixed components, and rotation numbers are either
certified rational (with a periodic witness) or reported as a rigorous bracket.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from app.engine.circle import Arc, Closure, Rational, format_rational, frac_mod, offset
from app.engine.errors import PreconditionError, RotationNumberUnknown
from app.engine.plmap import PLMap

logger = logging.getLogger(__name__)

# iterates whose denominators outgrow this are rounded outward to a dyadic grid
GRID_BITS = 64
DENOMINATOR_LIMIT = 1 << 256


class FixKind(str, Enum):
    POINT = "point"
    ARC = "arc"


@dataclass(frozen=True)
class FixComponent:
    start: Fraction
    end: Fraction

    @property
    def kind(self) -> FixKind:
        return FixKind.POINT if self.start == self.end else FixKind.ARC

    @property
    def is_point(self) -> bool:
        return self.start == self.end

    def arc(self) -> Arc:
        return Arc(self.start, self.end, Closure.CLOSED)

    def contains(self, x: Rational) -> bool:
        return self.arc().contains(x)

    def __str__(self) -> str:
        if self.is_point:
            return f"Point({format_rational(self.start)})"
        return f"Arc[{format_rational(self.start)},{format_rational(self.end)}]"


@dataclass(frozen=True)
class FixSet:
    components: Tuple[FixComponent, ...] = ()
    full: bool = False

    @property
    def is_empty(self) -> bool:
        return not self.full and not self.components

    def __len__(self) -> int:
        return len(self.components)

    def contains(self, x: Rational) -> bool:
        return self.full or any(c.contains(x) for c in self.components)

    def endpoints(self) -> Tuple[Fraction, ...]:
        pts = []
        for c in self.components:
            pts.append(c.start)
            if not c.is_point:
                pts.append(c.end)
        return tuple(pts)


def _order_from_zero(components: List[FixComponent]) -> Tuple[FixComponent, ...]:
    def key(c: FixComponent):
        if c.start == 0 or (not c.is_point and c.start > c.end):
            return Fraction(-1)
        return c.start

    return tuple(sorted(components, key=key))


def _lift_fixed_pieces(f: PLMap, shift: int) -> List[Tuple[Fraction, Fraction]]:
    """Solutions of F(x) = x + n over one period of the lift, as closed pieces."""
    xs, ys = f._xs, f._ys
    pieces = []
    for i in range(len(xs) - 1):
        a, b = xs[i], xs[i + 1]
        ga, gb = ys[i] - a - shift, ys[i + 1] - b - shift
        if ga == gb:
            if ga.denominator == 1:
                pieces.append((a, b))
            continue
        lo, hi = min(ga, gb), max(ga, gb)
        for n in range(math.ceil(lo), math.floor(hi) + 1):
            x = a + (n - ga) * (b - a) / (gb - ga)
            pieces.append((x, x))
    return pieces


def fixed_points(f: PLMap) -> FixSet:
    x0 = f._xs[0]
    pieces = sorted(_lift_fixed_pieces(f, 0))
    merged: List[List[Fraction]] = []
    for l, r in pieces:
        if merged and l <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], r)
        else:
            merged.append([l, r])
    if len(merged) == 1 and merged[0][0] == x0 and merged[0][1] == x0 + 1:
        return FixSet(full=True)
    components = []
    if len(merged) > 1 and merged[-1][1] == x0 + 1 and merged[0][0] == x0:
        last = merged.pop()
        merged[0] = [last[0] - 1, merged[0][1]]
    for l, r in merged:
        components.append(FixComponent(frac_mod(l), frac_mod(r)))
    fix = FixSet(_order_from_zero(components))
    if f.degree == -1 and (len(fix) != 2 or not all(c.is_point for c in fix.components)):
        raise AssertionError(f"orientation reversing map with fixed set {[str(c) for c in fix.components]}")
    return fix


def _translation_number(f: PLMap, p: Fraction) -> int:
    """The integer k with F(p) = p + k at a fixed point p."""
    k = f.lift(p) - p
    assert k.denominator == 1, "not a fixed point"
    return int(k)


def _sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


class SignatureFunction:
    """Pointwise signature of a degree one map with a fixed point."""

    def __init__(self, f: PLMap, fix: Optional[FixSet] = None):
        if f.degree != 1:
            raise PreconditionError("the signature is defined for orientation preserving maps")
        fix = fix if fix is not None else fixed_points(f)
        if fix.is_empty:
            raise PreconditionError("the signature is defined only for maps with a fixed point")
        self.f = f
        self.fix = fix
        self.k = 0 if fix.full else _translation_number(f, fix.components[0].start)

    def __call__(self, x: Rational) -> int:
        x = Fraction(x)
        return _sign(self.f.lift(x) - x - self.k)


def signature_value(f: PLMap, x: Rational) -> int:
    return SignatureFunction(f)(x)


@dataclass(frozen=True)
class WordBlock:
    kind: FixKind
    start: Fraction
    end: Fraction
    sign: int

    @property
    def letter(self) -> Tuple[FixKind, int]:
        return self.kind, self.sign


class WordStatus(str, Enum):
    WORD = "word"
    IDENTITY = "identity"
    NO_FIXED_POINTS = "no_fixed_points"


@dataclass(frozen=True)
class SignatureWord:
    """Cyclic word of fixed components, each followed by the sign of the next gap."""

    blocks: Tuple[WordBlock, ...] = ()
    status: WordStatus = WordStatus.WORD

    @classmethod
    def identity(cls) -> "SignatureWord":
        return cls((), WordStatus.IDENTITY)

    @classmethod
    def from_letters(cls, letters: Sequence[Tuple[Union[FixKind, str], int]]) -> "SignatureWord":
        """A word with the standard layout: component i starts at i/m."""
        m = len(letters)
        blocks = []
        for i, (kind, sign) in enumerate(letters):
            kind = FixKind(kind)
            start = Fraction(i, m)
            end = start if kind == FixKind.POINT else start + Fraction(1, 4 * m)
            blocks.append(WordBlock(kind, start, end, sign))
        return cls(tuple(blocks))

    @property
    def is_identity(self) -> bool:
        return self.status == WordStatus.IDENTITY

    def __len__(self) -> int:
        return len(self.blocks)

    def letters(self) -> Tuple[Tuple[FixKind, int], ...]:
        return tuple(b.letter for b in self.blocks)

    def signs(self) -> Tuple[int, ...]:
        return tuple(b.sign for b in self.blocks)

    def flipped(self) -> "SignatureWord":
        return SignatureWord(tuple(WordBlock(b.kind, b.start, b.end, -b.sign) for b in self.blocks), self.status)

    def component(self, i: int) -> FixComponent:
        b = self.blocks[i % len(self.blocks)]
        return FixComponent(b.start, b.end)

    def component_arc(self, i: int) -> Arc:
        return self.component(i).arc()

    def gap(self, i: int) -> Arc:
        """Open gap following component i."""
        m = len(self.blocks)
        here, nxt = self.blocks[i % m], self.blocks[(i + 1) % m]
        if m == 1 and here.kind == FixKind.POINT:
            return Arc.punctured(here.start)
        return Arc(here.end, nxt.start, Closure.OPEN)

    def index_of(self, x: Rational) -> int:
        for i in range(len(self.blocks)):
            if self.component(i).contains(x):
                return i
        raise PreconditionError(f"{x} is not a fixed point")

    def render(self) -> str:
        if self.is_identity:
            return "identity"
        if self.status == WordStatus.NO_FIXED_POINTS:
            return "no fixed points"
        glyph = {FixKind.POINT: "(•)", FixKind.ARC: "[•]"}
        return " ".join(f"{glyph[b.kind]}{'+' if b.sign > 0 else '−'}" for b in self.blocks)


def signature(f: PLMap, fix: Optional[FixSet] = None) -> SignatureWord:
    if f.degree != 1:
        raise PreconditionError("signature words are defined for orientation preserving maps")
    fix = fix if fix is not None else fixed_points(f)
    if fix.full:
        return SignatureWord.identity()
    if fix.is_empty:
        raise PreconditionError("signature is undefined for a map without fixed points")
    delta = SignatureFunction(f, fix)
    comps = fix.components
    blocks = []
    for i, c in enumerate(comps):
        nxt = comps[(i + 1) % len(comps)]
        length = offset(c.end, nxt.start) or Fraction(1)
        blocks.append(WordBlock(c.kind, c.start, c.end, delta(c.end + length / 2)))
    return SignatureWord(tuple(blocks))


@dataclass
class IdentityReport:
    passed: bool
    samples: int
    identity: Optional[str] = None
    counterexample: Optional[Fraction] = None


def signature_identities_check(f: PLMap, h: PLMap, samples: Sequence[Fraction]) -> IdentityReport:
    """Check both signature identities under conjugation and inversion at the samples."""
    delta = SignatureFunction(f)
    conj = SignatureFunction(f.conjugate_by(h))
    inv = SignatureFunction(f.inverse())
    h_inv = h.inverse()
    for x in samples:
        if conj(x) != h.degree * delta(h_inv(x)):
            return IdentityReport(False, len(samples), "conjugation", x)
        if inv(x) != -delta(x):
            return IdentityReport(False, len(samples), "inversion", x)
    return IdentityReport(True, len(samples))


# rotation numbers


@dataclass(frozen=True)
class RationalRotation:
    value: Fraction
    witness: Fraction
    period: int
    orbit: Tuple[Fraction, ...] = field(default=())

    @property
    def is_rational(self) -> bool:
        return True


@dataclass(frozen=True)
class RotationBracket:
    lo: Fraction
    hi: Fraction
    iterations: int

    @property
    def is_rational(self) -> bool:
        return False

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


RotationNumberResult = Union[RationalRotation, RotationBracket]


def _round_down(x: Fraction) -> Fraction:
    if x.denominator <= DENOMINATOR_LIMIT:
        return x
    return Fraction((x.numerator << GRID_BITS) // x.denominator, 1 << GRID_BITS)


def _round_up(x: Fraction) -> Fraction:
    if x.denominator <= DENOMINATOR_LIMIT:
        return x
    return Fraction(-((-x.numerator << GRID_BITS) // x.denominator), 1 << GRID_BITS)


class _LiftBracket:
    """Rigorous bounds on the rotation number of a normalized lift.

    Tracks lower and upper bounds of F^n(0); any orbit satisfies
    |F^n(x) - x - n rho| < 1, so each step yields an enclosing interval and the
    running intersection is kept.
    """

    def __init__(self, f: PLMap):
        self.f = f
        self.shift = math.floor(f.lift(0))
        self.low = Fraction(0)
        self.high = Fraction(0)
        self.n = 0
        self.lo = Fraction(0)
        self.hi = Fraction(1)

    def run(self, iterations: int) -> None:
        f, shift = self.f, self.shift
        while self.n < iterations:
            self.low = _round_down(f.lift(self.low) - shift)
            self.high = _round_up(f.lift(self.high) - shift)
            self.n += 1
            self.lo = max(self.lo, (self.low - 1) / self.n)
            self.hi = min(self.hi, (self.high + 1) / self.n)


def stern_brocot_candidates(lo: Fraction, hi: Fraction, max_q: int) -> List[Fraction]:
    """Reduced fractions in [lo, hi] inside (0,1) with denominator <= max_q.

    Found by mediant descent of the Stern-Brocot tree; ordered by denominator,
    then numerator.
    """
    found = []
    stack = [((0, 1), (1, 1))]
    while stack:
        (a, b), (c, d) = stack.pop()
        p, q = a + c, b + d
        if q > max_q:
            continue
        m = Fraction(p, q)
        if lo <= m <= hi:
            found.append(m)
        if lo < m:
            stack.append(((a, b), (p, q)))
        if m < hi:
            stack.append(((p, q), (c, d)))
    found.sort(key=lambda r: (r.denominator, r.numerator))
    return found


class PowerCache:
    """Memoized exact powers f^n."""

    def __init__(self, f: PLMap):
        self.f = f
        self._powers: Dict[int, PLMap] = {1: f}

    def __call__(self, n: int) -> PLMap:
        if n not in self._powers:
            self._powers[n] = self.f.power(n)
        return self._powers[n]


def _orbit(f: PLMap, x: Fraction, q: int) -> Tuple[Fraction, ...]:
    pts = [x]
    for _ in range(q - 1):
        pts.append(f(pts[-1]))
    return tuple(sorted(pts))


def rotation_number(f: PLMap, max_period: int = 64, max_iterations: int = 100000) -> RotationNumberResult:
    if f.degree != 1:
        raise PreconditionError("rotation numbers are defined for orientation preserving maps")
    fix = fixed_points(f)
    if not fix.is_empty:
        w = Fraction(0) if fix.full else fix.components[0].start
        return RationalRotation(Fraction(0), w, 1, (w,))
    bracket = _LiftBracket(f)
    bracket.run(min(max_iterations, 2 * max_period * max_period + 2))
    powers = PowerCache(f)
    for candidate in stern_brocot_candidates(bracket.lo, bracket.hi, max_period):
        q = candidate.denominator
        g = powers(q)
        gfix = fixed_points(g)
        if gfix.is_empty:
            continue
        w = Fraction(0) if gfix.full else gfix.components[0].start
        y = w
        for _ in range(q):
            y = f.lift(y) - bracket.shift
        if y - w == candidate.numerator:
            logger.debug("rotation number certified %s with witness %s", candidate, w)
            return RationalRotation(candidate, w, q, _orbit(f, w, q))
    bracket.run(max_iterations)
    logger.debug("rotation number bracketed in [%s, %s]", bracket.lo, bracket.hi)
    return RotationBracket(bracket.lo, bracket.hi, bracket.n)


def minimal_period(f: PLMap, result: Optional[RotationNumberResult] = None, max_period: int = 64,
                   max_iterations: int = 100000) -> Tuple[int, Fraction]:
    """n_f with a periodic witness, cross-checked by exact fixed-set computations."""
    if result is None:
        result = rotation_number(f, max_period, max_iterations)
    if isinstance(result, RotationBracket):
        raise RotationNumberUnknown(result.lo, result.hi, result.iterations)
    q = result.period
    g = PLMap.identity()
    for n in range(1, q + 1):
        g = g @ f
        empty = fixed_points(g).is_empty
        if n < q and not empty:
            raise AssertionError(f"f^{n} has fixed points although the certified period is {q}")
    if empty:
        raise AssertionError(f"f^{q} has no fixed points although the certified period is {q}")
    return q, result.witness
