"""Decision procedures for strong reversibility and conjugacy.

Every decision reduces to exact combinatorics on signature words: rotation
numbers first, then half-turn or reflection symmetries of the word of the
map (or of its first return power).
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

from app.engine.circle import format_rational, frac_mod
from app.engine.dynamics import (RationalRotation, RotationBracket, RotationNumberResult, SignatureWord,
                                 fixed_points, rotation_number, signature)
from app.engine.errors import PreconditionError, RotationNumberUnknown
from app.engine.matching import ComponentMatching, half_turn_matching, matching_candidates, reflection_matching
from app.engine.plmap import PLMap

logger = logging.getLogger(__name__)


class VerdictKind(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class Group(str, Enum):
    HPLUS = "H+"
    H = "H"


class Route(str, Enum):
    ROT0 = "rot0"
    TWO_I_REVERSING = "two_i_reversing"
    TWO_II = "two_ii"
    TWO_MINUS = "two_minus"
    THREE_INVOLUTIONS = "three_involutions"
    ROT_HALF_TRIVIAL = "rot_half_trivial"


@dataclass
class WitnessPlan:
    route: Route
    matching: Optional[ComponentMatching] = None
    period: int = 1
    rotation: Fraction = Fraction(0)
    notes: Dict[str, Any] = field(default_factory=dict)

    def describe(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"route": self.route.value, "period": self.period,
                               "rotation": format_rational(self.rotation)}
        if self.matching is not None:
            out["matching"] = self.matching.describe()
        if self.notes:
            out["notes"] = self.notes
        return out


@dataclass
class Verdict:
    verdict: VerdictKind
    group: Group
    reason: str
    plan: Optional[WitnessPlan] = None
    rotation: Optional[RotationNumberResult] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def is_yes(self) -> bool:
        return self.verdict == VerdictKind.YES


def _unknown(group: Group, bracket: RotationBracket) -> Verdict:
    return Verdict(VerdictKind.UNKNOWN, group,
                   f"rotation number not certified rational: it lies in [{format_rational(bracket.lo)}, "
                   f"{format_rational(bracket.hi)}] after {bracket.iterations} iterations", rotation=bracket)


def decide_strongly_reversible_hplus(f: PLMap, max_period: int = 64, max_iterations: int = 100000) -> Verdict:
    if f.degree != 1:
        raise PreconditionError("H+ decisions apply to orientation preserving maps")
    if f.is_involution():
        return Verdict(VerdictKind.YES, Group.HPLUS, "the map is an involution",
                       WitnessPlan(Route.ROT_HALF_TRIVIAL))
    rho = rotation_number(f, max_period, max_iterations)
    if isinstance(rho, RotationBracket):
        return _unknown(Group.HPLUS, rho)
    if rho.value == Fraction(1, 2):
        return Verdict(VerdictKind.NO, Group.HPLUS,
                       "rotation number 1/2: only involutions are strongly reversible in H+", rotation=rho)
    if rho.value != 0:
        return Verdict(VerdictKind.NO, Group.HPLUS,
                       f"rotation number {format_rational(rho.value)} is neither 0 nor 1/2", rotation=rho)
    word = signature(f)
    matching = half_turn_matching(word)
    if matching is None:
        reason = (f"signature word {word.render()} has odd length {len(word)}" if len(word) % 2
                  else f"signature word {word.render()} has no sign-flipping half turn")
        return Verdict(VerdictKind.NO, Group.HPLUS, reason, rotation=rho)
    return Verdict(VerdictKind.YES, Group.HPLUS, f"half turn of {word.render()} flips every sign",
                   WitnessPlan(Route.ROT0, matching), rotation=rho)


def _decide_reversing_degree(f: PLMap) -> Verdict:
    if f.is_involution():
        return Verdict(VerdictKind.YES, Group.H, "the map is an involution",
                       WitnessPlan(Route.TWO_MINUS, notes={"involution": True}))
    fix = fixed_points(f)
    a, b = fix.components[0].start, fix.components[1].start
    square = f @ f
    word = signature(square)
    matching = reflection_matching(word, pins=((a, b),))
    if matching is None:
        return Verdict(VerdictKind.NO, Group.H,
                       f"no reflection of the square's word {word.render()} exchanges the fixed points "
                       f"{format_rational(a)} and {format_rational(b)}")
    return Verdict(VerdictKind.YES, Group.H,
                   f"reflection axis {matching.axis} of {word.render()} exchanges the fixed points",
                   WitnessPlan(Route.TWO_MINUS, matching, period=2))


def decide_strongly_reversible_h(f: PLMap, max_period: int = 64, max_iterations: int = 100000) -> Verdict:
    if f.degree == -1:
        return _decide_reversing_degree(f)
    if f.is_involution():
        return Verdict(VerdictKind.YES, Group.H, "the map is an involution", WitnessPlan(Route.ROT_HALF_TRIVIAL))
    rho = rotation_number(f, max_period, max_iterations)
    if isinstance(rho, RotationBracket):
        return _unknown(Group.H, rho)
    if rho.value == 0:
        word = signature(f)
        matching = reflection_matching(word)
        if matching is not None:
            return Verdict(VerdictKind.YES, Group.H, f"reflection axis {matching.axis} preserves {word.render()}",
                           WitnessPlan(Route.TWO_I_REVERSING, matching), rotation=rho)
        matching = half_turn_matching(word)
        if matching is not None:
            return Verdict(VerdictKind.YES, Group.H, f"half turn of {word.render()} flips every sign",
                           WitnessPlan(Route.ROT0, matching), rotation=rho)
        return Verdict(VerdictKind.NO, Group.H,
                       f"signature word {word.render()} is chiral and has no sign-flipping half turn",
                       rotation=rho)
    q = rho.period
    power = f.power(q)
    word = signature(power)
    if word.is_identity:
        return Verdict(VerdictKind.YES, Group.H, f"f^{q} is the identity: conjugate to a rotation",
                       WitnessPlan(Route.TWO_II, period=q, rotation=rho.value), rotation=rho)
    matching = reflection_matching(word)
    if matching is None:
        return Verdict(VerdictKind.NO, Group.H, f"the word {word.render()} of f^{q} is chiral", rotation=rho)
    shift = word.index_of(f(word.blocks[0].start))
    compatible = all(matching.component(i + shift) == (matching.component(i) - shift) % len(word)
                     for i in range(len(word)))
    if not compatible:
        return Verdict(VerdictKind.NO, Group.H,
                       f"reflection of the word of f^{q} does not commute with the action of f", rotation=rho)
    return Verdict(VerdictKind.YES, Group.H,
                   f"reflection axis {matching.axis} preserves the word {word.render()} of f^{q}",
                   WitnessPlan(Route.TWO_II, matching, period=q, rotation=rho.value,
                               notes={"block_shift": shift, "commutes_with_f": compatible}),
                   rotation=rho)


# conjugacy


@dataclass
class ConjugacyPlan:
    """Data from which a conjugator c with c o f = g o c is realized."""

    f: PLMap
    g: PLMap
    epsilon: int
    kind: str
    matching: Optional[ComponentMatching] = None
    period: int = 1
    pins: Tuple[Tuple[Fraction, Fraction], ...] = ()

    def describe(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind, "epsilon": self.epsilon, "period": self.period}
        if self.matching is not None:
            out["matching"] = self.matching.describe()
        return out


def _certified(f: PLMap, max_period: int, max_iterations: int) -> RationalRotation:
    rho = rotation_number(f, max_period, max_iterations)
    if isinstance(rho, RotationBracket):
        raise RotationNumberUnknown(rho.lo, rho.hi, rho.iterations)
    return rho


def block_shift(f: PLMap, word: SignatureWord) -> int:
    """The r with f(C_i) = C_{i+r} for the fixed components of a power of f."""
    return word.index_of(f(word.blocks[0].start))


def commutes_with_dynamics(matching: ComponentMatching, shift_f: int, shift_g: int) -> bool:
    m = matching.m
    return all(matching.component((i + shift_f) % m) == (matching.component(i) + shift_g) % m
               and matching.gap((i + shift_f) % m) == (matching.gap(i) + shift_g) % m
               for i in range(m))


def _conjugate_preserving_degree(f: PLMap, g: PLMap, epsilon: int, max_period: int,
                                 max_iterations: int) -> Optional[ConjugacyPlan]:
    rf, rg = _certified(f, max_period, max_iterations), _certified(g, max_period, max_iterations)
    if rg.value != frac_mod(epsilon * rf.value):
        return None
    reversing = epsilon == -1
    q = rf.period
    wf = signature(f.power(q))
    wg = signature(g.power(q))
    if wf.is_identity or wg.is_identity:
        if wf.is_identity and wg.is_identity:
            return ConjugacyPlan(f, g, epsilon, "identity" if q == 1 else "periodic", period=q)
        return None
    shift_f = block_shift(f, wf) if q > 1 else 0
    shift_g = block_shift(g, wg) if q > 1 else 0
    for matching in matching_candidates(wf, wg, reversing):
        if q == 1:
            return ConjugacyPlan(f, g, epsilon, "fixed", matching)
        if commutes_with_dynamics(matching, shift_f, shift_g):
            return ConjugacyPlan(f, g, epsilon, "periodic", matching, period=q)
    return None


def _conjugate_reversing_degree(f: PLMap, g: PLMap, epsilon: int) -> Optional[ConjugacyPlan]:
    ff, fg = fixed_points(f), fixed_points(g)
    af, bf = ff.components[0].start, ff.components[1].start
    ag, bg = fg.components[0].start, fg.components[1].start
    if f.is_involution() or g.is_involution():
        if f.is_involution() and g.is_involution():
            return ConjugacyPlan(f, g, epsilon, "involutions", pins=((af, ag), (bf, bg)))
        return None
    wf, wg = signature(f @ f), signature(g @ g)
    for pins in (((af, ag), (bf, bg)), ((af, bg), (bf, ag))):
        for matching in matching_candidates(wf, wg, epsilon == -1, pins):
            return ConjugacyPlan(f, g, epsilon, "reversing", matching, period=2, pins=pins)
    return None


def conjugate_in_h(f: PLMap, g: PLMap, epsilon: int, max_period: int = 64,
                   max_iterations: int = 100000) -> Optional[ConjugacyPlan]:
    """A plan for a conjugator of degree epsilon taking f to g, or None if none exists.

    Raises RotationNumberUnknown when a rotation number cannot be certified.
    """
    if f.degree != g.degree:
        raise PreconditionError("maps of different degrees are never conjugate")
    if epsilon not in (1, -1):
        raise PreconditionError("epsilon must be +1 or -1")
    if f.degree == 1:
        plan = _conjugate_preserving_degree(f, g, epsilon, max_period, max_iterations)
    else:
        plan = _conjugate_reversing_degree(f, g, epsilon)
    logger.debug("conjugacy search (epsilon=%d) %s", epsilon, "found a plan" if plan else "found nothing")
    return plan


def reversibility_summary(f: PLMap, max_period: int = 64, max_iterations: int = 100000) -> Dict[str, Any]:
    """Whether f is conjugate to its inverse by preserving and by reversing maps."""
    if f.degree != 1:
        return {}
    inverse = f.inverse()
    try:
        return {
            "by_preserving": conjugate_in_h(f, inverse, 1, max_period, max_iterations) is not None,
            "by_reversing": conjugate_in_h(f, inverse, -1, max_period, max_iterations) is not None,
        }
    except RotationNumberUnknown:
        return {"by_preserving": None, "by_reversing": None}
