"""Component matchings between signature words.

A word of length m is read as the doubled alternating sequence
C0 G0 C1 G1 ... (position 2i is component i, 2i+1 the gap after it).
Orientation preserving matchings shift it by an even amount; reversing
matchings reflect it through an axis c, and only even c keeps components on
components.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Tuple

from app.engine.dynamics import SignatureWord

logger = logging.getLogger(__name__)

Pin = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class ComponentMatching:
    m: int
    reversing: bool = False
    shift: int = 0
    axis: int = 0
    pins: Tuple[Pin, ...] = ()

    @property
    def orientation(self) -> str:
        return "reversing" if self.reversing else "preserving"

    @property
    def degree(self) -> int:
        return -1 if self.reversing else 1

    def component(self, i: int) -> int:
        if self.reversing:
            return (self.axis // 2 - i) % self.m
        return (i + self.shift) % self.m

    def gap(self, i: int) -> int:
        if self.reversing:
            return (self.axis // 2 - 1 - i) % self.m
        return (i + self.shift) % self.m

    def is_involutive(self) -> bool:
        return all(self.component(self.component(i)) == i for i in range(self.m))

    def describe(self) -> dict:
        out = {"orientation": self.orientation, "m": self.m}
        if self.reversing:
            out["axis"] = self.axis
        else:
            out["shift"] = self.shift
        if self.pins:
            out["pins"] = [[str(a), str(b)] for a, b in self.pins]
        return out


def _admissible(src: SignatureWord, dst: SignatureWord, matching: ComponentMatching, sign_factor: int) -> bool:
    for i in range(matching.m):
        if src.blocks[i].kind != dst.blocks[matching.component(i)].kind:
            return False
        if dst.blocks[matching.gap(i)].sign != sign_factor * src.blocks[i].sign:
            return False
    for a, b in matching.pins:
        if matching.component(src.index_of(a)) != dst.index_of(b):
            return False
    return True


def matching_candidates(src: SignatureWord, dst: SignatureWord, reversing: bool,
                        pins: Sequence[Pin] = ()) -> Iterator[ComponentMatching]:
    """Every matching src -> dst realizable by a conjugator of the given orientation.

    The conjugated map's sign at the image gap is deg(h) times the source sign.
    Shifts are scanned in increasing order, axes likewise. Of the 2m axes of
    the doubled sequence only the m even ones are tried; odd axes send
    components to gaps.
    """
    m = len(src)
    if m != len(dst) or m == 0:
        return
    sign_factor = -1 if reversing else 1
    if reversing:
        for c in range(0, 2 * m, 2):
            matching = ComponentMatching(m, True, axis=c, pins=tuple(pins))
            if _admissible(src, dst, matching, sign_factor):
                yield matching
    else:
        for k in range(m):
            matching = ComponentMatching(m, False, shift=k, pins=tuple(pins))
            if _admissible(src, dst, matching, sign_factor):
                yield matching


def half_turn_matching(w: SignatureWord) -> Optional[ComponentMatching]:
    """The shift by m/2 that flips every sign and keeps every kind, if any."""
    m = len(w)
    if m == 0 or m % 2:
        return None
    matching = ComponentMatching(m, False, shift=m // 2)
    if _admissible(w, w.flipped(), matching, 1):
        return matching
    return None


def reflection_matching(w: SignatureWord, pins: Sequence[Pin] = ()) -> Optional[ComponentMatching]:
    """First reflection axis preserving signs and kinds (and honoring pins)."""
    for matching in matching_candidates(w, w.flipped(), reversing=True, pins=pins):
        logger.debug("reflection axis %d accepted for word %s", matching.axis, w.render())
        return matching
    return None
