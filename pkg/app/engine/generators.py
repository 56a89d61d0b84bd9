"""Seeded generators of PL circle maps with prescribed dynamics.

Every generated map carries a construction certificate (word, periodic orbit
or involution factors) so corpora can be checked against what was built.
"""
import logging
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from app.engine.circle import format_rational
from app.engine.dynamics import FixKind, SignatureWord, fixed_points
from app.engine.errors import UnsatisfiableConstraintError
from app.engine.plmap import PLMap

logger = logging.getLogger(__name__)

Letter = Tuple[FixKind, int]

_LETTER = re.compile(r"([PA])([+\-−])")


def parse_word(text: str) -> List[Letter]:
    """Parse words such as "P+P-" or "A+P−" (P point, A arc)."""
    compact = re.sub(r"\s+", "", text)
    letters = []
    pos = 0
    for match in _LETTER.finditer(compact):
        if match.start() != pos:
            break
        kind = FixKind.POINT if match.group(1) == "P" else FixKind.ARC
        letters.append((kind, 1 if match.group(2) == "+" else -1))
        pos = match.end()
    if pos != len(compact) or not letters:
        raise UnsatisfiableConstraintError(f"cannot read signature word {text!r}")
    return letters


def format_word(letters: Sequence[Letter]) -> str:
    return "".join(("P" if kind == FixKind.POINT else "A") + ("+" if sign > 0 else "-") for kind, sign in letters)


@dataclass
class GeneratedMap:
    map: PLMap
    certificate: Dict[str, Any] = field(default_factory=dict)


def _cuts(rng: random.Random, count: int, denominator: int = 1024) -> List[Fraction]:
    picks = sorted(rng.sample(range(1, denominator), count))
    return [Fraction(p, denominator) for p in picks]


def _bump(rng: random.Random, start: Fraction, end: Fraction, sign: int, count: int) -> List[Tuple[Fraction, Fraction]]:
    """Vertices of a lift strictly above (sign +1) or below the diagonal on (start, end)."""
    length = end - start
    xs = [start + length * c for c in _cuts(rng, count)]
    spacing = min(b - a for a, b in zip([start] + xs, xs + [end]))
    return [(x, x + sign * spacing / 2 * Fraction(rng.randint(1, 15), 16)) for x in xs]


def _word_vertices(rng: random.Random, letters: Sequence[Letter], extra: Sequence[int]) -> List[Tuple[Fraction, Fraction]]:
    layout = SignatureWord.from_letters(letters)
    m = len(letters)
    vertices = []
    for i, block in enumerate(layout.blocks):
        vertices.append((block.start, block.start))
        if block.kind == FixKind.ARC:
            vertices.append((block.end, block.end))
        gap_end = Fraction(i + 1, m)
        vertices += _bump(rng, block.end, gap_end, block.sign, 1 + extra[i])
    return vertices


def _extras(rng: random.Random, letters: Sequence[Letter], budget: Optional[int]) -> List[int]:
    m = len(letters)
    if budget is None:
        return [rng.randint(0, 2) for _ in range(m)]
    needed = sum(2 if kind == FixKind.ARC else 1 for kind, _ in letters) + m
    if budget < needed:
        raise UnsatisfiableConstraintError(f"word {format_word(letters)} needs at least {needed} breakpoints")
    extras = [0] * m
    for j in range(budget - needed):
        extras[j % m] += 1
    return extras


def map_with_word(letters: Sequence[Letter], seed: int = 0, budget: Optional[int] = None) -> PLMap:
    """A degree one map whose signature word is exactly the given letters."""
    rng = random.Random(seed)
    return PLMap(1, _word_vertices(rng, letters, _extras(rng, letters, budget)))


def random_homeomorphism(rng: random.Random, degree: int = 1, vertices: int = 3, denominator: int = 32) -> PLMap:
    xs = [Fraction(0)] + _cuts(rng, vertices - 1, denominator)
    weights = [rng.randint(1, 8) for _ in range(vertices)]
    total = sum(weights)
    y = Fraction(rng.randrange(denominator), denominator)
    pts = []
    for x, w in zip(xs, weights):
        pts.append((x, y))
        y += degree * Fraction(w, total)
    return PLMap(degree, pts)


def _periodic(rng: random.Random, rho: Fraction, letters: Sequence[Letter], budget: Optional[int]) -> PLMap:
    q = rho.denominator
    block = PLMap(1, _word_vertices(rng, letters, _extras(rng, letters, budget)))
    scaled = [((x + j) / q, (y + j) / q) for j in range(q) for x, y in block.vertices]
    scaled.sort()
    return PLMap.rotation(rho) @ PLMap(1, scaled)


def random_pl_homeo(degree: int = 1, breakpoints: Optional[int] = None, seed: int = 0,
                    fixed_point_count: Optional[int] = None, word: Union[str, Sequence[Letter], None] = None,
                    rho: Optional[Fraction] = None, conjugate: bool = False) -> GeneratedMap:
    """A random PL map meeting the constraints, deterministic per seed."""
    rng = random.Random(seed)
    letters = parse_word(word) if isinstance(word, str) else (list(word) if word else None)
    if degree == -1:
        if letters or rho is not None or fixed_point_count not in (None, 2):
            raise UnsatisfiableConstraintError("orientation reversing maps have exactly two fixed points "
                                               "and no rotation number")
        f = random_homeomorphism(rng, -1, breakpoints or rng.randint(2, 5))
        fix = fixed_points(f)
        return GeneratedMap(f, {"construction": "reversing", "fixed_points": [str(c) for c in fix.components]})
    if degree != 1:
        raise UnsatisfiableConstraintError(f"degree must be 1 or -1, got {degree}")
    if letters and fixed_point_count is not None and fixed_point_count != len(letters):
        raise UnsatisfiableConstraintError(f"word {format_word(letters)} has {len(letters)} fixed components, "
                                           f"not {fixed_point_count}")
    if fixed_point_count == 0 and rho is None:
        rho = Fraction(1, 2)
    if rho is not None:
        rho = Fraction(rho)
        if not 0 <= rho < 1:
            raise UnsatisfiableConstraintError(f"rotation number {rho} outside [0,1)")
        if rho != 0 and fixed_point_count:
            raise UnsatisfiableConstraintError("a map with fixed points has rotation number 0")
        if rho == 0 and fixed_point_count == 0:
            raise UnsatisfiableConstraintError("a map with rotation number 0 has a fixed point")
    if rho is not None and rho != 0:
        letters = letters or [(FixKind.POINT, rng.choice((1, -1))) for _ in range(rng.randint(1, 2))]
        f = _periodic(rng, rho, letters, breakpoints)
        orbit = [Fraction(k, rho.denominator) for k in range(rho.denominator)]
        if conjugate:
            h = random_homeomorphism(rng)
            f = f.conjugate_by(h)
            orbit = sorted(h(x) for x in orbit)
        return GeneratedMap(f, {"construction": "periodic", "rho": format_rational(rho),
                                "orbit": [format_rational(x) for x in orbit], "period": rho.denominator,
                                "block_word": format_word(letters)})
    if letters is None and fixed_point_count:
        letters = [(FixKind.POINT, rng.choice((1, -1))) for _ in range(fixed_point_count)]
    if letters is None and rho == 0:
        letters = [(FixKind.POINT, rng.choice((1, -1))) for _ in range(rng.randint(1, 3))]
    if letters is None:
        f = random_homeomorphism(rng, 1, breakpoints or rng.randint(2, 5))
        return GeneratedMap(f, {"construction": "random"})
    f = PLMap(1, _word_vertices(rng, letters, _extras(rng, letters, breakpoints)))
    certificate: Dict[str, Any] = {"construction": "word", "word": format_word(letters)}
    if conjugate:
        h = random_homeomorphism(rng)
        f = f.conjugate_by(h)
        certificate["conjugated"] = True
    return GeneratedMap(f, certificate)


def involution_product(seed: int = 0) -> GeneratedMap:
    """An orientation reversing tau o sigma of a reversing and a preserving involution."""
    rng = random.Random(seed)
    while True:
        h, k = random_homeomorphism(rng), random_homeomorphism(rng)
        tau = PLMap.reflection(0).conjugate_by(h)
        sigma = PLMap.rotation(Fraction(1, 2)).conjugate_by(k)
        f = tau @ sigma
        if not f.is_involution():
            return GeneratedMap(f, {"construction": "involution_product"})


def mirrored_reversing(signs: Sequence[int], seed: int = 0, conjugate: bool = False) -> GeneratedMap:
    """x -> -g(x) with g supported on [0, 1/2] carrying the given gap signs.

    The square has word signs followed by their negated mirror image; a chiral
    result admits no reflection exchanging the fixed points 0 and 1/2.
    """
    rng = random.Random(seed)
    m = len(signs)
    bounds = [Fraction(0)] + [Fraction(1, 2) * c for c in _cuts(rng, m - 1, 256)] + [Fraction(1, 2)]
    vertices = []
    for i, sign in enumerate(signs):
        vertices.append((bounds[i], bounds[i]))
        vertices += _bump(rng, bounds[i], bounds[i + 1], sign, rng.randint(1, 2))
    vertices.append((Fraction(1, 2), Fraction(1, 2)))
    g = PLMap(1, vertices)
    f = PLMap.reflection(0) @ g
    if conjugate:
        f = f.conjugate_by(random_homeomorphism(rng))
    word = list(signs) + [-s for s in reversed(signs)]
    return GeneratedMap(f, {"construction": "mirrored_reversing",
                            "square_signs": "".join("+" if s > 0 else "-" for s in word)})


CHIRAL_WORD = "P+P+P-P+P-P-"
