import itertools
import random
from fractions import Fraction

import pytest

from app.engine.dynamics import FixKind, SignatureWord, signature
from app.engine.errors import PreconditionError, RotationNumberUnknown
from app.engine.generators import (CHIRAL_WORD, involution_product, map_with_word, mirrored_reversing, parse_word,
                                   random_homeomorphism, random_pl_homeo)
from app.engine.matching import ComponentMatching, half_turn_matching, matching_candidates, reflection_matching
from app.engine.plmap import PLMap
from app.engine.reversibility import (Group, Route, VerdictKind, conjugate_in_h, decide_strongly_reversible_h,
                                      decide_strongly_reversible_hplus, reversibility_summary)

F = Fraction


def word(letters):
    return SignatureWord.from_letters(parse_word(letters))


def test_half_turn_matching_examples():
    """Test half_turn_matching - [P+,P-] has one, [P-] and the chiral word do not"""
    matching = half_turn_matching(word("P+P-"))
    assert matching == ComponentMatching(2, shift=1)
    assert half_turn_matching(word("P-")) is None
    assert half_turn_matching(word(CHIRAL_WORD)) is None


def test_reflection_matching_examples():
    assert reflection_matching(word("P-")) is not None
    assert reflection_matching(word("P+P+P-")) is not None
    assert reflection_matching(word(CHIRAL_WORD)) is None


def test_chiral_word_exhaustive_enumeration():
    """No axis and no shift relates the chiral word to the word of the inverse"""
    w = word(CHIRAL_WORD)
    assert list(matching_candidates(w, w.flipped(), reversing=True)) == []
    assert list(matching_candidates(w, w.flipped(), reversing=False)) == []


def test_matching_respects_kinds():
    w = word("A+P-")
    assert half_turn_matching(w) is None


def test_reflection_is_involutive_on_components():
    matching = reflection_matching(word("P+P+P-"))
    assert matching.is_involutive()


def test_pins_restrict_reflections():
    """The only sign-preserving reflection of P+P- exchanges the two points"""
    w = word("P+P-")
    assert reflection_matching(w, pins=((F(0), F(1, 2)),)).axis == 2
    assert reflection_matching(w, pins=((F(0), F(0)),)) is None


def test_decide_hplus_examples(two_point_map):
    half = decide_strongly_reversible_hplus(PLMap.rotation(F(1, 2)))
    assert half.verdict == VerdictKind.YES and half.plan.route == Route.ROT_HALF_TRIVIAL

    third = decide_strongly_reversible_hplus(PLMap.rotation(F(1, 3)))
    assert third.verdict == VerdictKind.NO
    assert "1/3" in third.reason

    verdict = decide_strongly_reversible_hplus(two_point_map)
    assert verdict.is_yes and verdict.group == Group.HPLUS
    assert verdict.plan.route == Route.ROT0
    assert verdict.plan.matching.shift == 1


def test_decide_hplus_rejects_reversing_maps():
    with pytest.raises(PreconditionError):
        decide_strongly_reversible_hplus(PLMap.reflection(0))


def test_decide_sawtooth(sawtooth):
    """Word [(P,-)] is reversed by an orientation reversing involution only"""
    assert decide_strongly_reversible_hplus(sawtooth).verdict == VerdictKind.NO
    verdict = decide_strongly_reversible_h(sawtooth)
    assert verdict.is_yes and verdict.plan.route == Route.TWO_I_REVERSING


def test_decide_rotation_quarter_in_h():
    verdict = decide_strongly_reversible_h(PLMap.rotation(F(1, 4)))
    assert verdict.is_yes
    assert verdict.plan.route == Route.TWO_II
    assert verdict.plan.period == 4


def test_decide_rotation_third_in_h():
    assert decide_strongly_reversible_h(PLMap.rotation(F(1, 3))).is_yes


def test_chiral_map_is_no_in_both_groups():
    f = map_with_word(parse_word(CHIRAL_WORD), seed=3)
    assert signature(f).letters() == tuple(parse_word(CHIRAL_WORD))
    assert decide_strongly_reversible_hplus(f).verdict == VerdictKind.NO
    assert decide_strongly_reversible_h(f).verdict == VerdictKind.NO


def test_unknown_when_rotation_number_not_certified():
    verdict = decide_strongly_reversible_hplus(PLMap.rotation(F(1, 101)), max_period=20, max_iterations=1000)
    assert verdict.verdict == VerdictKind.UNKNOWN
    assert decide_strongly_reversible_h(PLMap.rotation(F(1, 101)), 20, 1000).verdict == VerdictKind.UNKNOWN


def test_reversing_reflection_is_yes():
    verdict = decide_strongly_reversible_h(PLMap.reflection(F(1, 3)))
    assert verdict.is_yes and verdict.plan.route == Route.TWO_MINUS


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_involution_products_are_yes(seed):
    f = involution_product(seed).map
    verdict = decide_strongly_reversible_h(f)
    assert verdict.is_yes and verdict.plan.route == Route.TWO_MINUS


@pytest.mark.parametrize("seed", [0, 1])
def test_constrained_chiral_squares_are_no(seed):
    f = mirrored_reversing((1, 1, -1), seed=seed, conjugate=bool(seed)).map
    assert decide_strongly_reversible_h(f).verdict == VerdictKind.NO


def test_conjugate_in_h_finds_conjugates(two_point_map):
    h = PLMap(1, [(0, 0), (F(1, 3), F(1, 2))])
    plan = conjugate_in_h(two_point_map, two_point_map.conjugate_by(h), 1)
    assert plan is not None and plan.kind == "fixed"


def test_conjugate_in_h_refuses_sign_mismatch(sawtooth):
    assert conjugate_in_h(sawtooth.inverse(), sawtooth, 1) is None


def test_conjugate_in_h_needs_equal_degrees(sawtooth):
    with pytest.raises(PreconditionError):
        conjugate_in_h(sawtooth, PLMap.reflection(0), 1)


def test_conjugate_in_h_unknown_rotation():
    f = PLMap.rotation(F(1, 101))
    with pytest.raises(RotationNumberUnknown):
        conjugate_in_h(f, f, 1, max_period=20, max_iterations=1000)


def test_reversibility_summary(sawtooth, two_point_map):
    assert reversibility_summary(sawtooth) == {"by_preserving": False, "by_reversing": True}
    assert reversibility_summary(two_point_map) == {"by_preserving": True, "by_reversing": True}


def naive_half_turn_shifts(letters):
    """Shifts k of order two with kind[i+k] == kind[i] and sign[i+k] == -sign[i]."""
    m = len(letters)
    shifts = []
    for k in range(1, m):
        if (2 * k) % m:
            continue
        if all(letters[(i + k) % m] == (letters[i][0], -letters[i][1]) for i in range(m)):
            shifts.append(k)
    return shifts


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
def test_half_turn_matches_naive_scan(m):
    """Test half_turn_matching - agrees with a direct scan over every word of length m"""
    alphabet = [(kind, sign) for kind in (FixKind.POINT, FixKind.ARC) for sign in (1, -1)]
    for letters in itertools.product(alphabet, repeat=m):
        matching = half_turn_matching(SignatureWord.from_letters(letters))
        shifts = naive_half_turn_shifts(letters)
        if shifts:
            assert matching == ComponentMatching(m, shift=shifts[0])
        else:
            assert matching is None


def preserving_maps():
    return [
        map_with_word(parse_word("P+P-"), 0),
        map_with_word(parse_word("P+P+P-"), 1),
        map_with_word(parse_word("P+A+P-A-"), 2),
        map_with_word(parse_word(CHIRAL_WORD), 3),
        PLMap.rotation(F(1, 3)),
        random_pl_homeo(rho=F(1, 2), seed=7).map,
        random_pl_homeo(rho=F(2, 5), word="P+P-", seed=3).map,
    ]


def reversing_maps():
    return [PLMap.reflection(F(1, 5)), involution_product(1).map, mirrored_reversing((1, 1, -1), seed=0).map]


@pytest.mark.parametrize("degree", [1, -1])
def test_verdicts_are_conjugacy_invariant(degree):
    """Test decide - conjugating by a PL map of either degree keeps every verdict"""
    rng = random.Random(degree + 10)
    for f in preserving_maps():
        g = f.conjugate_by(random_homeomorphism(rng, degree, 3))
        assert decide_strongly_reversible_hplus(g).verdict == decide_strongly_reversible_hplus(f).verdict
        assert decide_strongly_reversible_h(g).verdict == decide_strongly_reversible_h(f).verdict
    for f in reversing_maps():
        g = f.conjugate_by(random_homeomorphism(rng, degree, 3))
        assert decide_strongly_reversible_h(g).verdict == decide_strongly_reversible_h(f).verdict


def test_hplus_yes_implies_h_yes():
    rng = random.Random(4)
    maps = preserving_maps() + [random_pl_homeo(word=w, seed=s).map for w in ("P+P-P-P-P+P+", "A+A-") for s in (0, 1)]
    maps += [random_homeomorphism(rng, 1, rng.randint(2, 5)) for _ in range(8)]
    for f in maps:
        if decide_strongly_reversible_hplus(f, max_period=16, max_iterations=2000).is_yes:
            assert decide_strongly_reversible_h(f, max_period=16, max_iterations=2000).is_yes
