from fractions import Fraction

import pytest

from app.engine.dynamics import FixKind, fixed_points, minimal_period, rotation_number, signature
from app.engine.errors import UnsatisfiableConstraintError
from app.engine.generators import (CHIRAL_WORD, format_word, involution_product, map_with_word, mirrored_reversing,
                                   parse_word, random_pl_homeo)

F = Fraction
P, A = FixKind.POINT, FixKind.ARC


def test_parse_word():
    """Test parse_word - letters, both minus signs and round trip through format_word"""
    assert parse_word("P+A−") == [(P, 1), (A, -1)]
    assert parse_word(" P- P+ ") == [(P, -1), (P, 1)]
    assert format_word(parse_word(CHIRAL_WORD)) == CHIRAL_WORD


@pytest.mark.parametrize("bad", ["", "P", "X+", "P+Q-"])
def test_parse_word_rejects_garbage(bad):
    with pytest.raises(UnsatisfiableConstraintError):
        parse_word(bad)


@pytest.mark.parametrize("word", ["P+", "P-P+", "A+P-", "P+P+P-", CHIRAL_WORD])
def test_map_with_word_has_that_word(word):
    for seed in range(3):
        assert signature(map_with_word(parse_word(word), seed)).letters() == tuple(parse_word(word))


def test_word_certificate_is_honoured():
    generated = random_pl_homeo(word="P+A-P-", seed=4)
    assert generated.certificate == {"construction": "word", "word": "P+A-P-"}
    assert signature(generated.map).letters() == ((P, 1), (A, -1), (P, -1))


def test_conjugated_word_keeps_its_letters_up_to_rotation():
    generated = random_pl_homeo(word="P+P-P-", seed=1, conjugate=True)
    assert generated.certificate["conjugated"]
    assert sorted(signature(generated.map).signs()) == [-1, -1, 1]


def test_breakpoint_budget_bounds_the_vertices():
    f = random_pl_homeo(word="P+P-", breakpoints=7, seed=2).map
    assert len(f.breakpoints()) <= 7
    assert signature(f).letters() == ((P, 1), (P, -1))


def test_generation_is_deterministic():
    assert random_pl_homeo(seed=12).map == random_pl_homeo(seed=12).map
    assert random_pl_homeo(word="P+P-", seed=3).map == random_pl_homeo(word="P+P-", seed=3).map


def test_periodic_certificate():
    generated = random_pl_homeo(rho=F(1, 2), seed=7)
    f = generated.map
    assert generated.certificate["construction"] == "periodic"
    assert generated.certificate["orbit"] == ["0", "1/2"]
    assert minimal_period(f)[0] == 2
    assert fixed_points(f).is_empty


def test_conjugated_periodic_orbit_is_an_orbit():
    generated = random_pl_homeo(rho=F(2, 5), seed=1, conjugate=True)
    orbit = [F(x) for x in generated.certificate["orbit"]]
    assert len(orbit) == 5
    assert sorted(generated.map(x) for x in orbit) == orbit


def test_fixed_point_count():
    f = random_pl_homeo(fixed_point_count=3, seed=5).map
    assert len(fixed_points(f)) == 3


def test_zero_rotation_number_gives_fixed_points():
    """Test random_pl_homeo - rho 0 alone still yields a map with fixed points"""
    for seed in range(12):
        generated = random_pl_homeo(rho=F(0), seed=seed)
        assert generated.certificate["construction"] == "word"
        assert not fixed_points(generated.map).is_empty
        assert rotation_number(generated.map).value == 0


def test_zero_rotation_number_with_a_word():
    generated = random_pl_homeo(rho=F(0), word="P+P-", seed=3)
    assert signature(generated.map).letters() == ((P, 1), (P, -1))


def test_reversing_maps_have_two_fixed_points():
    generated = random_pl_homeo(degree=-1, seed=8)
    assert generated.map.degree == -1
    assert len(generated.certificate["fixed_points"]) == 2
    assert len(fixed_points(generated.map)) == 2


@pytest.mark.parametrize("kwargs", [
    {"degree": -1, "fixed_point_count": 3},
    {"degree": -1, "rho": F(1, 3)},
    {"degree": 2},
    {"word": "P+P-", "fixed_point_count": 3},
    {"rho": F(1, 3), "fixed_point_count": 2},
    {"rho": F(3, 2)},
    {"rho": F(0), "fixed_point_count": 0},
    {"degree": -1, "rho": F(0)},
    {"word": "A+A-", "breakpoints": 3},
])
def test_unsatisfiable_constraints(kwargs):
    with pytest.raises(UnsatisfiableConstraintError):
        random_pl_homeo(**kwargs)


def test_involution_product_is_not_an_involution():
    f = involution_product(3).map
    assert f.degree == -1 and not f.is_involution()


def test_mirrored_reversing_square_word():
    generated = mirrored_reversing((1, 1, -1), seed=2)
    assert generated.certificate["square_signs"] == "++-+--"
    f = generated.map
    assert f.degree == -1
    assert signature(f @ f).signs() == (1, 1, -1, 1, -1, -1)
