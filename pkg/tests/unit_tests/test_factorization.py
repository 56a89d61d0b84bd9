import random
from fractions import Fraction

import pytest

from app.engine.circle import Arc, Closure
from app.engine.errors import PreconditionError, VerificationFailure
from app.engine.evalmap import PL
from app.engine.factorization import (build_periodic_conjugator, factor_three_involutions,
                                      involution_between_intervals, realize, realize_conjugacy)
from app.engine.generators import involution_product, random_homeomorphism, random_pl_homeo
from app.engine.plmap import PLMap
from app.engine.reversibility import (Route, conjugate_in_h, decide_strongly_reversible_h,
                                      decide_strongly_reversible_hplus)
from app.engine.sampling import SamplePlan
from app.engine.witness import Witness, certify, transport_witness, verify_conjugator, verify_witness

F = Fraction
PLAN = SamplePlan.of_size(64, seed=2)


def realized(f, decide=decide_strongly_reversible_h):
    verdict = decide(f)
    assert verdict.is_yes, verdict.reason
    return certify(realize(f, verdict), PLAN)


def test_rot0_witness(two_point_map):
    """Test realize - half turn of [P+, P-] in H+"""
    w = realized(two_point_map, decide_strongly_reversible_hplus)
    assert w.route == Route.ROT0
    assert w.verification.all_pass and w.verification.samples > 0
    assert w.involutions[0].degree == 1


def test_trivial_half_turn_witness():
    w = realized(PLMap.rotation(F(1, 2)), decide_strongly_reversible_hplus)
    assert w.route == Route.ROT_HALF_TRIVIAL
    assert w.involutions[0](F(1, 3)) == F(1, 3)


def test_reversing_witness_for_sawtooth(sawtooth):
    w = realized(sawtooth)
    assert w.route == Route.TWO_I_REVERSING
    assert w.involutions[0].degree == -1


@pytest.mark.parametrize("seed", range(3))
def test_reversing_witness_for_words(seed):
    f = random_pl_homeo(word="P+P+P-", seed=seed, conjugate=bool(seed % 2)).map
    assert realized(f).route == Route.TWO_I_REVERSING


@pytest.mark.parametrize("rotation", [F(1, 3), F(1, 4), F(2, 5)])
def test_witness_for_conjugated_rotations(rotation):
    h = random_homeomorphism(random.Random(9))
    w = realized(PLMap.rotation(rotation).conjugate_by(h))
    assert w.route == Route.TWO_II
    assert w.notes["period"] == rotation.denominator


def test_witness_for_periodic_blocks():
    generated = random_pl_homeo(rho=F(1, 3), word="P+P-", seed=4)
    w = realized(generated.map)
    assert w.route == Route.TWO_II and w.notes["period"] == 3


def test_periodic_witness_is_transported_from_a_model():
    """Test realize - p/q witnesses with p > 1 are carried back along a conjugator"""
    w = realized(random_pl_homeo(rho=F(2, 5), word="P+P-", seed=4).map)
    assert w.route == Route.TWO_II
    assert w.notes["reduction"] == {"d": 3, "t": 2}
    assert w.notes["transported"]

    h = random_homeomorphism(random.Random(2))
    w = realized(PLMap.rotation(F(2, 5)).conjugate_by(h))
    assert w.notes["conjugate_to_rotation"] and w.notes["transported"]


def test_witness_for_reflection():
    w = realized(PLMap.reflection(F(1, 3)))
    assert w.route == Route.TWO_MINUS and w.notes["involution"]


@pytest.mark.parametrize("seed", [0, 1])
def test_witness_for_involution_products(seed):
    f = involution_product(seed).map
    w = realized(f)
    assert w.route == Route.TWO_MINUS
    assert w.involutions[0].degree == -1
    assert len(w.notes["fixed_points"]) == 2


def test_realize_refuses_no_verdicts():
    f = PLMap.rotation(F(1, 3))
    with pytest.raises(PreconditionError):
        realize(f, decide_strongly_reversible_hplus(f))


def test_certify_rejects_wrong_witness(sawtooth):
    w = Witness((PL(PLMap.rotation(F(1, 2))),), sawtooth, Route.ROT0)
    with pytest.raises(VerificationFailure) as exc:
        certify(w, PLAN)
    assert exc.value.law == "reversal"
    assert not verify_witness(w, PLAN).all_pass


@pytest.mark.parametrize("f", [
    PLMap.rotation(F(1, 3)),
    PLMap(1, [(0, 0), (F(1, 2), F(1, 4))]),
    random_pl_homeo(word="P+P+P-", seed=2).map,
    random_pl_homeo(rho=F(2, 5), seed=3).map,
])
def test_three_involutions(f):
    w = certify(factor_three_involutions(f), PLAN)
    assert len(w.involutions) == 3
    assert all(s.degree == 1 for s in w.involutions)
    assert "base_point" in w.notes


def test_three_involutions_of_an_involution():
    w = certify(factor_three_involutions(PLMap.rotation(F(1, 2))), PLAN)
    assert w.notes["involution"]


def test_three_involutions_need_degree_one():
    with pytest.raises(PreconditionError):
        factor_three_involutions(PLMap.reflection(0))


def test_involution_between_intervals_reverses_order():
    g = PLMap.rotation(F(1, 2))
    source, target = Arc(0, F(1, 4), Closure.CLOSED), Arc(F(1, 2), F(3, 4), Closure.CLOSED)
    gamma = involution_between_intervals(g, source, target)
    assert gamma(0) == F(3, 4) and gamma(F(1, 4)) == F(1, 2)
    g_inv = g.inverse()
    for x in (F(1, 16), F(1, 8), F(3, 16), F(1, 5)):
        assert gamma(g_inv(gamma(x))) == g(x)


def test_involution_between_intervals_rejects_overlap():
    g = PLMap.rotation(F(1, 4))
    with pytest.raises(PreconditionError):
        involution_between_intervals(g, Arc(0, F(1, 2), Closure.CLOSED), Arc(F(1, 4), F(3, 4), Closure.CLOSED))


def test_transport_witness(two_point_map):
    h = PLMap(1, [(0, 0), (F(1, 3), F(1, 2))])
    g = two_point_map.conjugate_by(h)
    assert verify_conjugator(PL(h), two_point_map, g, PLAN).all_pass
    moved = transport_witness(realized(two_point_map), PL(h), g)
    assert moved.target == g and moved.notes["transported"]
    assert verify_witness(moved, PLAN).all_pass


def test_realize_conjugacy_for_fixed_points(two_point_map):
    g = two_point_map.conjugate_by(PLMap(1, [(0, 0), (F(1, 3), F(1, 2))]))
    plan = conjugate_in_h(two_point_map, g, 1)
    assert verify_conjugator(realize_conjugacy(plan), two_point_map, g, PLAN).all_pass


def test_periodic_conjugator_to_rotation():
    f = PLMap.rotation(F(1, 3)).conjugate_by(random_homeomorphism(random.Random(4)))
    g = PLMap.rotation(F(1, 3))
    assert verify_conjugator(build_periodic_conjugator(f, g), f, g, PLAN).all_pass


def test_periodic_conjugator_between_block_maps():
    f = random_pl_homeo(rho=F(1, 3), word="P+P-", seed=5).map
    g = f.conjugate_by(random_homeomorphism(random.Random(6)))
    assert verify_conjugator(build_periodic_conjugator(f, g), f, g, PLAN).all_pass
