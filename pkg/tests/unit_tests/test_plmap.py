import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from app.engine.circle import CirclePoint
from app.engine.errors import MapFormatError
from app.engine.generators import random_homeomorphism
from app.engine.plmap import PLMap, compose, evaluate, invert, is_involution

F = Fraction

seeds = st.integers(min_value=0, max_value=10_000)
degrees = st.sampled_from([1, -1])
points = st.fractions(min_value=0, max_value=F(63, 64), max_denominator=64)


def random_map(seed, degree=1):
    return random_homeomorphism(random.Random(seed), degree, 3)


def test_evaluate_examples(sawtooth):
    """Test evaluate - rotation, slope 1/2 segment and reflection"""
    assert evaluate(PLMap.rotation(F(1, 3)), F(5, 6)) == CirclePoint(F(1, 6))
    assert evaluate(sawtooth, F(1, 4)) == CirclePoint(F(1, 8))
    assert evaluate(PLMap.reflection(0), F(1, 3)) == CirclePoint(F(2, 3))


def test_closing_vertex_is_accepted(sawtooth):
    assert PLMap(1, [(0, 0), (F(1, 2), F(1, 4)), (1, 1)]) == sawtooth


def test_closing_vertex_must_respect_lift_relation():
    with pytest.raises(MapFormatError):
        PLMap(1, [(0, 0), (F(1, 2), F(1, 4)), (1, F(3, 2))])


def test_canonical_form_drops_collinear_vertices():
    assert PLMap(1, [(0, 0), (F(1, 3), F(1, 3))]) == PLMap.identity()
    assert PLMap(1, [(0, 1)]) == PLMap.identity()
    assert PLMap(1, [(F(1, 2), F(5, 6))]) == PLMap.rotation(F(1, 3))


def test_compose_examples():
    third = PLMap.rotation(F(1, 3))
    assert compose(third, third) == PLMap.rotation(F(2, 3))
    reflection = PLMap.reflection(0)
    assert compose(reflection, reflection).is_identity()


def test_compose_with_inverse_is_identity(sawtooth):
    assert (sawtooth @ sawtooth.inverse()).is_identity()
    assert (sawtooth.inverse() @ sawtooth).is_identity()


def test_invert_examples(sawtooth):
    assert invert(PLMap.rotation(F(1, 3))) == PLMap.rotation(F(2, 3))
    assert invert(sawtooth).vertices == ((F(0), F(0)), (F(1, 4), F(1, 2)))
    assert invert(PLMap.identity()).is_identity()


def test_is_involution_examples():
    assert is_involution(PLMap.rotation(F(1, 2)))
    assert not is_involution(PLMap.rotation(F(1, 3)))
    assert is_involution(PLMap.reflection(0))
    assert is_involution(PLMap.identity())


def test_non_monotone_x_names_vertex():
    with pytest.raises(MapFormatError) as exc:
        PLMap(1, [(0, 0), (F(1, 2), F(1, 4)), (F(1, 4), F(1, 2))])
    assert exc.value.vertex_index == 2
    assert "vertex 2" in str(exc.value)


def test_non_homeomorphism_names_vertex():
    with pytest.raises(MapFormatError) as exc:
        PLMap(1, [(0, 0), (F(1, 2), F(1, 2)), (F(3, 4), F(1, 4))])
    assert exc.value.vertex_index == 2


def test_x_outside_unit_interval_rejected():
    with pytest.raises(MapFormatError):
        PLMap(1, [(0, 0), (F(3, 2), F(2))])


def test_bad_degree_rejected():
    with pytest.raises(MapFormatError):
        PLMap(2, [(0, 0)])


def test_power_and_negative_power():
    third = PLMap.rotation(F(1, 3))
    assert third.power(3).is_identity()
    assert third.power(-1) == third.inverse()
    assert third.power(0).is_identity()


def test_through_points(sawtooth):
    assert PLMap.through_points(1, [(0, 0), (F(1, 2), F(1, 4))]) == sawtooth
    flip = PLMap.through_points(-1, [(0, 0), (F(1, 2), F(1, 2))])
    assert flip == PLMap.reflection(0)


def test_through_points_rejects_two_images():
    with pytest.raises(MapFormatError):
        PLMap.through_points(1, [(0, 0), (1, F(1, 2))])


@settings(max_examples=60, deadline=None)
@given(seeds, seeds, seeds, degrees, degrees)
def test_composition_is_associative(a, b, c, da, db):
    f, g, h = random_map(a, da), random_map(b, db), random_map(c)
    assert (f @ g) @ h == f @ (g @ h)


@settings(max_examples=60, deadline=None)
@given(seeds, degrees)
def test_identity_is_two_sided_unit_and_inverse_cancels(seed, degree):
    f = random_map(seed, degree)
    identity = PLMap.identity()
    assert identity @ f == f and f @ identity == f
    assert (f @ f.inverse()).is_identity()
    assert f.inverse().inverse() == f


@settings(max_examples=60, deadline=None)
@given(seeds, degrees, points)
def test_lift_relation(seed, degree, x):
    f = random_map(seed, degree)
    assert f.lift(x + 1) == f.lift(x) + degree
    assert f(x) == f.lift(x) % 1


@settings(max_examples=40, deadline=None)
@given(seeds, seeds, points)
def test_conjugate_by_evaluates_pointwise(a, b, x):
    f, h = random_map(a), random_map(b, -1)
    g = f.conjugate_by(h)
    assert g(h(x)) == h(f(x))
