from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import square
from errors import DegenerateOverlap, InvalidParams, InvalidPolygon, ParseError
from geometry_core import (
    ConvexPolygon,
    HalfPlane,
    Location,
    Orientation,
    Region,
    area,
    boundary_crossings,
    boundary_parameter,
    clip_halfplane,
    contains_point,
    contains_polygon,
    convex_intersect,
    interiors_intersect,
    orientation,
    point_at,
    polygon_from_json,
    polygon_to_json,
    pt,
    region_contained_in,
    region_intersect,
    region_subtract,
    to_scalar,
    touches,
    union_area,
)


def test_orientation_examples():
    assert orientation(pt(0, 0), pt(1, 0), pt(0, 1)) is Orientation.LEFT
    assert orientation(pt(0, 0), pt(1, 1), pt(2, 2)) is Orientation.COLLINEAR
    assert orientation(pt(0, 0), pt(0, 1), pt(1, 1)) is Orientation.RIGHT


def test_to_scalar_parses_rational_strings():
    assert to_scalar("3/2") == Fraction(3, 2)
    assert to_scalar("-7") == Fraction(-7)
    assert to_scalar(4) == Fraction(4)
    for bad in ("1.5", "1/0", "abc", True, 0.5):
        with pytest.raises(ParseError):
            to_scalar(bad)


def test_polygon_is_normalized():
    # clockwise input with a duplicate and a collinear vertex
    P = ConvexPolygon([(0, 1), (1, 1), (1, 0), (1, 0), (0, 0), (0, "1/2")])
    assert P == square(0, 0, 1, 1)
    assert P.vertices[0] == pt(0, 0)
    assert len(P) == 4


@pytest.mark.parametrize(
    "points",
    [
        [(0, 0), (1, 0)],
        [(0, 0), (1, 1), (2, 2)],
        [(0, 0), (2, 0), (1, 1), (2, 2), (0, 2)],
    ],
)
def test_invalid_polygons(points):
    with pytest.raises(InvalidPolygon):
        ConvexPolygon(points)


def test_contains_point(unit_square):
    assert contains_point(unit_square, pt("1/2", "1/2")) is Location.INTERIOR
    assert contains_point(unit_square, pt(1, "1/2")) is Location.BOUNDARY
    assert contains_point(unit_square, pt(2, 0)) is Location.OUTSIDE


def test_clip_halfplane_examples():
    assert clip_halfplane(square(0, 0, 2, 2), HalfPlane(Fraction(1), Fraction(0), Fraction(1))) == square(0, 0, 1, 2)
    assert clip_halfplane(square(0, 0, 1, 1), HalfPlane(Fraction(1), Fraction(0), Fraction(-1))) is None
    # a segment is not a polygon
    assert clip_halfplane(square(0, 0, 1, 1), HalfPlane(Fraction(1), Fraction(0), Fraction(0))) is None


def test_halfplane_through_is_left_side():
    H = HalfPlane.through(pt("1/2", 0), pt("1/2", 1))
    assert H.contains(pt(0, 0))
    assert not H.contains(pt(1, 0))
    assert H.complement().contains(pt(1, 0))
    with pytest.raises(InvalidParams):
        HalfPlane(Fraction(0), Fraction(0), Fraction(1))


def test_convex_intersect_examples(unit_square):
    I = convex_intersect(unit_square, square("1/2", "1/2", "3/2", "3/2"))
    assert I == square("1/2", "1/2", 1, 1)
    assert I.area == Fraction(1, 4)
    assert convex_intersect(unit_square, square(5, 5, 6, 6)) is None
    assert convex_intersect(unit_square, unit_square) == unit_square


def test_touch_and_overlap_predicates(unit_square):
    corner = square(1, 1, 2, 2)
    assert not interiors_intersect(unit_square, corner)
    assert touches(unit_square, corner)
    half = square("1/2", "1/2", "3/2", "3/2")
    assert interiors_intersect(unit_square, half) and touches(unit_square, half)
    far = square(5, 5, 6, 6)
    assert not interiors_intersect(unit_square, far) and not touches(unit_square, far)


def test_boundary_crossings_examples(unit_square):
    assert boundary_crossings(unit_square, square("1/2", "1/2", "3/2", "3/2")) == 2
    cross_a = ConvexPolygon.rectangle(0, 1, 3, 2)
    cross_b = ConvexPolygon.rectangle(1, 0, 2, 3)
    assert boundary_crossings(cross_a, cross_b) == 4
    assert boundary_crossings(unit_square, square(5, 5, 6, 6)) == 0


def test_tangency_counts_zero(unit_square):
    # corner contact and a vertex resting on an edge
    assert boundary_crossings(unit_square, square(1, 1, 2, 2)) == 0
    diamond = ConvexPolygon([(2, "1/2"), (3, 0), (4, "1/2"), (3, 1)])
    shifted = ConvexPolygon([(1, "1/2"), (2, 0), (3, "1/2"), (2, 1)])
    assert boundary_crossings(unit_square, ConvexPolygon([(1, "1/2"), (2, 0), (2, 1)])) == 0
    assert boundary_crossings(diamond, shifted) == 2


def test_shared_edge_raises():
    with pytest.raises(DegenerateOverlap):
        boundary_crossings(square(0, 0, 1, 1), square(1, 0, 2, 1))
    assert boundary_crossings(square(0, 0, 1, 1), square(1, 0, 2, 1), allow_overlap=True) == 0


def test_contains_polygon_examples(unit_square):
    assert contains_polygon(square(0, 0, 3, 3), square(1, 1, 2, 2))
    assert contains_polygon(unit_square, unit_square)
    assert not contains_polygon(unit_square, square("1/2", "1/2", "3/2", "3/2"))


def test_region_subtract_examples():
    assert region_subtract(Region.of(square(0, 0, 2, 2)), square(0, 0, 2, 2)).is_empty
    assert region_subtract(Region.of(square(0, 0, 1, 1)), square(5, 5, 6, 6)).area == 1
    L = region_subtract(Region.of(square(0, 0, 2, 2)), square(1, 1, 3, 3))
    assert L.area == 3
    for a in range(len(L)):
        for b in range(a + 1, len(L)):
            assert not interiors_intersect(L.cells[a], L.cells[b])


def test_region_subtract_covered_by_two_pieces():
    region = Region.of(square("1/2", "1/2", "3/2", "3/2"))
    region = region_subtract(region, ConvexPolygon.rectangle(0, 0, 2, 1))
    region = region_subtract(region, ConvexPolygon.rectangle(0, 1, 2, 2))
    assert region.is_empty


def test_region_contained_in_examples():
    assert region_contained_in(Region(), square(0, 0, 1, 1))
    assert region_contained_in(Region.of(square(1, 1, 2, 2)), square(0, 0, 3, 3))
    assert not region_contained_in(Region((square(0, 0, 1, 1), square(4, 4, 5, 5))), square(0, 0, 3, 3))


def test_area_examples(unit_square):
    assert area(unit_square) == 1
    assert area(ConvexPolygon([(0, 0), (1, 0), (0, 1)])) == Fraction(1, 2)
    assert area(Region((unit_square, square(3, 3, 4, 4)))) == 2


def test_union_area_counts_overlap_once(two_squares):
    assert union_area(two_squares) == 7
    assert union_area([]) == 0


def test_boundary_parameter_and_point_at(unit_square):
    assert boundary_parameter(unit_square, pt(1, "1/2")) == Fraction(3, 2)
    assert boundary_parameter(unit_square, pt(0, 0)) == 0
    assert point_at(unit_square, Fraction(5, 2)) == pt("1/2", 1)
    with pytest.raises(InvalidParams):
        boundary_parameter(unit_square, pt("1/2", "1/2"))


def test_polygon_json_is_exact():
    P = ConvexPolygon([(0, 0), ("7/3", 0), (0, "5/2")])
    doc = polygon_to_json(P)
    assert doc[1] == ["7/3", "0"]
    assert polygon_from_json(doc) == P


# Properties

coords = st.integers(min_value=-8, max_value=8)


@st.composite
def rectangles(draw):
    x0, x1 = sorted(draw(st.lists(coords, min_size=2, max_size=2, unique=True)))
    y0, y1 = sorted(draw(st.lists(coords, min_size=2, max_size=2, unique=True)))
    return ConvexPolygon.rectangle(x0, y0, x1, y1)


@st.composite
def halfplanes(draw):
    a, b = draw(st.tuples(coords, coords).filter(lambda t: t != (0, 0)))
    return HalfPlane(Fraction(a), Fraction(b), Fraction(draw(coords)))


@settings(max_examples=200, deadline=None)
@given(rectangles(), halfplanes())
def test_clip_soundness(P, H):
    inside = clip_halfplane(P, H)
    outside = clip_halfplane(P, H.complement())
    total = (inside.area if inside else 0) + (outside.area if outside else 0)
    assert total == P.area


@settings(max_examples=200, deadline=None)
@given(rectangles(), rectangles())
def test_subtract_conservation(P, Q):
    rest = region_subtract(Region.of(P), Q)
    assert rest.area + region_intersect(Region.of(P), Q).area == P.area


@settings(max_examples=200, deadline=None)
@given(rectangles(), rectangles())
def test_crossing_parity(P, Q):
    try:
        count = boundary_crossings(P, Q)
    except DegenerateOverlap:
        assume(False)
    assert count % 2 == 0
