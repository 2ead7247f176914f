from fractions import Fraction

import pytest

import decomposition
from conftest import square
from decomposition import (
    DecompositionResult,
    classify_petals,
    decomposition_to_dict,
    disjoint_union_decomposition,
    separating_edge,
    verify_decomposition,
    verify_separating_edge,
)
from errors import DegenerateChord, InvalidParams, NotCoverFree, NotPseudodisks
from feasibility import cover_free_region_of
from geometry_core import ConvexPolygon, pt, region_contained_in, union_area


def test_two_squares_split_along_chord(two_squares):
    result = disjoint_union_decomposition(two_squares)
    assert result.tilde[0] == ConvexPolygon([(0, 0), (2, 0), (2, 1), (1, 2), (0, 2)])
    assert result.tilde[1] == ConvexPolygon([(2, 1), (3, 1), (3, 3), (1, 3), (1, 2)])
    assert [t.area for t in result.tilde] == [Fraction(7, 2), Fraction(7, 2)]
    assert len(result.chords) == 1
    assert set(result.chords[0]) == {pt(2, 1), pt(1, 2)}
    assert result.phase_log[1].tangential == (0,)

    report = verify_decomposition(two_squares, result)
    assert report.passed
    assert report.union_discrepancy == 0
    assert report.cf_contained == [True, True]
    assert report.max_phase_crossings <= 2


def test_three_object_chain(three_chain_family):
    result = disjoint_union_decomposition(three_chain_family)
    report = verify_decomposition(three_chain_family, result)
    assert report.passed
    assert sum(t.area for t in result.tilde) == Fraction(39, 4)
    assert union_area(three_chain_family) == Fraction(39, 4)
    assert result.tilde[0].area == Fraction(13, 4)


def test_disjoint_family_is_unchanged():
    family = [square(0, 0, 1, 1), square(3, 0, 4, 1), square(0, 3, 1, 4)]
    result = disjoint_union_decomposition(family)
    assert list(result.tilde) == family
    assert result.chords == []


def test_single_and_empty_family():
    assert disjoint_union_decomposition([square(0, 0, 1, 1)]).tilde == (square(0, 0, 1, 1),)
    empty = disjoint_union_decomposition([])
    assert empty.tilde == ()
    assert verify_decomposition([], empty).passed


def test_preconditions_are_checked():
    with pytest.raises(NotCoverFree):
        disjoint_union_decomposition([square(0, 0, 2, 2), square("1/2", "1/2", "3/2", "3/2")])
    with pytest.raises(NotPseudodisks):
        disjoint_union_decomposition([ConvexPolygon.rectangle(0, 1, 3, 2), ConvexPolygon.rectangle(1, 0, 2, 3)])


def test_verification_catches_overlap(two_squares):
    bad = DecompositionResult(tuple(two_squares))
    report = verify_decomposition(two_squares, bad)
    assert not report.passed
    assert report.overlapping_pairs == [(0, 1)]
    assert report.union_discrepancy == 0
    short = DecompositionResult((two_squares[0],))
    assert not verify_decomposition(two_squares, short).length_match


def test_decomposition_document(two_squares):
    result = disjoint_union_decomposition(two_squares)
    doc = decomposition_to_dict(result, verify_decomposition(two_squares, result))
    assert doc["report"]["passed"] is True
    assert doc["report"]["union_discrepancy"] == "0"
    assert len(doc["tilde"]) == 2
    assert len(doc["phases"]) == 2
    assert doc["phases"][0]["cuts"][0]["neighbor"] == 1


def test_petals_of_two_squares(two_squares):
    U, V = two_squares
    petals = classify_petals(U, V, U, V)
    assert petals.intersection == square(1, 1, 2, 2)
    assert set(petals.crossing_points) == {pt(2, 1), pt(1, 2)}
    assert len(petals.u_petals) == 1 and len(petals.v_petals) == 1
    assert all(p.upetal for p in petals.petals)
    assert petals.u_petals[0].region.area == 3
    assert not petals.conflicting


def test_petals_inside_partner_are_not_upetals(two_squares):
    U0, V0 = two_squares
    petals = classify_petals(U0, V0, U0, square(-1, -1, 4, 4))
    assert not any(p.upetal for p in petals.u_petals)
    assert all(p.upetal for p in petals.v_petals)


def test_identical_pieces_have_no_petals(unit_square):
    petals = classify_petals(unit_square, unit_square, unit_square, unit_square)
    assert petals.petals == ()


def test_petals_need_overlap(unit_square):
    with pytest.raises(InvalidParams):
        classify_petals(unit_square, square(1, 1, 2, 2), unit_square, square(1, 1, 2, 2))
    with pytest.raises(InvalidParams):
        classify_petals(square(0, 0, 2, 2), square(1, 1, 3, 3), unit_square, square(1, 1, 3, 3))


def test_two_petal_classification(two_petal_pair):
    U0, V0, U, V = two_petal_pair
    petals = classify_petals(U0, V0, U, V)
    assert len(petals.crossing_points) == 4
    assert len(petals.u_petals) == 2
    assert sum(p.upetal for p in petals.u_petals) == 1
    assert all(p.upetal for p in petals.v_petals)
    assert not petals.conflicting


def test_separating_edge_of_two_squares(two_squares):
    U, V = two_squares
    U_ij, V_ji, edge = separating_edge(U, V, U, V)
    assert {edge.p, edge.q} == {pt(1, 2), pt(2, 1)}
    assert U_ij.area == Fraction(7, 2)
    assert U_ij == ConvexPolygon([(0, 0), (2, 0), (2, 1), (1, 2), (0, 2)])
    assert V_ji.area == Fraction(7, 2)
    assert edge.h_i.contains(pt(0, 0)) and edge.h_j.contains(pt(3, 3))


def test_separating_edge_with_two_petals(two_petal_pair):
    U0, V0, U, V = two_petal_pair
    U_ij, V_ji, edge = separating_edge(U0, V0, U, V)
    assert {edge.p, edge.q} == {pt(0, 1), pt(0, 3)}
    assert U_ij == ConvexPolygon.rectangle(-1, 1, 0, 3)
    assert V_ji == V0


def test_separating_edge_checks_pass(two_squares):
    U, V = two_squares
    cf_u = cover_free_region_of(two_squares, 0, [0, 1])
    cf_v = cover_free_region_of(two_squares, 1, [0, 1])
    U_ij, V_ji, edge = separating_edge(U, V, U, V, cf_u, cf_v)
    check = verify_separating_edge(U, V, U, V, U_ij, V_ji, edge, classify_petals(U, V, U, V), cf_u, cf_v)
    assert check.passed
    assert check.disjoint and check.shared_edge
    assert check.u_rest_in_v and check.v_rest_in_u
    assert check.cf_contained is True
    assert edge.to_dict() == {"p": ["1", "2"], "q": ["2", "1"]}


def test_separating_edge_check_rejects_wrong_split(two_squares):
    U, V = two_squares
    petals = classify_petals(U, V, U, V)
    _, _, edge = separating_edge(U, V, U, V)
    # handing back the unsplit pair breaks disjointness
    check = verify_separating_edge(U, V, U, V, U, V, edge, petals)
    assert not check.passed
    assert not check.disjoint


def test_separating_edge_when_outer_object_swallows_partner(two_squares):
    U0, V0 = two_squares
    U = ConvexPolygon.rectangle(-1, -1, 3, 3)
    petals = classify_petals(U0, V0, U, V0)
    assert [p.upetal for p in petals.u_petals] == [True]
    assert [p.upetal for p in petals.v_petals] == [False]
    U_ij, V_ji, edge = separating_edge(U0, V0, U, V0)
    assert {edge.p, edge.q} == {pt(2, 1), pt(1, 2)}
    assert U_ij == ConvexPolygon([(0, 0), (2, 0), (2, 1), (1, 2), (0, 2)])
    assert V_ji == ConvexPolygon([(2, 1), (3, 1), (3, 3), (1, 3), (1, 2)])


def test_chord_on_wrong_side_of_cover_free_region_is_rejected(two_squares, monkeypatch):
    chosen = decomposition._chord_side
    monkeypatch.setattr(decomposition, "_chord_side", lambda X, T, line, cf: chosen(X, T, line, cf).complement())
    with pytest.raises(DegenerateChord):
        disjoint_union_decomposition(two_squares)


def test_pieces_keep_their_cover_free_regions(three_chain_family):
    result = disjoint_union_decomposition(three_chain_family)
    for i, piece in enumerate(result.tilde):
        cf = cover_free_region_of(three_chain_family, i, range(3))
        assert region_contained_in(cf, piece)
