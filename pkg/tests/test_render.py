from conftest import square
from decomposition import disjoint_union_decomposition, separating_edge
from feasibility import Solution
from geometry_core import pt
from instances import CoverInstance, gen_domination
from render import render


def test_objects_and_selection(chain_instance):
    svg = render(chain_instance, Solution.of([1]))
    assert svg.startswith("<svg")
    assert svg.count('class="object"') == 2
    assert svg.count('class="object selected"') == 1
    assert 'id="object-1"' in svg
    assert 'id="cover-free"' in svg
    assert 'id="points"' not in svg


def test_cover_scene_with_decomposition(two_squares):
    instance = CoverInstance(tuple(two_squares), (pt("1/2", "1/2"), pt("5/2", "5/2")))
    result = disjoint_union_decomposition(instance.objects)
    _, _, edge = separating_edge(*two_squares, *two_squares)
    svg = render(instance, decomposition=result, separating_edges=[edge])
    assert svg.count('class="piece"') == 2
    assert svg.count('class="chord"') == 1
    assert svg.count('class="separating-edge"') == 1
    assert svg.count('class="point"') == 2


def test_y_axis_is_flipped():
    instance = CoverInstance((square(0, 2, 1, 3),))
    svg = render(instance)
    assert "0.0,-2.0" in svg or "0,-2" in svg


def test_render_is_byte_identical():
    instance = gen_domination(10, seed=4)
    assert render(instance, Solution.of([0, 3])) == render(instance, Solution.of([0, 3]))
