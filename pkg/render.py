"""
SVG scenes of instances, solutions, cover-free regions and decompositions.

Coordinates leave the exact domain only here: each rational is rounded to 9 decimal
digits as it is written. The y axis is flipped so the picture reads like the plane.
"""

import logging
from fractions import Fraction
from typing import Optional, Sequence

import svgwrite

from decomposition import DecompositionResult, SeparatingEdge
from feasibility import Solution, cover_free_region_of
from geometry_core import ConvexPolygon, Point
from instances import CoverInstance, Instance

logger = logging.getLogger(__name__)

DIGITS = 9
PALETTE = {
    "object": "#4a78b5",
    "selected": "#d1495b",
    "cover_free": "#edae49",
    "piece": "#66a182",
    "chord": "#111111",
    "separating": "#8e44ad",
    "point": "#222222",
}


def _num(v: Fraction) -> float:
    return round(float(v), DIGITS)


def _xy(p: Point) -> tuple[float, float]:
    return (_num(p.x), _num(-p.y))


def _points(P: ConvexPolygon) -> list[tuple[float, float]]:
    return [_xy(v) for v in P.vertices]


def _viewbox(polygons: Sequence[ConvexPolygon], extra: Sequence[Point]) -> tuple[float, float, float, float]:
    xs = [v.x for P in polygons for v in P.vertices] + [p.x for p in extra]
    ys = [v.y for P in polygons for v in P.vertices] + [p.y for p in extra]
    if not xs:
        return (-1.0, -1.0, 2.0, 2.0)
    minx, maxx, miny, maxy = min(xs), max(xs), min(ys), max(ys)
    pad = max(maxx - minx, maxy - miny, Fraction(1)) / 20
    return (_num(minx - pad), _num(-maxy - pad), _num(maxx - minx + 2 * pad), _num(maxy - miny + 2 * pad))


def render(
    instance: Instance,
    solution: Optional[Solution] = None,
    decomposition: Optional[DecompositionResult] = None,
    separating_edges: Optional[Sequence[SeparatingEdge]] = None,
) -> str:
    """Layered SVG 1.1 document; identical input gives identical bytes."""
    polygons = list(instance.polygons)
    points = list(instance.points) if isinstance(instance, CoverInstance) else []
    selected = set(solution.indices) if solution is not None else set()

    dwg = svgwrite.Drawing(profile="full", size=("800px", "800px"))
    x, y, w, h = _viewbox(polygons, points)
    dwg.viewbox(x, y, w, h)
    stroke = round(max(w, 1.0) / 400, DIGITS)

    objects = dwg.g(id="objects", stroke=PALETTE["object"], stroke_width=stroke)
    for i, P in enumerate(polygons):
        is_sel = i in selected
        objects.add(
            dwg.polygon(
                points=_points(P),
                fill=PALETTE["selected"] if is_sel else PALETTE["object"],
                fill_opacity=0.35 if is_sel else 0.12,
                class_="object selected" if is_sel else "object",
                id=f"object-{i}",
            )
        )
    dwg.add(objects)

    if selected:
        cf_layer = dwg.g(id="cover-free", fill=PALETTE["cover_free"], fill_opacity=0.6, stroke="none")
        for i in sorted(selected):
            for cell in cover_free_region_of(polygons, i, selected):
                cf_layer.add(dwg.polygon(points=_points(cell), class_="cover-free"))
        dwg.add(cf_layer)

    if decomposition is not None:
        pieces = dwg.g(id="pieces", fill=PALETTE["piece"], fill_opacity=0.85, stroke="#ffffff", stroke_width=stroke)
        for t in decomposition.tilde:
            pieces.add(dwg.polygon(points=_points(t), class_="piece"))
        dwg.add(pieces)
        chords = dwg.g(id="chords", stroke=PALETTE["chord"], stroke_width=2 * stroke)
        for p, q in decomposition.chords:
            chords.add(dwg.line(start=_xy(p), end=_xy(q), class_="chord"))
        dwg.add(chords)

    if separating_edges:
        edges = dwg.g(id="separating-edges", stroke=PALETTE["separating"], stroke_width=2 * stroke)
        for e in separating_edges:
            edges.add(dwg.line(start=_xy(e.p), end=_xy(e.q), class_="separating-edge"))
        dwg.add(edges)

    if points:
        dots = dwg.g(id="points", fill=PALETTE["point"])
        for p in points:
            dots.add(dwg.circle(center=_xy(p), r=2 * stroke, class_="point"))
        dwg.add(dots)

    logger.debug(f"Rendered {len(polygons)} objects, {len(selected)} selected")
    return dwg.tostring()
