"""
Convex distance function of a polygonal gauge.

delta(g, p1, p2) is the factor by which the gauge shape, centered at p1, must be scaled
so that its boundary passes through p2. For a polygon written as a_k . x <= h_k around
its center this is max_k (a_k . (p2 - p1)) / h_k, so every value is an exact rational.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from errors import InvalidParams
from geometry_core import (
    ConvexPolygon,
    Location,
    Point,
    contains_point,
    edge_halfplanes,
)
from instances import BaseShape

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Gauge:
    shape: ConvexPolygon
    center: Point

    def __post_init__(self):
        if contains_point(self.shape, self.center) is not Location.INTERIOR:
            raise InvalidParams("Gauge center must be strictly inside the shape", center=self.center)
        # a_k . (x - center) <= h_k with h_k > 0
        rows = []
        for H in edge_halfplanes(self.shape):
            h = H.c - H.a * self.center.x - H.b * self.center.y
            rows.append((H.a, H.b, h))
        object.__setattr__(self, "_rows", tuple(rows))

    @classmethod
    def from_base(cls, base: BaseShape) -> "Gauge":
        return cls(base.polygon, base.center)

    def norm(self, dx: Fraction, dy: Fraction) -> Fraction:
        if dx == 0 and dy == 0:
            return Fraction(0)
        return max((a * dx + b * dy) / h for a, b, h in self._rows)


def delta(g: Gauge, p1: Point, p2: Point) -> Fraction:
    return g.norm(p2.x - p1.x, p2.y - p1.y)


def homothet_at(g: Gauge, p: Point, scale) -> ConvexPolygon:
    """The gauge shape scaled by `scale` around its center, then moved so the center is p."""
    s = Fraction(scale)
    if s <= 0:
        raise InvalidParams("Homothet scale must be positive", scale=s)
    c = g.center
    return ConvexPolygon._trusted([Point(p.x + s * (v.x - c.x), p.y + s * (v.y - c.y)) for v in g.shape.vertices])


def _ray_hits(p: Point, r: Point, P: ConvexPolygon) -> list[Point]:
    """Points where the ray p + t*r (t >= 0) meets an edge of P."""
    hits = []
    for a, b in P.edges():
        ex, ey = b.x - a.x, b.y - a.y
        denom = r.x * ey - r.y * ex
        if denom == 0:
            continue
        wx, wy = a.x - p.x, a.y - p.y
        t = (wx * ey - wy * ex) / denom
        u = (wx * r.y - wy * r.x) / denom
        if t >= 0 and 0 <= u <= 1:
            hits.append(Point(p.x + t * r.x, p.y + t * r.y))
    return hits


def _candidates(g: Gauge, p: Point, P: ConvexPolygon) -> list[Point]:
    # the smallest touching homothet meets P at a vertex of P or with one of its own vertices
    cands = list(P.vertices)
    for v in g.shape.vertices:
        cands.extend(_ray_hits(p, Point(v.x - g.center.x, v.y - g.center.y), P))
    return cands


def nearest_point(g: Gauge, p: Point, P: ConvexPolygon) -> Point:
    """A point of P minimising delta(g, p, .); p itself when p lies in P."""
    if contains_point(P, p) is not Location.OUTSIDE:
        return p
    best: Optional[tuple[Fraction, Point]] = None
    for q in _candidates(g, p, P):
        d = delta(g, p, q)
        if best is None or d < best[0]:
            best = (d, q)
    return best[1]


def dist_to_convex(g: Gauge, p: Point, P: ConvexPolygon) -> Fraction:
    if contains_point(P, p) is not Location.OUTSIDE:
        return Fraction(0)
    d = min(delta(g, p, q) for q in _candidates(g, p, P))
    logger.debug(f"dist_to_convex p={p} -> {d}")
    return d


def check_segment_additivity(g: Gauge, p1: Point, p2: Point, p3: Point) -> bool:
    """delta(p1, p3) == delta(p1, p2) + delta(p2, p3) for p2 on segment p1p3."""
    on_line = (p2.x - p1.x) * (p3.y - p1.y) - (p2.y - p1.y) * (p3.x - p1.x) == 0
    within = min(p1.x, p3.x) <= p2.x <= max(p1.x, p3.x) and min(p1.y, p3.y) <= p2.y <= max(p1.y, p3.y)
    if not (on_line and within):
        raise InvalidParams("Middle point must lie on the segment", p1=p1, p2=p2, p3=p3)
    return delta(g, p1, p3) == delta(g, p1, p2) + delta(g, p2, p3)


def check_positive_homogeneity(g: Gauge, p1: Point, p2: Point, t) -> bool:
    """delta(p1, p1 + t(p2 - p1)) == t * delta(p1, p2) for rational t > 0."""
    t = Fraction(t)
    if t <= 0:
        raise InvalidParams("Homogeneity factor must be positive", t=t)
    scaled = Point(p1.x + t * (p2.x - p1.x), p1.y + t * (p2.y - p1.y))
    return delta(g, p1, scaled) == t * delta(g, p1, p2)


def check_triangle_inequality(g: Gauge, p1: Point, p2: Point, p3: Point) -> bool:
    return delta(g, p1, p3) <= delta(g, p1, p2) + delta(g, p2, p3)
