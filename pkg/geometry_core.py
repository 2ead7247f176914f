"""
Exact rational kernel for convex polygons.

All coordinates are fractions.Fraction; no predicate uses a tolerance. Polygons are
immutable and kept in a canonical form (counterclockwise, no duplicate or collinear
vertices, starting at the lowest (y, x) vertex) so equality is structural.
"""

import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence, Union

from errors import DegenerateOverlap, InvalidParams, InvalidPolygon, ParseError

Scalar = Fraction

_RATIONAL_RE = re.compile(r"-?\d+(/\d+)?")


def to_scalar(value: Union[Fraction, int, str]) -> Fraction:
    """Parse an exact rational from a Fraction, an int, or a 'num/den' / integer string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"Boolean is not a coordinate: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_RE.fullmatch(text):
            raise ParseError(f"Not an exact rational string: {value!r}")
        try:
            return Fraction(text)
        except ZeroDivisionError as e:
            raise ParseError(f"Zero denominator in {value!r}") from e
    raise ParseError(f"Unsupported scalar type {type(value).__name__}: {value!r}")


def scalar_to_str(value: Fraction) -> str:
    return str(value)


class Point(NamedTuple):
    x: Fraction
    y: Fraction


def pt(x, y) -> Point:
    return Point(to_scalar(x), to_scalar(y))


class Orientation(Enum):
    LEFT = "left"
    RIGHT = "right"
    COLLINEAR = "collinear"


class Location(Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def cross(o: Point, a: Point, b: Point) -> Fraction:
    """(a - o) x (b - o)."""
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def orientation(a: Point, b: Point, c: Point) -> Orientation:
    s = cross(a, b, c)
    if s > 0:
        return Orientation.LEFT
    if s < 0:
        return Orientation.RIGHT
    return Orientation.COLLINEAR


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    """p collinear with a, b is assumed; checks it lies within the closed segment."""
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)


def segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    """True iff the closed segments p1p2 and q1q2 share a point."""
    d1 = cross(q1, q2, p1)
    d2 = cross(q1, q2, p2)
    d3 = cross(p1, p2, q1)
    d4 = cross(p1, p2, q2)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    if d1 == 0 and _on_segment(q1, q2, p1):
        return True
    if d2 == 0 and _on_segment(q1, q2, p2):
        return True
    if d3 == 0 and _on_segment(p1, p2, q1):
        return True
    if d4 == 0 and _on_segment(p1, p2, q2):
        return True
    return False


@dataclass(frozen=True, slots=True)
class HalfPlane:
    """The closed set {(x, y) : a*x + b*y <= c}."""

    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise InvalidParams("Half-plane normal must be nonzero")

    @classmethod
    def through(cls, p: Point, q: Point) -> "HalfPlane":
        """Closed half-plane to the left of the directed line p -> q."""
        a = q.y - p.y
        b = p.x - q.x
        return cls(a, b, a * p.x + b * p.y)

    def value(self, p: Point) -> Fraction:
        return self.a * p.x + self.b * p.y - self.c

    def contains(self, p: Point) -> bool:
        return self.value(p) <= 0

    def complement(self) -> "HalfPlane":
        """The opposite closed half-plane (sharing the bounding line)."""
        return HalfPlane(-self.a, -self.b, -self.c)


def _dedupe_cyclic(points: list[Point]) -> list[Point]:
    out: list[Point] = []
    for p in points:
        if not out or out[-1] != p:
            out.append(p)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _signed_area2(points: Sequence[Point]) -> Fraction:
    total = Fraction(0)
    n = len(points)
    for i in range(n):
        a = points[i]
        b = points[(i + 1) % n]
        total += a.x * b.y - a.y * b.x
    return total


def _drop_collinear(points: list[Point], strict: bool) -> list[Point]:
    n = len(points)
    kept = []
    for i in range(n):
        prev, cur, nxt = points[i - 1], points[i], points[(i + 1) % n]
        if cross(prev, cur, nxt) == 0:
            if strict and not _on_segment(prev, nxt, cur):
                raise InvalidPolygon("Polygon folds back on itself", vertex=cur)
            continue
        kept.append(cur)
    return kept


def _rotate_canonical(points: list[Point]) -> tuple[Point, ...]:
    start = min(range(len(points)), key=lambda i: (points[i].y, points[i].x))
    return tuple(points[start:] + points[:start])


class ConvexPolygon:
    """Immutable convex polygon with positive area, vertices counterclockwise."""

    __slots__ = ("vertices", "_area", "_bbox")

    def __init__(self, points: Iterable) -> None:
        pts = [p if isinstance(p, Point) else pt(*p) for p in points]
        pts = _dedupe_cyclic(pts)
        if len(pts) < 3:
            raise InvalidPolygon("A polygon needs at least three distinct vertices")
        area2 = _signed_area2(pts)
        if area2 == 0:
            raise InvalidPolygon("Polygon has zero area")
        if area2 < 0:
            pts.reverse()
        pts = _drop_collinear(pts, strict=True)
        if len(pts) < 3:
            raise InvalidPolygon("Polygon has zero area")
        n = len(pts)
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            for j in range(n):
                if j != i and j != (i + 1) % n and cross(a, b, pts[j]) <= 0:
                    raise InvalidPolygon("Polygon is not strictly convex", edge=i)
        self.vertices: tuple[Point, ...] = _rotate_canonical(pts)
        self._area: Optional[Fraction] = None
        self._bbox = None

    @classmethod
    def _trusted(cls, points: list[Point]) -> Optional["ConvexPolygon"]:
        """Build from a counterclockwise convex chain; None if it has no area."""
        pts = _dedupe_cyclic(points)
        if len(pts) < 3:
            return None
        pts = _drop_collinear(pts, strict=False)
        if len(pts) < 3 or _signed_area2(pts) <= 0:
            return None
        poly = object.__new__(cls)
        poly.vertices = _rotate_canonical(pts)
        poly._area = None
        poly._bbox = None
        return poly

    @classmethod
    def rectangle(cls, x0, y0, x1, y1) -> "ConvexPolygon":
        return cls([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])

    @property
    def area(self) -> Fraction:
        if self._area is None:
            self._area = _signed_area2(self.vertices) / 2
        return self._area

    @property
    def bbox(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        if self._bbox is None:
            xs = [v.x for v in self.vertices]
            ys = [v.y for v in self.vertices]
            self._bbox = (min(xs), min(ys), max(xs), max(ys))
        return self._bbox

    def edges(self) -> Iterator[tuple[Point, Point]]:
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.vertices)

    def __eq__(self, other) -> bool:
        return isinstance(other, ConvexPolygon) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        body = ", ".join(f"({v.x}, {v.y})" for v in self.vertices)
        return f"ConvexPolygon([{body}])"


def edge_halfplanes(P: ConvexPolygon) -> list[HalfPlane]:
    """Supporting half-planes whose intersection is P."""
    return [HalfPlane.through(a, b) for a, b in P.edges()]


def contains_point(P: ConvexPolygon, p: Point) -> Location:
    minx, miny, maxx, maxy = P.bbox
    if p.x < minx or p.x > maxx or p.y < miny or p.y > maxy:
        return Location.OUTSIDE
    on_line = False
    for a, b in P.edges():
        s = cross(a, b, p)
        if s < 0:
            return Location.OUTSIDE
        if s == 0:
            on_line = True
    return Location.BOUNDARY if on_line else Location.INTERIOR


def clip_halfplane(P: ConvexPolygon, H: HalfPlane) -> Optional[ConvexPolygon]:
    """P ∩ H when it has positive area, otherwise None."""
    verts = P.vertices
    vals = [H.value(v) for v in verts]
    if all(v <= 0 for v in vals):
        return P
    if all(v >= 0 for v in vals):
        return None
    out: list[Point] = []
    n = len(verts)
    for i in range(n):
        cur, nxt = verts[i], verts[(i + 1) % n]
        vc, vn = vals[i], vals[(i + 1) % n]
        if vc <= 0:
            out.append(cur)
        if (vc < 0 < vn) or (vn < 0 < vc):
            t = vc / (vc - vn)
            out.append(Point(cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)))
    return ConvexPolygon._trusted(out)


def _bboxes_overlap(P: ConvexPolygon, Q: ConvexPolygon, closed: bool) -> bool:
    ax0, ay0, ax1, ay1 = P.bbox
    bx0, by0, bx1, by1 = Q.bbox
    if closed:
        return ax0 <= bx1 and bx0 <= ax1 and ay0 <= by1 and by0 <= ay1
    return ax0 < bx1 and bx0 < ax1 and ay0 < by1 and by0 < ay1


def convex_intersect(P: ConvexPolygon, Q: ConvexPolygon) -> Optional[ConvexPolygon]:
    if not _bboxes_overlap(P, Q, closed=False):
        return None
    result: Optional[ConvexPolygon] = P
    for a, b in Q.edges():
        result = clip_halfplane(result, HalfPlane.through(a, b))
        if result is None:
            return None
    return result


def interiors_intersect(P: ConvexPolygon, Q: ConvexPolygon) -> bool:
    return convex_intersect(P, Q) is not None


def touches(P: ConvexPolygon, Q: ConvexPolygon) -> bool:
    """True iff the closed polygons share at least one point."""
    if not _bboxes_overlap(P, Q, closed=True):
        return False
    if any(contains_point(Q, v) is not Location.OUTSIDE for v in P.vertices):
        return True
    if any(contains_point(P, v) is not Location.OUTSIDE for v in Q.vertices):
        return True
    for p1, p2 in P.edges():
        for q1, q2 in Q.edges():
            if segments_intersect(p1, p2, q1, q2):
                return True
    return False


def contains_polygon(P: ConvexPolygon, Q: ConvexPolygon) -> bool:
    """True iff Q ⊆ P."""
    return all(contains_point(P, v) is not Location.OUTSIDE for v in Q.vertices)


def _split_params(p0: Point, p1: Point, Q: ConvexPolygon) -> list[Fraction]:
    """Parameters along p0->p1 where the segment meets ∂Q, plus both endpoints."""
    params = {Fraction(0), Fraction(1)}
    dx, dy = p1.x - p0.x, p1.y - p0.y
    for q0, q1 in Q.edges():
        ex, ey = q1.x - q0.x, q1.y - q0.y
        wx, wy = q0.x - p0.x, q0.y - p0.y
        denom = dx * ey - dy * ex
        if denom != 0:
            t = (wx * ey - wy * ex) / denom
            u = (wx * dy - wy * dx) / denom
            if 0 <= t <= 1 and 0 <= u <= 1:
                params.add(t)
        elif wx * dy - wy * dx == 0:
            dd = dx * dx + dy * dy
            for q in (q0, q1):
                t = ((q.x - p0.x) * dx + (q.y - p0.y) * dy) / dd
                if 0 <= t <= 1:
                    params.add(t)
    return sorted(params)


def boundary_crossing_points(P: ConvexPolygon, Q: ConvexPolygon, allow_overlap: bool = False) -> list[Point]:
    """
    Points where ∂P passes between the interior and the exterior of Q, in CCW order along ∂P.

    Tangential contacts produce no point. Shared boundary stretches raise DegenerateOverlap
    unless allow_overlap is set, in which case they are skipped.
    """
    if not _bboxes_overlap(P, Q, closed=True):
        return []
    runs: list[tuple[Location, Point]] = []
    for p0, p1 in P.edges():
        params = _split_params(p0, p1, Q)
        dx, dy = p1.x - p0.x, p1.y - p0.y
        for t0, t1 in zip(params, params[1:]):
            tm = (t0 + t1) / 2
            state = contains_point(Q, Point(p0.x + tm * dx, p0.y + tm * dy))
            if state is Location.BOUNDARY:
                if not allow_overlap:
                    raise DegenerateOverlap("Boundaries share a segment", start=p0, end=p1)
                continue
            runs.append((state, Point(p0.x + t1 * dx, p0.y + t1 * dy)))
    points = []
    for i, (state, _) in enumerate(runs):
        prev_state, prev_end = runs[i - 1]
        if prev_state is not state:
            points.append(prev_end)
    return points


def boundary_crossings(P: ConvexPolygon, Q: ConvexPolygon, allow_overlap: bool = False) -> int:
    return len(boundary_crossing_points(P, Q, allow_overlap=allow_overlap))


def boundary_parameter(P: ConvexPolygon, p: Point) -> Fraction:
    """Exact perimeter parameter of a boundary point: edge index plus fraction along it."""
    for k, (a, b) in enumerate(P.edges()):
        if cross(a, b, p) == 0 and _on_segment(a, b, p):
            dx, dy = b.x - a.x, b.y - a.y
            t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy)
            if t < 1:
                return k + t
    raise InvalidParams("Point is not on the polygon boundary", point=p)


def point_at(P: ConvexPolygon, s: Fraction) -> Point:
    n = len(P.vertices)
    k = math.floor(s)
    t = s - k
    a = P.vertices[k % n]
    b = P.vertices[(k + 1) % n]
    return Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))


def cells_share_edge(A: ConvexPolygon, B: ConvexPolygon) -> bool:
    """True iff the boundaries of A and B share a segment of positive length."""
    for a0, a1 in A.edges():
        dx, dy = a1.x - a0.x, a1.y - a0.y
        dd = dx * dx + dy * dy
        for b0, b1 in B.edges():
            if cross(a0, a1, b0) != 0 or cross(a0, a1, b1) != 0:
                continue
            t0 = ((b0.x - a0.x) * dx + (b0.y - a0.y) * dy) / dd
            t1 = ((b1.x - a0.x) * dx + (b1.y - a0.y) * dy) / dd
            if min(1, max(t0, t1)) > max(0, min(t0, t1)):
                return True
    return False


@dataclass(frozen=True)
class Region:
    """Union of pairwise interior-disjoint convex cells; no cells means the empty region."""

    cells: tuple[ConvexPolygon, ...] = ()

    @classmethod
    def of(cls, polygon: ConvexPolygon) -> "Region":
        return cls((polygon,))

    @property
    def area(self) -> Fraction:
        return sum((c.area for c in self.cells), Fraction(0))

    @property
    def is_empty(self) -> bool:
        return not self.cells

    def __iter__(self) -> Iterator[ConvexPolygon]:
        return iter(self.cells)

    def __len__(self) -> int:
        return len(self.cells)


def region_subtract(R: Region, P: ConvexPolygon) -> Region:
    """R minus interior(P), split into convex cells along P's supporting lines."""
    out: list[ConvexPolygon] = []
    planes = None
    for cell in R.cells:
        if not interiors_intersect(cell, P):
            out.append(cell)
            continue
        if planes is None:
            planes = edge_halfplanes(P)
        remaining: Optional[ConvexPolygon] = cell
        for H in planes:
            piece = clip_halfplane(remaining, H.complement())
            if piece is not None:
                out.append(piece)
            remaining = clip_halfplane(remaining, H)
            if remaining is None:
                break
    return Region(tuple(out))


def region_intersect(R: Region, P: ConvexPolygon) -> Region:
    cells = (convex_intersect(c, P) for c in R.cells)
    return Region(tuple(c for c in cells if c is not None))


def region_contained_in(R: Region, P: ConvexPolygon) -> bool:
    return all(contains_polygon(P, c) for c in R.cells)


def area(shape: Union[ConvexPolygon, Region]) -> Fraction:
    return shape.area


def centroid(shape: Union[ConvexPolygon, Region]) -> Point:
    if isinstance(shape, Region):
        if shape.is_empty:
            raise InvalidParams("Empty region has no centroid")
        total = shape.area
        cs = [(centroid(c), c.area) for c in shape.cells]
        return Point(sum(p.x * a for p, a in cs) / total, sum(p.y * a for p, a in cs) / total)
    cx = cy = Fraction(0)
    for a, b in shape.edges():
        w = a.x * b.y - b.x * a.y
        cx += (a.x + b.x) * w
        cy += (a.y + b.y) * w
    six_area = 6 * shape.area
    return Point(cx / six_area, cy / six_area)


def union_area(polygons: Sequence[ConvexPolygon]) -> Fraction:
    """Exact area of the union: each polygon contributes what earlier ones leave uncovered."""
    total = Fraction(0)
    for i, P in enumerate(polygons):
        region = Region.of(P)
        for Q in polygons[:i]:
            region = region_subtract(region, Q)
            if region.is_empty:
                break
        total += region.area
    return total


def point_to_json(p: Point) -> list[str]:
    return [scalar_to_str(p.x), scalar_to_str(p.y)]


def point_from_json(data) -> Point:
    if not isinstance(data, (list, tuple)) or len(data) != 2:
        raise ParseError(f"Point must be a pair of rational strings: {data!r}")
    return pt(data[0], data[1])


def polygon_to_json(P: ConvexPolygon) -> list[list[str]]:
    return [point_to_json(v) for v in P.vertices]


def polygon_from_json(data) -> ConvexPolygon:
    if not isinstance(data, list):
        raise ParseError(f"Polygon must be a list of points: {data!r}")
    return ConvexPolygon([point_from_json(p) for p in data])
