"""
Disjoint union decomposition of cover-free convex pseudodisk families, and the
petal / separating-edge construction for one overlapping pair.

Phase i cuts the current piece of object i against every piece whose interior it
overlaps, along the chord through their two boundary crossings. Object i keeps the side
holding the part of it outside the neighbor; the neighbor keeps the other side.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional, Sequence

import networkx as nx

from errors import (
    ConflictingCO,
    DegenerateChord,
    InvalidParams,
    InvariantViolation,
    NoSeparator,
    NotCoverFree,
    NotPseudodisks,
)
from feasibility import cover_free_region_of
from geometry_core import (
    ConvexPolygon,
    HalfPlane,
    Location,
    Point,
    Region,
    boundary_crossing_points,
    boundary_crossings,
    boundary_parameter,
    cells_share_edge,
    centroid,
    clip_halfplane,
    contains_point,
    contains_polygon,
    convex_intersect,
    interiors_intersect,
    point_at,
    point_to_json,
    polygon_to_json,
    region_contained_in,
    region_subtract,
    touches,
    union_area,
)
from instances import verify_pseudodisk_family

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChordCut:
    neighbor: int
    p: Point
    q: Point
    kept: HalfPlane


@dataclass(frozen=True)
class PhaseRecord:
    index: int
    cuts: tuple[ChordCut, ...]
    tangential: tuple[int, ...]
    max_crossings: int
    snapshot: tuple[ConvexPolygon, ...]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "cuts": [
                {"neighbor": c.neighbor, "chord": [point_to_json(c.p), point_to_json(c.q)]} for c in self.cuts
            ],
            "tangential": list(self.tangential),
            "max_crossings": self.max_crossings,
        }


@dataclass(frozen=True)
class DecompositionResult:
    tilde: tuple[ConvexPolygon, ...]
    phase_log: tuple[PhaseRecord, ...] = ()

    @property
    def chords(self) -> list[tuple[Point, Point]]:
        return [(c.p, c.q) for rec in self.phase_log for c in rec.cuts]


def _check_preconditions(family: Sequence[ConvexPolygon]) -> list[Region]:
    report = verify_pseudodisk_family(family)
    if not report.ok:
        first = report.offenders[0]
        raise NotPseudodisks(
            "Family is not a convex pseudodisk family", pair=(first.i, first.j), reason=first.reason
        )
    regions = []
    for i in range(len(family)):
        cf = cover_free_region_of(family, i, range(len(family)))
        if cf.is_empty:
            raise NotCoverFree("Object has an empty cover-free region", index=i)
        regions.append(cf)
    return regions


def _chord_side(X: ConvexPolygon, T: ConvexPolygon, line: HalfPlane, cf: Region) -> HalfPlane:
    """The closed side of the chord line that X keeps when cut against T."""
    for v in X.vertices:
        if contains_point(T, v) is Location.OUTSIDE and line.value(v) != 0:
            return line if line.value(v) < 0 else line.complement()
    if not cf.is_empty:
        c = centroid(cf)
        if line.value(c) != 0:
            return line if line.value(c) < 0 else line.complement()
    for v in T.vertices:
        if contains_point(X, v) is Location.OUTSIDE and line.value(v) != 0:
            return line.complement() if line.value(v) < 0 else line
    raise DegenerateChord("Cannot decide which side of the chord to keep")


def _inside(H: HalfPlane, region: Region) -> bool:
    return all(H.contains(v) for cell in region.cells for v in cell.vertices)


def _max_pair_crossings(pieces: Sequence[ConvexPolygon]) -> int:
    worst = 0
    for a, b in itertools.combinations(pieces, 2):
        worst = max(worst, boundary_crossings(a, b, allow_overlap=True))
    return worst


def disjoint_union_decomposition(family: Sequence[ConvexPolygon]) -> DecompositionResult:
    family = list(family)
    if not family:
        return DecompositionResult(())
    cf_regions = _check_preconditions(family)
    tilde: list[ConvexPolygon] = list(family)
    log = []
    for i in range(len(family)):
        X = tilde[i]
        cuts = []
        tangential = []
        piece = X
        for j in range(len(family)):
            if j == i:
                continue
            T = tilde[j]
            if not interiors_intersect(X, T):
                if touches(X, T):
                    tangential.append(j)
                continue
            pts = boundary_crossing_points(X, T, allow_overlap=True)
            if len(pts) != 2:
                raise DegenerateChord("Overlapping pieces must cross exactly twice", i=i, j=j, crossings=len(pts))
            p, q = pts
            H = _chord_side(X, T, HalfPlane.through(p, q), cf_regions[i])
            if not (_inside(H, cf_regions[i]) and _inside(H.complement(), cf_regions[j])):
                raise DegenerateChord("Chord splits a cover-free region", i=i, j=j, chord=(p, q))
            kept_by_j = clip_halfplane(T, H.complement())
            piece = clip_halfplane(piece, H) if piece is not None else None
            if kept_by_j is None or piece is None:
                raise InvariantViolation("A cut emptied a piece", i=i, j=j)
            tilde[j] = kept_by_j
            cuts.append(ChordCut(j, p, q, H))
            logger.debug(f"Phase {i}: cut against {j} along {p} - {q}")
        tilde[i] = piece
        if tangential:
            logger.info(f"Phase {i}: tangential contact only with {tangential}")

        worst = _max_pair_crossings(tilde)
        if worst > 2:
            raise InvariantViolation("Pieces cross more than twice after a phase", phase=i, crossings=worst)
        for t in range(i + 1):
            for other in range(len(tilde)):
                if other != t and interiors_intersect(tilde[t], tilde[other]):
                    raise InvariantViolation("Finished piece still overlaps", phase=i, pair=(t, other))
        log.append(PhaseRecord(i, tuple(cuts), tuple(tangential), worst, tuple(tilde)))

    for j, (cf, piece) in enumerate(zip(cf_regions, tilde)):
        if not region_contained_in(cf, piece):
            raise InvariantViolation("Piece lost part of its cover-free region", index=j)
    logger.info(f"Decomposed {len(family)} objects with {sum(len(r.cuts) for r in log)} cuts")
    return DecompositionResult(tuple(tilde), tuple(log))


@dataclass
class DecompositionReport:
    length_match: bool
    subset: list[bool] = field(default_factory=list)
    convex: list[bool] = field(default_factory=list)
    union_discrepancy: Fraction = Fraction(0)
    overlapping_pairs: list[tuple[int, int]] = field(default_factory=list)
    cf_contained: Optional[list[bool]] = None
    max_phase_crossings: int = 0

    @property
    def passed(self) -> bool:
        return (
            self.length_match
            and all(self.subset)
            and all(self.convex)
            and self.union_discrepancy == 0
            and not self.overlapping_pairs
            and (self.cf_contained is None or all(self.cf_contained))
            and self.max_phase_crossings <= 2
        )

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "length_match": self.length_match,
            "subset": self.subset,
            "convex": self.convex,
            "union_discrepancy": str(self.union_discrepancy),
            "overlapping_pairs": [list(p) for p in self.overlapping_pairs],
            "cf_contained": self.cf_contained,
            "max_phase_crossings": self.max_phase_crossings,
        }


def verify_decomposition(family: Sequence[ConvexPolygon], result: DecompositionResult) -> DecompositionReport:
    """Re-check every decomposition property from scratch; never raises on a failed check."""
    family = list(family)
    tilde = list(result.tilde)
    if len(family) != len(tilde):
        return DecompositionReport(length_match=False)
    report = DecompositionReport(length_match=True)
    report.convex = [isinstance(t, ConvexPolygon) and t.area > 0 for t in tilde]
    report.subset = [contains_polygon(R, t) for R, t in zip(family, tilde)]
    report.union_discrepancy = union_area(tilde) - union_area(family)
    report.overlapping_pairs = [
        (a, b) for a, b in itertools.combinations(range(len(tilde)), 2) if interiors_intersect(tilde[a], tilde[b])
    ]
    if verify_pseudodisk_family(family).ok:
        cfs = [cover_free_region_of(family, i, range(len(family))) for i in range(len(family))]
        if all(not cf.is_empty for cf in cfs):
            report.cf_contained = [region_contained_in(cf, t) for cf, t in zip(cfs, tilde)]
    report.max_phase_crossings = max((rec.max_crossings for rec in result.phase_log), default=0)
    if not report.passed:
        logger.warning(f"Decomposition check failed: overlaps={report.overlapping_pairs}")
    return report


# Petals and separating edges


@dataclass(frozen=True)
class Petal:
    owner: Literal["U", "V"]
    region: Region
    upetal: bool
    start: Point
    end: Point
    start_param: Fraction
    length: Fraction

    @property
    def mid_param(self) -> Fraction:
        return self.start_param + self.length / 2


@dataclass(frozen=True)
class PetalClassification:
    intersection: ConvexPolygon
    crossing_points: tuple[Point, ...]
    petals: tuple[Petal, ...]
    clockwise: tuple[int, ...]
    co: frozenset

    @property
    def u_petals(self) -> list[Petal]:
        return [p for p in self.petals if p.owner == "U"]

    @property
    def v_petals(self) -> list[Petal]:
        return [p for p in self.petals if p.owner == "V"]

    @property
    def upetal_intervals(self) -> list[int]:
        return [k for k, p in enumerate(self.petals) if p.upetal]

    @property
    def conflicting(self) -> bool:
        ups = self.upetal_intervals
        us = [k for k in ups if self.petals[k].owner == "U"]
        vs = [k for k in ups if self.petals[k].owner == "V"]
        for u1, u2 in itertools.permutations(us, 2):
            for v1, v2 in itertools.product(vs, repeat=2):
                if (u1, v1, u2) in self.co and (u2, v2, u1) in self.co:
                    return True
        return False


def _components(region: Region) -> list[Region]:
    G = nx.Graph()
    cells = list(region.cells)
    G.add_nodes_from(range(len(cells)))
    for a, b in itertools.combinations(range(len(cells)), 2):
        if cells_share_edge(cells[a], cells[b]):
            G.add_edge(a, b)
    comps = [sorted(c) for c in nx.connected_components(G)]
    comps.sort()
    return [Region(tuple(cells[k] for k in comp)) for comp in comps]


def _on_region(region: Region, p: Point) -> bool:
    return any(contains_point(c, p) is not Location.OUTSIDE for c in region.cells)


def _petals(
    owner: Literal["U", "V"],
    inner: ConvexPolygon,
    other0: ConvexPolygon,
    other: ConvexPolygon,
    R0: ConvexPolygon,
    points: Sequence[Point],
) -> list[Petal]:
    period = Fraction(len(R0.vertices))
    petals = []
    for comp in _components(region_subtract(Region.of(inner), other0)):
        ends = [p for p in points if _on_region(comp, p)]
        if len(ends) != 2:
            raise InvariantViolation("Petal must meet the lens at two crossing points", owner=owner, ends=len(ends))
        s1, s2 = (boundary_parameter(R0, p) for p in ends)
        length = (s2 - s1) % period
        if _on_region(comp, point_at(R0, s1 + length / 2)):
            start, end, start_param = ends[0], ends[1], s1
        else:
            start, end, start_param, length = ends[1], ends[0], s2, period - length
        upetal = region_subtract(comp, other).area > 0
        petals.append(Petal(owner, comp, upetal, start, end, start_param, length))
    return petals


def classify_petals(U0: ConvexPolygon, V0: ConvexPolygon, U: ConvexPolygon, V: ConvexPolygon) -> PetalClassification:
    R0 = convex_intersect(U0, V0)
    if R0 is None:
        raise InvalidParams("Pieces must have overlapping interiors")
    if not (contains_polygon(U, U0) and contains_polygon(V, V0)):
        raise InvalidParams("Pieces must lie inside their objects")
    points = boundary_crossing_points(U0, V0, allow_overlap=True)
    petals = _petals("U", U0, V0, V, R0, points) + _petals("V", V0, U0, U, R0, points)
    period = Fraction(len(R0.vertices))
    clockwise = tuple(sorted(range(len(petals)), key=lambda k: -(petals[k].mid_param % period)))
    ups = [k for k in clockwise if petals[k].upetal]
    co = set()
    for a, b, c in itertools.combinations(range(len(ups)), 3):
        x, y, z = ups[a], ups[b], ups[c]
        co.update({(x, y, z), (y, z, x), (z, x, y)})
    result = PetalClassification(R0, tuple(points), tuple(petals), clockwise, frozenset(co))
    logger.debug(f"Petals U={len(result.u_petals)} V={len(result.v_petals)} crossings={len(points)}")
    return result


@dataclass(frozen=True)
class SeparatingEdge:
    p: Point
    q: Point
    h_i: HalfPlane
    h_j: HalfPlane

    def to_dict(self) -> dict:
        return {"p": point_to_json(self.p), "q": point_to_json(self.q)}


@dataclass(frozen=True)
class SeparatingEdgeCheck:
    disjoint: bool
    shared_edge: bool
    u_rest_in_v: bool
    v_rest_in_u: bool
    cf_contained: Optional[bool]
    petal_sides: bool

    @property
    def passed(self) -> bool:
        return all(
            (self.disjoint, self.shared_edge, self.u_rest_in_v, self.v_rest_in_u, self.petal_sides)
        ) and self.cf_contained is not False


def _on_boundary(P: ConvexPolygon, p: Point) -> bool:
    return contains_point(P, p) is Location.BOUNDARY


def verify_separating_edge(
    U0: ConvexPolygon,
    V0: ConvexPolygon,
    U: ConvexPolygon,
    V: ConvexPolygon,
    U_ij: ConvexPolygon,
    V_ji: ConvexPolygon,
    edge: SeparatingEdge,
    petals: PetalClassification,
    cf_u: Optional[Region] = None,
    cf_v: Optional[Region] = None,
) -> SeparatingEdgeCheck:
    mid = Point((edge.p.x + edge.q.x) / 2, (edge.p.y + edge.q.y) / 2)
    shared = edge.p in petals.crossing_points and edge.q in petals.crossing_points
    shared = shared and all(_on_boundary(U_ij, x) and _on_boundary(V_ji, x) for x in (edge.p, edge.q, mid))
    cf_ok = None
    if cf_u is not None or cf_v is not None:
        cf_ok = (cf_u is None or region_contained_in(cf_u, U_ij)) and (cf_v is None or region_contained_in(cf_v, V_ji))
    sides = True
    for petal in petals.petals:
        if not petal.upetal:
            continue
        H = edge.h_i if petal.owner == "U" else edge.h_j
        if not all(H.contains(v) for cell in petal.region for v in cell.vertices):
            sides = False
    return SeparatingEdgeCheck(
        disjoint=not interiors_intersect(U_ij, V_ji),
        shared_edge=shared,
        u_rest_in_v=region_contained_in(region_subtract(Region.of(U0), U_ij), V),
        v_rest_in_u=region_contained_in(region_subtract(Region.of(V0), V_ji), U),
        cf_contained=cf_ok,
        petal_sides=sides,
    )


def _arc_holds(start: Fraction, length: Fraction, petal: Petal, period: Fraction) -> bool:
    return (petal.start_param - start) % period + petal.length <= length


def _side_probe(R0: ConvexPolygon, start: Fraction, length: Fraction, petals: Sequence[Petal], U0, V0):
    yield point_at(R0, start + length / 2)
    period = len(R0.vertices)
    for k, v in enumerate(R0.vertices):
        if 0 < (k - start) % period < length:
            yield v
    for petal in petals:
        for cell in petal.region:
            yield from cell.vertices
    for v in U0.vertices:
        if contains_point(V0, v) is Location.OUTSIDE:
            yield v


def separating_edge(
    U0: ConvexPolygon,
    V0: ConvexPolygon,
    U: ConvexPolygon,
    V: ConvexPolygon,
    cf_u: Optional[Region] = None,
    cf_v: Optional[Region] = None,
) -> tuple[ConvexPolygon, ConvexPolygon, SeparatingEdge]:
    """Split an overlapping pair along a chord joining two crossings of their boundaries."""
    petals = classify_petals(U0, V0, U, V)
    if petals.conflicting:
        raise ConflictingCO("Upetal intervals of the two pieces interleave")
    R0 = petals.intersection
    period = Fraction(len(R0.vertices))
    ordered = sorted(petals.crossing_points, key=lambda x: boundary_parameter(R0, x))
    u_ups = [p for p in petals.u_petals if p.upetal]
    v_ups = [p for p in petals.v_petals if p.upetal]
    for p, q in itertools.permutations(ordered, 2):
        start = boundary_parameter(R0, p)
        length = (boundary_parameter(R0, q) - start) % period
        if not all(_arc_holds(start, length, x, period) for x in u_ups):
            continue
        if not all(_arc_holds(start + length, period - length, x, period) for x in v_ups):
            continue
        line = HalfPlane.through(p, q)
        probe = next((x for x in _side_probe(R0, start, length, u_ups, U0, V0) if line.value(x) != 0), None)
        if probe is None:
            continue
        h_i = line if line.value(probe) < 0 else line.complement()
        edge = SeparatingEdge(p, q, h_i, h_i.complement())
        U_ij = clip_halfplane(U0, edge.h_i)
        V_ji = clip_halfplane(V0, edge.h_j)
        if U_ij is None or V_ji is None:
            continue
        check = verify_separating_edge(U0, V0, U, V, U_ij, V_ji, edge, petals, cf_u, cf_v)
        if check.passed:
            logger.debug(f"Separating edge {p} - {q}")
            return U_ij, V_ji, edge
    raise NoSeparator("No chord separates the upetal intervals", crossings=len(ordered))


def decomposition_to_dict(result: DecompositionResult, report: DecompositionReport) -> dict:
    return {
        "report": report.to_dict(),
        "tilde": [polygon_to_json(t) for t in result.tilde],
        "phases": [rec.to_dict() for rec in result.phase_log],
    }
