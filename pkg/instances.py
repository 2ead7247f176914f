"""
Instance data model, seeded generators and JSON file I/O.

Dominating-set instances keep their homothets symbolic (center, scale) over a base
shape; cover instances carry explicit polygons and points. Generators draw every
coordinate from a rational grid so all downstream arithmetic stays exact.
"""

import hashlib
import json
import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Literal, Optional, Sequence, Union

from pydantic import BaseModel, Field, ValidationError

from config import get_settings
from errors import (
    DegenerateOverlap,
    GenerationExhausted,
    InvalidParams,
    InvalidPolygon,
    InvariantViolation,
    ParseError,
)
from geometry_core import (
    ConvexPolygon,
    Location,
    Point,
    Region,
    boundary_crossings,
    contains_point,
    point_from_json,
    point_to_json,
    polygon_from_json,
    polygon_to_json,
    pt,
    region_subtract,
    scalar_to_str,
    to_scalar,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

BASE_KINDS = ("square", "regular", "triangle", "pentagon", "custom")
COVER_OBJECT_KINDS = ("homothets", "rectangles")


@dataclass(frozen=True)
class BaseShape:
    polygon: ConvexPolygon
    center: Point

    def __post_init__(self):
        if contains_point(self.polygon, self.center) is not Location.INTERIOR:
            raise InvariantViolation("Base shape center must be strictly interior", center=self.center)


@dataclass(frozen=True)
class Homothet:
    center: Point
    scale: Fraction

    def __post_init__(self):
        if self.scale <= 0:
            raise InvariantViolation("Homothet scale must be positive", scale=self.scale)


def instantiate(base: BaseShape, h: Homothet) -> ConvexPolygon:
    """Map every base vertex v to h.center + h.scale * (v - base.center)."""
    c = base.center
    return ConvexPolygon._trusted(
        [Point(h.center.x + h.scale * (v.x - c.x), h.center.y + h.scale * (v.y - c.y)) for v in base.polygon.vertices]
    )


@dataclass(frozen=True)
class DominationInstance:
    base: BaseShape
    objects: tuple[Homothet, ...]
    seed: Optional[int] = None
    params: dict = field(default_factory=dict, compare=False)

    kind = "domination"

    def __post_init__(self):
        if not self.objects:
            raise InvariantViolation("Dominating-set instance needs at least one object")

    @cached_property
    def polygons(self) -> tuple[ConvexPolygon, ...]:
        return tuple(instantiate(self.base, h) for h in self.objects)

    @property
    def n(self) -> int:
        return len(self.objects)


@dataclass(frozen=True)
class CoverInstance:
    objects: tuple[ConvexPolygon, ...]
    points: tuple[Point, ...] = ()
    seed: Optional[int] = None
    params: dict = field(default_factory=dict, compare=False)

    kind = "cover"

    def __post_init__(self):
        if not self.objects:
            raise InvariantViolation("Cover instance needs at least one object")

    @property
    def polygons(self) -> tuple[ConvexPolygon, ...]:
        return self.objects

    @property
    def n(self) -> int:
        return len(self.objects)


Instance = Union[DominationInstance, CoverInstance]


# Base shapes

TRIANGLE = [(-1, -1), (3, -1), (-1, 3)]
PENTAGON = [(0, -2), (3, -1), (2, 2), (-1, 3), (-2, 0)]


def regular_polygon(k: int, denominator: int = 4096) -> ConvexPolygon:
    """Regular k-gon around the origin with vertices rounded to a rational grid."""
    if k < 3:
        raise InvalidParams("A regular polygon needs k >= 3", k=k)
    verts = []
    for i in range(k):
        theta = math.pi / 2 + 2 * math.pi * i / k
        verts.append(
            Point(
                Fraction(math.cos(theta)).limit_denominator(denominator),
                Fraction(math.sin(theta)).limit_denominator(denominator),
            )
        )
    return ConvexPolygon(verts)


def make_base(kind: str = "square", k: int = 6, custom: Optional[BaseShape] = None) -> BaseShape:
    if kind == "square":
        return BaseShape(ConvexPolygon.rectangle(0, 0, 1, 1), pt(Fraction(1, 2), Fraction(1, 2)))
    if kind == "regular":
        return BaseShape(regular_polygon(k), pt(0, 0))
    if kind == "triangle":
        return BaseShape(ConvexPolygon(TRIANGLE), pt(0, 0))
    if kind == "pentagon":
        return BaseShape(ConvexPolygon(PENTAGON), pt(0, 0))
    if kind == "custom":
        if custom is None:
            raise InvalidParams("Custom base kind requires a base shape")
        return custom
    raise InvalidParams(f"Unknown base shape kind: {kind}", known=BASE_KINDS)


# Pseudodisk checks


@dataclass(frozen=True)
class PseudodiskOffender:
    i: int
    j: int
    crossings: Optional[int]
    reason: str


@dataclass(frozen=True)
class PseudodiskReport:
    offenders: tuple[PseudodiskOffender, ...]
    pairs_checked: int

    @property
    def ok(self) -> bool:
        return not self.offenders


def _pair_offence(P: ConvexPolygon, Q: ConvexPolygon) -> Optional[tuple[Optional[int], str]]:
    try:
        count = boundary_crossings(P, Q)
    except DegenerateOverlap:
        return None, "overlap"
    if count > 2:
        return count, "crossings"
    return None


def verify_pseudodisk_family(objects: Sequence[ConvexPolygon]) -> PseudodiskReport:
    """List every pair crossing more than twice or overlapping along a boundary segment."""
    offenders = []
    checked = 0
    for i in range(len(objects)):
        for j in range(i + 1, len(objects)):
            checked += 1
            offence = _pair_offence(objects[i], objects[j])
            if offence is not None:
                offenders.append(PseudodiskOffender(i, j, offence[0], offence[1]))
    return PseudodiskReport(tuple(offenders), checked)


# Generators


def _grid_value(rng: random.Random, lo: Fraction, hi: Fraction, den: int) -> Fraction:
    a = math.ceil(lo * den)
    b = math.floor(hi * den)
    if a > b:
        raise InvalidParams("Range contains no grid value", lo=lo, hi=hi, denominator=den)
    return Fraction(rng.randint(a, b), den)


def _check_range(scale_range) -> tuple[Fraction, Fraction]:
    if isinstance(scale_range, (str, bytes)) or not hasattr(scale_range, "__len__") or len(scale_range) != 2:
        raise InvalidParams("Scale range must be a (min, max) pair", scale_range=scale_range)
    try:
        lo, hi = (to_scalar(v) for v in scale_range)
    except ParseError as e:
        raise InvalidParams(f"Scale range bounds must be exact rationals: {e}", scale_range=scale_range) from e
    if lo <= 0 or hi < lo:
        raise InvalidParams("Scale range must satisfy 0 < min <= max", min=lo, max=hi)
    return lo, hi


def _generator_knobs(retry_budget: Optional[int], grid_denominator: Optional[int]) -> tuple[int, int]:
    settings = get_settings()
    budget = retry_budget if retry_budget is not None else settings.retry_budget
    den = grid_denominator if grid_denominator is not None else settings.grid_denominator
    if budget < 1 or not 1 <= den <= 2 ** 16:
        raise InvalidParams("Retry budget must be >= 1 and grid denominator in [1, 2^16]")
    return budget, den


def gen_domination(
    n: int,
    kind: str = "square",
    scale_range=(Fraction(1, 2), Fraction(2)),
    extent=10,
    seed: int = 0,
    k: int = 6,
    custom: Optional[BaseShape] = None,
    retry_budget: Optional[int] = None,
    grid_denominator: Optional[int] = None,
) -> DominationInstance:
    """Random homothets of one base shape with centers in [0, extent]^2."""
    if not isinstance(n, int) or n < 1:
        raise InvalidParams("n must be a positive integer", n=n)
    lo, hi = _check_range(scale_range)
    extent = to_scalar(extent)
    if extent < 0:
        raise InvalidParams("Extent must be nonnegative", extent=extent)
    budget, den = _generator_knobs(retry_budget, grid_denominator)
    base = make_base(kind, k, custom)
    rng = random.Random(seed)

    homothets: list[Homothet] = []
    polygons: list[ConvexPolygon] = []
    rejections = 0
    for index in range(n):
        for _ in range(budget):
            h = Homothet(
                Point(_grid_value(rng, Fraction(0), extent, den), _grid_value(rng, Fraction(0), extent, den)),
                _grid_value(rng, lo, hi, den),
            )
            poly = instantiate(base, h)
            if any(_pair_offence(poly, other) is not None for other in polygons):
                rejections += 1
                continue
            homothets.append(h)
            polygons.append(poly)
            break
        else:
            raise GenerationExhausted("Could not place homothet", index=index, budget=budget)

    params = {
        "kind": kind,
        "k": k if kind == "regular" else None,
        "scale_range": [scalar_to_str(lo), scalar_to_str(hi)],
        "extent": scalar_to_str(extent),
        "grid_denominator": den,
        "rejections": rejections,
    }
    logger.info(f"Generated domination instance n={n} kind={kind} seed={seed} rejections={rejections}")
    return DominationInstance(base, tuple(homothets), seed=seed, params=params)


def _random_point_inside(rng: random.Random, poly: ConvexPolygon) -> Point:
    """Strict convex combination of the vertices, so the point is interior."""
    weights = [rng.randint(1, 16) for _ in poly.vertices]
    total = sum(weights)
    x = sum(w * v.x for w, v in zip(weights, poly.vertices)) / total
    y = sum(w * v.y for w, v in zip(weights, poly.vertices)) / total
    return Point(Fraction(x), Fraction(y))


def gen_cover(
    n_objects: int,
    n_points: int,
    object_kind: str = "homothets",
    seed: int = 0,
    base_kind: str = "square",
    k: int = 6,
    scale_range=(Fraction(1), Fraction(3)),
    extent=10,
    cover_free: bool = False,
    retry_budget: Optional[int] = None,
    grid_denominator: Optional[int] = None,
) -> CoverInstance:
    """
    Rejection-sample a convex pseudodisk family and points inside its union.

    A candidate is redrawn when it crosses an accepted object more than twice, shares a
    boundary segment with one, or (with cover_free) would leave some member without a
    cover-free region.
    """
    if not isinstance(n_objects, int) or n_objects < 1:
        raise InvalidParams("n_objects must be a positive integer", n_objects=n_objects)
    if not isinstance(n_points, int) or n_points < 0:
        raise InvalidParams("n_points must be a nonnegative integer", n_points=n_points)
    if object_kind not in COVER_OBJECT_KINDS:
        raise InvalidParams(f"Unknown object kind: {object_kind}", known=COVER_OBJECT_KINDS)
    lo, hi = _check_range(scale_range)
    extent = to_scalar(extent)
    budget, den = _generator_knobs(retry_budget, grid_denominator)
    base = make_base(base_kind, k) if object_kind == "homothets" else None
    rng = random.Random(seed)

    def draw() -> ConvexPolygon:
        cx = _grid_value(rng, Fraction(0), extent, den)
        cy = _grid_value(rng, Fraction(0), extent, den)
        if base is not None:
            return instantiate(base, Homothet(Point(cx, cy), _grid_value(rng, lo, hi, den)))
        w = _grid_value(rng, lo, hi, den)
        h = _grid_value(rng, lo, hi, den)
        return ConvexPolygon.rectangle(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2)

    objects: list[ConvexPolygon] = []
    free: list[Region] = []
    rejections = 0
    for index in range(n_objects):
        for _ in range(budget):
            cand = draw()
            if any(_pair_offence(cand, other) is not None for other in objects):
                rejections += 1
                continue
            if cover_free:
                own = Region.of(cand)
                for other in objects:
                    own = region_subtract(own, other)
                shrunk = [region_subtract(r, cand) for r in free]
                if own.is_empty or any(r.is_empty for r in shrunk):
                    rejections += 1
                    continue
                free = shrunk + [own]
            objects.append(cand)
            break
        else:
            raise GenerationExhausted("Could not place object", index=index, budget=budget)

    points = []
    for _ in range(n_points):
        points.append(_random_point_inside(rng, objects[rng.randrange(len(objects))]))

    params = {
        "object_kind": object_kind,
        "base_kind": base_kind if base is not None else None,
        "k": k if base_kind == "regular" and base is not None else None,
        "scale_range": [scalar_to_str(lo), scalar_to_str(hi)],
        "extent": scalar_to_str(extent),
        "grid_denominator": den,
        "cover_free": cover_free,
        "rejections": rejections,
    }
    logger.info(
        f"Generated cover instance objects={n_objects} points={n_points} kind={object_kind} "
        f"seed={seed} rejections={rejections}"
    )
    return CoverInstance(tuple(objects), tuple(points), seed=seed, params=params)


def gen_cover_free_family(n: int, seed: int = 0, **kwargs) -> list[ConvexPolygon]:
    """A cover-free convex pseudodisk family of n polygons."""
    return list(gen_cover(n, 0, seed=seed, cover_free=True, **kwargs).objects)


# Validation and file I/O


def validate_instance(instance: Instance) -> None:
    """Raise InvariantViolation if a loaded instance breaks its type's invariants."""
    if isinstance(instance, CoverInstance):
        report = verify_pseudodisk_family(instance.objects)
        if not report.ok:
            first = report.offenders[0]
            raise InvariantViolation(
                "Objects are not a convex pseudodisk family",
                pair=(first.i, first.j),
                reason=first.reason,
                crossings=first.crossings,
            )
        for idx, p in enumerate(instance.points):
            if all(contains_point(P, p) is Location.OUTSIDE for P in instance.objects):
                raise InvariantViolation("Point is not covered by any object", point=idx)


class BaseShapeDoc(BaseModel):
    polygon: list[list[str]]
    center: list[str]


class HomothetDoc(BaseModel):
    center: list[str]
    scale: str


class InstanceDoc(BaseModel):
    version: int = Field(..., description="Schema version")
    kind: Literal["domination", "cover"]
    base: Optional[BaseShapeDoc] = None
    homothets: Optional[list[HomothetDoc]] = None
    objects: Optional[list[list[list[str]]]] = None
    points: Optional[list[list[str]]] = None
    seed: Optional[int] = None
    params: dict[str, Any] = Field(default_factory=dict)


def to_document(instance: Instance) -> dict:
    doc: dict[str, Any] = {"version": SCHEMA_VERSION, "kind": instance.kind, "params": instance.params}
    if instance.seed is not None:
        doc["seed"] = instance.seed
    if isinstance(instance, DominationInstance):
        doc["base"] = {
            "polygon": polygon_to_json(instance.base.polygon),
            "center": point_to_json(instance.base.center),
        }
        doc["homothets"] = [
            {"center": point_to_json(h.center), "scale": scalar_to_str(h.scale)} for h in instance.objects
        ]
    else:
        doc["objects"] = [polygon_to_json(P) for P in instance.objects]
        doc["points"] = [point_to_json(p) for p in instance.points]
    return doc


def dumps(instance: Instance) -> str:
    return json.dumps(to_document(instance), sort_keys=True, indent=2) + "\n"


def from_document(data: Any) -> Instance:
    try:
        doc = InstanceDoc.model_validate(data)
    except ValidationError as e:
        raise ParseError(f"Instance document does not match the schema: {e}") from e
    if doc.version != SCHEMA_VERSION:
        raise ParseError(f"Unsupported instance schema version {doc.version}")
    try:
        if doc.kind == "domination":
            if doc.base is None or doc.homothets is None:
                raise ParseError("Domination instance needs 'base' and 'homothets'")
            base = BaseShape(polygon_from_json(doc.base.polygon), point_from_json(doc.base.center))
            homothets = tuple(Homothet(point_from_json(h.center), to_scalar(h.scale)) for h in doc.homothets)
            instance: Instance = DominationInstance(base, homothets, seed=doc.seed, params=doc.params)
        else:
            if doc.objects is None:
                raise ParseError("Cover instance needs 'objects'")
            objects = tuple(polygon_from_json(P) for P in doc.objects)
            points = tuple(point_from_json(p) for p in (doc.points or []))
            instance = CoverInstance(objects, points, seed=doc.seed, params=doc.params)
    except InvalidPolygon as e:
        raise InvariantViolation(f"Invalid polygon in instance: {e}") from e
    validate_instance(instance)
    return instance


def loads(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Instance is not valid JSON: {e}") from e
    return from_document(data)


def save(instance: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(instance), encoding="utf-8")
    logger.info(f"Saved {instance.kind} instance with {instance.n} objects to {path}")


def load(path: Union[str, Path]) -> Instance:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"Cannot read instance file {path}: {e}") from e
    try:
        return loads(text)
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from e


def instance_hash(instance: Instance) -> str:
    return hashlib.sha256(dumps(instance).encode("utf-8")).hexdigest()
