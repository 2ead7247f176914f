"""
Intersection graphs, feasibility predicates and cover-free regions.

Domination uses closed-set intersection (touching objects are adjacent). Cover-free
regions subtract open interiors, so a zero-area contact never removes free area.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence, Union

import networkx as nx
from pydantic import BaseModel, ValidationError

from errors import InvalidParams, ParseError
from geometry_core import ConvexPolygon, Location, Region, contains_point, region_subtract, touches
from instances import CoverInstance, DominationInstance, Instance

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class IntersectionGraph:
    """Undirected graph on object indices; self-loops are implicit."""

    graph: nx.Graph

    @property
    def n(self) -> int:
        return self.graph.number_of_nodes()

    def adjacent(self, i: int, j: int) -> bool:
        return i == j or self.graph.has_edge(i, j)

    def neighbors(self, i: int) -> list[int]:
        return sorted(self.graph.neighbors(i))

    def closed_masks(self) -> tuple[int, ...]:
        """Bitmask of the closed neighborhood of every vertex."""
        masks = []
        for i in range(self.n):
            m = 1 << i
            for j in self.graph.neighbors(i):
                m |= 1 << j
            masks.append(m)
        return tuple(masks)


def build_graph(source: Union[Instance, Sequence[ConvexPolygon]]) -> IntersectionGraph:
    polygons = source.polygons if hasattr(source, "polygons") else list(source)
    G = nx.Graph()
    G.add_nodes_from(range(len(polygons)))
    for i in range(len(polygons)):
        for j in range(i + 1, len(polygons)):
            if touches(polygons[i], polygons[j]):
                G.add_edge(i, j)
    logger.debug(f"Built intersection graph n={G.number_of_nodes()} edges={G.number_of_edges()}")
    return IntersectionGraph(G)


@dataclass(frozen=True)
class Solution:
    """Selected object indices (sorted, distinct) plus provenance."""

    indices: tuple[int, ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        idx = tuple(self.indices)
        if len(set(idx)) != len(idx):
            raise InvalidParams("Solution indices must be distinct", indices=idx)
        if any(i < 0 for i in idx):
            raise InvalidParams("Solution indices must be nonnegative", indices=idx)
        object.__setattr__(self, "indices", tuple(sorted(idx)))

    @classmethod
    def of(cls, indices: Iterable[int], **meta) -> "Solution":
        return cls(tuple(indices), meta)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, i: int) -> bool:
        return i in self.indices

    def check_bounds(self, n: int) -> None:
        if any(i >= n for i in self.indices):
            raise InvalidParams("Solution index out of range", n=n, indices=self.indices)

    def to_json(self, instance_hash: str, include_timing: bool = False) -> str:
        meta = dict(self.meta)
        if not include_timing:
            meta.pop("wall_time", None)
        doc = {"instance_hash": instance_hash, "indices": list(self.indices), "meta": meta}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> tuple["Solution", str]:
        try:
            doc = SolutionDoc.model_validate_json(text)
        except ValidationError as e:
            raise ParseError(f"Solution document does not match the schema: {e}") from e
        return cls(tuple(doc.indices), doc.meta), doc.instance_hash


class SolutionDoc(BaseModel):
    instance_hash: str
    indices: list[int]
    meta: dict[str, Any] = {}


def is_dominating(graph: IntersectionGraph, S: Solution) -> bool:
    S.check_bounds(graph.n)
    return nx.is_dominating_set(graph.graph, S.indices)


def uncovered_points(instance: CoverInstance, S: Solution) -> list[int]:
    S.check_bounds(instance.n)
    chosen = [instance.objects[i] for i in S.indices]
    return [
        k
        for k, p in enumerate(instance.points)
        if all(contains_point(P, p) is Location.OUTSIDE for P in chosen)
    ]


def covers(instance: CoverInstance, S: Solution) -> bool:
    return not uncovered_points(instance, S)


@dataclass(frozen=True)
class CoverageModel:
    """
    Both problems as set cover over bitmasks: object i covers masks[i] of the universe.

    For domination the elements are vertices and masks are closed neighborhoods; for
    geometric cover the elements are the points.
    """

    kind: str
    universe: int
    masks: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.masks)

    def covered(self, indices: Iterable[int]) -> int:
        m = 0
        for i in indices:
            m |= self.masks[i]
        return m

    def is_feasible(self, indices: Iterable[int]) -> bool:
        return self.covered(indices) & self.universe == self.universe


def coverage_model(instance: Instance, graph: Optional[IntersectionGraph] = None) -> CoverageModel:
    if isinstance(instance, DominationInstance):
        graph = graph or build_graph(instance)
        return CoverageModel("domination", (1 << graph.n) - 1, graph.closed_masks())
    masks = []
    for P in instance.objects:
        m = 0
        for k, p in enumerate(instance.points):
            if contains_point(P, p) is not Location.OUTSIDE:
                m |= 1 << k
        masks.append(m)
    return CoverageModel("cover", (1 << len(instance.points)) - 1, tuple(masks))


def is_feasible(instance: Instance, S: Solution, graph: Optional[IntersectionGraph] = None) -> bool:
    """Independent feasibility check through the geometric predicates."""
    if isinstance(instance, DominationInstance):
        return is_dominating(graph or build_graph(instance), S)
    return covers(instance, S)


def cover_free_region_of(polygons: Sequence[ConvexPolygon], i: int, members: Iterable[int]) -> Region:
    """polygons[i] minus the interiors of every other member."""
    region = Region.of(polygons[i])
    for j in members:
        if j == i:
            continue
        region = region_subtract(region, polygons[j])
        if region.is_empty:
            break
    return region


def cover_free_region(i: int, S: Solution, instance: Instance) -> Region:
    if i not in S:
        raise InvalidParams("Cover-free region is defined for selected objects only", index=i)
    return cover_free_region_of(instance.polygons, i, S.indices)
