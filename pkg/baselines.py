"""
Exact small-instance oracles and greedy baselines.

Both problems go through the same bitmask set-cover core (see feasibility.CoverageModel).
The exact oracle is branch-and-bound for the optimal cardinality followed by a
lexicographic search at that cardinality, so its answer is the least optimal index set.
"""

import itertools
import logging
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from config import get_settings
from errors import BudgetExceeded, InfeasibleInstance, InvalidParams
from feasibility import CoverageModel, IntersectionGraph, Solution, coverage_model
from instances import CoverInstance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleBudget:
    max_n: int = 24
    max_nodes: int = 2_000_000
    time_limit: float = 60.0

    def __post_init__(self):
        if self.max_n < 1 or self.max_nodes < 1 or self.time_limit <= 0:
            raise InvalidParams("Oracle budget values must be positive")

    @classmethod
    def from_settings(cls) -> "OracleBudget":
        s = get_settings()
        return cls(s.oracle_max_n, s.oracle_max_nodes, s.oracle_time_limit)


def greedy_cover(universe: int, masks: Sequence[int]) -> list[int]:
    """Pick the set covering most uncovered elements, ties to the lowest index."""
    uncovered = universe
    chosen = []
    while uncovered:
        best, gain = -1, 0
        for i, m in enumerate(masks):
            g = (m & uncovered).bit_count()
            if g > gain:
                best, gain = i, g
        if best < 0:
            raise InfeasibleInstance("Some element is covered by no object", uncovered=bin(uncovered))
        chosen.append(best)
        uncovered &= ~masks[best]
    return sorted(chosen)


def greedy_dominating_set(graph: IntersectionGraph) -> Solution:
    indices = greedy_cover((1 << graph.n) - 1, graph.closed_masks())
    return Solution.of(indices, solver="greedy")


def greedy_set_cover(instance: CoverInstance) -> Solution:
    model = coverage_model(instance)
    return Solution.of(greedy_cover(model.universe, model.masks), solver="greedy")


class _Search:
    """Node and time accounting shared by both oracle phases."""

    def __init__(self, budget: OracleBudget):
        self.budget = budget
        self.nodes = 0
        self.deadline = time.monotonic() + budget.time_limit

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise BudgetExceeded("Oracle node budget exhausted", nodes=self.nodes)
        if self.nodes % 4096 == 0 and time.monotonic() > self.deadline:
            raise BudgetExceeded("Oracle time limit exceeded", seconds=self.budget.time_limit)


def _lower_bound(uncovered: int, masks: Sequence[int], candidates: Sequence[int]) -> int:
    """ceil(|uncovered| / largest coverage of any single candidate)."""
    need = uncovered.bit_count()
    if need == 0:
        return 0
    best = max(((masks[i] & uncovered).bit_count() for i in candidates), default=0)
    if best == 0:
        return need + len(masks) + 1
    return -(-need // best)


def _optimal_size(universe: int, masks: Sequence[int], search: _Search) -> int:
    n = len(masks)
    best = [len(greedy_cover(universe, masks))]
    covering = [[i for i in range(n) if masks[i] >> e & 1] for e in range(universe.bit_length())]

    def recurse(uncovered: int, size: int):
        search.tick()
        if uncovered == 0:
            best[0] = min(best[0], size)
            return
        if size + _lower_bound(uncovered, masks, range(n)) >= best[0]:
            return
        # branch on the uncovered element with the fewest covering objects
        element = min(
            (e for e in range(universe.bit_length()) if uncovered >> e & 1),
            key=lambda e: (len(covering[e]), e),
        )
        for i in sorted(covering[element], key=lambda i: (-(masks[i] & uncovered).bit_count(), i)):
            recurse(uncovered & ~masks[i], size + 1)

    recurse(universe, 0)
    return best[0]


def _least_cover_of_size(universe: int, masks: Sequence[int], k: int, search: _Search) -> Optional[list[int]]:
    n = len(masks)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] | masks[i]

    def recurse(start: int, uncovered: int, chosen: list[int]) -> Optional[list[int]]:
        search.tick()
        if uncovered == 0:
            return list(chosen)
        slots = k - len(chosen)
        if slots == 0 or uncovered & ~suffix[start]:
            return None
        if _lower_bound(uncovered, masks, range(start, n)) > slots:
            return None
        for i in range(start, n):
            if uncovered & ~suffix[i]:
                return None
            chosen.append(i)
            found = recurse(i + 1, uncovered & ~masks[i], chosen)
            chosen.pop()
            if found is not None:
                return found
        return None

    return recurse(0, universe, [])


def exact_min_cover(universe: int, masks: Sequence[int], budget: Optional[OracleBudget] = None) -> list[int]:
    budget = budget or OracleBudget.from_settings()
    if len(masks) > budget.max_n:
        raise BudgetExceeded("Instance too large for the exact oracle", n=len(masks), max_n=budget.max_n)
    covered = 0
    for m in masks:
        covered |= m
    if covered & universe != universe:
        raise InfeasibleInstance("Full set is not feasible")
    search = _Search(budget)
    k = _optimal_size(universe, masks, search)
    chosen = _least_cover_of_size(universe, masks, k, search)
    if chosen is None:
        raise InfeasibleInstance("No cover of the optimal size was re-found", size=k)
    logger.debug(f"Exact oracle n={len(masks)} optimum={k} nodes={search.nodes}")
    return chosen


def exhaustive_min_cover(universe: int, masks: Sequence[int]) -> list[int]:
    """Brute force over all subsets by size then lexicographic order; test oracle for small n."""
    n = len(masks)
    for size in range(n + 1):
        for combo in itertools.combinations(range(n), size):
            covered = 0
            for i in combo:
                covered |= masks[i]
            if covered & universe == universe:
                return list(combo)
    raise InfeasibleInstance("Full set is not feasible")


def exact_min_dominating_set(graph: IntersectionGraph, budget: Optional[OracleBudget] = None) -> Solution:
    indices = exact_min_cover((1 << graph.n) - 1, graph.closed_masks(), budget)
    return Solution.of(indices, solver="exact")


def exact_min_set_cover(instance: CoverInstance, budget: Optional[OracleBudget] = None) -> Solution:
    model = coverage_model(instance)
    return Solution.of(exact_min_cover(model.universe, model.masks, budget), solver="exact")


def exact_for_model(model: CoverageModel, budget: Optional[OracleBudget] = None) -> Solution:
    return Solution.of(exact_min_cover(model.universe, model.masks, budget), solver="exact")


def greedy_for_model(model: CoverageModel) -> Solution:
    return Solution.of(greedy_cover(model.universe, model.masks), solver="greedy")
