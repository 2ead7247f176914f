"""
b-swap local search for minimum dominating set of homothets and minimum geometric set
cover with convex pseudodisks.

The first loop applies improving swaps (remove X, |X| <= b, add X' with |X'| <= |X| - 1)
until none exists. The second loop replaces a selected object Q by an unselected R
whenever Q's cover-free region lies inside R. Both loops run again until neither moves.
"""

import itertools
import logging
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from baselines import greedy_cover
from config import get_settings
from errors import InfeasibleInstance, InvariantViolation, IterationCapExceeded, ParseError
from feasibility import (
    CoverageModel,
    Solution,
    cover_free_region_of,
    coverage_model,
)
from geometry_core import ConvexPolygon, region_contained_in, to_scalar
from instances import Instance

logger = logging.getLogger(__name__)


class SolverConfig(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    b: Optional[int] = Field(None, ge=1, description="Swap size; derived from epsilon when absent")
    epsilon: Optional[Fraction] = Field(None, description="Target accuracy; b = ceil(alpha / epsilon^2)")
    alpha: Optional[float] = Field(None, gt=0, description="Constant in the epsilon -> b mapping")
    max_b: Optional[int] = Field(None, ge=1)
    init: Literal["greedy", "full"] = "greedy"
    max_first_loop_iters: Optional[int] = Field(None, ge=0, description="Defaults to n")
    cap_factor: Optional[int] = Field(None, ge=1, description="Second-loop cap is cap_factor * n^2")
    max_second_loop_iters: Optional[int] = Field(None, ge=0, description="Overrides cap_factor * n^2")
    deterministic: bool = True
    seed: int = 0

    @field_validator("epsilon", mode="before")
    @classmethod
    def _parse_epsilon(cls, value: Any) -> Any:
        if value is None or isinstance(value, Fraction):
            return value
        if isinstance(value, float):
            return Fraction(str(value))
        try:
            if isinstance(value, str) and "." in value:
                return Fraction(value)
            return to_scalar(value)
        except (ParseError, ValueError) as e:
            raise ValueError(f"epsilon must be a positive rational: {value!r}") from e

    @field_validator("epsilon")
    @classmethod
    def _positive_epsilon(cls, value: Optional[Fraction]) -> Optional[Fraction]:
        if value is not None and value <= 0:
            raise ValueError("epsilon must be positive")
        return value

    @model_validator(mode="after")
    def _fill_defaults(self) -> "SolverConfig":
        settings = get_settings()
        if self.alpha is None:
            self.alpha = settings.alpha
        if self.max_b is None:
            self.max_b = settings.max_b
        if self.cap_factor is None:
            self.cap_factor = settings.cap_factor
        return self

    def resolved_b(self) -> int:
        if self.b is not None:
            return self.b
        if self.epsilon is None:
            return 2
        derived = math.ceil(Fraction(self.alpha).limit_denominator(10 ** 6) / (self.epsilon * self.epsilon))
        if derived > self.max_b:
            logger.warning(f"Derived b={derived} from epsilon={self.epsilon} exceeds cap; using b={self.max_b}")
            return self.max_b
        return max(1, derived)


@dataclass(frozen=True)
class SwapRecord:
    loop: Literal["swap", "replace"]
    removed: tuple[int, ...]
    added: tuple[int, ...]
    size_after: int


@dataclass
class SwapTrace:
    records: list[SwapRecord] = field(default_factory=list)
    rounds: int = 0

    @property
    def extra_rounds(self) -> int:
        return max(0, self.rounds - 1)

    @property
    def swaps(self) -> int:
        return sum(1 for r in self.records if r.loop == "swap")

    @property
    def replacements(self) -> int:
        return sum(1 for r in self.records if r.loop == "replace")

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "extra_rounds": self.extra_rounds,
            "records": [
                {"loop": r.loop, "removed": list(r.removed), "added": list(r.added), "size_after": r.size_after}
                for r in self.records
            ],
        }


def distinct_pool(polygons: Sequence[ConvexPolygon]) -> list[int]:
    """Indices of the first occurrence of every distinct polygon."""
    seen = set()
    pool = []
    for i, P in enumerate(polygons):
        if P not in seen:
            seen.add(P)
            pool.append(i)
    return pool


def initial_solution(
    instance: Instance,
    config: SolverConfig,
    model: Optional[CoverageModel] = None,
    pool: Optional[list[int]] = None,
) -> Solution:
    model = model or coverage_model(instance)
    pool = pool if pool is not None else distinct_pool(instance.polygons)
    if not model.is_feasible(pool):
        raise InfeasibleInstance("The full object set is not a feasible solution")
    if config.init == "full":
        return Solution.of(pool, solver="full-set")
    picked = greedy_cover(model.universe, [model.masks[i] for i in pool])
    return Solution.of([pool[i] for i in picked], solver="greedy")


def improving_swap(
    model: CoverageModel,
    S: Solution,
    b: int,
    pool: Optional[Sequence[int]] = None,
    order: Optional[Sequence[int]] = None,
) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
    """
    First improving swap in canonical order: X by size then index order, X' likewise.

    X' is drawn from objects outside S that cover something left uncovered by S minus X;
    a minimal covering X' never contains anything else, so the pruning keeps the order.
    """
    pool = range(model.n) if pool is None else pool
    members = list(order) if order is not None else list(S.indices)
    selected = set(S.indices)
    outside = [i for i in pool if i not in selected]
    for size in range(1, min(b, len(members)) + 1):
        for X in itertools.combinations(members, size):
            removed = set(X)
            missing = model.universe & ~model.covered(i for i in members if i not in removed)
            if missing == 0:
                return tuple(sorted(X)), ()
            useful = [i for i in outside if model.masks[i] & missing]
            for k in range(1, size):
                for Xp in itertools.combinations(useful, k):
                    if model.covered(Xp) & missing == missing:
                        return tuple(sorted(X)), Xp
    return None


def containment_replacement(
    instance: Instance,
    S: Solution,
    model: Optional[CoverageModel] = None,
    pool: Optional[Sequence[int]] = None,
    cap_factor: Optional[int] = None,
    trace: Optional[SwapTrace] = None,
    seen: Optional[set] = None,
    cap: Optional[int] = None,
) -> Solution:
    """
    Replace the lowest-index Q in S by the lowest-index R outside S containing CF(Q, S).

    A replacement leading back to a solution in `seen` (by default, those visited in this
    call) is skipped.
    More than `cap` replacements (default cap_factor * n^2) raise IterationCapExceeded.
    """
    polygons = instance.polygons
    model = model or coverage_model(instance)
    pool = list(pool) if pool is not None else distinct_pool(polygons)
    if cap is None:
        cap = (cap_factor or get_settings().cap_factor) * len(polygons) ** 2
    current = set(S.indices)
    seen = seen if seen is not None else set()
    seen.add(frozenset(current))
    iterations = 0
    while True:
        move = None
        for q in sorted(current):
            cf = cover_free_region_of(polygons, q, current)
            for r in pool:
                if r in current:
                    continue
                nxt = frozenset(current - {q} | {r})
                if nxt in seen:
                    continue
                if region_contained_in(cf, polygons[r]):
                    move = (q, r, nxt)
                    break
            if move:
                break
        if move is None:
            break
        iterations += 1
        if iterations > cap:
            raise IterationCapExceeded("Containment replacement did not settle", cap=cap)
        q, r, nxt = move
        if not model.is_feasible(nxt):
            raise InvariantViolation("Replacement broke feasibility", removed=q, added=r)
        current = set(nxt)
        seen.add(nxt)
        logger.debug(f"Replaced {q} by {r}")
        if trace is not None:
            trace.records.append(SwapRecord("replace", (q,), (r,), len(current)))
    return Solution.of(sorted(current), **S.meta)


def _first_loop(
    model: CoverageModel,
    current: Solution,
    b: int,
    pool: list[int],
    cap: int,
    rng: Optional[random.Random],
    trace: SwapTrace,
) -> tuple[Solution, int]:
    iterations = 0
    while True:
        order = None
        if rng is not None:
            order = list(current.indices)
            rng.shuffle(order)
        swap = improving_swap(model, current, b, pool, order)
        if swap is None:
            return current, iterations
        iterations += 1
        if iterations > cap:
            raise IterationCapExceeded("First loop exceeded its iteration cap", cap=cap)
        X, Xp = swap
        nxt = (set(current.indices) - set(X)) | set(Xp)
        if not model.is_feasible(nxt) or len(nxt) >= len(current):
            raise InvariantViolation("Swap did not shrink a feasible solution", removed=X, added=Xp)
        current = Solution.of(sorted(nxt), **current.meta)
        logger.debug(f"Swap removed={X} added={Xp} size={len(current)}")
        trace.records.append(SwapRecord("swap", X, Xp, len(current)))


def local_search(instance: Instance, config: Optional[SolverConfig] = None) -> tuple[Solution, SwapTrace]:
    """Run both loops of the local search until neither changes the solution."""
    config = config or SolverConfig()
    started = time.perf_counter()
    b = config.resolved_b()
    polygons = instance.polygons
    model = coverage_model(instance)
    pool = distinct_pool(polygons)
    if len(pool) < len(polygons):
        logger.info(f"Dropped {len(polygons) - len(pool)} duplicate objects")
    first_cap = config.max_first_loop_iters if config.max_first_loop_iters is not None else len(polygons)
    rng = None if config.deterministic else random.Random(config.seed)
    trace = SwapTrace()

    current = initial_solution(instance, config, model, pool)
    initial_size = len(current)
    seen: set = set()
    while True:
        trace.rounds += 1
        current, _ = _first_loop(model, current, b, pool, first_cap, rng, trace)
        before = current.indices
        current = containment_replacement(
            instance, current, model, pool, config.cap_factor, trace, seen, config.max_second_loop_iters
        )
        if current.indices == before:
            break
    if trace.extra_rounds:
        logger.info(f"Local search needed {trace.extra_rounds} extra round(s) after replacements")

    meta = {
        "solver": "local-search",
        "b": b,
        "init": config.init,
        "alpha": config.alpha,
        "epsilon": str(config.epsilon) if config.epsilon is not None else None,
        "initial_size": initial_size,
        "swaps": trace.swaps,
        "replacements": trace.replacements,
        "rounds": trace.rounds,
        "duplicates_dropped": len(polygons) - len(pool),
        "wall_time": round(time.perf_counter() - started, 6),
    }
    logger.info(
        f"Local search finished size={len(current)} initial={initial_size} b={b} "
        f"swaps={trace.swaps} replacements={trace.replacements}"
    )
    return Solution.of(current.indices, **meta), trace


def audit_b_local_optimality(model: CoverageModel, S: Solution, b: int) -> bool:
    """
    Exhaustive check that no X ⊆ S with |X| <= b and X' ⊆ outside(S) with |X'| <= |X| - 1
    keeps feasibility. Uses per-element cover counts instead of the swap search's masks.
    """
    members = list(S.indices)
    outside = [i for i in range(model.n) if i not in set(members)]
    elements = [e for e in range(model.universe.bit_length()) if model.universe >> e & 1]
    covers_of = {i: {e for e in elements if model.masks[i] >> e & 1} for i in range(model.n)}
    counts = {e: 0 for e in elements}
    for i in members:
        for e in covers_of[i]:
            counts[e] += 1
    if any(c == 0 for c in counts.values()):
        return False

    def subsets(items: list[int], limit: int, start: int = 0, acc: tuple = ()):
        if acc:
            yield acc
        if len(acc) == limit:
            return
        for pos in range(start, len(items)):
            yield from subsets(items, limit, pos + 1, acc + (items[pos],))

    for X in subsets(members, b):
        for i in X:
            for e in covers_of[i]:
                counts[e] -= 1
        lost = {e for e, c in counts.items() if c == 0}
        improving = not lost
        if not improving and len(X) > 1:
            for Xp in subsets(outside, len(X) - 1):
                reached = set()
                for j in Xp:
                    reached |= covers_of[j]
                if lost <= reached:
                    improving = True
                    break
        for i in X:
            for e in covers_of[i]:
                counts[e] += 1
        if improving:
            return False
    return True
