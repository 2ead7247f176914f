"""
Benchmark harness: run algorithms over generated or stored instances and tabulate
solution sizes against the exact optimum.
"""

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from baselines import OracleBudget, exact_for_model, greedy_for_model
from config import get_settings
from errors import BudgetExceeded, InvalidParams, ToolkitError
from feasibility import coverage_model, is_feasible
from instances import Instance, gen_cover, gen_domination, instance_hash, load
from solver import SolverConfig, audit_b_local_optimality, local_search

logger = logging.getLogger(__name__)

TABLE_SCHEMA_VERSION = 1


class GeneratorCase(BaseModel):
    problem: Literal["domination", "cover"]
    params: dict[str, Any] = Field(default_factory=dict, description="Keyword arguments for the generator")
    seeds: list[int] = Field(..., min_length=1)

    @field_validator("seeds")
    @classmethod
    def _distinct(cls, seeds: list[int]) -> list[int]:
        if len(set(seeds)) != len(seeds):
            raise ValueError("seeds must be distinct")
        return seeds


class FileCase(BaseModel):
    path: str


class AlgorithmSpec(BaseModel):
    name: Literal["exact", "greedy", "local-search"]
    b: Optional[int] = Field(None, ge=1)
    epsilon: Optional[str] = None
    init: Literal["greedy", "full"] = "greedy"

    @property
    def label(self) -> str:
        if self.name != "local-search":
            return self.name
        return f"local-search(b={self.solver_config().resolved_b()})"

    def solver_config(self) -> SolverConfig:
        return SolverConfig(b=self.b, epsilon=self.epsilon, init=self.init)

    @model_validator(mode="after")
    def _check_config(self) -> "AlgorithmSpec":
        self.solver_config()
        return self


class OracleSpec(BaseModel):
    max_n: int = Field(24, ge=1)
    max_nodes: int = Field(2_000_000, ge=1)
    time_limit: float = Field(60.0, gt=0)

    def budget(self) -> OracleBudget:
        return OracleBudget(self.max_n, self.max_nodes, self.time_limit)


class BenchSpec(BaseModel):
    cases: list[Union[GeneratorCase, FileCase]] = Field(..., min_length=1)
    algorithms: list[AlgorithmSpec] = Field(..., min_length=1)
    oracle: OracleSpec = Field(default_factory=OracleSpec)
    include_timings: bool = False
    workers: Optional[int] = Field(None, ge=1)
    output: Optional[str] = None

    @model_validator(mode="after")
    def _fill_oracle(self) -> "BenchSpec":
        if "oracle" not in self.model_fields_set:
            s = get_settings()
            self.oracle = OracleSpec(max_n=s.oracle_max_n, max_nodes=s.oracle_max_nodes, time_limit=s.oracle_time_limit)
        return self


class BenchRow(BaseModel):
    instance_id: str
    n: Optional[int] = None
    algorithm: str
    size: Optional[int] = None
    optimum: Optional[int] = None
    ratio: Optional[str] = Field(None, description="Exact size / optimum as a rational string")
    feasible: Optional[bool] = None
    audit: Optional[bool] = None
    wall_time: Optional[float] = None
    error: Optional[str] = None

    @property
    def accepted(self) -> bool:
        return self.error is None and bool(self.feasible) and self.audit is not False


class BenchTable(BaseModel):
    schema_version: int = TABLE_SCHEMA_VERSION
    rows: list[BenchRow] = Field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        columns = ["instance_id", "n", "algorithm", "size", "optimum", "ratio", "feasible", "audit", "error"]
        data = self.model_dump()["rows"]
        if any(r["wall_time"] is not None for r in data):
            columns.insert(-1, "wall_time")
        cells = [[("" if r[c] is None else str(r[c])) for c in columns] for r in data]
        widths = [max([len(c)] + [len(row[k]) for row in cells]) for k, c in enumerate(columns)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
        return "\n".join(lines) + "\n"


def _expand_cases(spec: BenchSpec) -> list[tuple[str, Union[GeneratorCase, FileCase], Optional[int]]]:
    jobs = []
    for k, case in enumerate(spec.cases):
        if isinstance(case, FileCase):
            jobs.append((Path(case.path).stem, case, None))
        else:
            for seed in case.seeds:
                jobs.append((f"{case.problem}-{k}-s{seed}", case, seed))
    return jobs


def _build(case: Union[GeneratorCase, FileCase], seed: Optional[int]) -> Instance:
    if isinstance(case, FileCase):
        return load(case.path)
    params = dict(case.params)
    params.pop("seed", None)
    if case.problem == "domination":
        return gen_domination(seed=seed, **params)
    return gen_cover(seed=seed, **params)


def _run_algorithm(algo: AlgorithmSpec, instance: Instance, model, budget: OracleBudget):
    if algo.name == "exact":
        return exact_for_model(model, budget), None
    if algo.name == "greedy":
        return greedy_for_model(model), None
    config = algo.solver_config()
    solution, _ = local_search(instance, config)
    return solution, audit_b_local_optimality(model, solution, config.resolved_b())


def _bench_instance(job: tuple, spec: BenchSpec) -> list[BenchRow]:
    """All rows of one instance; every failure is captured in its row."""
    instance_id, case, seed = job
    try:
        instance = _build(case, seed)
    except (ToolkitError, TypeError, ValueError) as e:
        logger.error(f"Bench case {instance_id} could not be built: {e}")
        return [BenchRow(instance_id=instance_id, algorithm=a.name, error=f"{type(e).__name__}: {e}") for a in spec.algorithms]
    instance_id = f"{instance_id}-{instance_hash(instance)[:8]}"
    model = coverage_model(instance)
    budget = spec.oracle.budget()

    optimum = None
    try:
        optimum = len(exact_for_model(model, budget))
    except BudgetExceeded as e:
        logger.info(f"Oracle skipped for {instance_id}: {e}")
    except ToolkitError as e:
        logger.error(f"Oracle failed for {instance_id}: {e}")

    rows = []
    for algo in spec.algorithms:
        row = BenchRow(instance_id=instance_id, n=instance.n, algorithm=algo.label, optimum=optimum)
        started = time.perf_counter()
        try:
            solution, audit = _run_algorithm(algo, instance, model, budget)
            row.size = len(solution)
            row.feasible = is_feasible(instance, solution)
            row.audit = audit
            if optimum:
                row.ratio = str(Fraction(row.size, optimum))
            elif optimum == 0 and row.size == 0:
                row.ratio = "1"
        except ToolkitError as e:
            logger.error(f"Bench row {instance_id}/{algo.label} failed: {e}")
            row.error = f"{type(e).__name__}: {e}"
        if spec.include_timings:
            row.wall_time = round(time.perf_counter() - started, 6)
        rows.append(row)
    return rows


def _bench_job(args: tuple) -> list[BenchRow]:
    job, spec_json = args
    return _bench_instance(job, BenchSpec.model_validate_json(spec_json))


def run_bench(spec: BenchSpec) -> BenchTable:
    jobs = _expand_cases(spec)
    workers = spec.workers or get_settings().bench_workers
    logger.info(f"Running bench: {len(jobs)} instance(s) x {len(spec.algorithms)} algorithm(s), workers={workers}")
    if workers > 1 and len(jobs) > 1:
        spec_json = spec.model_dump_json()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_bench_job, [(job, spec_json) for job in jobs]))
    else:
        results = [_bench_instance(job, spec) for job in jobs]
    table = BenchTable(rows=[row for rows in results for row in rows])
    if spec.output:
        Path(spec.output).write_text(table.to_json(), encoding="utf-8")
        logger.info(f"Bench table written to {spec.output}")
    return table


def load_spec(path: Union[str, Path]) -> BenchSpec:
    try:
        return BenchSpec.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise InvalidParams(f"Cannot read bench spec {path}: {e}") from e
    except ValueError as e:
        raise InvalidParams(f"Invalid bench spec {path}: {e}") from e
