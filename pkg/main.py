from fastapi import FastAPI, HTTPException, BackgroundTasks
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field, ValidationError
import asyncio
import logging
import uuid
from datetime import datetime
from typing import Any, Dict, List, Literal, Optional

from bench import BenchSpec, run_bench
from config import get_settings
from decomposition import decomposition_to_dict, disjoint_union_decomposition, verify_decomposition
from errors import (
    BudgetExceeded,
    InfeasibleInstance,
    IterationCapExceeded,
    ToolkitError,
)
from feasibility import coverage_model, is_feasible
from gauge import Gauge, delta, dist_to_convex, nearest_point
from geometry_core import (
    ConvexPolygon,
    Orientation,
    orientation,
    point_from_json,
    point_to_json,
    polygon_from_json,
    pt,
    scalar_to_str,
)
from baselines import OracleBudget, exact_for_model, greedy_for_model
from instances import CoverInstance, from_document, instance_hash
from logging_config import configure_logging
from solver import SolverConfig, local_search

settings = get_settings()
configure_logging(settings.log_level, settings.log_file, settings.log_format == "json")
logger = logging.getLogger(__name__)

app = FastAPI(
    title="Geometric Local Search API",
    description="Local search, exact oracles and decomposition checks for geometric domination and cover",
    version="1.0.0"
)

# Add CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# In-memory bench jobs keyed by task id; finished jobs leave the map once fetched
bench_jobs: Dict[str, Dict[str, Any]] = {}
MAX_BENCH_JOBS = 256
FINISHED = ("done", "failed")


def _evict_finished_jobs(limit: int = MAX_BENCH_JOBS) -> None:
    """Drop the oldest finished jobs while the map holds more than `limit` entries."""
    for task_id in [t for t, job in bench_jobs.items() if job["status"] in FINISHED]:
        if len(bench_jobs) <= limit:
            break
        del bench_jobs[task_id]


# Pydantic models for request/response validation
class SolveRequest(BaseModel):
    instance: Dict[str, Any] = Field(..., description="Instance document")
    algo: Literal["local-search", "exact", "greedy"] = Field("local-search", description="Algorithm to run")
    b: Optional[int] = Field(None, ge=1, description="Swap size for local search")
    epsilon: Optional[str] = Field(None, description="Target accuracy; used when b is absent")
    init: Literal["greedy", "full"] = Field("greedy", description="Initial solution for local search")
    seed: int = Field(0, description="Seed for randomized candidate order")
    randomized: bool = Field(False, description="Use a seeded candidate order")
    include_trace: bool = Field(False, description="Return the swap trace")


class SolveResponse(BaseModel):
    instance_hash: str
    indices: List[int]
    meta: Dict[str, Any]
    feasible: bool
    trace: Optional[Dict[str, Any]] = None


class DecompositionRequest(BaseModel):
    instance: Dict[str, Any] = Field(..., description="Cover instance document")


class DistQuery(BaseModel):
    point: List[str]
    polygon: List[List[str]]


class GaugeRequest(BaseModel):
    shape: List[List[str]] = Field(..., description="Gauge polygon vertices as rational strings")
    center: List[str] = Field(..., description="Interior center point")
    delta: Optional[List[List[str]]] = Field(None, description="Two points p1, p2")
    dist: Optional[DistQuery] = None


class TaskResponse(BaseModel):
    status: str
    message: str
    task_id: Optional[str] = None


def to_http_error(e: ToolkitError) -> HTTPException:
    """Map toolkit errors to HTTP status codes."""
    if isinstance(e, (InfeasibleInstance, IterationCapExceeded)):
        return HTTPException(status_code=409, detail=str(e))
    if isinstance(e, BudgetExceeded):
        return HTTPException(status_code=413, detail=str(e))
    return HTTPException(status_code=422, detail=str(e))


@app.get("/ping")
async def ping():
    """Health check endpoint."""
    return {"message": "pong", "timestamp": datetime.now().isoformat()}


@app.get("/health")
async def health_check():
    """Exact-kernel self check plus the active settings."""
    health_status = {
        "status": "healthy",
        "timestamp": datetime.now().isoformat(),
        "kernel": {},
        "settings": {
            "max_b": settings.max_b,
            "cap_factor": settings.cap_factor,
            "oracle_max_n": settings.oracle_max_n,
            "bench_workers": settings.bench_workers,
        },
    }
    try:
        square = ConvexPolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
        health_status["kernel"]["unit_square_area"] = scalar_to_str(square.area)
        left = orientation(pt(0, 0), pt(1, 0), pt(0, 1)) is Orientation.LEFT
        health_status["kernel"]["orientation"] = "ok" if left else "wrong"
        if square.area != 1 or not left:
            health_status["status"] = "degraded"
    except Exception as e:
        health_status["kernel"]["error"] = str(e)
        health_status["status"] = "degraded"
    return health_status


@app.post("/solve", response_model=SolveResponse)
async def solve(request: SolveRequest):
    """Solve one instance synchronously."""
    try:
        # 1️⃣ Parse and validate the instance
        instance = from_document(request.instance)
        model = coverage_model(instance)

        # 2️⃣ Run the requested algorithm
        trace = None
        if request.algo == "exact":
            solution = exact_for_model(model, OracleBudget.from_settings())
        elif request.algo == "greedy":
            solution = greedy_for_model(model)
        else:
            config = SolverConfig(
                b=request.b,
                epsilon=request.epsilon,
                init=request.init,
                seed=request.seed,
                deterministic=not request.randomized,
            )
            solution, trace = local_search(instance, config)

        # 3️⃣ Re-check feasibility independently
        meta = {k: v for k, v in solution.meta.items() if k != "wall_time"}
        logger.info(f"Solved {instance.kind} instance n={instance.n} with {request.algo}: size={len(solution)}")
        return SolveResponse(
            instance_hash=instance_hash(instance),
            indices=list(solution.indices),
            meta=meta,
            feasible=is_feasible(instance, solution),
            trace=trace.to_dict() if trace is not None and request.include_trace else None,
        )
    except ToolkitError as e:
        logger.error(f"Solve failed: {e}")
        raise to_http_error(e)
    except ValidationError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.error(f"Unexpected error in solve: {str(e)}")
        raise HTTPException(status_code=500, detail="Internal server error")


@app.post("/verify/decomposition")
async def verify_decomposition_endpoint(request: DecompositionRequest):
    """Decompose a cover-free cover instance and re-verify the result."""
    try:
        instance = from_document(request.instance)
        if not isinstance(instance, CoverInstance):
            raise HTTPException(status_code=422, detail="Decomposition needs a cover instance")
        result = disjoint_union_decomposition(instance.objects)
        report = verify_decomposition(instance.objects, result)
        return decomposition_to_dict(result, report)
    except HTTPException:
        raise
    except ToolkitError as e:
        logger.error(f"Decomposition failed: {e}")
        raise to_http_error(e)
    except Exception as e:
        logger.error(f"Unexpected error in decomposition: {str(e)}")
        raise HTTPException(status_code=500, detail="Internal server error")


@app.post("/gauge")
async def gauge_endpoint(request: GaugeRequest):
    """Evaluate the convex distance with exact rationals."""
    try:
        g = Gauge(polygon_from_json(request.shape), point_from_json(request.center))
        response: Dict[str, Any] = {}
        if request.delta is not None:
            if len(request.delta) != 2:
                raise HTTPException(status_code=422, detail="delta needs exactly two points")
            p1, p2 = (point_from_json(p) for p in request.delta)
            response["delta"] = scalar_to_str(delta(g, p1, p2))
        if request.dist is not None:
            p = point_from_json(request.dist.point)
            P = polygon_from_json(request.dist.polygon)
            response["dist"] = scalar_to_str(dist_to_convex(g, p, P))
            response["nearest"] = point_to_json(nearest_point(g, p, P))
        if not response:
            raise HTTPException(status_code=422, detail="Ask for delta or dist")
        return response
    except HTTPException:
        raise
    except ToolkitError as e:
        raise to_http_error(e)
    except Exception as e:
        logger.error(f"Unexpected error in gauge: {str(e)}")
        raise HTTPException(status_code=500, detail="Internal server error")


@app.post("/bench", response_model=TaskResponse)
async def start_bench(spec: BenchSpec, background_tasks: BackgroundTasks):
    """Queue a bench run; poll GET /bench/{task_id} for the table."""
    task_id = str(uuid.uuid4())
    if spec.output:
        raise HTTPException(status_code=422, detail="Bench output paths are not accepted over HTTP")
    _evict_finished_jobs(MAX_BENCH_JOBS - 1)
    bench_jobs[task_id] = {"status": "queued", "created": datetime.now().isoformat()}
    background_tasks.add_task(process_bench_background, task_id, spec)
    logger.info(f"Bench {task_id} queued with {len(spec.cases)} case(s)")
    return TaskResponse(status="accepted", message="Bench queued for processing", task_id=task_id)


async def process_bench_background(task_id: str, spec: BenchSpec):
    """Run a bench off the event loop and store the outcome."""
    logger.info(f"Starting bench {task_id}")
    bench_jobs[task_id]["status"] = "running"
    try:
        table = await asyncio.to_thread(run_bench, spec)
        bench_jobs[task_id].update(status="done", table=table.model_dump())
        logger.info(f"Bench {task_id} completed with {len(table.rows)} rows")
    except Exception as e:
        logger.error(f"Bench {task_id} failed: {str(e)}")
        bench_jobs[task_id].update(status="failed", error=str(e))


@app.get("/bench/{task_id}")
async def get_bench_status(task_id: str):
    """Get status of a bench run."""
    job = bench_jobs.get(task_id)
    if job is None:
        raise HTTPException(status_code=404, detail="Unknown task id")
    if job["status"] in FINISHED:
        del bench_jobs[task_id]
    return {"task_id": task_id, **job}


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host=settings.api_host, port=settings.api_port)
