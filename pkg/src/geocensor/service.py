"""HTTP facade over the solvers for interactive what-if clients.

Solves are synchronous under a hard per-request time cap; hitting the cap
returns the incumbent with proved_optimal=false instead of an error. The
instance registry is append-only for the process lifetime and can
optionally snapshot uploads to a directory. Not meant for public
exposure: no authentication.
"""

from __future__ import annotations

import json
import threading
import uuid
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .exact import SolveLimits
from .model import (
    Instance,
    InvalidInstanceError,
    PlanStatus,
    ProblemSpec,
    aggregate_scores,
    protected_k,
    validate_instance,
)
from .runner import SOLVERS, solve

DEFAULT_TIME_CAP = 30.0
MAX_TIME_CAP = 300.0
TOP_LOCATIONS = 10


class InstanceRegistry:
    """Append-only id -> Instance store with optional file snapshots."""

    def __init__(self, snapshot_dir: Optional[str] = None):
        self._items: dict[str, Instance] = {}
        self._lock = threading.Lock()
        self._dir = Path(snapshot_dir) if snapshot_dir else None
        if self._dir is not None:
            self._dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self._dir.glob("*.json")):
                with open(path, encoding="utf-8") as fh:
                    self._items[path.stem] = validate_instance(json.load(fh))

    def add(self, instance: Instance) -> str:
        new_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._items[new_id] = instance
        if self._dir is not None:
            path = self._dir / f"{new_id}.json"
            path.write_text(json.dumps(instance.to_json_dict()), encoding="utf-8")
        return new_id

    def get(self, instance_id: str) -> Instance:
        with self._lock:
            instance = self._items.get(instance_id)
        if instance is None:
            raise KeyError(instance_id)
        return instance


class SolveRequest(BaseModel):
    instance: Optional[dict] = None
    instance_id: Optional[str] = None
    variant: str = Field(pattern="^(topk|budget)$")
    k: Optional[int] = None
    d: Optional[int] = None
    margin: float = 0.0
    keep: list[str] = Field(default_factory=list)
    solver: str = "exact"
    time_cap: float = DEFAULT_TIME_CAP
    node_cap: int = 10_000_000


def _ranked_locations(instance: Instance, kept) -> list[dict]:
    agg = aggregate_scores(instance, kept)
    order = sorted(range(instance.num_locations), key=lambda j: (-agg[j], j))
    return [
        {"location": j, "score": float(agg[j]),
         "is_true": j == instance.true_location}
        for j in order[:TOP_LOCATIONS]
    ]


def _photo_scores(instance: Instance) -> list[dict]:
    st = instance.scores[:, instance.true_location]
    return [
        {"id": pid, "true_score": float(st[i])}
        for i, pid in enumerate(instance.photo_ids)
    ]


def _spec_from_request(req: SolveRequest, instance: Instance) -> ProblemSpec:
    index = instance.id_to_index()
    keep = []
    for pid in req.keep:
        if pid not in index:
            raise HTTPException(400, detail=f"unknown photo id in keep: {pid!r}")
        keep.append(index[pid])
    try:
        if req.variant == "topk":
            if req.k is None:
                raise ValueError("variant topk requires k")
            spec = ProblemSpec.topk(req.k, keep_set=keep, margin=req.margin)
        else:
            if req.d is None:
                raise ValueError("variant budget requires d")
            spec = ProblemSpec.budget(req.d, keep_set=keep, margin=req.margin)
        spec.check(instance)
    except ValueError as exc:
        raise HTTPException(400, detail=str(exc))
    return spec


def _infeasible_detail(spec: ProblemSpec, proved: bool) -> str:
    if not proved:
        return ("no feasible deletion set found within the time cap; "
                "infeasibility was not proved")
    if spec.keep_set:
        return ("no deletion set satisfies the guarantee: the pinned photos "
                "force the true location into the top-k")
    return ("no deletion set keeping at least one photo pushes the true "
            "location out of the top-k")


def create_app(registry: Optional[InstanceRegistry] = None,
               registry_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="geocensor", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = registry if registry is not None else InstanceRegistry(registry_dir)
    app.state.registry = store

    @app.post("/api/v1/instances", status_code=201)
    def upload_instance(body: dict):
        try:
            instance = validate_instance(body)
        except InvalidInstanceError as exc:
            raise HTTPException(400, detail={"errors": exc.errors})
        return {"id": store.add(instance)}

    @app.get("/api/v1/instances/{instance_id}/summary")
    def instance_summary(instance_id: str):
        try:
            instance = store.get(instance_id)
        except KeyError:
            raise HTTPException(404, detail=f"unknown instance {instance_id!r}")
        everything = range(instance.num_photos)
        return {
            "id": instance_id,
            "num_photos": instance.num_photos,
            "num_locations": instance.num_locations,
            "true_location": instance.true_location,
            "score_kind": instance.score_kind.value,
            "photo_scores": _photo_scores(instance),
            "top": _ranked_locations(instance, everything),
            "protected_k": protected_k(instance, everything),
        }

    @app.post("/api/v1/solve")
    def run_solve(req: SolveRequest):
        if (req.instance is None) == (req.instance_id is None):
            raise HTTPException(
                400, detail="provide exactly one of instance, instance_id")
        if req.instance is not None:
            try:
                instance = validate_instance(req.instance)
            except InvalidInstanceError as exc:
                raise HTTPException(400, detail={"errors": exc.errors})
        else:
            try:
                instance = store.get(req.instance_id)
            except KeyError:
                raise HTTPException(
                    404, detail=f"unknown instance {req.instance_id!r}")
        if req.solver not in SOLVERS:
            raise HTTPException(400, detail=f"unknown solver {req.solver!r}")
        spec = _spec_from_request(req, instance)
        time_cap = min(max(req.time_cap, 0.001), MAX_TIME_CAP)
        limits = SolveLimits(node_cap=req.node_cap, time_cap=time_cap)
        try:
            report = solve(instance, spec, solver=req.solver, limits=limits)
        except ValueError as exc:
            raise HTTPException(400, detail=str(exc))

        plan = report.plan
        unsatisfied = (spec.variant.value == "topk"
                       and plan.protected_k < spec.k)
        if plan.status is PlanStatus.INFEASIBLE or unsatisfied:
            raise HTTPException(
                422, detail=_infeasible_detail(spec, report.proved_optimal))

        kept = plan.kept_sorted()
        return {
            "plan": plan.to_json_dict(instance),
            "report": report.to_json_dict(instance),
            "photo_scores": _photo_scores(instance),
            "before": {
                "top": _ranked_locations(instance, range(instance.num_photos)),
                "protected_k": protected_k(instance, range(instance.num_photos)),
            },
            "after": {
                "top": _ranked_locations(instance, kept),
                "protected_k": protected_k(instance, kept),
            },
        }

    return app
