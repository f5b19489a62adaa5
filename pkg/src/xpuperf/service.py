"""Stateless HTTP JSON API over the analysis operations.

The catalog is loaded at startup and read-only afterwards; every request is
computed independently, so identical bodies return identical responses. All
endpoints return the same envelopes the CLI prints.
"""

from __future__ import annotations

from typing import Any, Optional

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import ops
from .catalog import Catalog, bundled_catalog_path, load_catalog
from .errors import (
    InfeasibleError,
    InfeasiblePlanError,
    NoParityError,
    NotFoundError,
    ParseError,
    ValidationError,
    XpuPerfError,
)


class EstimateRequest(BaseModel):
    platform: str
    model: str
    batch: int = 1
    seqlen: int
    prompt_len: Optional[int] = None
    tp: int = 1
    pp: int = 1
    mode: str = "realistic"
    headroom: float = 0.9
    overrides: dict[str, dict[str, int]] = Field(default_factory=dict)


class SweepRequest(BaseModel):
    platforms: Optional[list[str]] = None
    models: list[str]
    batches: list[int]
    seqlens: list[int]
    mode: str = "both"
    headroom: float = 0.9
    overrides: dict[str, dict[str, int]] = Field(default_factory=dict)


class FrontierRequest(BaseModel):
    model: str
    batch: int = 1
    seqlen: int
    phase: str
    mode: str
    platforms: Optional[list[str]] = None
    headroom: float = 0.9
    overrides: dict[str, dict[str, int]] = Field(default_factory=dict)


class CommEnergyRequest(BaseModel):
    csv_text: str
    cycles_csv_text: Optional[str] = None


class BenchRequest(BaseModel):
    csv_text: str
    baseline: str
    metric: str = "latency"
    report: str = "speedup"


class DutyCycleRequest(BaseModel):
    platform_a: str
    throughput_a: float
    platform_b: str
    throughput_b: float
    cluster_a: int = 1
    cluster_b: int = 1


def _api_error(status: int, code: str, message: str, reason: Optional[str] = None) -> JSONResponse:
    body: dict[str, Any] = {"status": status, "code": code, "message": message}
    if reason is not None:
        body["reason"] = reason
    return JSONResponse(status_code=status, content=body)


def create_app(catalog: Optional[Catalog] = None) -> FastAPI:
    cat = catalog if catalog is not None else load_catalog(bundled_catalog_path())
    app = FastAPI(title="xpuperf", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def _handle_body(request: Request, exc: RequestValidationError) -> JSONResponse:
        return _api_error(400, "validation", str(exc.errors()))

    @app.exception_handler(XpuPerfError)
    async def _handle(request: Request, exc: XpuPerfError) -> JSONResponse:
        if isinstance(exc, NotFoundError):
            return _api_error(404, "not_found", str(exc))
        if isinstance(exc, InfeasiblePlanError):
            return _api_error(422, "infeasible", str(exc), reason=exc.reason)
        if isinstance(exc, (InfeasibleError, NoParityError)):
            return _api_error(422, "infeasible", str(exc))
        if isinstance(exc, (ValidationError, ParseError)):
            return _api_error(400, "validation", str(exc))
        return _api_error(500, "internal", str(exc))

    @app.get("/v1/platforms")
    def platforms() -> Any:
        return ops.op_platforms(cat)

    @app.get("/v1/models")
    def models() -> Any:
        return ops.op_models(cat)

    @app.get("/v1/roofline")
    def roofline(platform: str, samples: int = 100, min_ai: float = 0.01, max_ai: float = 1e5) -> Any:
        return ops.op_roofline(cat, platform, samples, min_ai, max_ai)

    @app.get("/v1/equiv")
    def equiv(metric: str, platforms: Optional[str] = None) -> Any:
        names = (
            [p.strip() for p in platforms.split(",") if p.strip()]
            if platforms
            else cat.platform_names
        )
        return ops.op_equiv(cat, metric, names)

    @app.get("/v1/scaleout")
    def scaleout(platform: str, model: str, seqlen: int, batch: int = 1, headroom: float = 0.9) -> Any:
        return ops.op_scaleout(cat, platform, model, batch, seqlen, headroom)

    @app.post("/v1/estimate")
    def estimate(req: EstimateRequest) -> Any:
        return ops.op_estimate(
            cat,
            req.platform,
            req.model,
            req.batch,
            req.seqlen,
            req.tp,
            req.pp,
            req.mode,
            req.prompt_len,
            req.headroom,
            req.overrides,
        )

    @app.post("/v1/sweep")
    def sweep(req: SweepRequest) -> Any:
        return ops.op_sweep(
            cat,
            req.models,
            req.batches,
            req.seqlens,
            req.platforms,
            req.mode,
            req.headroom,
            req.overrides,
        )

    @app.post("/v1/frontier")
    def frontier(req: FrontierRequest) -> Any:
        return ops.op_frontier(
            cat,
            req.model,
            req.batch,
            req.seqlen,
            req.phase,
            req.mode,
            req.platforms,
            req.headroom,
            req.overrides,
        )

    @app.post("/v1/trace")
    async def trace(
        file: UploadFile = File(...),
        platform: Optional[str] = Form(default=None),
        idle_power_hint: Optional[float] = Form(default=None),
    ) -> Any:
        text = (await file.read()).decode("utf-8")
        return ops.op_trace(cat, text, platform, idle_power_hint)

    @app.post("/v1/commenergy")
    def commenergy(req: CommEnergyRequest) -> Any:
        return ops.op_commenergy(cat, req.csv_text, req.cycles_csv_text)

    @app.post("/v1/bench")
    def bench(req: BenchRequest) -> Any:
        return ops.op_bench(cat, req.csv_text, req.baseline, req.metric, req.report)

    @app.post("/v1/dutycycle")
    def dutycycle(req: DutyCycleRequest) -> Any:
        return ops.op_dutycycle(
            cat,
            req.platform_a,
            req.throughput_a,
            req.platform_b,
            req.throughput_b,
            req.cluster_a,
            req.cluster_b,
        )

    return app
