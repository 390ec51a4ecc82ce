"""HTTP service wrapping the case pipeline.

One POST endpoint per command; request bodies carry the full case
configuration, responses carry the report plus any produced files as
strings, so clients can persist them wherever they run.
"""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict

from . import __version__
from .pipeline import (
    CaseConfig, ConfigError, run_classify, run_solve, run_transform,
    run_verify,
)
from .solver import SolverError

__all__ = ["create_app", "CommandResponse"]


class ClassifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: CaseConfig


class TransformRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: CaseConfig


class SolveRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: CaseConfig
    system: Literal["marguerre", "vonkarman"] = "marguerre"
    manufactured: bool = False


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: CaseConfig
    check: Literal["equivalence", "reduction", "orbit"]


class CommandResponse(BaseModel):
    status: Literal["ok", "non_convergence", "verification_failure"]
    report: dict
    files: dict[str, str] = {}


class HealthResponse(BaseModel):
    status: str
    version: str


def create_app() -> FastAPI:
    app = FastAPI(title="shellsym", version=__version__,
                  description="Point-symmetry classification and plate-form "
                              "equivalence for shallow shells")

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/classify", response_model=CommandResponse)
    def classify_endpoint(req: ClassifyRequest) -> CommandResponse:
        report = _guard(run_classify, req.config)
        return CommandResponse(status="ok", report=report)

    @app.post("/transform", response_model=CommandResponse)
    def transform_endpoint(req: TransformRequest) -> CommandResponse:
        report, files = _guard(run_transform, req.config)
        return CommandResponse(status="ok", report=report, files=files)

    @app.post("/solve", response_model=CommandResponse)
    def solve_endpoint(req: SolveRequest) -> CommandResponse:
        report, files, status = _guard(run_solve, req.config,
                                       system=req.system,
                                       manufactured=req.manufactured)
        return CommandResponse(status=status, report=report, files=files)

    @app.post("/verify", response_model=CommandResponse)
    def verify_endpoint(req: VerifyRequest) -> CommandResponse:
        report, status = _guard(run_verify, req.config, check=req.check)
        return CommandResponse(status=status, report=report)

    return app


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError as err:
        raise HTTPException(status_code=400, detail=str(err)) from err
    except SolverError as err:
        raise HTTPException(status_code=500, detail=str(err)) from err
