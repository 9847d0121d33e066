"""FastAPI application exposing the solver commands.

Endpoints mirror the CLI subcommands one to one; the CLI is a thin client
that either calls these handlers in process or POSTs to a running server.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..mlf import MLQuery, ml_eval_diag
from ..runner import fmt, run_converge, run_oracle, run_solve, run_verify
from .models import HealthResponse, MLRequest, MLResponse, RunRequest, RunResponse


def create_app() -> FastAPI:
    app = FastAPI(
        title="fractel",
        version=__version__,
        description="Time-fractional Telegraph equation solver and verification service",
    )

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/ml", response_model=MLResponse)
    def ml(req: MLRequest):
        try:
            q = MLQuery(rho=req.rho, mu=req.mu, gamma=req.gamma, z=complex(req.re, req.im))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        val, err = ml_eval_diag(q)
        line = f"{fmt(val.real)},{fmt(val.imag)},{fmt(err)}"
        return MLResponse(re=val.real, im=val.imag, err_estimate=err, csv_line=line)

    def _run(handler, req: RunRequest, **kw) -> RunResponse:
        result = handler(req.config, **kw)
        return RunResponse(exit_code=result.exit_code, files=result.files, summary=result.summary)

    @app.post("/solve", response_model=RunResponse)
    def solve(req: RunRequest):
        return _run(run_solve, req, threads=req.threads)

    @app.post("/oracle", response_model=RunResponse)
    def oracle(req: RunRequest):
        return _run(run_oracle, req)

    @app.post("/verify", response_model=RunResponse)
    def verify(req: RunRequest):
        return _run(run_verify, req, threads=req.threads)

    @app.post("/converge", response_model=RunResponse)
    def converge(req: RunRequest):
        return _run(run_converge, req)

    return app


app = create_app()
