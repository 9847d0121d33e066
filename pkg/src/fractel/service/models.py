"""Request/response bodies of the HTTP service.

Commands accept a full ``RunConfig`` document and return the same rendered
files the CLI would write, keyed by file name, so a thin client only has to
persist the payload to reproduce a local run byte for byte.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from ..config import RunConfig


class MLRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rho: float
    mu: float
    gamma: int = 1
    re: float = 0.0
    im: float = 0.0


class MLResponse(BaseModel):
    re: float
    im: float
    err_estimate: float
    csv_line: str


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: RunConfig = Field(default_factory=RunConfig)
    threads: int = 1


class RunResponse(BaseModel):
    exit_code: int
    files: dict[str, str]
    summary: dict


class HealthResponse(BaseModel):
    status: str
    version: str
