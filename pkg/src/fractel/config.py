"""Run configuration: strict YAML schema, validation, canonical emission.

The file format is YAML with nested sections; unknown keys are rejected,
ranges are enforced at parse time, and ``emit_config(parse_config(text))``
is idempotent (floats round-trip through shortest-repr formatting).
"""

from __future__ import annotations

import io
import math

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .sources import PowerPoly
from .spectral import Bubble, ProblemSpec, SinePoly, ZeroSpace

__all__ = ["ConfigError", "RunConfig", "parse_config", "emit_config", "build_problem"]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Malformed or invalid configuration; message carries location info."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PhiConfig(_Strict):
    preset: str = "zero"
    amplitude: float = 1.0
    modes: dict[int, float] | None = None

    @field_validator("preset")
    @classmethod
    def _known_preset(cls, v):
        if v not in ("zero", "sine", "bubble"):
            raise ValueError(f"unknown preset {v!r}; expected zero, sine or bubble")
        return v

    def build(self):
        if self.preset == "zero":
            return ZeroSpace()
        if self.preset == "sine":
            return SinePoly(self.modes or {})
        return Bubble(self.amplitude)


class SourceConfig(_Strict):
    """Per-mode profile t**(rho - 1 + shift) * polynomial(coeffs)."""

    shift: float = 0.0
    coeffs: list[float] = Field(default_factory=lambda: [0.0])

    @field_validator("shift")
    @classmethod
    def _integrable(cls, v):
        if v <= -1.0:
            raise ValueError("shift must exceed -1 to keep the source integrable")
        return v


class ProblemConfig(_Strict):
    rho: float = 0.6
    alpha: float = 2.0
    horizon: float = 1.0
    truncation: int = 64
    time_nodes: int = 128
    space_nodes: int = 200
    tail_tolerance: float = 1e-3
    phi0: PhiConfig = Field(default_factory=PhiConfig)
    phi1: PhiConfig = Field(default_factory=PhiConfig)
    sources: dict[int, SourceConfig] = Field(default_factory=dict)

    @field_validator("rho")
    @classmethod
    def _rho_range(cls, v):
        if not (0.0 < v < 1.0):
            raise ValueError("rho must lie in (0,1)")
        return v

    @field_validator("alpha")
    @classmethod
    def _alpha_range(cls, v):
        if v <= 0.0:
            raise ValueError("alpha must be positive")
        return v

    @field_validator("horizon")
    @classmethod
    def _horizon_range(cls, v):
        if v <= 0.0:
            raise ValueError("horizon must be positive")
        return v

    @field_validator("truncation")
    @classmethod
    def _trunc_range(cls, v):
        if v < 1:
            raise ValueError("truncation must be at least 1")
        return v

    @field_validator("time_nodes", "space_nodes")
    @classmethod
    def _nodes_range(cls, v):
        if v < 8:
            raise ValueError("need at least 8 nodes")
        return v


class ChecksConfig(_Strict):
    tolerance_scale: float = 1.0
    corruption_scale: float = 1.0

    @field_validator("tolerance_scale")
    @classmethod
    def _pos(cls, v):
        if v <= 0.0:
            raise ValueError("tolerance_scale must be positive")
        return v


class SweepConfig(_Strict):
    seed: int = 20260810
    count: int = 20

    @field_validator("count")
    @classmethod
    def _count_range(cls, v):
        if not (1 <= v <= 1000):
            raise ValueError("count must lie in [1, 1000]")
        return v


class RunConfig(_Strict):
    schema_version: int = SCHEMA_VERSION
    problem: ProblemConfig = Field(default_factory=ProblemConfig)
    checks: ChecksConfig = Field(default_factory=ChecksConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)

    @field_validator("schema_version")
    @classmethod
    def _version(cls, v):
        if v != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {v}; this build expects {SCHEMA_VERSION}")
        return v


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML configuration document."""
    try:
        raw = yaml.safe_load(io.StringIO(text))
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        loc = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"malformed config ({loc}): {exc.problem}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a mapping")
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            path = ".".join(str(p) for p in err["loc"]) or "<root>"
            lines.append(f"{path}: {err['msg']}")
        raise ConfigError("invalid config: " + "; ".join(lines)) from exc


def emit_config(cfg: RunConfig) -> str:
    """Canonical YAML emission (sorted keys, default flow off)."""
    data = cfg.model_dump(mode="json")
    return yaml.safe_dump(data, sort_keys=True, default_flow_style=False)


def build_problem(cfg: RunConfig) -> ProblemSpec:
    """Translate a validated configuration into a ProblemSpec."""
    p = cfg.problem
    sources = {
        k: PowerPoly(p.rho - 1.0 + s.shift, tuple(s.coeffs)) for k, s in p.sources.items()
    }
    return ProblemSpec(
        rho=p.rho,
        alpha=p.alpha,
        horizon=p.horizon,
        phi0=p.phi0.build(),
        phi1=p.phi1.build(),
        sources=sources,
        trunc=p.truncation,
        n_time=p.time_nodes,
        n_space=p.space_nodes,
        tail_tol=p.tail_tolerance if math.isfinite(p.tail_tolerance) else math.inf,
    )
