"""Command implementations shared by the CLI and the HTTP service.

Each command returns a ``CommandResult`` whose ``files`` map file names to
fully rendered text; callers decide where the bytes go (disk for the CLI,
response body for the service).  All numeric output is serialized with 17
significant digits and fixed ordering, so identical configurations produce
byte-identical artifacts.

Exit codes: 0 success, 1 a check failed its tolerance, 2 usage error.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import RunConfig, build_problem, emit_config
from .exceptions import TruncationWarning
from .laplace_oracle import laplace_symbol, talbot_invert
from .mlf import MLQuery, ml_eval_diag
from .scalar_cauchy import ModeParams, solve_scalar
from .sources import PowerPoly
from .spectral import assemble_solution, evaluate_derivatives, initial_condition_errors, residual
from .verify import fit_sector_constant, gl_cross_residual, stability_ratio

__all__ = ["CommandResult", "run_ml", "run_solve", "run_oracle", "run_verify", "run_converge"]

ORACLE_RTOL = 1e-6
RESIDUAL_TOL = 1e-6
IC_TOL = 1e-3
REALNESS_RTOL = 1e-12
UNIQUENESS_TOL = 1e-12
SECTOR_M_MAX = 10.0


@dataclass
class CommandResult:
    exit_code: int
    files: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)


def fmt(x) -> str:
    """17-significant-digit decimal, the package-wide serialization format."""
    return format(float(x), ".17g")


def _csv(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if isinstance(v, (int, float, np.floating)) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def run_ml(rho, mu, gamma, re, im) -> CommandResult:
    """One Mittag-Leffler evaluation; CSV line re,im,err_estimate."""
    try:
        q = MLQuery(rho=rho, mu=mu, gamma=int(gamma), z=complex(re, im))
    except ValueError as exc:
        return CommandResult(exit_code=2, summary={"error": str(exc)})
    val, err = ml_eval_diag(q)
    line = f"{fmt(val.real)},{fmt(val.imag)},{fmt(err)}"
    return CommandResult(exit_code=0, summary={"csv_line": line}, files={"ml.csv": line + "\n"})


def _assemble(cfg: RunConfig, threads=1, corrupt=False):
    spec = build_problem(cfg)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        fieldobj = assemble_solution(spec, threads=threads)
        truncation_notes = [str(w.message) for w in caught if issubclass(w.category, TruncationWarning)]
    scale = cfg.checks.corruption_scale
    if corrupt and scale != 1.0 and fieldobj.trajectories:
        k = min(fieldobj.trajectories)
        tr = fieldobj.trajectories[k]
        tr.reg_values = tr.reg_values * scale
        fieldobj.meta["treg"][k - 1, :] *= scale
        # rebuild w from the corrupted mode set; derivative atoms keep the
        # uncorrupted dynamics, which is exactly what the probe detects
        from .spectral import _sine_matrix

        fieldobj.w = _sine_matrix(fieldobj.x, spec.trunc) @ fieldobj.meta["treg"]
    evaluate_derivatives(spec, fieldobj)
    return spec, fieldobj, truncation_notes


def _solution_csv(spec, fieldobj, rep):
    rows = []
    t = fieldobj.t
    treg_fac = t ** (spec.rho - 1.0)
    for i, x in enumerate(fieldobj.x):
        for j, tt in enumerate(t):
            w = fieldobj.w[i, j]
            rows.append(
                (
                    x,
                    tt,
                    w,
                    w * treg_fac[j],
                    fieldobj.uxx[i, j] * treg_fac[j],
                    fieldobj.drho[i, j] * treg_fac[j],
                    fieldobj.drho2[i, j] * treg_fac[j],
                    rep.values[i, j],
                )
            )
    return _csv(("x", "t", "w", "u", "dxx", "drho", "drho2", "residual"), rows)


def run_solve(cfg: RunConfig, threads=1) -> CommandResult:
    """Assemble the field; emit solution.csv plus JSON metadata."""
    spec, fieldobj, trunc_notes = _assemble(cfg, threads=threads)
    rep = residual(spec, fieldobj)
    meta = {
        "schema_version": 1,
        "version": __version__,
        "config": cfg.model_dump(mode="json"),
        "degenerate_modes": list(fieldobj.degenerate_modes),
        "tail_bound": fieldobj.tail_bound,
        "truncation_warnings": trunc_notes,
        "norms": {
            "w_sup": fieldobj.scale(),
            "residual_sup": rep.sup,
            "residual_l2": rep.l2,
            "max_imag": fieldobj.max_imag,
        },
    }
    files = {
        "solution.csv": _solution_csv(spec, fieldobj, rep),
        "metadata.json": _json(meta),
        "effective_config.yaml": emit_config(cfg),
    }
    return CommandResult(exit_code=0, files=files, summary=meta["norms"])


def run_oracle(cfg: RunConfig) -> CommandResult:
    """Solver vs Laplace inversion on random mode problems; CSV + summary."""
    rng = np.random.default_rng(cfg.sweep.seed)
    tol = ORACLE_RTOL * cfg.checks.tolerance_scale
    horizon = cfg.problem.horizon
    ts = np.linspace(0.1 * horizon, horizon, 16)
    rows = []
    worst = 0.0
    for case in range(cfg.sweep.count):
        rho = float(rng.uniform(0.35, 0.95))
        alpha = float(rng.uniform(0.5, 2.5))
        lam = float(rng.uniform(0.0, 100.0))
        phi0 = float(rng.uniform(-2.0, 2.0))
        phi1 = float(rng.uniform(-2.0, 2.0))
        src = None
        if case % 2 == 1:
            src = PowerPoly(rho - 1.0, (float(rng.uniform(-1.0, 1.0)),))
        params = ModeParams(rho, alpha, lam, phi0, phi1, src)
        traj = solve_scalar(params, ts)
        y_solver = traj.reg_values * ts ** (rho - 1.0)
        sym = laplace_symbol(params)
        y_oracle = np.array([talbot_invert(sym, float(t)) for t in ts])
        scale = float(np.max(np.abs(y_solver))) + 1e-300
        for t, ys, yo in zip(ts, y_solver, y_oracle):
            rel = abs(ys - yo) / scale
            worst = max(worst, rel)
            rows.append((t, ys, yo, rel))
    passed = worst <= tol
    summary = {
        "schema_version": 1,
        "cases": cfg.sweep.count,
        "max_relerr": worst,
        "tolerance": tol,
        "passed": bool(passed),
    }
    files = {
        "oracle.csv": _csv(("t", "y_solver", "y_oracle", "relerr"), rows),
        "oracle_summary.json": _json(summary),
        "effective_config.yaml": emit_config(cfg),
    }
    return CommandResult(exit_code=0 if passed else 1, files=files, summary=summary)


def run_verify(cfg: RunConfig, threads=1) -> CommandResult:
    """Property checks on the configured problem; JSON report, exit 1 on fail."""
    tol_scale = cfg.checks.tolerance_scale
    corrupt = cfg.checks.corruption_scale != 1.0
    spec, fieldobj, trunc_notes = _assemble(cfg, threads=threads, corrupt=corrupt)
    rep = residual(spec, fieldobj)
    scale = max(fieldobj.scale(), 1.0)

    checks = []

    def check(name, measured, tolerance):
        checks.append(
            {
                "name": name,
                "measured": float(measured),
                "tolerance": float(tolerance),
                "passed": bool(measured <= tolerance),
            }
        )

    check("pde_residual_sup", rep.sup, RESIDUAL_TOL * tol_scale * scale)
    ic = initial_condition_errors(spec, fieldobj)
    check("initial_condition_phi1", ic["phi1_sup_error"], IC_TOL * tol_scale)
    check("initial_condition_phi0", ic["phi0_sup_error"], IC_TOL * tol_scale)
    check("realness_max_imag", fieldobj.max_imag, REALNESS_RTOL * scale)
    boundary = float(np.max(np.abs(fieldobj.w[[0, -1], :]))) if fieldobj.w.size else 0.0
    check("boundary_exact_zero", boundary, 0.0)

    from .config import PhiConfig

    zero_cfg = cfg.model_copy(deep=True)
    zero_cfg.problem.phi0 = PhiConfig()
    zero_cfg.problem.phi1 = PhiConfig()
    zero_cfg.problem.sources = {}
    zspec = build_problem(zero_cfg)
    zfield = assemble_solution(zspec, threads=threads)
    check("uniqueness_zero_data", zfield.scale(), UNIQUENESS_TOL)

    m_fit = fit_sector_constant(
        spec.rho, spec.rho, lams=np.arange(1.0, 401.0, 8.0), ts=np.linspace(0.05, spec.horizon, 8),
    )
    check("sector_constant_fit", m_fit, SECTOR_M_MAX)

    stab = stability_ratio(spec, fieldobj)
    checks.append(
        {
            "name": "stability_ratio_finite",
            "measured": stab.ratio,
            "tolerance": math.inf,
            "passed": bool(math.isfinite(stab.ratio) and not stab.violation),
        }
    )

    report = {
        "schema_version": 1,
        "version": __version__,
        "config": cfg.model_dump(mode="json"),
        "checks": checks,
        "fitted_constants": {"sector_M": m_fit, "stability_ratio": stab.ratio},
        "gl_cross_residual": gl_cross_residual(fieldobj),
        "truncation_warnings": trunc_notes,
        "corruption_scale": cfg.checks.corruption_scale,
    }
    failed = [c["name"] for c in checks if not c["passed"]]
    report["failed_checks"] = failed
    files = {
        "verify_report.json": _json(report),
        "effective_config.yaml": emit_config(cfg),
    }
    return CommandResult(
        exit_code=0 if not failed else 1,
        files=files,
        summary={"failed_checks": failed, "n_checks": len(checks)},
    )


def run_converge(cfg: RunConfig) -> CommandResult:
    """Convergence study across mode cutoffs and time resolutions."""
    from .verify import convergence_study

    spec = build_problem(cfg)
    trunc = cfg.problem.truncation
    n_time = cfg.problem.time_nodes
    trunc_list = sorted({max(1, trunc // 4), max(1, trunc // 2), trunc})
    nt_list = sorted({max(8, n_time // 4), max(8, n_time // 2), n_time})
    study = convergence_study(spec, trunc_list, nt_list)
    rows = [
        (
            r["trunc"],
            r["n_time"],
            r["w_sup"],
            r["residual_sup"],
            r["residual_l2"],
            r["tail_bound"],
            r["gl_residual"],
        )
        for r in study["rows"]
    ]
    files = {
        "convergence.csv": _csv(
            ("trunc", "n_time", "w_sup", "residual_sup", "residual_l2", "tail_bound", "gl_residual"),
            rows,
        ),
        "convergence.json": _json(
            {
                "schema_version": 1,
                "rows": study["rows"],
                "amplitude_decay_exponent": study["amplitude_decay_exponent"],
            }
        ),
        "effective_config.yaml": emit_config(cfg),
    }
    return CommandResult(exit_code=0, files=files, summary={"rows": len(rows)})
