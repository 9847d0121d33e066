"""Command-line client.

A thin layer over the command runner: `solve`, `oracle`, `verify` and
`converge` parse a YAML config, execute either in process (default) or
against a running service (``--server URL``), write the returned files under
``--out`` and exit 0/1/2 for success / failed check / usage error.

Environment overrides (flags win): FRACTEL_CONFIG, FRACTEL_OUT,
FRACTEL_THREADS, FRACTEL_TOLERANCE_SCALE, FRACTEL_SERVER.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, parse_config
from .runner import CommandResult, run_converge, run_ml, run_oracle, run_solve, run_verify

_RUNNERS = {
    "solve": run_solve,
    "oracle": run_oracle,
    "verify": run_verify,
    "converge": run_converge,
}


def _env(name, default=None):
    return os.environ.get(f"FRACTEL_{name}", default)


def _add_run_flags(sub):
    sub.add_argument("--config", default=None, help="YAML config path (default: built-in defaults)")
    sub.add_argument("--out", default=None, help="output directory (default: current directory)")
    sub.add_argument("--threads", type=int, default=None, help="worker threads for mode solves")
    sub.add_argument(
        "--tolerance-scale", type=float, default=None, dest="tolerance_scale",
        help="multiplier applied to all check tolerances",
    )
    sub.add_argument("--server", default=None, help="base URL of a running service (thin-client mode)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fractel",
        description="Time-fractional Telegraph equation: solve, verify, compare against the Laplace oracle.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    ml = subs.add_parser("ml", help="evaluate a Mittag-Leffler / Prabhakar value")
    ml.add_argument("--rho", type=float, required=True)
    ml.add_argument("--mu", type=float, required=True)
    ml.add_argument("--gamma", type=int, default=1, choices=(1, 2))
    ml.add_argument("--re", type=float, default=0.0)
    ml.add_argument("--im", type=float, default=0.0)

    for name, help_text in (
        ("solve", "assemble the solution field and write solution.csv + metadata.json"),
        ("oracle", "compare the mode solver against numerical Laplace inversion"),
        ("verify", "run the property-check suite and write verify_report.json"),
        ("converge", "convergence study over mode cutoff and time resolution"),
    ):
        _add_run_flags(subs.add_parser(name, help=help_text))

    serve = subs.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _load_config(args) -> RunConfig:
    path = args.config or _env("CONFIG")
    if path is None:
        cfg = RunConfig()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        cfg = parse_config(text)
    scale = args.tolerance_scale
    if scale is None:
        env_scale = _env("TOLERANCE_SCALE")
        scale = float(env_scale) if env_scale else None
    if scale is not None:
        cfg.checks.tolerance_scale = scale
    return cfg


def _dispatch_remote(server, command, cfg: RunConfig, threads) -> CommandResult:
    import httpx

    url = server.rstrip("/") + "/" + command
    payload = {"config": cfg.model_dump(mode="json"), "threads": threads}
    resp = httpx.post(url, json=payload, timeout=600.0)
    resp.raise_for_status()
    body = resp.json()
    return CommandResult(exit_code=body["exit_code"], files=body["files"], summary=body["summary"])


def _write_files(result: CommandResult, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in result.files.items():
        (out / name).write_text(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "ml":
        result = run_ml(args.rho, args.mu, args.gamma, args.re, args.im)
        if result.exit_code == 0:
            print(result.summary["csv_line"])
        else:
            print(result.summary.get("error", "invalid arguments"), file=sys.stderr)
        return result.exit_code

    if args.command == "serve":
        try:
            import uvicorn
        except ImportError:
            print("error: serving requires uvicorn (pip install 'fractel[server]')", file=sys.stderr)
            return 2

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    threads = args.threads
    if threads is None:
        threads = int(_env("THREADS", "1"))
    server = args.server or _env("SERVER")

    try:
        if server:
            result = _dispatch_remote(server, args.command, cfg, threads)
        elif args.command in ("solve", "verify"):
            result = _RUNNERS[args.command](cfg, threads=threads)
        else:
            result = _RUNNERS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_dir = args.out or _env("OUT") or "."
    _write_files(result, out_dir)
    for key, val in sorted(result.summary.items()):
        print(f"{key}: {val}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
