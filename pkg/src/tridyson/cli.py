"""Command line interface for tridyson."""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from tridyson import __version__
from tridyson.config import RunConfig, load_config
from tridyson.engine import DEFAULT_CHECKS, CheckEngine
from tridyson.errors import ConfigError, TridysonError
from tridyson.report import render_markdown_report
from tridyson.schemas import RunManifestModel, VerificationReport
from tridyson.studies import (
    check_scopes,
    coefficient_study,
    collision_study,
    convergence_study,
    gbe_study,
    identity_study,
    qv_study,
    simulate_study,
)

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def dumps(payload: Any) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write_output(output: str, path: Optional[str]) -> None:
    if not path:
        print(output, end="")
        return
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(output)


def write_csv(frame: pd.DataFrame, path: str) -> None:
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def _load(args: argparse.Namespace) -> RunConfig:
    if not args.config:
        raise ConfigError(f"{args.command} needs --config")
    return load_config(args.config).with_seed(args.seed)


class Run:
    """Output directory, manifest bookkeeping and the report of one command."""

    def __init__(self, args: argparse.Namespace, config: Dict[str, Any], seed: int):
        self.command = args.command
        self.out = args.out
        self.checks_file = getattr(args, "checks", None)
        self.config = config
        self.seed = seed
        self.started = _now()
        self.outputs: List[str] = []
        os.makedirs(self.out, exist_ok=True)

    def path(self, *parts: str) -> str:
        full = os.path.join(self.out, *parts)
        os.makedirs(os.path.dirname(full), exist_ok=True)
        self.outputs.append(os.path.relpath(full, self.out))
        return full

    def report(
        self,
        metrics: Dict[str, Any],
        scopes: Sequence[str] = (),
        **extra: Any,
    ) -> bool:
        """Evaluate the acceptance checks, write report.json and return the verdict."""
        engine = CheckEngine(self.checks_file or DEFAULT_CHECKS)
        metrics = _jsonable(metrics)
        checks = engine.evaluate(self.command, metrics, scopes)
        passed_count = sum(c["passed"] for c in checks)
        payload = {
            "command": self.command,
            "tool_version": __version__,
            "seed": self.seed,
            "config": self.config,
            "metrics": metrics,
            "scopes": sorted(scopes),
            "checks": checks,
            "summary": {
                "total_checks": len(checks),
                "passed": passed_count,
                "failed": len(checks) - passed_count,
            },
            "passed": passed_count == len(checks),
            **extra,
        }
        report = VerificationReport.model_validate(_jsonable(payload))
        _write_output(dumps(report.model_dump(mode="json")), self.path("report.json"))
        return report.passed

    def finish(self) -> None:
        manifest = RunManifestModel(
            command=self.command,
            tool_version=__version__,
            seed=self.seed,
            config=_jsonable(self.config),
            started=self.started,
            finished=_now(),
            outputs=sorted(self.outputs),
            checks_file=self.checks_file,
        )
        lines = [
            f"command: {manifest.command}",
            f"tool_version: {manifest.tool_version}",
            f"seed: {manifest.seed}",
            f"started: {manifest.started}",
            f"finished: {manifest.finished}",
        ]
        if manifest.checks_file:
            lines.append(f"checks_file: {manifest.checks_file}")
        lines.append("config:")
        for key in sorted(manifest.config):
            lines.append(f"  {key} = {json.dumps(manifest.config[key], sort_keys=True)}")
        lines.append("outputs:")
        for output in manifest.outputs:
            lines.append(f"  {output}")
        _write_output("\n".join(lines) + "\n", os.path.join(self.out, "manifest.txt"))


def _config_dict(config: RunConfig) -> Dict[str, Any]:
    return config.model_dump(mode="json")


def simulate_command(args: argparse.Namespace) -> int:
    config = _load(args)
    run = Run(args, _config_dict(config), config.seed)
    for index, frame in enumerate(simulate_study(config, args.threads)):
        write_csv(frame, run.path("paths", f"path_{index:04d}.csv"))
    run.finish()
    return 0


def verify_sde_command(args: argparse.Namespace) -> int:
    config = _load(args)
    run = Run(args, _config_dict(config), config.seed)
    metrics = {
        "coefficients": coefficient_study(config, args.threads),
        "pathwise": convergence_study(config, args.threads),
        "qv": qv_study(config, args.threads),
    }
    passed = run.report(metrics, check_scopes(config))
    run.finish()
    return 0 if passed else 1


def verify_identities_command(args: argparse.Namespace) -> int:
    values: Dict[str, Any] = {"n": 1}
    if args.config:
        base = load_config(args.config)
        values.update(
            identity_count=base.identity_count,
            identity_max_size=base.identity_max_size,
            seed=base.seed,
        )
    if args.count is not None:
        values["identity_count"] = args.count
    if args.max_size is not None:
        values["identity_max_size"] = args.max_size
    if args.seed is not None:
        values["seed"] = args.seed
    try:
        config = RunConfig(**values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    summary = {
        "identity_count": config.identity_count,
        "identity_max_size": config.identity_max_size,
        "seed": config.seed,
    }
    run = Run(args, summary, config.seed)
    reports, metrics = identity_study(config)
    passed = run.report({"identities": metrics}, check_scopes(config), identity_reports=reports)
    run.finish()
    return 0 if passed else 1


def collision_study_command(args: argparse.Namespace) -> int:
    config = _load(args)
    run = Run(args, _config_dict(config), config.seed)
    table, metrics = collision_study(config, args.threads)
    write_csv(table, run.path("collisions.csv"))
    passed = run.report({"collisions": metrics}, check_scopes(config))
    run.finish()
    return 0 if passed else 1


def gbe_command(args: argparse.Namespace) -> int:
    config = _load(args)
    run = Run(args, _config_dict(config), config.seed)
    reports, metrics = gbe_study(config)
    passed = run.report({"gbe": metrics}, check_scopes(config), moment_reports=reports)
    run.finish()
    return 0 if passed else 1


def report_command(args: argparse.Namespace) -> int:
    with open(args.input, "r", encoding="utf-8") as handle:
        payload = json.load(handle)

    report = render_markdown_report(payload)
    _write_output(report, args.output)
    return 0


def _add_run_options(parser: argparse.ArgumentParser, config_required: bool = True) -> None:
    parser.add_argument(
        "-c",
        "--config",
        required=config_required,
        help="Experiment config (key = value, or .yaml)",
    )
    parser.add_argument(
        "-o",
        "--out",
        default="out",
        help="Output directory",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="Worker threads for path and instance work",
    )
    parser.add_argument(
        "--seed",
        type=int,
        help="Override the master seed of the config",
    )
    parser.add_argument(
        "--checks",
        default=DEFAULT_CHECKS,
        help="Path to acceptance checks JSON",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tridyson",
        description="Tridiagonal matrix process simulator and eigenvalue-SDE verification",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Debug logging",
    )

    subparsers = parser.add_subparsers(dest="command", required=True)

    simulate = subparsers.add_parser("simulate", help="Write eigenvalue trajectories as CSV")
    _add_run_options(simulate)
    simulate.set_defaults(func=simulate_command)

    verify_sde = subparsers.add_parser(
        "verify-sde",
        help="Coefficient scans, pathwise integration and quadratic variations",
    )
    _add_run_options(verify_sde)
    verify_sde.set_defaults(func=verify_sde_command)

    identities = subparsers.add_parser(
        "verify-identities",
        help="Randomized exact checks of the determinant identities",
    )
    _add_run_options(identities, config_required=False)
    identities.add_argument("--count", type=int, help="Instances per check")
    identities.add_argument("--max-size", type=int, help="Largest matrix size")
    identities.set_defaults(func=verify_identities_command)

    collisions = subparsers.add_parser(
        "collision-study",
        help="Collision and absorption frequencies over an alpha grid",
    )
    _add_run_options(collisions)
    collisions.set_defaults(func=collision_study_command)

    gbe = subparsers.add_parser("gbe", help="Gaussian beta ensemble moment checks")
    _add_run_options(gbe)
    gbe.set_defaults(func=gbe_command)

    report = subparsers.add_parser(
        "report",
        help="Render a Markdown report from a JSON report",
    )
    report.add_argument(
        "-i",
        "--input",
        required=True,
        help="Path to JSON report",
    )
    report.add_argument(
        "-o",
        "--output",
        help="Path to write the report (Markdown); stdout if omitted",
    )
    report.set_defaults(func=report_command)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TridysonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
