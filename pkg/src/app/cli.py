"""
Command-line entry point

    python -m app catalog
    python -m app verify cylinder_s2xr2 --precision rational
    python -m app classify round_s4 --gamma 1.5 --duality plus
    python -m app fuzz --trials 1000000 --seed 42 --format structured
    python -m app chart path/to/grid.chart

Exit codes: 0 all checks passed, 1 some check failed, 2 invalid input.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, TextIO

from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import Curv4Error, InvalidRunConfig
from app.core.logging import configure_logging
from app.core.numeric import Precision
from app.repositories import get_model_repository
from app.schemas.reports import ReportDocument
from app.schemas.run import Command, DualitySelector, OutputFormat, RunConfig
from app.services.workbench_service import WorkbenchService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2


def _parse_args(argv: Optional[list[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog=settings.PROJECT_NAME,
        description="Curvature decomposition, pinching checks and soliton verification in dimension four",
    )
    parser.add_argument("command", choices=[command.value for command in Command])
    parser.add_argument("target", nargs="?", help="Model name, or chart path for 'chart' and 'classify'")
    parser.add_argument("--precision", choices=[p.value for p in Precision], default=Precision.FLOATING.value)
    parser.add_argument("--duality", choices=[d.value for d in DualitySelector], default=DualitySelector.BOTH.value)
    parser.add_argument("--gamma", type=float, help="Constant of the catino_13 condition")
    parser.add_argument("--trials", type=int, help="Random draws per family for 'fuzz'")
    parser.add_argument("--seed", type=int, help="Root seed for 'fuzz' and verify sample points")
    parser.add_argument("--points", type=int, default=100, help="Sample points per model for 'verify'")
    parser.add_argument("--out", help="Write the report here instead of stdout")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.TEXT.value)
    parser.add_argument("--log-level", default=None, help="Overrides CURV4_LOG_LEVEL")
    return parser.parse_args(argv)


def build_config(args: argparse.Namespace) -> RunConfig:
    try:
        return RunConfig(
            command=args.command,
            target=args.target,
            duality=args.duality,
            gamma=args.gamma,
            trials=args.trials,
            seed=args.seed,
            precision=args.precision,
            points=args.points,
            out=args.out,
            format=args.format,
        )
    except ValidationError as exc:
        messages = "; ".join(error["msg"] for error in exc.errors())
        raise InvalidRunConfig(messages) from exc


def _value(value) -> str:
    return value if isinstance(value, str) else repr(value)


def render_text(document: ReportDocument) -> str:
    """Plain report: one line per check, then the summary keys in order"""
    header = f"{document.project} {document.command}"
    if document.target:
        header += f" {document.target}"
    lines = [f"{header} [{document.precision}]"]
    for check in document.checks:
        status = "PASS" if check.passed else "FAIL"
        line = f"{status} {check.id} lhs={check.lhs!r} rhs={check.rhs!r} margin={check.margin!r} tol={check.tolerance!r}"
        if check.detail:
            line += f" ({check.detail})"
        lines.append(line)
    for key, value in document.summary.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{key}:")
            lines.extend(f"  {entry}" for entry in value)
        elif isinstance(value, list):
            lines.append(f"{key}: {' '.join(_value(v) for v in value)}")
        else:
            lines.append(f"{key}: {_value(value)}")
    lines.append("result: " + ("ok" if document.passed else "failed"))
    return "\n".join(lines) + "\n"


def render(document: ReportDocument, output_format: OutputFormat) -> str:
    if output_format is OutputFormat.STRUCTURED:
        return document.model_dump_json(by_alias=True, indent=2) + "\n"
    return render_text(document)


def run(config: RunConfig, service: Optional[WorkbenchService] = None, stream: Optional[TextIO] = None) -> int:
    """Execute one configured command and write its report; returns the exit code"""
    service = service or WorkbenchService(get_model_repository())
    document = service.run(config)
    text = render(document, config.format)
    if config.out:
        try:
            Path(config.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise InvalidRunConfig(f"cannot write report to {config.out}: {exc.strerror or exc}") from exc
    else:
        (stream or sys.stdout).write(text)
    return EXIT_OK if document.passed else EXIT_FAILED


def main(argv: Optional[list[str]] = None) -> int:
    args = _parse_args(argv)
    configure_logging(args.log_level)
    try:
        return run(build_config(args))
    except Curv4Error as exc:
        logger.debug("run aborted", exc_info=True)
        sys.stderr.write(f"error: {exc.code}: {exc.message}\n")
        return EXIT_INVALID
