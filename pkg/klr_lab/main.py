# klr_lab/main.py

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from klr_lab.api.tasks import run_task, summarize
from klr_lab.core.config import settings
from klr_lab.core.errors import ConfigError, KLRLabError
from klr_lab.models.job import JobConfig
from klr_lab.models.report import RunReport

logger = logging.getLogger("klr_lab")


def configure_logging(level: Optional[str] = None):
    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.APP_NAME,
        description="Exact computations and claim checks for KLR algebras and their cyclotomic quotients.",
    )
    parser.add_argument("--config", help="Path to a JSON job file")
    parser.add_argument("--task", help="Override the task named in the job file")
    parser.add_argument("--out", help="Report path (default: options.output, else stdout)")
    parser.add_argument("--print-schema", action="store_true", help="Print the job JSON schema and exit")
    parser.add_argument("--log-level", help=f"Logging level (default: {settings.LOG_LEVEL})")
    return parser


def load_job(path: str, task: Optional[str] = None) -> JobConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as e:
        raise ConfigError(f"Cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: the job must be a JSON object")
    if task:
        raw["task"] = task
    try:
        return JobConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid job in {path}: {e}") from e


def error_report(task: str, error: KLRLabError) -> RunReport:
    return RunReport(summary=summarize(task, 0, [], {type(error).__name__: error.detail}))


def write_report(report: RunReport, out: Optional[str]):
    text = report.model_dump_json(by_alias=True, indent=2)
    if out:
        Path(out).write_text(text + "\n")
        logger.info(f"Report written to {out}")
    else:
        sys.stdout.write(text + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    if args.print_schema:
        sys.stdout.write(json.dumps(JobConfig.model_json_schema(by_alias=True), indent=2) + "\n")
        return 0
    if not args.config:
        logger.error("--config is required")
        return ConfigError.exit_status

    out = args.out
    task = args.task or "unknown"
    try:
        job = load_job(args.config, args.task)
        task = job.task
        out = out or job.options.output
        report, status = run_task(job)
    except KLRLabError as e:
        logger.error(f"{task} failed: {e.detail}")
        write_report(error_report(task, e), out)
        return e.exit_status
    except Exception as e:
        logger.exception(f"{task} failed with an internal error")
        write_report(error_report(task, KLRLabError(repr(e))), out)
        return KLRLabError.exit_status

    summary = report.summary
    logger.info(f"{summary.task} completed: {summary.passed}/{summary.total_claims} claims passed")
    write_report(report, out)
    return status


if __name__ == "__main__":
    sys.exit(main())
