"""
Command Line - Parser, Jobs and Exit Codes
==========================================
Turns argv into a Job, runs the matching handler and writes the Report as
canonical JSON to --out (or stdout).

Exit codes:
- 0: every check passed
- 1: a check failed (the report carries the counterexample) or was
  inconclusive within the search bound
- 2: schema, usage or precondition error
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from api.models.job_models import Job
from api.models.report_models import Report, Status
from api.routes.commands import CHECK_TARGETS, COMMANDS
from core.errors import DblFibError
from core.settings import Settings, load_settings

logger = logging.getLogger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_STATUS_MARKS = {Status.PASS: "✅", Status.FAIL: "❌", Status.INCONCLUSIVE: "⚠️"}


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", type=int, default=settings.window, help="max set size of provider windows")
    common.add_argument("--apex", type=int, default=settings.apex, help="max apex size of spans and relations")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--bound", type=int, default=settings.bound, help="node bound for backtracking searches")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--format", choices=["json"], default="json")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for corpus batches")

    parser = argparse.ArgumentParser(prog="dblfib", description="Finite double fibration toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "fibers", "roundtrip", "quintet", "vhprops"):
        sub.add_parser(name, parents=[common]).add_argument("input")
    elements = sub.add_parser("elements", parents=[common])
    elements.add_argument("input")
    elements.add_argument("--save", help="also write El(F) as a cloven double fibration")
    check = sub.add_parser("check", parents=[common])
    check.add_argument("target", choices=CHECK_TARGETS)
    check.add_argument("args", nargs="+", metavar="[L|P|S] input")
    check.add_argument("--flavor", choices=["L", "P", "S"])
    corpus = sub.add_parser("corpus", parents=[common])
    corpus.add_argument("directory", nargs="?")
    return parser


def parse_job(argv: Sequence[str], settings: Settings) -> Job:
    """argv to Job; argparse exits with code 2 on usage errors"""
    parser = build_parser(settings)
    args = parser.parse_args(list(argv))
    target: Optional[str] = None
    flavor = "P"
    if args.command == "check":
        target = args.target
        inputs: List[str] = list(args.args)
        if target == "internal" and len(inputs) > 1 and inputs[0] in ("L", "P", "S"):
            flavor = inputs.pop(0)
        flavor = args.flavor or flavor
    elif args.command == "corpus":
        inputs = [args.directory] if args.directory else []
    else:
        inputs = [args.input]
    try:
        return Job(command=args.command, target=target, inputs=inputs, flavor=flavor, window=args.window,
                   apex=args.apex, seed=args.seed, bound=args.bound, out=args.out,
                   save=getattr(args, "save", None), format=args.format, jobs=args.jobs,
                   output_dir=settings.output_dir)
    except ValidationError as e:
        parser.error(str(e.errors()[0]["loc"][0]) + ": " + e.errors()[0]["msg"])


def _label(job: Job) -> str:
    return " ".join(part for part in (job.command, job.target) if part)


def emit(report: Report, job: Job) -> None:
    text = report.to_json() + "\n"
    if job.out:
        path = Path(job.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        print(f"📄 Report written to {path}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def run(job: Job) -> int:
    """Run one job and map its outcome to an exit code"""
    handler = COMMANDS[job.command]
    try:
        report = handler(job)
    except DblFibError as e:
        print(f"💥 {_label(job)}: {e}", file=sys.stderr)
        logger.debug("job failed with %s", type(e).__name__)
        return EXIT_USAGE
    emit(report, job)
    print(f"{_STATUS_MARKS[report.status]} {_label(job)}: {report.status.value}", file=sys.stderr)
    return EXIT_PASS if report.passed else EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        settings = load_settings()
    except DblFibError as e:
        print(f"💥 {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=settings.log_level, format="%(levelname)s %(name)s: %(message)s")
    job = parse_job(sys.argv[1:] if argv is None else argv, settings)
    return run(job)
