"""Command line entry point: ``defcohom run|check|examples``."""
from __future__ import annotations

import argparse
import sys
from importlib import resources

from .catalog import builtin_examples
from .jobs import JobError, exit_code, parse_job, report_json, report_table, run_job

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def shipped_jobs() -> list[str]:
    root = resources.files("defcohom") / "jobs"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def shipped_job_text(name: str) -> str:
    return (resources.files("defcohom") / "jobs" / name).read_text(encoding="utf-8")


def _load(path: str):
    try:
        text = _read(path)
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror}", file=sys.stderr)
        return None
    try:
        return parse_job(text)
    except JobError as exc:
        print(f"input error at {exc}", file=sys.stderr)
        return None


def cmd_run(args) -> int:
    job = _load(args.job)
    if job is None:
        return EXIT_INPUT
    report = run_job(job)
    text = report_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text if args.format == "json" else report_table(report))
    return exit_code(report)


def cmd_check(args) -> int:
    job = _load(args.job)
    if job is None:
        return EXIT_INPUT
    print(f"ok: {len(job.tasks)} task(s), model dimA={job.model.a} dimE={job.model.m} "
          f"dimC={job.model.c} trunc={job.model.d}")
    return EXIT_OK


def cmd_examples(args) -> int:
    if args.show:
        try:
            sys.stdout.write(shipped_job_text(args.show))
        except (FileNotFoundError, OSError):
            print(f"error: no shipped job named {args.show!r}", file=sys.stderr)
            return EXIT_INPUT
        return EXIT_OK
    print("constructs:")
    for expr, desc in builtin_examples().items():
        print(f"  {expr:<30} {desc}")
    print("shipped jobs (defcohom examples --show NAME):")
    for name in shipped_jobs():
        print(f"  {name}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="defcohom", description="Exact deformation cohomology jobs.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a job file and print a report")
    r.add_argument("job", help="path to a JSON job file, or - for stdin")
    r.add_argument("--out", help="also write the JSON report to this path")
    r.add_argument("--format", choices=("table", "json"), default="table")
    r.set_defaults(func=cmd_run)
    c = sub.add_parser("check", help="validate a job file without computing")
    c.add_argument("job")
    c.set_defaults(func=cmd_check)
    e = sub.add_parser("examples", help="list catalog constructs and shipped jobs")
    e.add_argument("--show", metavar="NAME", help="print a shipped job file")
    e.set_defaults(func=cmd_examples)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
