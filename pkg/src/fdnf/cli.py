"""Command line entry point.

Subcommands: analyze, stats, gen, solve, check, serve. Exit codes: 0 on
success, 1 when the inputs contain validation failures or the formulas are
not equivalent, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path as FsPath

from .analyzer import annotate_attempt, solve_reference, stage_name, stage_of
from .formulas import ParseError, parse, print_formula, variables
from .rules import RULES
from .solutions import (
    FormatError,
    aggregate_stats,
    export_tsv,
    load_solutions,
    write_annotations,
)
from .tasks import TaskSpec, generate_tasks


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fdnf", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="annotate solution files and report statistics")
    an.add_argument("files", nargs="+")
    an.add_argument("-o", "--output", help="annotation output file, or a directory for per-input files")
    an.add_argument("--stats", help="write the statistics table (TSV) here")

    st = sub.add_parser("stats", help="statistics table only")
    st.add_argument("files", nargs="+")
    st.add_argument("-o", "--output", required=True)

    ge = sub.add_parser("gen", help="generate random tasks")
    ge.add_argument("--count", type=int, default=1)
    ge.add_argument("--seed", type=int, default=0)
    ge.add_argument("--vars", default="XYZW", help="variable pool, e.g. XYZW")
    ge.add_argument("--negations", default="2..3", help="negation count range, e.g. 2..3")
    ge.add_argument("-o", "--output", required=True)

    so = sub.add_parser("solve", help="solve a formula with the reference solver")
    so.add_argument("formula")
    so.add_argument("--trace", action="store_true")

    ch = sub.add_parser("check", help="truth-table equivalence of two formulas")
    ch.add_argument("formula_a")
    ch.add_argument("formula_b")

    se = sub.add_parser("serve", help="run the interactive solving service")
    se.add_argument("--port", type=int, default=8000)
    se.add_argument("--host", default="127.0.0.1")
    se.add_argument("--static", help="directory with the browser UI to serve at /")
    return p


def run(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return _dispatch(args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


def _dispatch(args) -> int:
    if args.command == "analyze":
        return _analyze(args.files, args.output, args.stats, annotations=True)
    if args.command == "stats":
        return _analyze(args.files, None, args.output, annotations=False)
    if args.command == "gen":
        return _gen(args)
    if args.command == "solve":
        return _solve(args)
    if args.command == "check":
        return _check(args)
    if args.command == "serve":
        return _serve(args)
    return 2


def _analyze(files: list[str], out: str | None, stats_out: str | None, annotations: bool) -> int:
    failures = 0
    texts: list[tuple[str, bytes]] = []  # (input stem, annotation bytes)
    summaries = []
    for name in files:
        path = FsPath(name)
        if not path.is_file():
            print(f"error: no such file: {name}", file=sys.stderr)
            return 2
        try:
            loaded = load_solutions(path.read_bytes())
        except FormatError as e:
            print(f"{name}: {e}", file=sys.stderr)
            failures += 1
            continue
        for idx, reason in loaded.rejected:
            print(f"{name}: attempt {idx}: {reason}", file=sys.stderr)
            failures += 1
        blocks = []
        for attempt in loaded.attempts:
            anns, summary = annotate_attempt(attempt)
            summaries.append(summary)
            if not summary.valid:
                print(f"{name}: task {attempt.task_id}: {summary.invalid_reason}", file=sys.stderr)
                failures += 1
            if annotations:
                blocks.append(write_annotations(attempt, anns, summary))
        if annotations:
            texts.append((path.stem, b"\n".join(blocks)))

    if annotations:
        payload = b"\n".join(t for _, t in texts)
        if out is None:
            sys.stdout.write(payload.decode("utf-8"))
        elif FsPath(out).is_dir():
            for stem, data in texts:
                (FsPath(out) / f"{stem}.txt").write_bytes(data)
        else:
            FsPath(out).write_bytes(payload)
    if stats_out is not None:
        FsPath(stats_out).write_bytes(export_tsv(aggregate_stats(summaries)))
    return 1 if failures else 0


def _gen(args) -> int:
    try:
        lo, _, hi = args.negations.partition("..")
        spec = TaskSpec(
            count=args.count,
            seed=args.seed,
            pool=tuple(dict.fromkeys(args.vars)),
            negations=(int(lo), int(hi or lo)),
        )
        tasks = generate_tasks(spec)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    doc = {
        "version": 1,
        "seed": args.seed,
        "tasks": [
            {"id": f"t{i + 1:03d}", "formula": print_formula(f)} for i, f in enumerate(tasks)
        ],
    }
    FsPath(args.output).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return 0


def _solve(args) -> int:
    f = parse(args.formula)
    task_vars = variables(f)
    trace = solve_reference(f, task_vars)
    if args.trace:
        print(f"start {print_formula(f)}  stage {stage_name(stage_of(f, task_vars))}")
        for step in trace:
            where = list(step.path.steps)
            print(f"rule {step.rule} {RULES[step.rule].name} at {where} -> {print_formula(step.result)}")
    final = trace[-1].result if trace else f
    print(print_formula(final))
    return 0


def _check(args) -> int:
    from .formulas import equivalent

    if equivalent(parse(args.formula_a), parse(args.formula_b)):
        print("equivalent")
        return 0
    print("not equivalent")
    return 1


def _serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    main()
