"""Solution files, annotation text output, and group statistics.

A solution file is a JSON document: {"version": 1, "attempts": [...]} where
each attempt carries task_id, optional student, the initial formula text and
an ordered step list of {"op": "apply", "formula": ...} / {"op": "undo"}
records. Undone steps stay in the history; the replay treats apply as push
and undo as pop. Unknown fields are ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .analyzer import Annotation, AttemptSummary, stage_name
from .formulas import FormulaError, ParseError, parse, print_formula
from .rules import RULES, FreeInput, NoChange

ERROR_CODES = tuple(f"E{i}" for i in range(1, 20))


class FormatError(FormulaError):
    code = "FormatError"

    def __init__(self, reason: str, position: int | None = None):
        at = f" at byte {position}" if position is not None else ""
        super().__init__(f"bad solution file{at}: {reason}")
        self.position = position
        self.reason = reason


@dataclass(frozen=True)
class StepRecord:
    op: str  # "apply" | "undo"
    formula: str | None = None
    t: float | None = None


@dataclass(frozen=True)
class Attempt:
    task_id: str
    initial: str
    steps: tuple[StepRecord, ...] = ()
    student: str | None = None
    goal: str = "FDNF"


@dataclass
class LoadedSolutions:
    attempts: list[Attempt] = field(default_factory=list)
    rejected: list[tuple[int, str]] = field(default_factory=list)


def load_solutions(data: bytes) -> LoadedSolutions:
    """Parse and validate a solution file. Structural problems raise
    FormatError; attempts that fail validation are collected in .rejected
    while the valid ones are still returned."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as e:
        raise FormatError("not valid UTF-8", e.start) from None
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, e.pos) from None
    if not isinstance(doc, dict):
        raise FormatError("top level must be an object")
    if doc.get("version") != 1:
        raise FormatError(f"unsupported version {doc.get('version')!r}")
    raw = doc.get("attempts")
    if not isinstance(raw, list):
        raise FormatError("missing attempts array")

    out = LoadedSolutions()
    for idx, entry in enumerate(raw):
        try:
            out.attempts.append(_read_attempt(entry))
        except FormatError as e:
            out.rejected.append((idx, e.reason))
    return out


def _read_attempt(entry) -> Attempt:
    if not isinstance(entry, dict):
        raise FormatError("attempt must be an object")
    task_id = entry.get("task_id")
    if not isinstance(task_id, str) or not task_id:
        raise FormatError("attempt needs a task_id")
    student = entry.get("student")
    if student is not None and not isinstance(student, str):
        raise FormatError("student must be a string")
    initial = entry.get("initial")
    if not isinstance(initial, str):
        raise FormatError("attempt needs an initial formula")
    try:
        parse(initial)
    except ParseError as e:
        raise FormatError(f"initial formula does not parse: {e}") from None

    steps = []
    pending = 0
    for n, step in enumerate(entry.get("steps", ()), start=1):
        if not isinstance(step, dict) or step.get("op") not in ("apply", "undo"):
            raise FormatError(f"step {n}: op must be apply or undo")
        t = step.get("t")
        if t is not None and not isinstance(t, (int, float)):
            raise FormatError(f"step {n}: bad timestamp")
        if step["op"] == "undo":
            if pending == 0:
                raise FormatError(f"step {n}: undo with no step to revoke")
            pending -= 1
            steps.append(StepRecord("undo", t=t))
            continue
        text = step.get("formula")
        if not isinstance(text, str):
            raise FormatError(f"step {n}: apply needs a formula")
        try:
            parse(text)
        except ParseError as e:
            raise FormatError(f"step {n}: formula does not parse: {e}") from None
        pending += 1
        steps.append(StepRecord("apply", formula=text, t=t))
    return Attempt(task_id=task_id, initial=initial, steps=tuple(steps), student=student)


def dump_solutions(attempts: list[Attempt]) -> bytes:
    doc = {
        "version": 1,
        "attempts": [
            {
                "task_id": a.task_id,
                **({"student": a.student} if a.student is not None else {}),
                "initial": a.initial,
                "steps": [
                    {
                        "op": s.op,
                        **({"formula": s.formula} if s.op == "apply" else {}),
                        **({"t": s.t} if s.t is not None else {}),
                    }
                    for s in a.steps
                ],
            }
            for a in attempts
        ],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Annotation text format
#
# One block per step:
#   step <n>  stage <s>  <clue, accepted stage-rule steps only>
#   rule <id> <name>: OK   |   rule <id> <name>   |   free input   |   no change
#   ERROR E<k>: <message>        (refused steps only)
#   <before, changed part in [[ ]]>
#   <after, resulting part in [[ ]]>
# Undo blocks are the single line `step <n>  UNDO`. Blocks are separated by
# one blank line; the file ends with a summary line (plus a counts line when
# there were errors).


def write_annotations(attempt: Attempt, annotations: list[Annotation], summary: AttemptSummary) -> bytes:
    lines: list[str] = [f"task {attempt.task_id}"]
    if attempt.student is not None:
        lines.append(f"student {attempt.student}")
    lines.append(f"initial {print_formula(parse(attempt.initial))}")
    lines.append(f"goal {attempt.goal}")

    for ann in annotations:
        lines.append("")
        if ann.kind == "undo":
            lines.append(f"step {ann.index}  UNDO")
            continue
        v = ann.verdict
        head = f"step {ann.index}  stage {stage_name(v.stage_before)}"
        if v.clue:
            head += f"  {v.clue}"
        lines.append(head)
        ident = v.identification
        if isinstance(ident, NoChange):
            lines.append("no change")
        elif isinstance(ident, FreeInput):
            lines.append("free input")
        else:
            name = RULES[ident.rule].name
            lines.append(f"rule {ident.rule} {name}: OK" if v.ok else f"rule {ident.rule} {name}")
        if not v.ok:
            lines.append(f"ERROR {v.error}: {v.message}")
        lines.append(ann.before)
        lines.append(ann.after)

    lines.append("")
    if not summary.valid:
        lines.append(f"invalid {summary.invalid_reason}")
    lines.append(
        f"summary steps {summary.steps}  undos {summary.undos}  errors {summary.errors}"
        f"  stage {stage_name(summary.stage_reached)}  completed {'yes' if summary.completed else 'no'}"
    )
    if summary.errors:
        parts = " ".join(f"{c}={summary.counts[c]}" for c in ERROR_CODES if summary.counts.get(c))
        lines.append(f"counts {parts}")
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Group statistics


@dataclass(frozen=True)
class StatsRow:
    task_id: str
    completed: bool
    steps: int
    undos: int
    errors: int
    counts: tuple[int, ...]  # e1..e19
    stage_reached: int


@dataclass(frozen=True)
class StatsTable:
    rows: tuple[StatsRow, ...]
    total_completed: int
    total_steps: int
    total_undos: int
    total_errors: int
    total_counts: tuple[int, ...]
    avg_steps_completed: float | None


def aggregate_stats(summaries: list[AttemptSummary]) -> StatsTable:
    """One row per attempt in input order, plus totals and the mean step count
    over completed attempts (absent when nothing was completed)."""
    rows = []
    for s in summaries:
        counts = tuple(s.counts.get(c, 0) for c in ERROR_CODES)
        rows.append(
            StatsRow(s.task_id, s.completed, s.steps, s.undos, s.errors, counts, s.stage_reached)
        )
    completed_steps = [r.steps for r in rows if r.completed]
    avg = sum(completed_steps) / len(completed_steps) if completed_steps else None
    return StatsTable(
        rows=tuple(rows),
        total_completed=sum(r.completed for r in rows),
        total_steps=sum(r.steps for r in rows),
        total_undos=sum(r.undos for r in rows),
        total_errors=sum(r.errors for r in rows),
        total_counts=tuple(sum(r.counts[i] for r in rows) for i in range(len(ERROR_CODES))),
        avg_steps_completed=avg,
    )


TSV_HEADER = ("task", "completed", "steps", "undos", "errors") + ERROR_CODES + ("stage",)


def export_tsv(table: StatsTable) -> bytes:
    """Tab-separated export with a fixed 25-column layout, spreadsheet-ready:
    data rows, a TOTAL row, and an average-steps row over completed attempts."""
    out = ["\t".join(TSV_HEADER)]
    for r in table.rows:
        cells = [r.task_id, str(int(r.completed)), str(r.steps), str(r.undos), str(r.errors)]
        cells += [str(c) for c in r.counts]
        cells.append(stage_name(r.stage_reached))
        out.append("\t".join(cells))
    total = ["TOTAL", str(table.total_completed), str(table.total_steps), str(table.total_undos), str(table.total_errors)]
    total += [str(c) for c in table.total_counts]
    total.append("")
    out.append("\t".join(total))
    if table.avg_steps_completed is not None:
        avg = ["AVG_STEPS_COMPLETED", "", f"{table.avg_steps_completed:.1f}", "", ""]
        avg += [""] * len(ERROR_CODES) + [""]
        out.append("\t".join(avg))
    return ("\n".join(out) + "\n").encode("utf-8")
