"""Stateful HTTP API for interactive solving.

A session fixes a task and a mode. Every conversion is two substeps: mark a
subformula, then either pick a menu rule (RULE mode) or type a replacement
(INPUT mode). Correctness failures (bad syntax, inapplicable rule, lost
equivalence) are rejected and leave no trace; relevance problems are recorded
in the history and only annotated. Sessions live in memory and expire after
two hours idle; persistence is the exported solution file.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .analyzer import StepVerdict, check_step, is_completed, stage_name, stage_of
from .formulas import (
    Formula,
    FormulaError,
    Path,
    equivalent,
    highlighted,
    layout,
    parse,
    print_formula,
    replace_at,
    subformula_at,
    variables,
)
from .rules import RULES, FreeInput, NoChange, applicable_at, apply_rule, rules_table
from .solutions import Attempt, StepRecord, dump_solutions
from .tasks import TaskSpec, generate_tasks

SESSION_VARIABLE_LIMIT = 8
SESSION_IDLE_SECONDS = 2 * 60 * 60


class SessionError(FormulaError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class Session:
    id: str
    task_id: str
    student: str | None
    mode: str  # "RULE" | "INPUT"
    feedback: bool
    initial: Formula
    task_vars: tuple[str, ...]
    current: Formula = None  # type: ignore[assignment]
    mark: Path | None = None
    records: list[StepRecord] = field(default_factory=list)
    verdicts: list[StepVerdict | None] = field(default_factory=list)
    stack: list[Formula] = field(default_factory=list)
    last_used: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def __post_init__(self):
        if self.current is None:
            self.current = self.initial

    @property
    def phase(self) -> str:
        if is_completed(self.initial, self.current, self.task_vars):
            return "Finished"
        return "Replacing" if self.mark is not None else "Marking"

    def require_open(self) -> None:
        if self.phase == "Finished":
            raise SessionError("Finished", "the task is already completed")

    def push(self, after: Formula, verdict: StepVerdict | None) -> None:
        self.records.append(StepRecord("apply", formula=print_formula(after)))
        self.verdicts.append(verdict)
        self.stack.append(after)
        self.current = after
        self.mark = None

    def undo(self) -> None:
        if not self.stack:
            raise SessionError("NothingToUndo", "no step to take back")
        self.records.append(StepRecord("undo"))
        self.verdicts.append(None)
        self.stack.pop()
        self.current = self.stack[-1] if self.stack else self.initial
        self.mark = None

    def attempt(self) -> Attempt:
        return Attempt(
            task_id=self.task_id,
            initial=print_formula(self.initial),
            steps=tuple(self.records),
            student=self.student,
        )


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def add(self, session: Session) -> None:
        with self._lock:
            self._prune()
            self._sessions[session.id] = session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._prune()
            s = self._sessions.get(session_id)
        if s is None:
            raise KeyError(session_id)
        s.last_used = time.time()
        return s

    def _prune(self) -> None:
        cutoff = time.time() - SESSION_IDLE_SECONDS
        for sid in [sid for sid, s in self._sessions.items() if s.last_used < cutoff]:
            del self._sessions[sid]


def _verdict_json(v: StepVerdict, before: Formula, after: Formula) -> dict:
    ident = v.identification
    rule_id = ident.rule if hasattr(ident, "rule") else None
    return {
        "ok": v.ok,
        "stage": stage_name(v.stage_before),
        "error": v.error,
        "message": v.message,
        "clue": v.clue,
        "rule": rule_id,
        "rule_name": RULES[rule_id].name if rule_id else None,
        "free_input": isinstance(ident, FreeInput),
        "no_change": isinstance(ident, NoChange),
        "double_neg_cleanup": getattr(ident, "double_neg_cleanup", False),
        "before": highlighted(before, ident.path),
        "after": highlighted(after, ident.result),
    }


def _state_json(s: Session) -> dict:
    steps = []
    for rec, verdict in zip(s.records, s.verdicts):
        entry: dict = {"op": rec.op}
        if rec.op == "apply":
            entry["formula"] = rec.formula
            entry["verdict"] = verdict if verdict is None else _verdict_public(verdict)
        steps.append(entry)
    return {
        "id": s.id,
        "task_id": s.task_id,
        "mode": s.mode,
        "feedback": s.feedback,
        "phase": s.phase,
        "formula": print_formula(s.current),
        "layout": layout(s.current).to_json(),
        "stage": stage_name(stage_of(s.current, s.task_vars)),
        "task_vars": list(s.task_vars),
        "marked": s.mark.to_json() if s.mark is not None else None,
        "steps": steps,
        "completed": s.phase == "Finished",
    }


def _verdict_public(v: StepVerdict) -> dict:
    return {
        "ok": v.ok,
        "stage": stage_name(v.stage_before),
        "error": v.error,
        "message": v.message,
        "clue": v.clue,
    }


def create_app(static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="fdnf solving service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore()

    @app.exception_handler(FormulaError)
    async def _formula_error(request: Request, exc: FormulaError):
        return JSONResponse(status_code=400, content={"error": str(exc), "code": exc.code})

    @app.exception_handler(KeyError)
    async def _unknown_session(request: Request, exc: KeyError):
        return JSONResponse(status_code=404, content={"error": "unknown session", "code": "NotFound"})

    @app.get("/rules")
    def get_rules():
        return {"rules": rules_table()}

    @app.post("/sessions")
    def create_session(body: dict):
        mode = body.get("mode", "RULE")
        if mode not in ("RULE", "INPUT"):
            raise SessionError("WrongMode", f"unknown mode {mode!r}")
        if "formula" in body:
            initial = parse(body["formula"])
        elif "generate" in body:
            g = body.get("generate") or {}
            kwargs: dict = {"count": 1, "seed": int(g.get("seed", 0))}
            if "vars" in g:
                kwargs["pool"] = tuple(dict.fromkeys(g["vars"]))
            if "negations" in g:
                kwargs["negations"] = tuple(g["negations"])
            initial = generate_tasks(TaskSpec(**kwargs))[0]
        else:
            raise SessionError("BadRequest", "provide a formula or a generate spec")
        task_vars = variables(initial)
        if len(task_vars) > SESSION_VARIABLE_LIMIT:
            raise SessionError(
                "TooManyVariables",
                f"{len(task_vars)} variables exceed the session limit of {SESSION_VARIABLE_LIMIT}",
            )
        session = Session(
            id=uuid.uuid4().hex[:12],
            task_id=body.get("task_id") or f"task-{uuid.uuid4().hex[:6]}",
            student=body.get("student"),
            mode=mode,
            feedback=bool(body.get("feedback", True)),
            initial=initial,
            task_vars=task_vars,
        )
        store.add(session)
        return _state_json(session)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return _state_json(store.get(sid))

    @app.post("/sessions/{sid}/mark")
    def mark(sid: str, body: dict):
        s = store.get(sid)
        with s.lock:
            s.require_open()
            p = Path.from_json(body)
            subformula_at(s.current, p)  # not a subformula -> InvalidPath
            s.mark = p
            rules = applicable_at(s.current, p, s.task_vars)
            return {
                "state": _state_json(s),
                "applicable": [
                    {"rule": rid, "name": RULES[rid].name, "params": tpl} for rid, tpl in rules
                ],
            }

    @app.post("/sessions/{sid}/apply")
    def apply_step(sid: str, body: dict):
        s = store.get(sid)
        with s.lock:
            s.require_open()
            if s.mode != "RULE":
                raise SessionError("WrongMode", "menu rules are not available in INPUT mode")
            if s.mark is None:
                raise SessionError("NoMark", "mark a subformula first")
            params = _params_from_json(body.get("params"))
            after = apply_rule(int(body["rule"]), s.current, s.mark, params)
            return _commit(s, after)

    @app.post("/sessions/{sid}/input")
    def input_step(sid: str, body: dict):
        s = store.get(sid)
        with s.lock:
            s.require_open()
            if s.mode != "INPUT":
                raise SessionError("WrongMode", "typed replacements are only for INPUT mode")
            if s.mark is None:
                raise SessionError("NoMark", "mark a subformula first")
            replacement = parse(body.get("formula", ""))
            after = replace_at(s.current, s.mark, replacement)
            if not equivalent(s.current, after):
                raise SessionError("NotEquivalent", "the replacement changes the truth table")
            return _commit(s, after)

    @app.post("/sessions/{sid}/undo")
    def undo(sid: str):
        s = store.get(sid)
        with s.lock:
            s.undo()
            return {"state": _state_json(s), "verdict": None}

    @app.get("/sessions/{sid}/export")
    def export(sid: str):
        s = store.get(sid)
        with s.lock:
            data = dump_solutions([s.attempt()])
        return Response(
            content=data,
            media_type="application/json",
            headers={"Content-Disposition": f'attachment; filename="{s.task_id}.json"'},
        )

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def _commit(s: Session, after: Formula) -> dict:
    verdict = check_step(s.current, after, s.task_vars) if s.feedback else None
    before = s.current
    s.push(after, verdict)
    return {
        "state": _state_json(s),
        "verdict": None if verdict is None else _verdict_json(verdict, before, after),
    }


def _params_from_json(raw) -> int | tuple[str, ...] | None:
    if raw is None:
        return None
    if isinstance(raw, dict):
        if "member" in raw:
            return int(raw["member"])
        if "vars" in raw:
            return tuple(str(v) for v in raw["vars"])
        return None
    if isinstance(raw, int):
        return raw
    return tuple(str(v) for v in raw)


app = create_app()
