"""Step relevance analysis against the six-stage full-DNF algorithm.

The algorithm: 1 eliminate implications and biconditionals, 2 move negations
inward, 3 distribute conjunctions over disjunctions, 4 drop contradictory
conjunctions and redundant literals, 5 add missing variables to conjunctions,
6 sort conjunctions alphabetically and drop duplicate disjuncts.

A step is accepted when its rule serves the formula's current stage or is a
simplification rule; anything else is logically correct but off the path and
gets one of nineteen diagnosis codes. Diagnoses never block a step.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import (
    And,
    Const,
    Formula,
    FormulaError,
    Iff,
    Imp,
    Not,
    Or,
    Path,
    Var,
    canonical_fdnf,
    children,
    highlighted,
    is_literal,
    node_at,
    parse,
    print_formula,
    subformula_at,
    variables,
    walk,
    walk_paths,
)
from .rules import (
    FreeInput,
    NoChange,
    NotEquivalentError,
    Params,
    RULES,
    RuleStep,
    SIMPLIFICATION_IDS,
    StepIdentification,
    apply_rule_region,
    chain_sorted,
    has_complementary_pair,
    has_duplicates,
    identify_step,
    rewrite,
)

DONE = 7


def stage_name(stage: int) -> str:
    return "Done" if stage == DONE else str(stage)


ERRORS: dict[str, str] = {
    "E1": "Biconditional elimination duplicates implications or biconditionals",
    "E2": "Implication or biconditional rewritten without eliminating it",
    "E3": "Connective under a negation eliminated instead of the negated formula",
    "E4": "Negation moved into brackets at stage 1",
    "E5": "Negation moved out of brackets",
    "E6": "Inner negation processed first",
    "E7": "Distributive law applied too early",
    "E8": "Distributive law applied in the CNF direction",
    "E9": "Members reordered too early",
    "E10": "Members of FALSE conjunction reordered",
    "E11": "Reordering together with redundant members",
    "E12": "Members of disjunction reordered (as for CNF)",
    "E13": "Variables added too early",
    "E14": "Only some of the missing variables added",
    "E15": "Variables added to a conjunction that needs simplifying",
    "E16": "Only a part of conjunction reordered",
    "E17": "Step does not serve the current stage of the algorithm",
    "E18": "Common member factored out (as for CNF)",
    "E19": "Step changed nothing",
}

CLUES: dict[int, str] = {
    1: "eliminate implications and biconditionals",
    2: "move the outermost negation inward",
    3: "distribute conjunctions over disjunctions",
    5: "add the missing variables to each conjunction",
    6: "sort each conjunction alphabetically and drop duplicate disjuncts",
}


def _not_over_compound(f: Formula) -> bool:
    return isinstance(f, Not) and not isinstance(f.child, (Var, Const))


def _dnf_shaped(f: Formula) -> bool:
    def plain(m: Formula) -> bool:
        return is_literal(m) or isinstance(m, Const)

    def conjunct(m: Formula) -> bool:
        return plain(m) or (isinstance(m, And) and all(plain(x) for x in m.members))

    return conjunct(f) or (isinstance(f, Or) and all(conjunct(m) for m in f.members))


def disjuncts(f: Formula) -> tuple[Formula, ...]:
    return f.members if isinstance(f, Or) else (f,)


def stage_of(f: Formula, task_vars: tuple[str, ...]) -> int:
    """Earliest unfinished algorithm stage of the whole formula; constants and
    finished full-DNF shapes are Done."""
    if isinstance(f, Const):
        return DONE
    nodes = list(walk(f))
    if any(isinstance(n, (Imp, Iff)) for n in nodes):
        return 1
    if any(_not_over_compound(n) for n in nodes):
        return 2
    if not _dnf_shaped(f):
        return 3
    if any(isinstance(n, Const) for n in nodes):
        return 4
    chains = [n.members for n in nodes if isinstance(n, And)]
    if any(has_duplicates(ms) or has_complementary_pair(ms) for ms in chains):
        return 4
    want = set(task_vars)
    if any(set(variables(d)) != want for d in disjuncts(f)):
        return 5
    if any(not chain_sorted(ms) for ms in chains):
        return 6
    if isinstance(f, Or) and has_duplicates(f.members):
        return 6
    return DONE


# ---------------------------------------------------------------------------
# Step verdicts


@dataclass(frozen=True)
class StepVerdict:
    stage_before: int
    identification: StepIdentification
    ok: bool
    error: str | None = None
    clue: str | None = None

    @property
    def message(self) -> str | None:
        return ERRORS[self.error] if self.error else None


def _accept(stage: int, ident: StepIdentification, rule_stage: int | None) -> StepVerdict:
    clue = CLUES.get(rule_stage) if rule_stage is not None else None
    return StepVerdict(stage, ident, True, None, clue)


def _refuse(stage: int, ident: StepIdentification, code: str) -> StepVerdict:
    return StepVerdict(stage, ident, False, code, None)


def check_step(before: Formula, after: Formula, task_vars: tuple[str, ...]) -> StepVerdict:
    """Classify one conversion step; exactly one diagnosis code when refused.

    The checks run in a fixed ladder. Structural diagnoses come first, then
    rule-identity diagnoses, then context: biconditional duplication, skipped
    outer negation, premature distribution/reordering/expansion, partial
    reordering and partial variable addition. A conjunction is expected to be
    simplified before variables are added to it, so that check precedes the
    too-early one.
    """
    ident = identify_step(before, after)
    s = stage_of(before, task_vars)

    if isinstance(ident, NoChange):
        return _refuse(s, ident, "E19")
    if isinstance(ident, FreeInput):
        return _refuse(s, ident, "E17")

    r = ident.rule
    if r in SIMPLIFICATION_IDS:
        return _accept(s, ident, None)
    if r in (11, 12):
        return _refuse(s, ident, "E5")
    if r == 14:
        return _refuse(s, ident, "E8")
    if r in (15, 16):
        return _refuse(s, ident, "E18")
    if r == 18:
        return _refuse(s, ident, "E12")
    if r in (4, 20, 21, 29):
        return _refuse(s, ident, "E2")

    marked = subformula_at(before, ident.path)
    if r in (5, 6):
        operands = children(marked)
        if any(isinstance(n, (Imp, Iff)) for op in operands for n in walk(op)):
            return _refuse(s, ident, "E1")
    if r in (3, 5, 6):
        steps = ident.path.steps
        if ident.path.span is None and steps:
            parent = node_at(before, steps[:-1])
            if isinstance(parent, Not):
                return _refuse(s, ident, "E3")
    if r in (9, 10):
        if s == 1:
            return _refuse(s, ident, "E4")
        for k in range(len(ident.path.steps)):
            if _not_over_compound(node_at(before, ident.path.steps[:k])):
                return _refuse(s, ident, "E6")
    if r == 13 and s < 3:
        return _refuse(s, ident, "E7")
    if r == 17:
        if has_complementary_pair(marked.members):
            return _refuse(s, ident, "E10")
        if has_duplicates(marked.members):
            return _refuse(s, ident, "E11")
        if s < 6:
            return _refuse(s, ident, "E9")
        whole = node_at(after, ident.path.steps)
        if ident.path.span is not None or (
            isinstance(whole, And) and not chain_sorted(whole.members)
        ):
            return _refuse(s, ident, "E16")
    if r == 19:
        if has_duplicates(_members(marked)) or has_complementary_pair(_members(marked)):
            return _refuse(s, ident, "E15")
        if s < 5:
            return _refuse(s, ident, "E13")
        missing = set(task_vars) - set(variables(marked))
        chosen = set(ident.params or ())
        if chosen < missing:
            return _refuse(s, ident, "E14")

    rule_stage = RULES[r].stage
    if rule_stage is not None and rule_stage == s:
        return _accept(s, ident, rule_stage)
    if r == 13:
        return _refuse(s, ident, "E7")
    if r == 17:
        return _refuse(s, ident, "E9")
    if r == 19:
        return _refuse(s, ident, "E13")
    return _refuse(s, ident, "E17")


def _members(f: Formula) -> tuple[Formula, ...]:
    return f.members if isinstance(f, (And, Or)) else (f,)


# ---------------------------------------------------------------------------
# Completion


def is_completed(initial: Formula, final: Formula, task_vars: tuple[str, ...]) -> bool:
    """The task is done when the final formula is in perfect full-DNF shape and
    its disjuncts are exactly the truth-table minterms of the initial one."""
    if stage_of(final, task_vars) != DONE:
        return False
    canon = canonical_fdnf(initial, task_vars)
    return set(disjuncts(final)) == set(disjuncts(canon))


# ---------------------------------------------------------------------------
# Attempt annotation


@dataclass(frozen=True)
class Annotation:
    index: int
    kind: str  # "apply" | "undo"
    verdict: StepVerdict | None = None
    before: str | None = None  # highlighted printed form
    after: str | None = None


@dataclass(frozen=True)
class AttemptSummary:
    task_id: str
    student: str | None
    completed: bool
    steps: int
    undos: int
    errors: int
    counts: dict[str, int]
    stage_reached: int
    valid: bool = True
    invalid_reason: str | None = None


def annotate_attempt(attempt) -> tuple[list[Annotation], AttemptSummary]:
    """Replay a recorded attempt, annotating every apply step with its verdict
    and counting undo steps separately.

    A non-equivalent pair means the solution file was not produced by the
    solving environment; analysis stops there and the summary is flagged.
    """
    initial = parse(attempt.initial)
    task_vars = variables(initial)
    stack: list[Formula] = []
    current = initial
    annotations: list[Annotation] = []
    counts: dict[str, int] = {}
    steps = undos = 0
    valid, invalid_reason = True, None

    for n, record in enumerate(attempt.steps, start=1):
        if record.op == "undo":
            if not stack:
                valid, invalid_reason = False, f"step {n}: nothing to undo"
                break
            stack.pop()
            current = stack[-1] if stack else initial
            undos += 1
            annotations.append(Annotation(n, "undo"))
            continue
        after = parse(record.formula)
        steps += 1
        try:
            verdict = check_step(current, after, task_vars)
        except NotEquivalentError:
            valid, invalid_reason = False, f"step {n}: formulas not equivalent"
            break
        ident = verdict.identification
        annotations.append(
            Annotation(
                n,
                "apply",
                verdict,
                highlighted(current, ident.path),
                highlighted(after, ident.result),
            )
        )
        if not verdict.ok:
            counts[verdict.error] = counts.get(verdict.error, 0) + 1
        stack.append(after)
        current = after

    summary = AttemptSummary(
        task_id=attempt.task_id,
        student=attempt.student,
        completed=valid and is_completed(initial, current, task_vars),
        steps=steps,
        undos=undos,
        errors=sum(counts.values()),
        counts=counts,
        stage_reached=stage_of(current, task_vars),
        valid=valid,
        invalid_reason=invalid_reason,
    )
    return annotations, summary


# ---------------------------------------------------------------------------
# Reference solver


@dataclass(frozen=True)
class SolveStep:
    rule: int
    path: Path
    params: Params
    result: Formula


def solve_reference(initial: Formula, task_vars: tuple[str, ...] | None = None) -> list[SolveStep]:
    """Drive a formula to full DNF by the algorithm stages, never triggering a
    diagnosis: innermost biconditionals first, outermost negations first,
    whole-chain sorts, full missing-variable sets."""
    if task_vars is None:
        task_vars = variables(initial)
    current = initial
    trace: list[SolveStep] = []
    while True:
        s = stage_of(current, task_vars)
        if s == DONE:
            return trace
        action = _stage_action(current, task_vars, s) or _first_simplification(current)
        if action is None:
            raise RuntimeError(f"solver is stuck at stage {s} on {print_formula(current)}")
        rid, path, params = action
        current, _ = apply_rule_region(rid, current, path, params)
        trace.append(SolveStep(rid, path, params, current))
        if len(trace) > 500:
            raise RuntimeError("solver exceeded the step bound")


def _stage_action(f: Formula, task_vars, s: int):
    if s == 1:
        for steps, node in walk_paths(f):
            if isinstance(node, Not) and isinstance(node.child, (Imp, Iff)):
                target, rid = node.child, 7 if isinstance(node.child, Imp) else 8
            elif isinstance(node, (Imp, Iff)):
                if steps and isinstance(node_at(f, steps[:-1]), Not):
                    continue  # handled at the enclosing negation
                target, rid = node, 3 if isinstance(node, Imp) else 6
            else:
                continue
            operands = (target.lhs, target.rhs)
            if any(isinstance(n, (Imp, Iff)) for op in operands for n in walk(op)):
                continue  # eliminate inner connectives first
            return rid, Path(steps), None
        return None
    if s == 2:
        hot = [steps for steps, node in walk_paths(f) if _not_over_compound(node)]
        outer = {tuple(h) for h in hot}
        for steps in hot:
            if any(steps[:k] in outer for k in range(len(steps))):
                continue  # an enclosing negation comes first
            node = node_at(f, steps)
            if isinstance(node.child, Not):
                return 1, Path(steps), None
            return (9 if isinstance(node.child, And) else 10), Path(steps), None
        return None
    if s == 3:
        # innermost first: distributing an And that still holds another
        # distributable And inside would duplicate that inner work
        spots = [
            steps
            for steps, node in walk_paths(f)
            if isinstance(node, And) and any(isinstance(m, Or) for m in node.members)
        ]
        spot_set = set(spots)
        for steps in spots:
            if any(q != steps and q[: len(steps)] == steps for q in spot_set):
                continue
            node = node_at(f, steps)
            for i, m in enumerate(node.members):
                if isinstance(m, Or):
                    return 13, Path(steps), i
        return None
    if s == 5:
        for i, d in enumerate(disjuncts(f)):
            missing = sorted(set(task_vars) - set(variables(d)))
            if missing:
                path = Path((i,)) if isinstance(f, Or) else Path()
                return 19, path, tuple(missing)
        return None
    if s == 6:
        for i, d in enumerate(disjuncts(f)):
            if isinstance(d, And) and not chain_sorted(d.members):
                return 17, Path((i,)) if isinstance(f, Or) else Path(), None
        if isinstance(f, Or) and has_duplicates(f.members):
            return 2, Path(), None
        return None
    return None  # stage 4 falls through to the simplification scan


def _first_simplification(f: Formula):
    for rid in sorted(SIMPLIFICATION_IDS):
        for steps, node in walk_paths(f):
            try:
                rewrite(rid, node, None)
            except FormulaError:
                continue
            return rid, Path(steps), None
    return None
