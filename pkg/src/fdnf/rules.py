"""The 29-rule rewrite menu: applicability, application, and identification
of the rule behind a before/after step.

Chain rules (De Morgan, distribution, sorting, duplicate/complement checks)
are generalized to n-ary And/Or chains; a run of chain members can be marked
and rewritten as if it were its own chain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .formulas import (
    And,
    Const,
    FALSE,
    Formula,
    FormulaError,
    Iff,
    Imp,
    InvalidPathError,
    Not,
    Or,
    Path,
    TRUE,
    Var,
    children,
    equivalent,
    make_and,
    make_or,
    normalize_path,
    replace_region,
    subformula_at,
    variables,
    walk_paths,
)


class NotApplicableError(FormulaError):
    code = "NotApplicable"


class BadParamsError(FormulaError):
    code = "BadParams"


class NotEquivalentError(FormulaError):
    code = "NotEquivalent"


Params = Union[None, int, tuple[str, ...]]


@dataclass(frozen=True)
class Rule:
    id: int
    name: str
    kind: str  # "simplification" | "stage" | "offpath"
    stage: int | None = None
    params: str = "none"  # "none" | "member" | "vars"


SIMPLIFICATION_IDS = frozenset({1, 2, 23, 24, 25, 26, 28})

_RULE_ROWS = [
    (1, "drop double negation", "simplification", None, "none"),
    (2, "drop duplicate members", "simplification", None, "none"),
    (3, "unfold implication", "stage", 1, "none"),
    (4, "implication as negated conjunction", "offpath", None, "none"),
    (5, "biconditional as two implications", "stage", 1, "none"),
    (6, "unfold biconditional", "stage", 1, "none"),
    (7, "unfold negated implication", "stage", 1, "none"),
    (8, "unfold negated biconditional", "stage", 1, "none"),
    (9, "move negation into conjunction", "stage", 2, "none"),
    (10, "move negation into disjunction", "stage", 2, "none"),
    (11, "move negations out of disjunction", "offpath", None, "none"),
    (12, "move negations out of conjunction", "offpath", None, "none"),
    (13, "distribute conjunction over disjunction", "stage", 3, "member"),
    (14, "distribute disjunction over conjunction", "offpath", None, "member"),
    (15, "factor out common conjunct", "offpath", None, "none"),
    (16, "factor out common disjunct", "offpath", None, "none"),
    (17, "sort conjunction members", "stage", 6, "none"),
    (18, "sort disjunction members", "offpath", None, "none"),
    (19, "expand conjunct with missing variables", "stage", 5, "vars"),
    (20, "contrapose implication", "offpath", None, "none"),
    (21, "swap biconditional sides", "offpath", None, "none"),
    (22, "drop absorbed conjunctions", "offpath", None, "none"),
    (23, "contradictory conjunction to 0", "simplification", None, "none"),
    (24, "tautological disjunction to 1", "simplification", None, "none"),
    (25, "annihilate with constant", "simplification", None, "none"),
    (26, "drop neutral constant", "simplification", None, "none"),
    (27, "drop absorbed disjunctions", "offpath", None, "none"),
    (28, "negate constant", "simplification", None, "none"),
    (29, "biconditional as conjunction of disjunctions", "offpath", None, "none"),
]

RULES: dict[int, Rule] = {row[0]: Rule(*row) for row in _RULE_ROWS}


def rules_table() -> list[dict]:
    """Machine-readable rule table for UIs and docs."""
    return [
        {"id": r.id, "name": r.name, "kind": r.kind, "stage": r.stage, "params": r.params}
        for r in RULES.values()
    ]


def member_key(m: Formula) -> str:
    """Alphabetical sort key of a chain member: its smallest variable,
    negation ignored; constants sort before variables."""
    names = variables(m)
    if names:
        return names[0]
    if isinstance(m, Const):
        return str(m.value)
    return ""


def chain_sorted(members: Sequence[Formula]) -> bool:
    keys = [member_key(m) for m in members]
    return all(a <= b for a, b in zip(keys, keys[1:]))


def has_complementary_pair(members: Sequence[Formula]) -> bool:
    pool = set(members)
    return any(Not(m) in pool for m in members)


def has_duplicates(members: Sequence[Formula]) -> bool:
    return len(set(members)) < len(members)


def _conjunct_parts(m: Formula) -> tuple[Formula, ...]:
    return m.members if isinstance(m, And) else (m,)


def _disjunct_parts(m: Formula) -> tuple[Formula, ...]:
    return m.members if isinstance(m, Or) else (m,)


def _need(cond: bool, reason: str) -> None:
    if not cond:
        raise NotApplicableError(reason)


def _as_var_set(params: Params) -> tuple[str, ...]:
    if params is None:
        raise BadParamsError("a set of variables is required")
    if isinstance(params, int):
        raise BadParamsError("expected a set of variables, not a member index")
    names = tuple(sorted(set(params)))
    if not names:
        raise BadParamsError("the variable set must not be empty")
    for n in names:
        if not (len(n) == 1 and "A" <= n <= "Z"):
            raise BadParamsError(f"bad variable name {n!r}")
    return names


def _member_index(sub: Formula, params: Params, want: type, what: str) -> int:
    assert isinstance(sub, (And, Or))
    if params is None:
        for i, m in enumerate(sub.members):
            if isinstance(m, want):
                return i
        raise NotApplicableError(f"no {what} member to distribute over")
    if not isinstance(params, int):
        raise BadParamsError("expected a member index")
    if not 0 <= params < len(sub.members):
        raise BadParamsError(f"member index {params} out of range")
    if not isinstance(sub.members[params], want):
        raise NotApplicableError(f"member {params} is not a {what}")
    return params


def _drop_absorbed(sub: Formula, parts) -> Formula:
    sets = [frozenset(parts(m)) for m in sub.members]
    keep = []
    for i, m in enumerate(sub.members):
        absorbed = any(j != i and sets[j] < sets[i] for j in range(len(sub.members)))
        if not absorbed:
            keep.append(m)
    _need(len(keep) < len(sub.members), "no member is absorbed by another")
    return make_and(keep) if isinstance(sub, And) else make_or(keep)


def _factor_common(sub: Formula, parts, chain, alt) -> Formula:
    part_lists = [parts(m) for m in sub.members]
    rest = [frozenset(p) for p in part_lists[1:]]
    common = [p for p in dict.fromkeys(part_lists[0]) if all(p in s for s in rest)]
    _need(bool(common), "members share no common part")
    remainders = []
    for pl in part_lists:
        rem = [p for p in pl if p not in common]
        _need(bool(rem), "a member has nothing left after factoring")
        remainders.append(chain(rem))
    return chain(common + [alt(remainders)])


def rewrite(rule_id: int, sub: Formula, params: Params = None) -> Formula:
    """Apply rule rule_id to the marked part itself; NotApplicableError if its
    pattern does not match, BadParamsError on bad parameters."""
    r = rule_id
    if r == 1:
        _need(isinstance(sub, Not) and isinstance(sub.child, Not), "needs a double negation")
        return sub.child.child
    if r == 2:
        _need(isinstance(sub, (And, Or)), "needs a chain")
        _need(has_duplicates(sub.members), "chain has no duplicate members")
        kept = list(dict.fromkeys(sub.members))
        return make_and(kept) if isinstance(sub, And) else make_or(kept)
    if r == 3:
        _need(isinstance(sub, Imp), "needs an implication")
        return make_or([Not(sub.lhs), sub.rhs])
    if r == 4:
        _need(isinstance(sub, Imp), "needs an implication")
        return Not(make_and([sub.lhs, Not(sub.rhs)]))
    if r == 5:
        _need(isinstance(sub, Iff), "needs a biconditional")
        return make_and([Imp(sub.lhs, sub.rhs), Imp(sub.rhs, sub.lhs)])
    if r == 6:
        _need(isinstance(sub, Iff), "needs a biconditional")
        return make_or([make_and([sub.lhs, sub.rhs]), make_and([Not(sub.lhs), Not(sub.rhs)])])
    if r == 7:
        _need(isinstance(sub, Not) and isinstance(sub.child, Imp), "needs a negated implication")
        inner = sub.child
        return make_and([inner.lhs, Not(inner.rhs)])
    if r == 8:
        _need(isinstance(sub, Not) and isinstance(sub.child, Iff), "needs a negated biconditional")
        inner = sub.child
        return make_or(
            [make_and([inner.lhs, Not(inner.rhs)]), make_and([Not(inner.lhs), inner.rhs])]
        )
    if r == 9:
        _need(isinstance(sub, Not) and isinstance(sub.child, And), "needs a negated conjunction")
        return make_or([Not(m) for m in sub.child.members])
    if r == 10:
        _need(isinstance(sub, Not) and isinstance(sub.child, Or), "needs a negated disjunction")
        return make_and([Not(m) for m in sub.child.members])
    if r == 11:
        _need(
            isinstance(sub, Or) and all(isinstance(m, Not) for m in sub.members),
            "needs a disjunction of negated members",
        )
        return Not(make_and([m.child for m in sub.members]))
    if r == 12:
        _need(
            isinstance(sub, And) and all(isinstance(m, Not) for m in sub.members),
            "needs a conjunction of negated members",
        )
        return Not(make_or([m.child for m in sub.members]))
    if r == 13:
        _need(isinstance(sub, And), "needs a conjunction")
        j = _member_index(sub, params, Or, "disjunction")
        pre, post = sub.members[:j], sub.members[j + 1 :]
        return make_or([make_and(list(pre) + [b] + list(post)) for b in sub.members[j].members])
    if r == 14:
        _need(isinstance(sub, Or), "needs a disjunction")
        j = _member_index(sub, params, And, "conjunction")
        pre, post = sub.members[:j], sub.members[j + 1 :]
        return make_and([make_or(list(pre) + [c] + list(post)) for c in sub.members[j].members])
    if r == 15:
        _need(isinstance(sub, Or), "needs a disjunction")
        return _factor_common(sub, _conjunct_parts, make_and, make_or)
    if r == 16:
        _need(isinstance(sub, And), "needs a conjunction")
        return _factor_common(sub, _disjunct_parts, make_or, make_and)
    if r == 17:
        _need(isinstance(sub, And), "needs a conjunction")
        return make_and(sorted(sub.members, key=member_key))
    if r == 18:
        _need(isinstance(sub, Or), "needs a disjunction")
        return make_or(sorted(sub.members, key=member_key))
    if r == 19:
        _need(
            isinstance(sub, And) or isinstance(sub, Var) or (isinstance(sub, Not) and isinstance(sub.child, Var)),
            "needs a conjunction or a literal",
        )
        names = _as_var_set(params)
        present = set(variables(sub))
        clash = [n for n in names if n in present]
        if clash:
            raise BadParamsError(f"variables already present: {clash}")
        base = list(sub.members) if isinstance(sub, And) else [sub]
        disjuncts = []
        for bits in itertools.product((0, 1), repeat=len(names)):
            lits = [Var(n) if b == 0 else Not(Var(n)) for n, b in zip(names, bits)]
            disjuncts.append(make_and(base + lits))
        return make_or(disjuncts)
    if r == 20:
        _need(isinstance(sub, Imp), "needs an implication")
        return Imp(Not(sub.rhs), Not(sub.lhs))
    if r == 21:
        _need(isinstance(sub, Iff), "needs a biconditional")
        return Iff(sub.rhs, sub.lhs)
    if r == 22:
        _need(isinstance(sub, Or), "needs a disjunction")
        return _drop_absorbed(sub, _conjunct_parts)
    if r == 23:
        _need(isinstance(sub, And), "needs a conjunction")
        _need(has_complementary_pair(sub.members), "no complementary pair")
        return FALSE
    if r == 24:
        _need(isinstance(sub, Or), "needs a disjunction")
        _need(has_complementary_pair(sub.members), "no complementary pair")
        return TRUE
    if r == 25:
        if isinstance(sub, And) and FALSE in sub.members:
            return FALSE
        if isinstance(sub, Or) and TRUE in sub.members:
            return TRUE
        raise NotApplicableError("needs a conjunction with 0 or a disjunction with 1")
    if r == 26:
        if isinstance(sub, (And, Or)):
            unit = TRUE if isinstance(sub, And) else FALSE
            kept = [m for m in sub.members if m != unit]
            if len(kept) < len(sub.members):
                if not kept:
                    return unit
                return make_and(kept) if isinstance(sub, And) else make_or(kept)
        raise NotApplicableError("no neutral constant member to drop")
    if r == 27:
        _need(isinstance(sub, And), "needs a conjunction")
        return _drop_absorbed(sub, _disjunct_parts)
    if r == 28:
        _need(isinstance(sub, Not) and isinstance(sub.child, Const), "needs a negated constant")
        return Const(1 - sub.child.value)
    if r == 29:
        _need(isinstance(sub, Iff), "needs a biconditional")
        return make_and(
            [make_or([sub.lhs, Not(sub.rhs)]), make_or([Not(sub.lhs), sub.rhs])]
        )
    raise BadParamsError(f"unknown rule {rule_id}")


def apply_rule_region(
    rule_id: int, f: Formula, p: Path, params: Params = None
) -> tuple[Formula, Path]:
    """Apply a menu rule at a marked position; returns the new formula and the
    region the rewritten part occupies in it."""
    if rule_id not in RULES:
        raise BadParamsError(f"unknown rule {rule_id}")
    sub = subformula_at(f, p)
    return replace_region(f, p, rewrite(rule_id, sub, params))


def apply_rule(rule_id: int, f: Formula, p: Path, params: Params = None) -> Formula:
    return apply_rule_region(rule_id, f, p, params)[0]


# ---------------------------------------------------------------------------
# Applicability enumeration


def applicability(rule_id: int, sub: Formula, task_vars: Sequence[str]) -> dict | None:
    """None when the rule cannot fire at sub, else a parameter template:
    {} for parameterless rules, {"member": [...]} for a choice of chain member,
    {"vars": [...]} for the pool rule 19 may draw from."""
    r = RULES[rule_id]
    if r.params == "member":
        if not isinstance(sub, (And, Or)):
            return None
        want = Or if rule_id == 13 else And
        idxs = [i for i, m in enumerate(sub.members) if isinstance(m, want)]
        return {"member": idxs} if idxs else None
    if r.params == "vars":
        ok_shape = isinstance(sub, (And, Var)) or (isinstance(sub, Not) and isinstance(sub.child, Var))
        if not ok_shape:
            return None
        missing = sorted(set(task_vars) - set(variables(sub)))
        return {"vars": missing} if missing else None
    try:
        rewrite(rule_id, sub, None)
    except FormulaError:
        return None
    return {}


def applicable_at(f: Formula, p: Path, task_vars: Sequence[str] | None = None) -> list[tuple[int, dict]]:
    """Rule ids (with parameter templates) applicable to the marked part."""
    if task_vars is None:
        task_vars = variables(f)
    sub = subformula_at(f, p)
    out = []
    for rid in sorted(RULES):
        t = applicability(rid, sub, task_vars)
        if t is not None:
            out.append((rid, t))
    return out


def enumerate_applicable(
    f: Formula, task_vars: Sequence[str] | None = None
) -> list[tuple[int, Path, dict]]:
    """Every (rule, whole-node path, params template) that apply_rule accepts,
    paths in preorder, rule ids ascending within a path."""
    if task_vars is None:
        task_vars = variables(f)
    out = []
    for steps, sub in walk_paths(f):
        for rid in sorted(RULES):
            t = applicability(rid, sub, task_vars)
            if t is not None:
                out.append((rid, Path(steps), t))
    return out


# ---------------------------------------------------------------------------
# Step identification


@dataclass(frozen=True)
class RuleStep:
    rule: int
    path: Path
    params: Params = None
    double_neg_cleanup: bool = False
    result: Path = field(default_factory=Path)


@dataclass(frozen=True)
class FreeInput:
    path: Path
    result: Path = field(default_factory=Path)


@dataclass(frozen=True)
class NoChange:
    path: Path = field(default_factory=Path)
    result: Path = field(default_factory=Path)


StepIdentification = Union[RuleStep, FreeInput, NoChange]


def _diff(b: Formula, a: Formula) -> tuple[tuple[int, ...], tuple[int, int] | None, tuple[int, int] | None]:
    """Deepest common path of the difference, with the minimal changed member
    runs inside a chain node (before run, after run)."""
    if type(b) is not type(a):
        return (), None, None
    if isinstance(b, (Var, Const)):
        return (), None, None
    if isinstance(b, Not):
        steps, bs, as_ = _diff(b.child, a.child)
        return (0,) + steps, bs, as_
    if isinstance(b, (Imp, Iff)):
        if b.lhs == a.lhs:
            steps, bs, as_ = _diff(b.rhs, a.rhs)
            return (1,) + steps, bs, as_
        if b.rhs == a.rhs:
            steps, bs, as_ = _diff(b.lhs, a.lhs)
            return (0,) + steps, bs, as_
        return (), None, None
    bm, am = b.members, a.members
    limit = min(len(bm), len(am))
    lp = 0
    while lp < limit and bm[lp] == am[lp]:
        lp += 1
    ls = 0
    while ls < limit - lp and bm[len(bm) - 1 - ls] == am[len(am) - 1 - ls]:
        ls += 1
    bl, al = len(bm) - lp - ls, len(am) - lp - ls
    if bl == 1 and al == 1:
        steps, bs, as_ = _diff(bm[lp], am[lp])
        return (lp,) + steps, bs, as_
    if bl < 1 or al < 1:
        return (), None, None
    if bl == len(bm) and al == len(am):
        return (), None, None
    return (), (lp, bl), (lp, al)


def _scrub_double_negs(f: Formula) -> Formula:
    if isinstance(f, (Var, Const)):
        return f
    if isinstance(f, Not):
        c = _scrub_double_negs(f.child)
        return c.child if isinstance(c, Not) else Not(c)
    if isinstance(f, And):
        return make_and([_scrub_double_negs(m) for m in f.members])
    if isinstance(f, Or):
        return make_or([_scrub_double_negs(m) for m in f.members])
    if isinstance(f, Imp):
        return Imp(_scrub_double_negs(f.lhs), _scrub_double_negs(f.rhs))
    return Iff(_scrub_double_negs(f.lhs), _scrub_double_negs(f.rhs))


def _param_candidates(rule_id: int, sub: Formula, after: Formula) -> Iterable[Params]:
    r = RULES[rule_id]
    if r.params == "none":
        return (None,)
    if r.params == "member":
        if not isinstance(sub, (And, Or)):
            return ()
        want = Or if rule_id == 13 else And
        return tuple(i for i, m in enumerate(sub.members) if isinstance(m, want))
    # rule 19: variable subsets drawn from what the result could have added
    pool = sorted(set(variables(after)) - set(variables(sub)))
    if not pool or len(pool) > 10:
        return (tuple(pool),) if pool else ()
    subsets: list[Params] = []
    for size in range(1, len(pool) + 1):
        subsets.extend(itertools.combinations(pool, size))
    return subsets


def identify_step(before: Formula, after: Formula) -> StepIdentification:
    """Work out which menu rule (if any) turns before into after.

    The minimal changed region is located by tree diff; every rule and
    parameter choice is replayed there and at each enclosing node, first
    exactly, then allowing double negations to be scrubbed from the rewritten
    part. Ties break toward the lowest rule id, then the shallowest position.
    Equivalent pairs no rule explains are free input; non-equivalent pairs
    raise NotEquivalentError.
    """
    if before == after:
        return NoChange()
    steps, bspan, aspan = _diff(before, after)
    cands: list[Path] = []
    if bspan is not None:
        cands.append(normalize_path(before, Path(steps, bspan)))
    cands.extend(Path(steps[:k]) for k in range(len(steps), -1, -1))

    for cleanup in (False, True):
        matches: list[tuple[tuple[int, int, int], RuleStep]] = []
        for cand in cands:
            sub = subformula_at(before, cand)
            for rid in sorted(RULES):
                for params in _param_candidates(rid, sub, after):
                    try:
                        new_part = rewrite(rid, sub, params)
                    except FormulaError:
                        continue
                    if cleanup:
                        scrubbed = _scrub_double_negs(new_part)
                        if scrubbed == new_part:
                            continue
                        new_part = scrubbed
                    try:
                        replayed, region = replace_region(before, cand, new_part)
                    except InvalidPathError:
                        continue
                    if replayed == after:
                        key = (rid,) + cand.depth_key()
                        matches.append((key, RuleStep(rid, cand, params, cleanup, region)))
        if matches:
            return min(matches, key=lambda m: m[0])[1]

    if not equivalent(before, after):
        raise NotEquivalentError(
            "the step changes the truth table; the solving environment would have rejected it"
        )
    changed = normalize_path(before, Path(steps, bspan))
    result = normalize_path(after, Path(steps, aspan))
    return FreeInput(changed, result)


def replay(before: Formula, ident: StepIdentification) -> Formula:
    """Re-apply an identified rule step; used by tests and invariants."""
    if not isinstance(ident, RuleStep):
        raise ValueError("only rule steps can be replayed")
    sub = subformula_at(before, ident.path)
    part = rewrite(ident.rule, sub, ident.params)
    if ident.double_neg_cleanup:
        part = _scrub_double_negs(part)
    return replace_region(before, ident.path, part)[0]
