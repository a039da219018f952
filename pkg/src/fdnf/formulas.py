"""Propositional formula ASTs: parsing, printing, positions and truth tables.

Connectives, tightest first: ``!`` (not), ``&`` (and), ``|`` (or), ``=>``
(implication, right associative), ``<=>`` (biconditional, right associative).
Variables are single uppercase letters; ``0`` and ``1`` are the constants.
And/Or nodes are flattened n-ary chains and never nest a node of their own
kind directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence, Union


class FormulaError(Exception):
    """Base class for errors raised by this package."""

    code = "Error"


class ParseError(FormulaError):
    code = "SyntaxError"

    def __init__(self, offset: int, expected: str):
        super().__init__(f"syntax error at offset {offset}: expected {expected}")
        self.offset = offset
        self.expected = expected


class InvalidPathError(FormulaError):
    code = "InvalidPath"


class MissingVariableError(FormulaError):
    code = "MissingVariable"


class TooManyVariablesError(FormulaError):
    code = "TooManyVariables"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    members: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    members: tuple["Formula", ...]


@dataclass(frozen=True)
class Imp:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"


Formula = Union[Var, Const, Not, And, Or, Imp, Iff]

TRUE = Const(1)
FALSE = Const(0)


def make_and(members: Sequence[Formula]) -> Formula:
    """Build a conjunction, splicing in nested And chains and collapsing singletons."""
    flat: list[Formula] = []
    for m in members:
        if isinstance(m, And):
            flat.extend(m.members)
        else:
            flat.append(m)
    if not flat:
        raise ValueError("empty conjunction")
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def make_or(members: Sequence[Formula]) -> Formula:
    """Build a disjunction, splicing in nested Or chains and collapsing singletons."""
    flat: list[Formula] = []
    for m in members:
        if isinstance(m, Or):
            flat.extend(m.members)
        else:
            flat.append(m)
    if not flat:
        raise ValueError("empty disjunction")
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Var, Const)):
        return ()
    if isinstance(f, Not):
        return (f.child,)
    if isinstance(f, (And, Or)):
        return f.members
    return (f.lhs, f.rhs)


def is_literal(f: Formula) -> bool:
    return isinstance(f, Var) or (isinstance(f, Not) and isinstance(f.child, Var))


def walk(f: Formula) -> Iterator[Formula]:
    """All nodes of f in preorder."""
    yield f
    for c in children(f):
        yield from walk(c)


def walk_paths(f: Formula) -> Iterator[tuple[tuple[int, ...], Formula]]:
    """All (path, node) pairs in preorder."""
    stack = [((), f)]
    while stack:
        steps, node = stack.pop(0)
        yield steps, node
        stack[0:0] = [(steps + (i,), c) for i, c in enumerate(children(node))]


# ---------------------------------------------------------------------------
# Positions


@dataclass(frozen=True)
class Path:
    """Address of a subformula: child indices, plus an optional contiguous run
    (start, length) of members inside the addressed n-ary node.

    A run covering the whole chain is equivalent to no run at all; a run of
    length one addresses the single member.
    """

    steps: tuple[int, ...] = ()
    span: tuple[int, int] | None = None

    def ancestors(self) -> Iterator["Path"]:
        """Whole-node paths from this node up to the root."""
        for k in range(len(self.steps), -1, -1):
            yield Path(self.steps[:k])

    def depth_key(self) -> tuple[int, int]:
        return (len(self.steps), 0 if self.span is None else 1)

    def to_json(self) -> dict:
        d: dict = {"path": list(self.steps)}
        if self.span is not None:
            d["slice"] = list(self.span)
        return d

    @staticmethod
    def from_json(d: Mapping) -> "Path":
        steps = tuple(int(i) for i in d.get("path", ()))
        span = d.get("slice")
        return Path(steps, None if span is None else (int(span[0]), int(span[1])))


def node_at(f: Formula, steps: Sequence[int]) -> Formula:
    node = f
    for i in steps:
        cs = children(node)
        if not 0 <= i < len(cs):
            raise InvalidPathError(f"index {i} out of range at {print_formula(node)}")
        node = cs[i]
    return node


def _check_span(node: Formula, span: tuple[int, int]) -> tuple[int, int]:
    if not isinstance(node, (And, Or)):
        raise InvalidPathError("slice applies only to a conjunction or disjunction chain")
    start, length = span
    if length < 1 or start < 0 or start + length > len(node.members):
        raise InvalidPathError(f"slice {span} out of range")
    return start, length


def normalize_path(f: Formula, p: Path) -> Path:
    """Canonical form: full-width runs dropped, single-member runs become a step."""
    if p.span is None:
        node_at(f, p.steps)
        return p
    node = node_at(f, p.steps)
    start, length = _check_span(node, p.span)
    if length == len(node.members):
        return Path(p.steps)
    if length == 1:
        return Path(p.steps + (start,))
    return Path(p.steps, (start, length))


def subformula_at(f: Formula, p: Path) -> Formula:
    """The subformula addressed by p; a run of an n-ary node yields a chain
    over the selected members (or the single member for a run of length one)."""
    node = node_at(f, p.steps)
    if p.span is None:
        return node
    start, length = _check_span(node, p.span)
    run = node.members[start : start + length]
    if length == 1:
        return run[0]
    if length == len(node.members):
        return node
    return type(node)(run)


def replace_region(f: Formula, p: Path, g: Formula) -> tuple[Formula, Path]:
    """Replace the part addressed by p with g, re-flattening chain nodes.

    Returns the new formula and the region the replacement occupies in it,
    accounting for members spliced into a like-kind parent chain.
    """
    new, steps, span = _replace(f, tuple(p.steps), p.span, g)
    return new, normalize_path(new, Path(steps, span))


def replace_at(f: Formula, p: Path, g: Formula) -> Formula:
    return replace_region(f, p, g)[0]


def _replace(
    node: Formula, steps: tuple[int, ...], span: tuple[int, int] | None, g: Formula
) -> tuple[Formula, tuple[int, ...], tuple[int, int] | None]:
    if not steps:
        if span is None:
            return g, (), None
        start, length = _check_span(node, span)
        if length == len(node.members):
            return g, (), None
        repl = list(g.members) if type(g) is type(node) else [g]
        members = list(node.members[:start]) + repl + list(node.members[start + length :])
        if len(members) == 1:
            return members[0], (), None
        rebuilt = type(node)(tuple(members))
        if len(repl) == len(members):
            return rebuilt, (), None
        if len(repl) == 1:
            return rebuilt, (start,), None
        return rebuilt, (), (start, len(repl))

    i = steps[0]
    cs = children(node)
    if not 0 <= i < len(cs):
        raise InvalidPathError(f"index {i} out of range")
    new_child, sub_steps, sub_span = _replace(cs[i], steps[1:], span, g)

    if isinstance(node, (And, Or)) and type(new_child) is type(node):
        # the child's members splice into this chain at position i
        members = node.members[:i] + new_child.members + node.members[i + 1 :]
        rebuilt = type(node)(members)
        k = len(new_child.members)
        if sub_steps:
            return rebuilt, (i + sub_steps[0],) + sub_steps[1:], sub_span
        if sub_span is not None:
            return rebuilt, (), (i + sub_span[0], sub_span[1])
        if k == len(members):
            return rebuilt, (), None
        return rebuilt, (), (i, k)

    if isinstance(node, (And, Or)):
        rebuilt = type(node)(node.members[:i] + (new_child,) + node.members[i + 1 :])
    elif isinstance(node, Not):
        rebuilt = Not(new_child)
    elif isinstance(node, Imp):
        rebuilt = Imp(new_child, node.rhs) if i == 0 else Imp(node.lhs, new_child)
    else:
        rebuilt = Iff(new_child, node.rhs) if i == 0 else Iff(node.lhs, new_child)
    return rebuilt, (i,) + sub_steps, sub_span


# ---------------------------------------------------------------------------
# Evaluation and truth tables

VARIABLE_LIMIT = 16


def evaluate(f: Formula, assignment: Mapping[str, int]) -> int:
    if isinstance(f, Var):
        try:
            return 1 if assignment[f.name] else 0
        except KeyError:
            raise MissingVariableError(f"no value for variable {f.name}") from None
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return 1 - evaluate(f.child, assignment)
    if isinstance(f, And):
        for m in f.members:
            if not evaluate(m, assignment):
                return 0
        return 1
    if isinstance(f, Or):
        for m in f.members:
            if evaluate(m, assignment):
                return 1
        return 0
    if isinstance(f, Imp):
        return 1 if not evaluate(f.lhs, assignment) else evaluate(f.rhs, assignment)
    return 1 if evaluate(f.lhs, assignment) == evaluate(f.rhs, assignment) else 0


def variables(f: Formula) -> tuple[str, ...]:
    """Distinct variable names of f in alphabetical order."""
    return tuple(sorted({n.name for n in walk(f) if isinstance(n, Var)}))


def assignments(names: Sequence[str]) -> Iterator[dict[str, int]]:
    """All assignments over names in ascending binary order, first name most
    significant."""
    for bits in itertools.product((0, 1), repeat=len(names)):
        yield dict(zip(names, bits))


def equivalent(f: Formula, g: Formula) -> bool:
    """Truth-table equivalence over the union of the variable sets."""
    names = sorted(set(variables(f)) | set(variables(g)))
    if len(names) > VARIABLE_LIMIT:
        raise TooManyVariablesError(f"{len(names)} variables exceed the limit of {VARIABLE_LIMIT}")
    return all(evaluate(f, a) == evaluate(g, a) for a in assignments(names))


def canonical_fdnf(f: Formula, task_vars: Sequence[str] | None = None) -> Formula:
    """Brute-force full DNF of f over task_vars via its truth table.

    One conjunction per satisfying assignment in ascending binary order, each
    containing every variable alphabetically, negated where the bit is 0.
    Unsatisfiable formulas give 0; a tautology over no variables gives 1.
    """
    names = sorted(task_vars) if task_vars is not None else list(variables(f))
    if len(names) > VARIABLE_LIMIT:
        raise TooManyVariablesError(f"{len(names)} variables exceed the limit of {VARIABLE_LIMIT}")
    missing = set(variables(f)) - set(names)
    if missing:
        raise MissingVariableError(f"formula uses variables outside the task set: {sorted(missing)}")
    minterms = []
    for a in assignments(names):
        if evaluate(f, a):
            lits = [Var(n) if a[n] else Not(Var(n)) for n in names]
            minterms.append(make_and(lits) if lits else TRUE)
    if not minterms:
        return FALSE
    return make_or(minterms)


# ---------------------------------------------------------------------------
# Printing with span tracking

_NARY_OP = {And: "&", Or: "|"}


def _needs_parens(parent: Formula, child: Formula, side: int) -> bool:
    if isinstance(parent, Not):
        return isinstance(child, (And, Or, Imp, Iff))
    if isinstance(parent, And):
        return isinstance(child, (Or, Imp, Iff))
    if isinstance(parent, Or):
        return isinstance(child, (Imp, Iff))
    if isinstance(parent, Imp):
        return isinstance(child, (Imp, Iff)) if side == 0 else isinstance(child, Iff)
    if isinstance(parent, Iff):
        return isinstance(child, Iff) if side == 0 else False
    return False


@dataclass(frozen=True)
class NodeSpan:
    steps: tuple[int, ...]
    start: int
    end: int
    kind: str
    member_cells: tuple[tuple[int, int], ...] | None = None


class Layout:
    """Printed form of a formula plus the character span of every node.

    Node spans exclude any enclosing parentheses; member cells of chain nodes
    include them, so a run of members maps to an exact substring.
    """

    def __init__(self, text: str, nodes: list[NodeSpan]):
        self.text = text
        self.nodes = {n.steps: n for n in nodes}

    def span_of(self, p: Path) -> tuple[int, int]:
        node = self.nodes[tuple(p.steps)]
        if p.span is None:
            return node.start, node.end
        start, length = p.span
        cells = node.member_cells or ()
        return cells[start][0], cells[start + length - 1][1]

    def to_json(self) -> dict:
        return {
            "text": self.text,
            "nodes": [
                {
                    "path": list(n.steps),
                    "start": n.start,
                    "end": n.end,
                    "kind": n.kind,
                    **({"members": [list(c) for c in n.member_cells]} if n.member_cells else {}),
                }
                for n in self.nodes.values()
            ],
        }


def layout(f: Formula) -> Layout:
    parts: list[str] = []
    nodes: list[NodeSpan] = []
    pos = 0

    def emit(s: str) -> None:
        nonlocal pos
        parts.append(s)
        pos += len(s)

    def wrap(child: Formula, steps: tuple[int, ...], parent: Formula, side: int) -> None:
        if _needs_parens(parent, child, side):
            emit("(")
            render(child, steps)
            emit(")")
        else:
            render(child, steps)

    def render(node: Formula, steps: tuple[int, ...]) -> None:
        start = pos
        cells: tuple[tuple[int, int], ...] | None = None
        if isinstance(node, Var):
            emit(node.name)
        elif isinstance(node, Const):
            emit(str(node.value))
        elif isinstance(node, Not):
            emit("!")
            wrap(node.child, steps + (0,), node, 0)
        elif isinstance(node, (And, Or)):
            cell_list = []
            for i, m in enumerate(node.members):
                if i:
                    emit(_NARY_OP[type(node)])
                c0 = pos
                wrap(m, steps + (i,), node, i)
                cell_list.append((c0, pos))
            cells = tuple(cell_list)
        elif isinstance(node, Imp):
            wrap(node.lhs, steps + (0,), node, 0)
            emit("=>")
            wrap(node.rhs, steps + (1,), node, 1)
        else:
            wrap(node.lhs, steps + (0,), node, 0)
            emit("<=>")
            wrap(node.rhs, steps + (1,), node, 1)
        nodes.append(NodeSpan(steps, start, pos, type(node).__name__.lower(), cells))

    render(f, ())
    return Layout("".join(parts), nodes)


def print_formula(f: Formula) -> str:
    """Minimal-parentheses rendering; parse(print_formula(f)) == f."""
    return layout(f).text


def highlighted(f: Formula, p: Path | None) -> str:
    """The printed formula with the part at p bracketed by [[ ]]."""
    lay = layout(f)
    if p is None:
        return lay.text
    start, end = lay.span_of(normalize_path(f, p))
    return lay.text[:start] + "[[" + lay.text[start:end] + "]]" + lay.text[end:]


# ---------------------------------------------------------------------------
# Parsing


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def _skip_ws(self) -> None:
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def peek(self) -> str | None:
        self._skip_ws()
        return self.text[self.i] if self.i < len(self.text) else None

    def fail(self, expected: str) -> ParseError:
        self._skip_ws()
        return ParseError(self.i, expected)

    def eat(self, token: str) -> bool:
        self._skip_ws()
        if self.text.startswith(token, self.i):
            self.i += len(token)
            return True
        return False

    def expect(self, token: str) -> None:
        if not self.eat(token):
            raise self.fail(f"'{token}'")

    def formula(self) -> Formula:
        parts = [self.imp()]
        while True:
            self._skip_ws()
            if self.peek() == "<":
                self.expect("<=>")
                parts.append(self.imp())
            else:
                break
        node = parts[-1]
        for lhs in reversed(parts[:-1]):
            node = Iff(lhs, node)
        return node

    def imp(self) -> Formula:
        lhs = self.disj()
        self._skip_ws()
        if self.peek() == "=":
            self.expect("=>")
            return Imp(lhs, self.imp())
        return lhs

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.eat("|"):
            parts.append(self.conj())
        return make_or(parts)

    def conj(self) -> Formula:
        parts = [self.neg()]
        while self.eat("&"):
            parts.append(self.neg())
        return make_and(parts)

    def neg(self) -> Formula:
        if self.eat("!"):
            return Not(self.neg())
        return self.atom()

    def atom(self) -> Formula:
        c = self.peek()
        if c is None:
            raise self.fail("a formula")
        if c == "(":
            self.eat("(")
            node = self.formula()
            self.expect(")")
            return node
        if c in "01":
            self.eat(c)
            return Const(int(c))
        if "A" <= c <= "Z":
            self.eat(c)
            return Var(c)
        raise self.fail("a formula")


def parse(text: str) -> Formula:
    """Parse a formula; raises ParseError with a 0-based offset on bad input."""
    p = _Parser(text)
    node = p.formula()
    if p.peek() is not None:
        raise p.fail("end of input")
    return node
