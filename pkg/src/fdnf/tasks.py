"""Random exercise generation.

Each task is a random binary tree that uses each of the four connectives
&, |, =>, <=> exactly once, with five leaves drawn from the variable pool
(at least three distinct), and two or three negations wrapped around
uniformly chosen positions. Constant-equivalent draws are rejected.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .formulas import (
    Formula,
    Iff,
    Imp,
    Not,
    Var,
    equivalent,
    FALSE,
    TRUE,
    make_and,
    make_or,
)


@dataclass(frozen=True)
class TaskSpec:
    count: int = 1
    seed: int = 0
    pool: tuple[str, ...] = ("X", "Y", "Z", "W")
    connectives: tuple[str, ...] = ("&", "|", "=>", "<=>")
    negations: tuple[int, int] = (2, 3)

    def validate(self) -> None:
        if len(self.pool) < 2:
            raise ValueError("the variable pool needs at least two names")
        lo, hi = self.negations
        if lo < 0 or hi < lo:
            raise ValueError(f"empty negation range {self.negations}")
        if self.count < 0:
            raise ValueError("count must not be negative")


# build trees as nested tuples first so negation positions stay stable,
# then convert; the chain constructors may flatten and shift paths otherwise
_LEAF = "leaf"


def _build_shape(rng: random.Random, conns: list[str]):
    if not conns:
        return (_LEAF,)
    split = rng.randint(0, len(conns) - 1)
    rest = conns[1:]
    return (conns[0], _build_shape(rng, rest[:split]), _build_shape(rng, rest[split:]))


def _tree_paths(tree, prefix=()):
    yield prefix
    if tree[0] != _LEAF and tree[0] != "!":
        yield from _tree_paths(tree[1], prefix + (1,))
        yield from _tree_paths(tree[2], prefix + (2,))
    elif tree[0] == "!":
        yield from _tree_paths(tree[1], prefix + (1,))


def _wrap(tree, steps):
    if not steps:
        return ("!", tree)
    i = steps[0]
    if i == 1:
        return tree[:1] + (_wrap(tree[1], steps[1:]),) + tree[2:]
    return tree[:2] + (_wrap(tree[2], steps[1:]),)


def _to_formula(tree, leaves: list[str]) -> Formula:
    op = tree[0]
    if op == _LEAF:
        return Var(leaves.pop(0))
    if op == "!":
        return Not(_to_formula(tree[1], leaves))
    lhs = _to_formula(tree[1], leaves)
    rhs = _to_formula(tree[2], leaves)
    if op == "&":
        return make_and([lhs, rhs])
    if op == "|":
        return make_or([lhs, rhs])
    if op == "=>":
        return Imp(lhs, rhs)
    return Iff(lhs, rhs)


def _one_task(rng: random.Random, spec: TaskSpec) -> Formula:
    for _ in range(200):
        conns = list(spec.connectives)
        rng.shuffle(conns)
        shape = _build_shape(rng, conns)

        n_leaves = len(conns) + 1
        distinct = min(3, len(spec.pool))
        names = list(rng.sample(list(spec.pool), distinct))
        names += [rng.choice(spec.pool) for _ in range(n_leaves - distinct)]
        rng.shuffle(names)

        k = rng.randint(*spec.negations)
        spots = sorted(rng.sample(list(_tree_paths(shape)), k), key=len, reverse=True)
        for steps in spots:
            shape = _wrap(shape, steps)

        f = _to_formula(shape, list(names))
        if not equivalent(f, TRUE) and not equivalent(f, FALSE):
            return f
    raise RuntimeError("rejection sampling failed to find a nontrivial task")


def generate_tasks(spec: TaskSpec) -> list[Formula]:
    """Deterministic for a given seed; each task index draws from its own
    seeded stream so corpora are stable under count changes."""
    spec.validate()
    return [_one_task(random.Random(f"{spec.seed}:{i}"), spec) for i in range(spec.count)]
