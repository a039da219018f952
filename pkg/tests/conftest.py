import random

from hypothesis import strategies as st

from fdnf.formulas import (
    And,
    Const,
    Iff,
    Imp,
    Not,
    Or,
    Var,
    make_and,
    make_or,
)

NAMES = ["A", "B", "C", "D", "E"]


def random_formula(rng: random.Random, names=NAMES, depth=3):
    """Small random formula; constants kept rare so most draws are interesting."""
    k = rng.randrange(8) if depth > 0 else rng.randrange(2)
    if k == 0:
        return Var(rng.choice(names))
    if k == 1:
        return Const(rng.randrange(2)) if rng.randrange(4) == 0 else Var(rng.choice(names))
    if k == 2:
        return Not(random_formula(rng, names, depth - 1))
    if k in (3, 4):
        return make_and([random_formula(rng, names, depth - 1) for _ in range(rng.randrange(2, 4))])
    if k in (5, 6):
        return make_or([random_formula(rng, names, depth - 1) for _ in range(rng.randrange(2, 4))])
    a = random_formula(rng, names, depth - 1)
    b = random_formula(rng, names, depth - 1)
    return Imp(a, b) if rng.randrange(2) else Iff(a, b)


_leaves = st.one_of(
    st.sampled_from([Var(n) for n in NAMES]),
    st.sampled_from([Const(0), Const(1)]),
)

formulas = st.recursive(
    _leaves,
    lambda inner: st.one_of(
        inner.map(Not),
        st.lists(inner, min_size=2, max_size=3).map(make_and),
        st.lists(inner, min_size=2, max_size=3).map(make_or),
        st.tuples(inner, inner).map(lambda t: Imp(*t)),
        st.tuples(inner, inner).map(lambda t: Iff(*t)),
    ),
    max_leaves=12,
)
