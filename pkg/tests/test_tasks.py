import pytest

from fdnf.analyzer import solve_reference
from fdnf.formulas import (
    Const,
    Iff,
    Imp,
    Not,
    And,
    Or,
    equivalent,
    print_formula,
    variables,
    walk,
)
from fdnf.tasks import TaskSpec, generate_tasks


def _connective_counts(f):
    imps = sum(isinstance(n, Imp) for n in walk(f))
    iffs = sum(isinstance(n, Iff) for n in walk(f))
    # chain nodes absorb the binary &/| uses: count joins, not nodes
    ands = sum(len(n.members) - 1 for n in walk(f) if isinstance(n, And))
    ors = sum(len(n.members) - 1 for n in walk(f) if isinstance(n, Or))
    nots = sum(isinstance(n, Not) for n in walk(f))
    return imps, iffs, ands, ors, nots


def test_generator_constraints_seed_42():
    (f,) = generate_tasks(TaskSpec(count=1, seed=42))
    imps, iffs, ands, ors, nots = _connective_counts(f)
    assert (imps, iffs, ands, ors) == (1, 1, 1, 1)
    assert nots in (2, 3)
    assert len(variables(f)) >= 3
    assert not equivalent(f, Const(0)) and not equivalent(f, Const(1))


def test_generator_deterministic():
    a = generate_tasks(TaskSpec(count=5, seed=9))
    b = generate_tasks(TaskSpec(count=5, seed=9))
    assert [print_formula(x) for x in a] == [print_formula(y) for y in b]
    c = generate_tasks(TaskSpec(count=5, seed=10))
    assert [print_formula(x) for x in a] != [print_formula(y) for y in c]


def test_generator_prefix_stable():
    long = generate_tasks(TaskSpec(count=8, seed=3))
    short = generate_tasks(TaskSpec(count=3, seed=3))
    assert [print_formula(f) for f in long[:3]] == [print_formula(f) for f in short]


def test_generator_no_negations():
    for f in generate_tasks(TaskSpec(count=5, seed=1, negations=(0, 0))):
        assert all(not isinstance(n, Not) for n in walk(f))


def test_generator_constraint_sweep():
    for f in generate_tasks(TaskSpec(count=30, seed=7)):
        imps, iffs, ands, ors, nots = _connective_counts(f)
        assert (imps, iffs, ands, ors) == (1, 1, 1, 1)
        assert nots in (2, 3)
        assert len(variables(f)) >= 3
        assert set(variables(f)) <= {"W", "X", "Y", "Z"}


def test_generator_validates_spec():
    with pytest.raises(ValueError):
        generate_tasks(TaskSpec(pool=("X",)))
    with pytest.raises(ValueError):
        generate_tasks(TaskSpec(negations=(3, 2)))


def test_generated_tasks_solvable_within_bound():
    for f in generate_tasks(TaskSpec(count=20, seed=77)):
        assert len(solve_reference(f, variables(f))) <= 200
