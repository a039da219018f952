"""Step-by-step full-DNF transformation workbench: formula core, rewrite-rule
menu, step relevance analysis, solution files and statistics, CLI and an
interactive solving service."""

from .analyzer import (
    DONE,
    Annotation,
    AttemptSummary,
    StepVerdict,
    annotate_attempt,
    check_step,
    is_completed,
    solve_reference,
    stage_name,
    stage_of,
)
from .formulas import (
    And,
    Const,
    Formula,
    FormulaError,
    Iff,
    Imp,
    InvalidPathError,
    Not,
    Or,
    ParseError,
    Path,
    TooManyVariablesError,
    Var,
    canonical_fdnf,
    equivalent,
    evaluate,
    parse,
    print_formula,
    replace_at,
    subformula_at,
    variables,
)
from .rules import (
    BadParamsError,
    FreeInput,
    NoChange,
    NotApplicableError,
    NotEquivalentError,
    RULES,
    RuleStep,
    apply_rule,
    enumerate_applicable,
    identify_step,
    rules_table,
)
from .solutions import (
    Attempt,
    FormatError,
    StepRecord,
    aggregate_stats,
    dump_solutions,
    export_tsv,
    load_solutions,
    write_annotations,
)
from .tasks import TaskSpec, generate_tasks

__all__ = [name for name in dir() if not name.startswith("_")]
