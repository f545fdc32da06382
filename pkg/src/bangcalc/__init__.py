"""The bang calculus: syntax, reduction, translations of the lambda calculus
and a bounded relational semantics."""

from .reltypes import Arrow, Bound, Mset, enumerate_types, parse_type, show_type
from .rewrite import (
    Redex,
    RelationSpec,
    Trace,
    development,
    is_normal,
    join,
    parallel_related,
    reduce,
    reduce_lambda,
    redexes,
    step,
)
from .relsem import (
    JudgementSet,
    check_cbv_inclusion,
    check_factorization_cbn,
    check_invariance,
    derivable,
    interpret,
)
from .syntax import (
    App,
    Bang,
    Der,
    Lam,
    ParseError,
    Var,
    alpha_eq,
    free_vars,
    parse_bang,
    parse_lambda,
    print_term,
    substitute,
)
from .translate import (
    check_equiv_preservation,
    check_simulation,
    cbn,
    cbn_inverse,
    cbv,
    classify,
    forgetful,
)

__all__ = [name for name in dir() if not name.startswith("_")]
