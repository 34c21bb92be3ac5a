"""Symbolic and capped-numeric upper bounds."""

from .evaluate import DEFAULT_DIGIT_CAP, CapExceeded, EvalResult, Evaluator
from .expr import (
    BinOp,
    BoundExpr,
    Call,
    Ceil,
    Const,
    Iter,
    Let,
    ListExpr,
    Var,
    dumps,
    from_json,
    parse,
    to_json,
    to_text,
)
from .recursions import (
    Phi1Provider,
    constant_phi1,
    evaluate,
    function_phi1,
    ls_bound,
    mil_bound,
    mil_repeated,
    no_phi1,
    psi_expr,
    udhl_base,
    udhl_base_scan,
    udhl_bound,
)

__all__ = [
    "BinOp",
    "BoundExpr",
    "Call",
    "CapExceeded",
    "Ceil",
    "Const",
    "DEFAULT_DIGIT_CAP",
    "EvalResult",
    "Evaluator",
    "Iter",
    "Let",
    "ListExpr",
    "Phi1Provider",
    "Var",
    "constant_phi1",
    "dumps",
    "evaluate",
    "from_json",
    "function_phi1",
    "ls_bound",
    "mil_bound",
    "mil_repeated",
    "no_phi1",
    "parse",
    "psi_expr",
    "to_json",
    "to_text",
    "udhl_base",
    "udhl_base_scan",
    "udhl_bound",
]
