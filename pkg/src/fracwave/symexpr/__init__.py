"""Exact symbolic expressions: parsing, arithmetic, calculus, collection, evaluation."""

from .calculus import UnresolvedDerivativeError, differentiate, replace, substitute
from .core import (
    FUNCTIONS,
    ONE,
    ZERO,
    Add,
    Deriv,
    Expr,
    Func,
    Mul,
    Num,
    Pow,
    Sym,
    SymbolicError,
    add,
    as_expr,
    deriv,
    func,
    mul,
    normalize,
    power,
    symbols,
)
from .numeric import DomainError, UnboundSymbolError, compile_numeric, eval_numeric
from .parser import ParseError, parse
from .poly import (
    NonPolynomialError,
    Poly,
    collect_powers,
    expand_normalize,
    reduce_radicals,
    to_poly,
    together,
)
from .printer import format_expr

__all__ = [
    "FUNCTIONS", "ONE", "ZERO", "Add", "Deriv", "Expr", "Func", "Mul", "Num", "Pow",
    "Sym", "SymbolicError", "add", "as_expr", "deriv", "func", "mul", "normalize",
    "power", "symbols", "differentiate", "replace", "substitute",
    "UnresolvedDerivativeError", "DomainError", "UnboundSymbolError",
    "compile_numeric", "eval_numeric", "ParseError", "parse", "NonPolynomialError",
    "Poly", "collect_powers", "expand_normalize", "reduce_radicals", "to_poly",
    "together", "format_expr",
]
