"""Symbolic differentiation and simultaneous substitution."""

from __future__ import annotations

from typing import Collection, Mapping

from .core import (
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
    add,
    as_expr,
    func,
    mul,
    power,
    rebuild,
)


class UnresolvedDerivativeError(ValueError):
    """Derivative of an unknown function requested without opting in."""


def _d_func(e: Func, var: str, fns, memo) -> Expr:
    (g,) = e.fargs
    dg = _d(g, var, fns, memo)
    if dg == ZERO:
        return ZERO
    name = e.name
    if name == "exp":
        outer = e
    elif name == "ln":
        outer = power(g, -1)
    elif name == "sqrt":
        outer = mul(Num(1) / 2, power(e, -1))
    elif name == "tanh":
        outer = add(1, mul(-1, power(e, 2)))
    elif name == "coth":
        outer = add(1, mul(-1, power(e, 2)))
    elif name == "tan":
        outer = add(1, power(e, 2))
    elif name == "cot":
        outer = add(-1, mul(-1, power(e, 2)))
    elif name == "abs":
        outer = func("sign", g)
    elif name == "sign":
        # zero almost everywhere
        return ZERO
    else:
        raise ValueError(f"derivative of {name}() with respect to {var} is not supported")
    return mul(outer, dg)


def _d(e: Expr, var: str, fns, memo: dict) -> Expr:
    hit = memo.get(e)
    if hit is None:
        hit = memo[e] = _d_node(e, var, fns, memo)
    return hit


def _d_node(e: Expr, var: str, fns, memo: dict) -> Expr:
    if isinstance(e, Num):
        return ZERO
    if isinstance(e, Sym):
        if e.name == var:
            return ONE
        if fns is not None and e.name in fns:
            return Deriv(e.name, var, 1)
        return ZERO
    if isinstance(e, Deriv):
        if e.var != var:
            return ZERO
        if fns is None or e.func not in fns:
            raise UnresolvedDerivativeError(
                f"cannot differentiate unresolved {e} with respect to {var}"
            )
        return Deriv(e.func, var, e.order + 1)
    if isinstance(e, Add):
        return add(*[_d(t, var, fns, memo) for t in e.terms])
    if isinstance(e, Mul):
        parts = []
        fs = e.factors
        for i, f in enumerate(fs):
            df = _d(f, var, fns, memo)
            if df == ZERO:
                continue
            parts.append(mul(Num(e.coeff), *fs[:i], df, *fs[i + 1 :]))
        return add(*parts)
    if isinstance(e, Pow):
        db = _d(e.base, var, fns, memo)
        if db == ZERO:
            return ZERO
        return mul(e.exp, power(e.base, e.exp - 1), db)
    if isinstance(e, Func):
        return _d_func(e, var, fns, memo)
    raise TypeError(type(e))


def differentiate(
    e: Expr,
    var: str | Sym,
    order: int = 1,
    functions: Collection[str] | None = None,
) -> Expr:
    """Exact derivative of ``e`` with respect to ``var``.

    Symbols other than ``var`` are constants, unless listed in ``functions``;
    those are treated as unknown functions of ``var`` and produce derivative
    markers ``D(f, var, n)``.  Markers for functions not listed raise
    :class:`UnresolvedDerivativeError`.
    """
    if isinstance(var, Sym):
        var = var.name
    if order < 1:
        raise ValueError("order must be a positive integer")
    fns = frozenset(functions) if functions is not None else None
    for _ in range(order):
        e = _d(e, var, fns, {})
    return e


def replace(e: Expr, mapping: Mapping[Expr, Expr]) -> Expr:
    """Simultaneous structural replacement of whole subexpressions."""
    if not mapping:
        return e
    memo: dict[Expr, Expr] = {}

    def walk(x: Expr) -> Expr:
        if x in mapping:
            return mapping[x]
        if not x.args:
            return x
        hit = memo.get(x)
        if hit is not None:
            return hit
        out = rebuild(x, [walk(a) for a in x.args])
        memo[x] = out
        return out

    return walk(e)


def substitute(e: Expr, bindings: Mapping[str, object]) -> Expr:
    """Replace symbols simultaneously; unbound symbols pass through."""
    mapping = {Sym(k): as_expr(v) for k, v in bindings.items()}
    return replace(e, mapping)
