"""Floating-point evaluation of expressions.

:func:`eval_numeric` walks the tree and reports the offending subexpression
on domain errors.  :func:`compile_numeric` generates a flat Python function
(one temporary per distinct subexpression) for bulk sampling, with either
``math`` scalars or ``numpy`` arrays.
"""

from __future__ import annotations

import math
from typing import Callable, Mapping, Sequence

from .core import Add, Deriv, Expr, Func, Mul, Num, Pow, Sym


class DomainError(ValueError):
    def __init__(self, message: str, subexpr: Expr | None = None):
        self.subexpr = subexpr
        if subexpr is not None:
            message = f"{message}: {subexpr}"
        super().__init__(message)


class UnboundSymbolError(KeyError):
    pass


def _gamma(x):
    from ..fracderiv import gamma_fn

    return gamma_fn(x)


def _apply(name: str, v: float, node: Expr) -> float:
    if name == "exp":
        try:
            return math.exp(v)
        except OverflowError:
            raise DomainError("exp overflow", node) from None
    if name == "ln":
        if v <= 0:
            raise DomainError("ln of non-positive value", node)
        return math.log(v)
    if name == "sqrt":
        if v < 0:
            raise DomainError("sqrt of negative value", node)
        return math.sqrt(v)
    if name == "tanh":
        return math.tanh(v)
    if name == "coth":
        if v == 0:
            raise DomainError("coth pole", node)
        return 1.0 / math.tanh(v)
    if name == "tan":
        if math.cos(v) == 0:
            raise DomainError("tan pole", node)
        return math.tan(v)
    if name == "cot":
        s = math.sin(v)
        if s == 0:
            raise DomainError("cot pole", node)
        return math.cos(v) / s
    if name == "gamma":
        try:
            return _gamma(v)
        except ValueError as exc:
            raise DomainError(str(exc), node) from None
    if name == "sign":
        return float((v > 0) - (v < 0))
    if name == "abs":
        return abs(v)
    raise DomainError(f"unknown function {name}", node)


def eval_numeric(e: Expr, bindings: Mapping[str, float]) -> float:
    """Evaluate ``e`` in IEEE double precision with every symbol bound."""
    memo: dict[Expr, float] = {}

    def ev(x: Expr) -> float:
        hit = memo.get(x)
        if hit is not None:
            return hit
        if isinstance(x, Num):
            v = float(x.value)
        elif isinstance(x, Sym):
            try:
                v = float(bindings[x.name])
            except KeyError:
                raise UnboundSymbolError(x.name) from None
        elif isinstance(x, Add):
            v = math.fsum(ev(t) for t in x.terms)
        elif isinstance(x, Mul):
            v = float(x.coeff)
            for f in x.factors:
                v *= ev(f)
        elif isinstance(x, Pow):
            b = ev(x.base)
            if b == 0 and x.exp < 0:
                raise DomainError("division by zero", x.base)
            try:
                v = b**x.exp
            except OverflowError:
                raise DomainError("overflow", x) from None
        elif isinstance(x, Func):
            v = _apply(x.name, ev(x.fargs[0]), x)
        elif isinstance(x, Deriv):
            raise DomainError("cannot evaluate unresolved derivative", x)
        else:
            raise TypeError(type(x))
        memo[x] = v
        return v

    return ev(e)


_MATH = {
    "exp": "math.exp",
    "ln": "math.log",
    "sqrt": "math.sqrt",
    "tanh": "math.tanh",
    "coth": "_coth",
    "tan": "math.tan",
    "cot": "_cot",
    "gamma": "_gamma",
    "sign": "_sign",
    "abs": "abs",
}

_NUMPY = {
    "exp": "np.exp",
    "ln": "np.log",
    "sqrt": "np.sqrt",
    "tanh": "np.tanh",
    "coth": "_coth",
    "tan": "np.tan",
    "cot": "_cot",
    "gamma": "_gamma",
    "sign": "np.sign",
    "abs": "np.abs",
}


def compile_numeric(
    e: Expr | Sequence[Expr], names: Sequence[str], backend: str = "math"
) -> Callable:
    """Return ``f(*values)`` evaluating ``e`` (or a tuple of expressions).

    Symbols not in ``names`` must not occur.  With ``backend="numpy"`` the
    arguments may be arrays; poles then produce inf/nan instead of raising.
    ``backend="complex"`` is the numpy backend with principal-branch sqrt and
    ln, so negative radicands give complex values instead of nan.
    """
    if backend not in ("math", "numpy", "complex"):
        raise ValueError(f"unknown backend {backend!r}")
    exprs = [e] if isinstance(e, Expr) else list(e)
    table = _MATH if backend == "math" else dict(_NUMPY)
    if backend == "complex":
        table.update(sqrt="np.emath.sqrt", ln="np.emath.log")
    index: dict[Expr, str] = {}
    lines: list[str] = []
    argmap = {n: f"_a{i}" for i, n in enumerate(names)}

    def emit(x: Expr) -> str:
        if isinstance(x, Num):
            return repr(float(x.value))
        if isinstance(x, Sym):
            if x.name not in argmap:
                raise UnboundSymbolError(x.name)
            return argmap[x.name]
        hit = index.get(x)
        if hit is not None:
            return hit
        if isinstance(x, Add):
            code = " + ".join(emit(t) for t in x.terms)
        elif isinstance(x, Mul):
            code = " * ".join([repr(float(x.coeff))] + [emit(f) for f in x.factors])
        elif isinstance(x, Pow):
            b = emit(x.base)
            code = f"{b} ** {x.exp}" if x.exp > 0 else f"1.0 / ({b} ** {-x.exp})"
        elif isinstance(x, Func):
            code = f"{table[x.name]}({emit(x.fargs[0])})"
        elif isinstance(x, Deriv):
            raise DomainError("cannot evaluate unresolved derivative", x)
        else:
            raise TypeError(type(x))
        var = f"_t{len(index)}"
        index[x] = var
        lines.append(f"    {var} = {code}")
        return var

    outs = [emit(x) for x in exprs]
    ret = outs[0] if isinstance(e, Expr) else "(" + ", ".join(outs) + ("," if len(outs) == 1 else "") + ")"
    src = f"def _f({', '.join(argmap[n] for n in names)}):\n" + "\n".join(lines) + f"\n    return {ret}\n"
    namespace: dict = {"math": math}
    if backend != "math":
        import numpy as np

        namespace["np"] = np
        namespace["_coth"] = lambda v: 1.0 / np.tanh(v)
        namespace["_cot"] = lambda v: 1.0 / np.tan(v)
        namespace["_gamma"] = np.vectorize(_gamma, otypes=[float])
    else:
        namespace["_coth"] = lambda v: 1.0 / math.tanh(v)
        namespace["_cot"] = lambda v: math.cos(v) / math.sin(v)
        namespace["_gamma"] = _gamma
        namespace["_sign"] = lambda v: float((v > 0) - (v < 0))
    exec(compile(src, "<fracwave-numeric>", "exec"), namespace)
    return namespace["_f"]
