"""Render expressions in the text grammar accepted by :func:`parse`."""

from __future__ import annotations

from fractions import Fraction

from .core import Add, Deriv, Expr, Func, Mul, Num, Pow, Sym


def _num(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _leading_negative(e: Expr) -> bool:
    if isinstance(e, Num):
        return e.value < 0
    if isinstance(e, Mul):
        return e.coeff < 0
    return False


def _base(e: Expr) -> str:
    """Format an expression used as the base of a power or as a product factor."""
    if isinstance(e, (Sym, Func, Deriv)):
        return format_expr(e)
    if isinstance(e, Num) and e.value >= 0 and e.value.denominator == 1:
        return format_expr(e)
    return f"({format_expr(e)})"


def _factor(base: Expr, n: int) -> str:
    s = _base(base)
    return s if n == 1 else f"{s}^{n}"


def _mul(coeff: Fraction, factors) -> str:
    num_parts, den_parts = [], []
    for f in factors:
        base, n = (f.base, f.exp) if isinstance(f, Pow) else (f, 1)
        if n > 0:
            num_parts.append(_factor(base, n))
        else:
            den_parts.append(_factor(base, -n))
    sign = "-" if coeff < 0 else ""
    c = abs(coeff)
    head = []
    if c != 1 or not num_parts:
        head.append(_num(c))
    text = "*".join(head + num_parts)
    for d in den_parts:
        text += "/" + d
    return sign + text


def format_expr(e: Expr) -> str:
    if isinstance(e, Num):
        return _num(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({', '.join(format_expr(a) for a in e.fargs)})"
    if isinstance(e, Deriv):
        return f"D({e.func}, {e.var}, {e.order})"
    if isinstance(e, Pow):
        return _mul(Fraction(1), (e,))
    if isinstance(e, Mul):
        return _mul(e.coeff, e.factors)
    if isinstance(e, Add):
        out = format_expr(e.terms[0])
        for t in e.terms[1:]:
            if _leading_negative(t):
                neg = -t
                text = format_expr(neg)
                out += " - " + (f"({text})" if isinstance(neg, Add) else text)
            else:
                out += " + " + format_expr(t)
        return out
    raise TypeError(f"unknown node {type(e).__name__}")
