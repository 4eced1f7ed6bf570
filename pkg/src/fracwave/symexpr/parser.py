"""Recursive-descent parser for the expression grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' ['-'] integer)?
    base   := number | symbol | func '(' expr ')' | 'D' '(' f ',' var [',' n] ')'
            | '(' expr ')' | '-' factor | '+' factor

Decimal literals are read exactly (``0.5`` is the rational 1/2).
"""

from __future__ import annotations

import re
from fractions import Fraction

from .core import FUNCTIONS, Deriv, Expr, Num, Sym, add, func, mul, power

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))"
)

_BASE_START = frozenset({"number", "symbol", "function", "'('", "'-'", "'+'"})


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, expected=frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        value = m.group(kind)
        if value == "**":
            value = "^"
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, tok, expected, message=None):
        kind, value, pos = tok
        if message is None:
            message = "unexpected end of input" if kind == "end" else f"unexpected token {value!r}"
        raise ParseError(message, pos, expected)

    def expect_op(self, op):
        tok = self.next()
        if tok[0] != "op" or tok[1] != op:
            self.error(tok, {f"'{op}'"})
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.error(tok, {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.next()
                t = self.term()
                terms.append(t if value == "+" else mul(-1, t))
            else:
                return add(*terms)

    def term(self) -> Expr:
        acc = [self.factor()]
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.next()
                f = self.factor()
                # left-associative: fold now so that a/b/c == (a/b)/c
                acc = [mul(*acc, f if value == "*" else power(f, -1))]
            else:
                return acc[0]

    def integer(self) -> int:
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.next()
            sign = -1 if tok[1] == "-" else 1
            tok = self.peek()
        if tok[0] != "num" or not tok[1].isdigit():
            self.error(tok, {"integer"})
        self.next()
        return sign * int(tok[1])

    def factor(self) -> Expr:
        base = self.base()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.next()
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "(":
                self.next()
                n = self.integer()
                self.expect_op(")")
            else:
                n = self.integer()
            return power(base, n)
        return base

    def base(self) -> Expr:
        tok = self.next()
        kind, value, pos = tok
        if kind == "num":
            return Num(Fraction(value))
        if kind == "name":
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "(":
                if value == "D":
                    return self.deriv()
                if value not in FUNCTIONS:
                    raise ParseError(f"unknown function {value!r}", pos, FUNCTIONS)
                self.next()
                arg = self.expr()
                if self.peek()[0] == "op" and self.peek()[1] == ",":
                    raise ParseError(f"{value} takes exactly one argument", self.peek()[2], {"')'"})
                self.expect_op(")")
                return func(value, arg)
            return Sym(value)
        if kind == "op":
            if value == "(":
                e = self.expr()
                self.expect_op(")")
                return e
            if value == "-":
                return mul(-1, self.factor())
            if value == "+":
                return self.factor()
        self.i -= 1
        self.error(tok, _BASE_START)

    def deriv(self) -> Expr:
        self.expect_op("(")
        names = []
        for _ in range(2):
            tok = self.next()
            if tok[0] != "name":
                self.error(tok, {"symbol"})
            names.append(tok[1])
            if len(names) == 1:
                self.expect_op(",")
        order = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] == ",":
            self.next()
            order = self.integer()
            if order < 1:
                raise ParseError("derivative order must be positive", tok[2], {"integer"})
        self.expect_op(")")
        return Deriv(names[0], names[1], order)


def parse(text: str) -> Expr:
    """Parse ``text`` into a normalized expression; raises :class:`ParseError`."""
    return _Parser(text).parse()
