"""Immutable expression nodes and the light canonical form.

Every node is built through the smart constructors :func:`add`, :func:`mul`,
:func:`power` and :func:`func`, which flatten, fold rational constants,
collect like terms/factors and sort children by a fixed total order.  The
result is the *light* normal form: products are not distributed over sums
(see :func:`fracwave.symexpr.poly.expand_normalize` for that).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

FUNCTIONS = frozenset(
    {"exp", "ln", "sqrt", "tanh", "coth", "tan", "cot", "gamma", "sign", "abs"}
)

Number = Union[int, Fraction]


class SymbolicError(ValueError):
    """Raised for symbolically undefined operations (e.g. 1/0)."""


class Expr:
    __slots__ = ("_hash", "_key")

    # ordering rank of the node kind inside the total order
    rank = -1

    def _payload(self):
        raise NotImplementedError

    def _init(self):
        payload = self._payload()
        self._key = (self.rank, payload)
        self._hash = hash(self._key)

    @property
    def key(self):
        return self._key

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            if isinstance(other, (int, Fraction)):
                return isinstance(self, Num) and self.value == other
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __ne__(self, other):
        res = self.__eq__(other)
        return res if res is NotImplemented else not res

    def __lt__(self, other):
        return self._key < other._key

    # arithmetic sugar
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, mul(-1, as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), mul(-1, self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, -1))

    def __neg__(self):
        return mul(-1, self)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if isinstance(n, Num) and n.value.denominator == 1:
            n = int(n.value)
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        return power(self, n)

    def __str__(self):
        from .printer import format_expr

        return format_expr(self)

    def __repr__(self):
        return f"{type(self).__name__}({str(self)!r})"

    def __reduce__(self):
        from .printer import format_expr

        return (_unpickle, (format_expr(self),))

    # structure helpers
    @property
    def args(self) -> tuple["Expr", ...]:
        return ()

    def atoms(self) -> set["Expr"]:
        out: set[Expr] = set()
        stack = [self]
        while stack:
            e = stack.pop()
            if isinstance(e, (Sym, Deriv, Num)):
                out.add(e)
            stack.extend(e.args)
        return out

    @property
    def free_symbols(self) -> set[str]:
        names: set[str] = set()
        stack = [self]
        while stack:
            e = stack.pop()
            if isinstance(e, Sym):
                names.add(e.name)
            elif isinstance(e, Deriv):
                names.add(e.func)
                names.add(e.var)
            stack.extend(e.args)
        return names

    def has(self, target: "Expr") -> bool:
        stack = [self]
        while stack:
            e = stack.pop()
            if e == target:
                return True
            stack.extend(e.args)
        return False


def _unpickle(text):
    from .parser import parse

    return parse(text)


class Num(Expr):
    __slots__ = ("value",)
    rank = 0

    def __init__(self, value: Number):
        self.value = Fraction(value)
        self._init()

    def _payload(self):
        return (self.value,)


class Sym(Expr):
    __slots__ = ("name",)
    rank = 1

    def __init__(self, name: str):
        self.name = name
        self._init()

    def _payload(self):
        return (self.name,)


class Func(Expr):
    __slots__ = ("name", "fargs")
    rank = 2

    def __init__(self, name: str, fargs: tuple[Expr, ...]):
        self.name = name
        self.fargs = fargs
        self._init()

    def _payload(self):
        return (self.name, tuple(a._key for a in self.fargs))

    @property
    def args(self):
        return self.fargs


class Deriv(Expr):
    """Unresolved derivative marker ``D(f, var, order)``."""

    __slots__ = ("func", "var", "order")
    rank = 3

    def __init__(self, func: str, var: str, order: int):
        if order < 1:
            raise ValueError("derivative order must be >= 1")
        self.func = func
        self.var = var
        self.order = int(order)
        self._init()

    def _payload(self):
        return (self.func, self.var, self.order)


class Pow(Expr):
    __slots__ = ("base", "exp")
    rank = 4

    def __init__(self, base: Expr, exp: int):
        self.base = base
        self.exp = exp
        self._init()

    def _payload(self):
        return (self.base._key, self.exp)

    @property
    def args(self):
        return (self.base,)


class Mul(Expr):
    __slots__ = ("coeff", "factors")
    rank = 5

    def __init__(self, coeff: Fraction, factors: tuple[Expr, ...]):
        self.coeff = coeff
        self.factors = factors
        self._init()

    def _payload(self):
        return (self.coeff, tuple(f._key for f in self.factors))

    @property
    def args(self):
        return self.factors


class Add(Expr):
    __slots__ = ("terms",)
    rank = 6

    def __init__(self, terms: tuple[Expr, ...]):
        self.terms = terms
        self._init()

    def _payload(self):
        return tuple(t._key for t in self.terms)

    @property
    def args(self):
        return self.terms


ZERO = Num(0)
ONE = Num(1)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Num(value)
    if isinstance(value, str):
        return Sym(value)
    if isinstance(value, float):
        # floats are converted exactly through their shortest decimal repr
        return Num(Fraction(repr(value)))
    raise TypeError(f"cannot convert {value!r} to Expr")


def symbols(names: str) -> tuple[Sym, ...]:
    return tuple(Sym(n) for n in names.replace(",", " ").split())


# --- ordering helpers -------------------------------------------------------


def _split_power(e: Expr) -> tuple[Expr, int]:
    if isinstance(e, Pow):
        return e.base, e.exp
    return e, 1


def _factor_key(f: Expr):
    base, n = _split_power(f)
    return (base._key, n)


def _monomial_key(m: Expr):
    if isinstance(m, Num):
        return ()
    if isinstance(m, Mul):
        return tuple(_factor_key(f) for f in m.factors)
    return (_factor_key(m),)


def split_term(t: Expr) -> tuple[Fraction, Expr]:
    """Split a term into ``(rational coefficient, monomial)``."""
    if isinstance(t, Num):
        return t.value, ONE
    if isinstance(t, Mul):
        if t.coeff == 1:
            return Fraction(1), t
        if len(t.factors) == 1:
            return t.coeff, t.factors[0]
        return t.coeff, Mul(Fraction(1), t.factors)
    return Fraction(1), t


def _make_term(coeff: Fraction, mono: Expr) -> Expr:
    if isinstance(mono, Num):
        return Num(coeff * mono.value)
    if coeff == 1:
        return mono
    if isinstance(mono, Mul):
        return Mul(coeff * mono.coeff, mono.factors)
    return Mul(coeff, (mono,))


# --- smart constructors -----------------------------------------------------


def add(*args) -> Expr:
    collected: dict[Expr, Fraction] = {}
    for a in args:
        a = as_expr(a)
        terms = a.terms if isinstance(a, Add) else (a,)
        for t in terms:
            c, m = split_term(t)
            if c == 0:
                continue
            collected[m] = collected.get(m, 0) + c
    items = [(m, c) for m, c in collected.items() if c != 0]
    if not items:
        return ZERO
    items.sort(key=lambda mc: _monomial_key(mc[0]))
    terms = tuple(_make_term(c, m) for m, c in items)
    if len(terms) == 1:
        return terms[0]
    return Add(terms)


def mul(*args) -> Expr:
    coeff = Fraction(1)
    powers: dict[Expr, int] = {}

    def push(base: Expr, n: int):
        powers[base] = powers.get(base, 0) + n

    for a in args:
        a = as_expr(a)
        if isinstance(a, Num):
            coeff *= a.value
        elif isinstance(a, Mul):
            coeff *= a.coeff
            for f in a.factors:
                push(*_split_power(f))
        else:
            push(*_split_power(a))
        if coeff == 0:
            return ZERO
    factors = []
    for base, n in powers.items():
        if n == 0:
            continue
        f = base if n == 1 else Pow(base, n)
        factors.append(f)
    if not factors:
        return Num(coeff)
    factors.sort(key=_factor_key)
    if coeff == 1 and len(factors) == 1:
        return factors[0]
    return Mul(coeff, tuple(factors))


def power(base, n: int) -> Expr:
    base = as_expr(base)
    n = int(n)
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Num):
        if base.value == 0 and n < 0:
            raise SymbolicError("division by zero")
        return Num(base.value**n)
    if isinstance(base, Pow):
        return power(base.base, base.exp * n)
    if isinstance(base, Mul):
        return mul(Num(base.coeff**n), *[power(f, n) for f in base.factors])
    return Pow(base, n)


def _square_part(n: int) -> int:
    """Largest s with s*s dividing n (n > 0)."""
    s = 1
    d = 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
            s *= d
        d += 1
    return s


def _rational_sqrt_split(v: Fraction) -> tuple[Fraction, Fraction]:
    """Write v = s**2 * rest with s > 0 rational taken as large as cheaply possible."""
    num, den = abs(v.numerator), v.denominator
    sn = math.isqrt(num)
    if sn * sn != num:
        sn = _square_part(num) if num < 10**12 else 1
    sd = math.isqrt(den)
    if sd * sd != den:
        sd = _square_part(den) if den < 10**12 else 1
    s = Fraction(sn, sd)
    return s, v / (s * s)


def _fold_sqrt(arg: Expr) -> Expr | None:
    if isinstance(arg, Num):
        v = arg.value
        if v == 0:
            return ZERO
        s, rest = _rational_sqrt_split(v)
        if rest == 1:
            return Num(s)
        if s != 1:
            return mul(Num(s), Func("sqrt", (Num(rest),)))
        return None
    if isinstance(arg, Mul) and arg.coeff not in (1, -1):
        s, rest = _rational_sqrt_split(arg.coeff)
        if s != 1:
            return mul(Num(s), Func("sqrt", (mul(Num(rest), *arg.factors),)))
    return None


def _fold(name: str, fargs: tuple[Expr, ...]) -> Expr | None:
    a = fargs[0]
    if name == "sqrt":
        return _fold_sqrt(a)
    if not isinstance(a, Num):
        return None
    v = a.value
    if name == "exp" and v == 0:
        return ONE
    if name == "ln" and v == 1:
        return ZERO
    if name in ("tanh", "tan") and v == 0:
        return ZERO
    if name == "abs":
        return Num(abs(v))
    if name == "sign":
        return Num((v > 0) - (v < 0))
    if name == "gamma" and v.denominator == 1 and 1 <= v <= 30:
        return Num(math.factorial(int(v) - 1))
    return None


def func(name: str, *fargs) -> Expr:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    fargs = tuple(as_expr(a) for a in fargs)
    if len(fargs) != 1:
        raise ValueError(f"{name} takes exactly one argument")
    folded = _fold(name, fargs)
    if folded is not None:
        return folded
    return Func(name, fargs)


def deriv(f: str, var: str, order: int = 1) -> Deriv:
    return Deriv(f, var, order)


def rebuild(e: Expr, children: Iterable[Expr]) -> Expr:
    """Rebuild a node of the same kind over new children via the smart constructors."""
    children = tuple(children)
    if isinstance(e, Add):
        return add(*children)
    if isinstance(e, Mul):
        return mul(Num(e.coeff), *children)
    if isinstance(e, Pow):
        return power(children[0], e.exp)
    if isinstance(e, Func):
        return func(e.name, *children)
    return e


def normalize(e: Expr) -> Expr:
    """Rebuild bottom-up through the smart constructors (light normal form)."""
    if not e.args:
        return e
    return rebuild(e, [normalize(a) for a in e.args])
