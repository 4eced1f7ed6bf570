"""Sparse multivariate Laurent polynomials over the rationals.

Atoms are non-arithmetic expression nodes (symbols, function applications,
derivative markers) plus sums that only ever occur under negative powers.
A monomial is a tuple of ``(atom, exponent)`` pairs sorted by the atom's
key; a :class:`Poly` maps monomials to non-zero :class:`~fractions.Fraction`
coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping

from .core import (
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
    func,
    mul,
    power,
)

Monomial = tuple  # tuple[tuple[Expr, int], ...]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for atom, n in b:
        m = d.get(atom, 0) + n
        if m:
            d[atom] = m
        else:
            del d[atom]
    return tuple(sorted(d.items(), key=lambda an: an[0].key))


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self.terms: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[m] = Fraction(c)

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c)}) if c else cls()

    @classmethod
    def atom(cls, a: Expr, n: int = 1) -> "Poly":
        return cls({((a, n),): Fraction(1)})

    def copy(self) -> "Poly":
        p = Poly()
        p.terms = dict(self.terms)
        return p

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def const_value(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        p = Poly()
        p.terms = out
        return p

    def __iadd__(self, other: "Poly") -> "Poly":
        # in-place accumulation; Poly values are otherwise treated as immutable
        out = self.terms
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return self

    def __neg__(self) -> "Poly":
        p = Poly()
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly()
        p = Poly()
        p.terms = {m: v * c for m, v in self.terms.items()}
        return p

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        p = Poly()
        p.terms = out
        return p

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def atoms(self) -> set[Expr]:
        return {a for m in self.terms for a, _ in m}

    def degree(self, atom: Expr) -> int:
        return max((dict(m).get(atom, 0) for m in self.terms), default=0)

    def min_degree(self, atom: Expr) -> int:
        return min((dict(m).get(atom, 0) for m in self.terms), default=0)

    def coeffs_in(self, atom: Expr) -> dict[int, "Poly"]:
        """Group by the exponent of ``atom``; coefficients are ``atom``-free."""
        out: dict[int, Poly] = {}
        for m, c in self.terms.items():
            d = 0
            rest = []
            for a, n in m:
                if a == atom:
                    d = n
                else:
                    rest.append((a, n))
            out.setdefault(d, Poly()).terms[tuple(rest)] = c
        return out

    def monomial_content(self) -> Monomial:
        """Largest monomial (componentwise minimum exponent) dividing every term."""
        if not self.terms:
            return ()
        it = iter(self.terms)
        common = {a: n for a, n in next(it) if n > 0}
        for m in it:
            if not common:
                break
            md = dict(m)
            for a in list(common):
                e = min(common[a], md.get(a, 0))
                if e <= 0:
                    del common[a]
                else:
                    common[a] = e
        return tuple(sorted(common.items(), key=lambda an: an[0].key))

    def div_monomial(self, mono: Monomial) -> "Poly":
        inv = tuple((a, -n) for a, n in mono)
        p = Poly()
        p.terms = {_mono_mul(m, inv): c for m, c in self.terms.items()}
        return p

    def rational_content(self) -> Fraction:
        """Positive rational g with self/g having coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        nums = [c.numerator for c in self.terms.values()]
        dens = [c.denominator for c in self.terms.values()]
        g = 0
        for n in nums:
            g = gcd(g, abs(n))
        return Fraction(g, lcm(*dens))

    def primitive(self) -> "Poly":
        """Scale to integer coefficients with positive leading coefficient."""
        if not self.terms:
            return self
        p = self.scale(1 / self.rational_content())
        lead = p.terms[p.leading_monomial()]
        return -p if lead < 0 else p

    def leading_monomial(self) -> Monomial:
        return max(self.terms, key=_lex_key)

    def subs(self, mapping: Mapping[Expr, "Poly"]) -> "Poly":
        """Replace atoms (non-negative exponents only) by polynomials."""
        out = Poly()
        cache: dict[tuple[Expr, int], Poly] = {}
        for m, c in self.terms.items():
            term = Poly.const(c)
            rest = []
            for a, n in m:
                if a in mapping:
                    if n < 0:
                        raise ValueError("cannot substitute into a negative power")
                    key = (a, n)
                    if key not in cache:
                        cache[key] = mapping[a] ** n
                    term = term * cache[key]
                else:
                    rest.append((a, n))
            if rest:
                term = term * Poly({tuple(rest): Fraction(1)})
            out += term
        return out

    def to_expr(self) -> Expr:
        terms = []
        for m, c in self.terms.items():
            terms.append(mul(Num(c), *[power(a, n) for a, n in m]))
        return add(*terms)

    def __repr__(self):
        return f"Poly({self.to_expr()})"


def _lex_key(m: Monomial):
    # total degree first, then atom keys; deterministic
    return (sum(n for _, n in m), tuple((a.key, n) for a, n in m))


# --- conversion -------------------------------------------------------------


def to_poly(e: Expr) -> Poly:
    """Fully distribute ``e``; sums under negative powers become atoms."""
    if isinstance(e, Num):
        return Poly.const(e.value)
    if isinstance(e, (Sym, Deriv)):
        return Poly.atom(e)
    if isinstance(e, Func):
        return Poly.atom(func(e.name, *[expand_normalize(a) for a in e.fargs]))
    if isinstance(e, Add):
        out = Poly()
        for t in e.terms:
            out += to_poly(t)
        return out
    if isinstance(e, Mul):
        out = Poly.const(e.coeff)
        for f in e.factors:
            out = out * to_poly(f)
        return out
    if isinstance(e, Pow):
        base = to_poly(e.base)
        if e.exp > 0:
            return base ** e.exp
        return _inverse(base) ** (-e.exp)
    raise TypeError(type(e))


def _inverse(p: Poly) -> Poly:
    if p.is_zero():
        raise SymbolicError("division by zero")
    if len(p.terms) == 1:
        (m, c), = p.terms.items()
        return Poly({tuple((a, -n) for a, n in m): 1 / c})
    # a genuine sum stays an opaque atom under the negative power
    return Poly.atom(p.to_expr(), -1)


def expand_normalize(e: Expr) -> Expr:
    """Fully distributed sum-of-products normal form (idempotent)."""
    return to_poly(e).to_expr()


class NonPolynomialError(ValueError):
    pass


def collect_powers(e: Expr, kernel: Expr | str) -> dict[int, Expr]:
    """Coefficients of the Laurent polynomial ``e`` in ``kernel``, keyed by degree."""
    if isinstance(kernel, str):
        kernel = Sym(kernel)
    p = to_poly(e)
    for a in p.atoms():
        if a != kernel and a.has(kernel):
            raise NonPolynomialError(f"{kernel} occurs inside {a}")
    grouped = p.coeffs_in(kernel)
    return {d: grouped[d].to_expr() for d in sorted(grouped)}


# --- rational functions -----------------------------------------------------


def together(e: Expr) -> tuple[Poly, Poly]:
    """Return ``(num, den)`` polynomials with non-negative exponents, e == num/den.

    No gcd cancellation is attempted; denominators that are structurally equal
    are merged so that ordinary sums do not blow up.
    """
    if isinstance(e, Num):
        return Poly.const(e.value), Poly.const(1)
    if isinstance(e, (Sym, Deriv)):
        return Poly.atom(e), Poly.const(1)
    if isinstance(e, Func):
        return Poly.atom(func(e.name, *[expand_normalize(a) for a in e.fargs])), Poly.const(1)
    if isinstance(e, Add):
        groups: dict[Poly, Poly] = {}
        for t in e.terms:
            n, d = together(t)
            groups[d] = groups.get(d, Poly()) + n
        num, den = Poly(), Poly.const(1)
        for d, n in groups.items():
            if n.is_zero():
                continue
            if den == d:
                num = num + n
            elif d.is_const():
                num = num + (n * den).scale(1 / d.const_value())
            else:
                num = num * d + n * den
                den = den * d
        return num, den
    if isinstance(e, Mul):
        num, den = Poly.const(e.coeff), Poly.const(1)
        for f in e.factors:
            n, d = together(f)
            num, den = num * n, den * d
        return num, den
    if isinstance(e, Pow):
        n, d = together(e.base)
        k = abs(e.exp)
        if e.exp < 0:
            if n.is_zero():
                raise SymbolicError("division by zero")
            n, d = d, n
        return n**k, d**k
    raise TypeError(type(e))


def is_sqrt_atom(a: Expr) -> bool:
    return isinstance(a, Func) and a.name == "sqrt"


def reduce_radicals(p: Poly, sign_symbols: Iterable[str] = ()) -> Poly:
    """Apply (sqrt X)^2 -> X and s^2 -> 1 for sign symbols until stable."""
    signs = {Sym(s) for s in sign_symbols}
    for _ in range(64):
        changed = False
        out = Poly()
        for m, c in p.terms.items():
            keep = []
            extra = Poly.const(c)
            for a, n in m:
                if n >= 2 and a in signs:
                    n %= 2
                    changed = True
                elif n >= 2 and is_sqrt_atom(a):
                    extra = extra * to_poly(a.fargs[0]) ** (n // 2)
                    n %= 2
                    changed = True
                if n:
                    keep.append((a, n))
            out += extra * Poly({tuple(keep): Fraction(1)})
        p = out
        if not changed:
            return p
    return p


def divide_exact(a: Poly, b: Poly) -> Poly | None:
    """Exact multivariate division a / b, or None when b does not divide a."""
    if b.is_zero():
        raise SymbolicError("division by zero")
    if a.is_zero():
        return Poly()
    order = sorted(a.atoms() | b.atoms(), key=lambda x: x.key)

    def grlex(m):
        d = dict(m)
        return (sum(d.values()), tuple(d.get(x, 0) for x in order))

    lb = max(b.terms, key=grlex)
    cb = b.terms[lb]
    q = Poly()
    r = a.copy()
    lb_d = dict(lb)
    for _ in range(100000):
        if r.is_zero():
            return q
        lr = max(r.terms, key=grlex)
        lr_d = dict(lr)
        # the quotient monomial must have non-negative exponents
        qm = {}
        for atom, n in lr_d.items():
            qm[atom] = n - lb_d.get(atom, 0)
        for atom, n in lb_d.items():
            if atom not in lr_d:
                qm[atom] = -n
        if any(v < 0 for v in qm.values()):
            return None
        mono = tuple(sorted(((x, v) for x, v in qm.items() if v), key=lambda an: an[0].key))
        t = Poly({mono: r.terms[lr] / cb})
        q = q + t
        r = r - t * b
    return None
