"""Triangular heuristic for the small N = 1 coefficient systems.

Repeatedly pick a pivot equation that is univariate of degree <= 2 in one
unknown, or linear in one unknown with a coefficient that is known to be
non-zero (or free of unknowns, which is then recorded as a side condition),
solve it, substitute the value everywhere and continue.  Quadratic roots
carry a sign symbol ``pm`` (+-1) or split into two branches when the
discriminant is a perfect square.  Every emitted set is verified by
back-substitution before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..symexpr import Expr, Num, Poly, Sym, func, mul, power, reduce_radicals
from ..symexpr.core import _rational_sqrt_split
from ..symexpr.poly import divide_exact, is_sqrt_atom, to_poly
from .engine import DERIVED, AlgebraicSystem, ParamSet, verify_param_set


class SolverStall(RuntimeError):
    """The heuristic cannot proceed; the system is left to verification only."""

    outcome = "verification-only"


@dataclass
class _State:
    eqs: list[Poly]
    remaining: list[str]
    values: dict[str, tuple[Poly, Poly]] = field(default_factory=dict)
    factors: list[Poly] = field(default_factory=list)
    divisors: list[Poly] = field(default_factory=list)
    signs: list[str] = field(default_factory=list)
    nonzero: set[str] = field(default_factory=set)

    def clone(self) -> "_State":
        return _State(
            [e.copy() for e in self.eqs],
            list(self.remaining),
            dict(self.values),
            list(self.factors),
            list(self.divisors),
            list(self.signs),
            set(self.nonzero),
        )


def _mono_poly(mono) -> Poly:
    return Poly({mono: Fraction(1)})


def _has_unknown(P: Poly, unknowns: set[Expr]) -> bool:
    return any(a in unknowns or any(u.name in a.free_symbols for u in unknowns) for a in P.atoms())


def _canon(P: Poly) -> Poly:
    return P.primitive() if not P.is_zero() else P


class _Solver:
    def __init__(self, sys: AlgebraicSystem):
        self.sys = sys
        self.nonzero_names = set(sys.nonzero)

    # -- helpers -------------------------------------------------------------

    def _nonzero_atoms(self, st: _State) -> set[Expr]:
        return {Sym(n) for n in self.nonzero_names | st.nonzero} | {Sym(s) for s in st.signs}

    def _safe(self, P: Poly, st: _State) -> bool:
        """True when P is a product of known non-zero atoms and factors."""
        if P.is_zero():
            return False
        ok = self._nonzero_atoms(st)
        mono = P.monomial_content()
        if any(a not in ok for a, _ in mono):
            return False
        P = P.div_monomial(mono)
        for f in st.factors:
            for _ in range(16):
                q = divide_exact(P, f)
                if q is None:
                    break
                P = q
        return P.is_const()

    def _strip(self, P: Poly, st: _State) -> Poly:
        P = reduce_radicals(P, st.signs)
        if P.is_zero():
            return P
        ok = self._nonzero_atoms(st)
        mono = tuple((a, n) for a, n in P.monomial_content() if a in ok)
        if mono:
            P = P.div_monomial(mono)
        for f in st.factors:
            for _ in range(16):
                q = divide_exact(P, f)
                if q is None:
                    break
                P = q
        return _canon(P)

    def _tidy(self, n: Poly, d: Poly, st: _State) -> tuple[Poly, Poly]:
        n = reduce_radicals(n, st.signs)
        d = reduce_radicals(d, st.signs)
        if n.is_zero():
            return Poly(), Poly.const(1)
        # rationalize a single square root in the denominator
        roots = [a for a in d.atoms() if is_sqrt_atom(a)]
        if len(roots) == 1 and d.degree(roots[0]) == 1:
            rho = roots[0]
            cs = d.coeffs_in(rho)
            conj = cs.get(0, Poly()) - cs.get(1, Poly()) * Poly.atom(rho)
            n = reduce_radicals(n * conj, st.signs)
            d = reduce_radicals(d * conj, st.signs)
        if d.is_const():
            return n.scale(1 / d.const_value()), Poly.const(1)
        # common monomial content
        nm, dm = dict(n.monomial_content()), dict(d.monomial_content())
        common = tuple(sorted(((a, min(e, dm[a])) for a, e in nm.items() if a in dm), key=lambda x: x[0].key))
        if common:
            n, d = n.div_monomial(common), d.div_monomial(common)
        for f in st.factors:
            for _ in range(16):
                qn, qd = divide_exact(n, f), divide_exact(d, f)
                if qn is None or qd is None:
                    break
                n, d = qn, qd
        # cofactor of d after removing known factors may divide n
        co = d
        for f in st.factors:
            for _ in range(16):
                qc = divide_exact(co, f)
                if qc is None:
                    break
                co = qc
        co = co.div_monomial(co.monomial_content())
        if not co.is_const() and co != d:
            qn = divide_exact(n, co)
            if qn is not None:
                n, d = qn, divide_exact(d, co)
        q = divide_exact(n, d)
        if q is not None:
            return q, Poly.const(1)
        g = d.rational_content()
        lead = d.terms[d.leading_monomial()]
        if lead < 0:
            g = -g
        return n.scale(1 / g), d.scale(1 / g)

    @staticmethod
    def _subs_num(P: Poly, X: Expr, n: Poly, d: Poly) -> Poly:
        cs = P.coeffs_in(X)
        D = max(cs)
        out = Poly()
        for i, c in cs.items():
            out += c * (n**i) * (d ** (D - i))
        return out

    def _subs_frac(self, num: Poly, den: Poly, X: Expr, n: Poly, d: Poly) -> tuple[Poly, Poly]:
        D = max(num.degree(X), den.degree(X))
        if D == 0:
            return num, den

        def h(P):
            out = Poly()
            for i, c in P.coeffs_in(X).items():
                out += c * (n**i) * (d ** (D - i))
            return out

        return h(num), h(den)

    # -- pivoting ------------------------------------------------------------

    def _pick(self, st: _State):
        unk = {Sym(u) for u in st.remaining}
        fallback = None
        # 0: univariate, linear with a safe coefficient or quadratic
        # 1: linear with a safe coefficient
        # 2: linear with an unknown-free coefficient (side condition)
        for prio in (0, 1, 2):
            for x in st.remaining:
                X = Sym(x)
                others = unk - {X}
                for i, P in enumerate(st.eqs):
                    deg = P.degree(X)
                    if deg == 0 or deg > 2 or P.min_degree(X) < 0:
                        continue
                    if any(a != X and a.has(X) for a in P.atoms()):
                        continue
                    cs = P.coeffs_in(X)
                    multi = _has_unknown(P, others)
                    if prio == 0 and not multi:
                        if deg == 2 or self._safe(cs[1], st):
                            return i, x, cs
                    elif prio == 1 and deg == 1 and self._safe(cs[1], st):
                        return i, x, cs
                    elif prio == 2 and deg == 1 and not _has_unknown(cs[1], unk):
                        # least new side-condition content wins
                        cost = self._unsafe_cost(cs[1], st)
                        if fallback is None or cost < fallback[0]:
                            fallback = (cost, (i, x, cs))
            if prio == 2 and fallback is not None:
                return fallback[1]
        return None

    def _unsafe_cost(self, a: Poly, st: _State) -> tuple[int, int]:
        mono = a.monomial_content()
        ok = self._nonzero_atoms(st)
        bad = sum(n for atom, n in mono if atom not in ok)
        rest = _canon(a.div_monomial(mono))
        known = rest.is_const() or rest in st.factors
        return bad + (0 if known else 1), len(rest.terms)

    def _assign(self, st: _State, x: str, n: Poly, d: Poly) -> _State | None:
        X = Sym(x)
        n, d = self._tidy(n, d, st)
        st.remaining.remove(x)
        vals = {}
        for u, (vn, vd) in st.values.items():
            vals[u] = self._tidy(*self._subs_frac(vn, vd, X, n, d), st)
        vals[x] = (n, d)
        st.values = vals
        unk = {Sym(u) for u in st.remaining}
        for u, (vn, _) in vals.items():
            if u in self.nonzero_names and not _has_unknown(vn, unk):
                # the value of a non-zero unknown is itself a known non-zero factor
                mono = vn.monomial_content()
                st.nonzero |= {a.name for a, _ in mono if isinstance(a, Sym)}
                rest = _canon(vn.div_monomial(mono))
                if len(rest.terms) > 1 and rest not in st.factors:
                    st.factors.append(rest)
        eqs = []
        for P in st.eqs:
            if P.degree(X):
                P = self._strip(self._subs_num(P, X, n, d), st)
            if P.is_zero():
                continue
            if not _has_unknown(P, {Sym(u) for u in st.remaining}):
                # a constraint on the free parameters: this branch is not generic
                return None
            eqs.append(P)
        st.eqs = eqs
        return st

    def _divide_by(self, st: _State, a: Poly) -> None:
        if self._safe(a, st):
            return
        st.divisors.append(a)
        f = _canon(a)
        if len(f.terms) > 1 and f not in st.factors:
            st.factors.append(f)

    def _step(self, st: _State) -> list[_State]:
        pick = self._pick(st)
        if pick is None:
            raise SolverStall(f"no pivot among {len(st.eqs)} equations in {st.remaining}")
        i, x, cs = pick
        st.eqs.pop(i)
        deg = max(cs)
        if deg == 1:
            a, b = cs[1], cs.get(0, Poly())
            self._divide_by(st, a)
            nxt = self._assign(st, x, -b, a)
            return [nxt] if nxt is not None else []
        a, b, c0 = cs[2], cs.get(1, Poly()), cs.get(0, Poly())
        if a.terms[a.leading_monomial()] < 0:
            a, b, c0 = -a, -b, -c0
        self._divide_by(st, a)
        disc = reduce_radicals(b * b - (a * c0).scale(4), st.signs)
        two_a = a.scale(2)
        if disc.is_zero():
            nxt = self._assign(st, x, -b, two_a)
            return [nxt] if nxt is not None else []
        mono = disc.monomial_content()
        half = tuple((at, e // 2) for at, e in mono if e // 2)
        rest = disc.div_monomial(tuple((at, 2 * e) for at, e in half))
        s, _ = _rational_sqrt_split(rest.rational_content())
        rest = rest.scale(1 / (s * s))
        root = _mono_poly(half).scale(s) if half else Poly.const(s)
        if rest.is_const() and rest.const_value() == 1:
            out = []
            for sgn in (1, -1):
                br = st.clone()
                nxt = self._assign(br, x, -b + root.scale(sgn), two_a)
                if nxt is not None:
                    out.append(nxt)
            return out
        name = "pm" if not st.signs else f"pm{len(st.signs) + 1}"
        st.signs.append(name)
        rad = func("sqrt", rest.to_expr())
        root = root * Poly.atom(rad) * Poly.atom(Sym(name))
        nxt = self._assign(st, x, -b + root, two_a)
        return [nxt] if nxt is not None else []

    # -- driver --------------------------------------------------------------

    def run(self) -> list[ParamSet]:
        st = _State([], list(self.sys.unknowns))
        for e in self.sys.equations:
            P = self._strip(to_poly(e), st)
            if not P.is_zero():
                st.eqs.append(P)
        frontier = [st]
        done: list[_State] = []
        for _ in range(64):
            if not frontier:
                break
            nxt = []
            for s in frontier:
                if not s.remaining or not s.eqs:
                    done.append(s)
                else:
                    nxt.extend(self._step(s))
            frontier = nxt
        sets = []
        for s in done:
            if s.remaining:
                raise SolverStall(f"unknowns {s.remaining} left undetermined")
            ps = self._to_param_set(s)
            if verify_param_set(self.sys, ps).verdict == "pass":
                sets.append(ps)
        if not sets:
            raise SolverStall("no consistent branch found")
        return sets

    def _to_param_set(self, st: _State) -> ParamSet:
        assigns = tuple((u, _render(*st.values[u])) for u in self.sys.unknowns)
        final = {Sym(u): st.values[u] for u in self.sys.unknowns}
        side: list[Expr] = []
        seen: set[Poly] = set()

        def note(P: Poly, den: Poly | None = None):
            n, d = P, den if den is not None else Poly.const(1)
            for X, (vn, vd) in final.items():
                n, d = self._subs_frac(n, d, X, vn, vd)
            n = reduce_radicals(n, st.signs)
            if n.is_zero():
                return
            mono = n.monomial_content()
            pieces = [Poly.atom(a) for a, _ in mono]
            rest = _canon(n.div_monomial(mono))
            for f in list(seen):
                while not f.is_const() and not rest.is_const():
                    q = divide_exact(rest, f)
                    if q is None:
                        break
                    rest = _canon(q)
            if not rest.is_const():
                pieces.append(rest)
            for piece in pieces:
                if piece in seen:
                    continue
                seen.add(piece)
                side.append(_render(piece, Poly.const(1)))

        for nm in self.sys.nonzero:
            note(to_poly(Sym(nm)))
        for dv in st.divisors:
            note(dv)
        return ParamSet(assigns, tuple(side), DERIVED, "derived", tuple(st.signs))


def _render(n: Poly, d: Poly) -> Expr:
    """content * monomial * (primitive sum) / denominator."""
    if n.is_zero():
        return Num(0)
    mono = n.monomial_content()
    rest = n.div_monomial(mono)
    g = rest.rational_content()
    prim = rest.scale(1 / g)
    if prim.terms[prim.leading_monomial()] < 0 and len(prim.terms) > 1:
        prim, g = -prim, -g
    parts = [Num(g)] + [power(a, e) for a, e in mono]
    if not (prim.is_const() and prim.const_value() == 1):
        parts.append(prim.to_expr() if len(prim.terms) > 1 else prim.to_expr())
    if not (d.is_const() and d.const_value() == 1):
        parts.append(power(d.to_expr(), -1))
    return mul(*parts)


def solve_triangular(sys: AlgebraicSystem) -> list[ParamSet]:
    """Solve an N = 1 system; raises :class:`SolverStall` outside that scope."""
    if sys.N > 1:
        raise SolverStall(f"N = {sys.N} is outside the triangular N = 1 scope; verification only")
    return _Solver(sys).run()
