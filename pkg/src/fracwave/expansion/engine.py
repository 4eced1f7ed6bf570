"""Balancing, ansatz construction, reduction to a polynomial in E = exp(-Phi),
coefficient extraction and parameter-set verification."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from ..symexpr import (
    Deriv,
    DomainError,
    Expr,
    Func,
    Num,
    Poly,
    Sym,
    add,
    eval_numeric,
    format_expr,
    mul,
    parse,
    power,
    reduce_radicals,
    replace,
    substitute,
    to_poly,
    together,
)
from ..symexpr.poly import is_sqrt_atom
from .equations import EquationSpec

DERIVED = "derived-by-solver"
PRINTED = "printed-in-paper"


class BalanceError(ValueError):
    pass


class ReductionError(ValueError):
    pass


# --- balancing --------------------------------------------------------------


def _term_degrees(spec: EquationSpec) -> list[set[tuple[int, int]]]:
    """Per ODE, the set of (a, b) with term degree a*N + b."""
    fns = set(spec.functions)
    out = []
    for ode in spec.odes:
        classes = set()
        for mono in to_poly(ode).terms:
            a = b = 0
            for atom, n in mono:
                if n < 0 and atom.free_symbols & fns:
                    raise BalanceError("negative powers of the unknown are not supported")
                if isinstance(atom, Sym) and atom.name in fns:
                    a += n
                elif isinstance(atom, Deriv) and atom.func in fns:
                    a += n
                    b += n * atom.order
                elif atom.free_symbols & fns:
                    raise BalanceError(f"term {atom} is not a power of an unknown or its derivative")
            if a:
                classes.add((a, b))
        out.append(classes)
    return out


def balance_degree(spec: EquationSpec) -> int:
    """Ansatz degree N from equating the two dominant term degrees.

    deg U = N, deg U^(m) = N + m, degrees add over products.  All ODEs of a
    system share one N.
    """
    found: set[int] = set()
    for classes in _term_degrees(spec):
        cls = sorted(classes)
        for i, (a1, b1) in enumerate(cls):
            for a2, b2 in cls[i + 1 :]:
                if a1 == a2:
                    continue
                n = Fraction(b2 - b1, a1 - a2)
                if n.denominator != 1 or n < 1:
                    continue
                top = max(a * n + b for a, b in cls)
                if a1 * n + b1 == top and a2 * n + b2 == top:
                    found.add(int(n))
    if not found:
        raise BalanceError(f"{spec.name}: no positive integer balance")
    if len(found) > 1:
        raise BalanceError(f"{spec.name}: ambiguous balance, candidates {sorted(found)}")
    return found.pop()


# --- ansatz -----------------------------------------------------------------


@dataclass(frozen=True)
class Ansatz:
    N: int
    prefix: str
    coefficients: tuple[str, ...]
    expr: Expr
    kernel: str = "E"

    @property
    def leading(self) -> str:
        return self.coefficients[-1]


def build_ansatz(N: int, prefix: str = "A", kernel: str = "E") -> Ansatz:
    """A0 + A1*E + ... + AN*E^N."""
    if int(N) != N or N < 1:
        raise ValueError("ansatz degree must be a positive integer")
    names = tuple(f"{prefix}{i}" for i in range(N + 1))
    E = Sym(kernel)
    expr = add(*[mul(Sym(nm), power(E, i)) for i, nm in enumerate(names)])
    return Ansatz(N, prefix, names, expr, kernel)


def spec_ansatz(spec: EquationSpec, N: int | None = None) -> dict[str, Ansatz]:
    """One ansatz per unknown function, using the registered prefixes."""
    if N is None:
        N = balance_degree(spec)
    return {f: build_ansatz(N, pre, spec.kernel) for f, pre in zip(spec.functions, spec.prefixes)}


# --- derivation rule --------------------------------------------------------


def _kernel_pow(K: Sym, n: int) -> Poly:
    return Poly.const(1) if n == 0 else Poly.atom(K, n)


def derive_kernel_poly(P: Poly, kernel: str = "E", aux=("p", "q", "r")) -> Poly:
    K = Sym(kernel)
    p, q, r = (Sym(a) for a in aux)
    # E' = -(p E^2 + r E + q)
    rule = -(Poly.atom(p) * Poly.atom(K, 2) + Poly.atom(r) * Poly.atom(K) + Poly.atom(q))
    out = Poly()
    for d, coeff in P.coeffs_in(K).items():
        if d:
            out += (coeff * _kernel_pow(K, d - 1)).scale(d) * rule
    return out


def derive_kernel(e: Expr, kernel: str = "E") -> Expr:
    """d/dxi of a Laurent polynomial in E under E' = -(pE^2 + rE + q)."""
    return derive_kernel_poly(to_poly(e), kernel).to_expr()


# --- reduction --------------------------------------------------------------


def _ansatz_map(spec: EquationSpec, ansatz) -> dict[str, Ansatz]:
    if isinstance(ansatz, Ansatz):
        if len(spec.functions) != 1:
            raise ValueError(f"{spec.name} needs one ansatz per unknown function")
        return {spec.functions[0]: ansatz}
    return dict(ansatz)


def reduce_to_polynomial(spec: EquationSpec, ansatz) -> tuple[Expr, ...]:
    """Substitute the ansatz into each reduced ODE; one Laurent polynomial in E per ODE."""
    amap = _ansatz_map(spec, ansatz)
    polys = [to_poly(o) for o in spec.odes]
    need: dict[str, int] = {f: 0 for f in spec.functions}
    for P in polys:
        for atom in P.atoms():
            if isinstance(atom, Deriv):
                if atom.func not in need or atom.var != spec.var:
                    raise ReductionError(f"cannot reduce derivative {atom}")
                need[atom.func] = max(need[atom.func], atom.order)
            elif not isinstance(atom, Sym) and atom.free_symbols & set(spec.functions):
                raise ReductionError(f"unknown function inside {atom}")
    mapping: dict[Expr, Poly] = {}
    for f in spec.functions:
        cur = to_poly(amap[f].expr)
        mapping[Sym(f)] = cur
        for m in range(1, need[f] + 1):
            cur = derive_kernel_poly(cur, spec.kernel, spec.aux)
            mapping[Deriv(f, spec.var, m)] = cur
    return tuple(P.subs(mapping).to_expr() for P in polys)


# --- algebraic systems ------------------------------------------------------


@dataclass(frozen=True)
class AlgebraicSystem:
    equations: tuple[Expr, ...]
    unknowns: tuple[str, ...]
    free: tuple[str, ...]
    nonzero: tuple[str, ...] = ()
    labels: tuple[str, ...] = ()
    N: int = 1

    def strings(self) -> list[str]:
        return [format_expr(e) for e in self.equations]

    def specialize(self, fixed: Mapping[str, Expr]) -> "AlgebraicSystem":
        eqs = []
        labels = []
        for lab, e in zip(self.labels or [""] * len(self.equations), self.equations):
            s = to_poly(substitute(e, fixed)).to_expr()
            if s != Num(0):
                eqs.append(s)
                labels.append(lab)
        return AlgebraicSystem(
            tuple(eqs),
            self.unknowns,
            tuple(f for f in self.free if f not in fixed),
            tuple(n for n in self.nonzero if n not in fixed),
            tuple(labels),
            self.N,
        )


def extract_system(
    polys,
    unknowns: Sequence[str],
    free: Sequence[str] | None = None,
    nonzero: Sequence[str] = (),
    kernel: str = "E",
    names: Sequence[str] | None = None,
    N: int = 1,
) -> AlgebraicSystem:
    """One equation per non-zero coefficient, by ODE then ascending degree."""
    if isinstance(polys, Expr):
        polys = (polys,)
    K = Sym(kernel)
    eqs, labels = [], []
    for i, e in enumerate(polys):
        tag = names[i] if names else f"eq{i + 1}"
        P = to_poly(e)
        for atom in P.atoms():
            if atom != K and atom.has(K):
                raise ReductionError(f"{kernel} occurs inside {atom}")
        grouped = P.coeffs_in(K)
        for d in sorted(grouped):
            coeff = grouped[d]
            if coeff.is_zero():
                continue
            eqs.append(coeff.to_expr())
            labels.append(f"{tag}:{kernel}^{d}")
    syms = set()
    for e in eqs:
        syms |= e.free_symbols
    if free is None:
        free = sorted(syms - set(unknowns))
    return AlgebraicSystem(tuple(eqs), tuple(unknowns), tuple(free), tuple(nonzero), tuple(labels), N)


def derive_system(spec: EquationSpec) -> tuple[dict[str, Ansatz], AlgebraicSystem]:
    """Balance, build the ansatz, reduce and extract in one go."""
    N = balance_degree(spec)
    amap = spec_ansatz(spec, N)
    polys = reduce_to_polynomial(spec, amap)
    unknowns = []
    for a in amap.values():
        unknowns.extend(a.coefficients)
    order = [u for u in spec.unknowns if u in unknowns or u == "c"]
    order += [u for u in unknowns if u not in order and u not in spec.free]
    nonzero = tuple(spec.nonzero) + tuple(a.leading for a in amap.values())
    sys = extract_system(
        polys, order, free=spec.free, nonzero=nonzero, kernel=spec.kernel, names=spec.functions, N=N
    )
    return amap, sys


# --- parameter sets ---------------------------------------------------------


@dataclass(frozen=True)
class ParamSet:
    assignments: tuple[tuple[str, Expr], ...]
    side_conditions: tuple[Expr, ...] = ()
    provenance: str = DERIVED
    label: str = ""
    sign_symbols: tuple[str, ...] = ()

    def __post_init__(self):
        if self.provenance not in (DERIVED, PRINTED):
            raise ValueError(f"bad provenance {self.provenance!r}")
        targets = {n for n, _ in self.assignments}
        for n, v in self.assignments:
            if v.free_symbols & targets:
                raise ValueError(f"assignment for {n} is not back-substituted")

    @classmethod
    def from_strings(cls, values: Mapping[str, str], **kw) -> "ParamSet":
        return cls(tuple((k, parse(v)) for k, v in values.items()), **kw)

    def as_dict(self) -> dict[str, Expr]:
        return dict(self.assignments)

    def value(self, name: str) -> Expr:
        for n, v in self.assignments:
            if n == name:
                return v
        raise KeyError(name)

    def specialize(self, fixed: Mapping[str, Expr]) -> "ParamSet":
        vals = tuple((n, substitute(v, fixed)) for n, v in self.assignments)
        side = []
        for s in self.side_conditions:
            s2 = substitute(s, fixed)
            if s2 != Num(0):
                side.append(s2)
        used = set()
        for _, v in vals:
            used |= v.free_symbols
        signs = tuple(s for s in self.sign_symbols if s in used)
        return ParamSet(vals, tuple(side), self.provenance, self.label, signs)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "assignments": {n: format_expr(v) for n, v in self.assignments},
            "side_conditions": [f"{format_expr(s)} != 0" for s in self.side_conditions],
            "provenance": self.provenance,
            "sign_symbols": list(self.sign_symbols),
        }


@dataclass
class ParamVerification:
    verdict: str  # pass | fail | inconclusive
    equation_verdicts: list[str]  # zero | nonzero | inconclusive
    residuals: list[Expr]
    witnesses: list[dict | None] = field(default_factory=list)

    def to_json(self, labels: Sequence[str] = ()) -> dict:
        rows = []
        for i, (v, res) in enumerate(zip(self.equation_verdicts, self.residuals)):
            row = {"equation": labels[i] if i < len(labels) else str(i), "status": v}
            if v != "zero":
                row["residual"] = format_expr(res)
            w = self.witnesses[i] if i < len(self.witnesses) else None
            if w:
                row["witness"] = w
            rows.append(row)
        return {"verdict": self.verdict, "equations": rows}


def _sqrt_atoms(P: Poly) -> set[Expr]:
    out = set()
    for a in P.atoms():
        stack = [a]
        while stack:
            x = stack.pop()
            if is_sqrt_atom(x):
                out.add(x)
            stack.extend(x.args)
    return out


def residual_numerator(eq: Expr, ps: ParamSet) -> Poly:
    """Numerator of eq after substitution, with (sqrt X)^2 -> X and s^2 -> 1."""
    mapping = {Sym(n): v for n, v in ps.assignments}
    num, _ = together(replace(eq, mapping))
    return reduce_radicals(num, ps.sign_symbols)


def _numeric_witness(num: Poly, signs: Sequence[str], seed: int, tries: int = 200, need: int = 12):
    """Search for a parameter point where the residual is clearly non-zero."""
    rng = random.Random(seed)
    expr = num.to_expr()
    names = sorted(expr.free_symbols - set(signs))
    radicands = [a.fargs[0] for a in _sqrt_atoms(num)]
    good = 0
    for _ in range(tries):
        point = {n: Fraction(rng.randint(-30, 30) or 7, rng.randint(1, 10)) for n in names}
        try:
            if any(eval_numeric(rad, point) <= 0 for rad in radicands):
                continue
        except (DomainError, ZeroDivisionError):
            continue
        good += 1
        for sgn in ([1, -1] if signs else [1]):
            b = dict(point)
            for s in signs:
                b[s] = sgn
            try:
                val = eval_numeric(expr, b)
                scale = sum(
                    abs(eval_numeric(mul(Num(c), *[power(a, n) for a, n in m]), b))
                    for m, c in num.terms.items()
                )
            except (DomainError, ZeroDivisionError):
                continue
            if scale > 0 and abs(val) > 1e-8 * scale:
                return {k: str(v) for k, v in b.items()}
        if good >= need:
            break
    return None


def verify_param_set(sys: AlgebraicSystem, ps: ParamSet, seed: int = 0) -> ParamVerification:
    """Back-substitute ``ps`` into every equation of ``sys``.

    Residuals free of radicals are decided symbolically.  A residual that
    still carries a square root after the rewrite is probed numerically: a
    clearly non-zero sample proves failure, otherwise the verdict is
    inconclusive.
    """
    assigned = {n for n, _ in ps.assignments}
    missing = [u for u in sys.unknowns if u not in assigned]
    if missing:
        raise ValueError(f"parameter set does not assign {missing}")
    verdicts, residuals, witnesses = [], [], []
    for i, eq in enumerate(sys.equations):
        num = residual_numerator(eq, ps)
        if num.is_zero():
            verdicts.append("zero")
            residuals.append(Num(0))
            witnesses.append(None)
            continue
        residuals.append(_tidy_residual(num))
        if not _sqrt_atoms(num):
            verdicts.append("nonzero")
            witnesses.append(None)
            continue
        w = _numeric_witness(num, ps.sign_symbols, seed + i)
        verdicts.append("nonzero" if w else "inconclusive")
        witnesses.append(w)
    if all(v == "zero" for v in verdicts):
        verdict = "pass"
    elif any(v == "nonzero" for v in verdicts):
        verdict = "fail"
    else:
        verdict = "inconclusive"
    return ParamVerification(verdict, verdicts, residuals, witnesses)


def _tidy_residual(num: Poly) -> Expr:
    """Render a residual numerator as content * primitive part."""
    mono = num.monomial_content()
    rest = num.div_monomial(mono)
    g = rest.rational_content()
    prim = rest.scale(1 / g)
    lead = prim.terms[prim.leading_monomial()]
    if lead < 0:
        prim, g = -prim, -g
    factors = [power(a, n) for a, n in mono]
    return mul(Num(g), *factors, prim.to_expr())
