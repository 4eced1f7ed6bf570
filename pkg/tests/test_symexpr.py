import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from fracwave.symexpr import (
    Num,
    ParseError,
    Sym,
    SymbolicError,
    UnresolvedDerivativeError,
    compile_numeric,
    differentiate,
    eval_numeric,
    format_expr,
    normalize,
    parse,
    reduce_radicals,
    substitute,
    to_poly,
    together,
)

X = sp.Symbol("x")
_SP_LOCALS = {"ln": sp.log, "coth": sp.coth, "cot": sp.cot, "x": X, "y": sp.Symbol("y")}


def to_sympy(e):
    return sp.sympify(format_expr(e).replace("^", "**"), locals=_SP_LOCALS)


# smooth on the real line, so derivative checks need no domain guards
_leaf = st.one_of(
    st.just("x"),
    st.just("y"),
    st.integers(-5, 5).map(str),
    st.fractions(min_value=-3, max_value=3, max_denominator=5).map(lambda f: f"({f})"),
)


def _grow(children):
    return st.one_of(
        st.tuples(children, children).map(lambda p: f"({p[0]} + {p[1]})"),
        st.tuples(children, children).map(lambda p: f"({p[0]} - {p[1]})"),
        st.tuples(children, children).map(lambda p: f"({p[0]})*({p[1]})"),
        st.tuples(children, st.integers(0, 3)).map(lambda p: f"({p[0]})^{p[1]}"),
        children.map(lambda c: f"exp(({c})/7)"),
        children.map(lambda c: f"tanh({c})"),
        children.map(lambda c: f"sqrt(({c})^2 + 1)"),
    )


trees = st.recursive(_leaf, _grow, max_leaves=8)


@given(trees)
@settings(max_examples=150, deadline=None)
def test_format_parse_roundtrip(text):
    e = parse(text)
    assert parse(format_expr(e)) == e


@given(trees)
@settings(max_examples=100, deadline=None)
def test_normalize_idempotent(text):
    e = parse(text)
    assert normalize(normalize(e)) == normalize(e)


@given(trees, st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=100, deadline=None)
def test_derivative_matches_sympy(text, x, y):
    e = parse(text)
    ours = eval_numeric(differentiate(e, "x"), {"x": x, "y": y})
    ref = float(sp.diff(to_sympy(e), X).subs({X: x, sp.Symbol("y"): y}).evalf(30))
    assert ours == pytest.approx(ref, rel=1e-9, abs=1e-9)


@given(trees, st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=100, deadline=None)
def test_eval_matches_sympy(text, x, y):
    e = parse(text)
    ref = float(to_sympy(e).subs({X: x, sp.Symbol("y"): y}).evalf(30))
    assert eval_numeric(e, {"x": x, "y": y}) == pytest.approx(ref, rel=1e-10, abs=1e-10)


_polys = st.lists(
    st.tuples(st.integers(-4, 4), st.integers(0, 3), st.integers(0, 2)), min_size=1, max_size=4
).map(lambda ts: " + ".join(f"({c})*x^{i}*y^{j}" for c, i, j in ts))


@given(_polys, _polys)
@settings(max_examples=80, deadline=None)
def test_poly_product_matches_sympy_expand(a, b):
    prod = to_poly(parse(f"({a})*({b})")).to_expr()
    diff = sp.expand(to_sympy(prod) - sp.sympify(f"({a})*({b})".replace("^", "**")))
    assert diff == 0


def test_exact_rationals():
    assert parse("0.1 + 0.2") == Num(Fraction(3, 10))
    assert parse("1/3 + 1/6") == Num(Fraction(1, 2))
    assert parse("x**2") == parse("x^2")


def test_parse_error_offset():
    with pytest.raises(ParseError) as info:
        parse("2*^x")
    assert info.value.offset == 2
    assert "symbol" in info.value.expected


@pytest.mark.parametrize("text", ["", "(x + 1", "sin(x)", "x +* y", "2 3"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_division_by_zero():
    with pytest.raises(SymbolicError):
        parse("1/0")


def test_simplifications():
    assert format_expr(parse("x + x")) == "2*x"
    assert parse("x/x") == Num(1)
    assert parse("sqrt(4)") == Num(2)
    assert format_expr(substitute(parse("x + y"), {"y": parse("x")})) == "2*x"


def test_derivative_markers():
    e = parse("u^2")
    d = differentiate(e, "xi", functions={"u"})
    assert d == parse("2*u*D(u, xi, 1)")
    assert differentiate(d, "xi", functions={"u"}) == parse("2*D(u, xi, 1)^2 + 2*u*D(u, xi, 2)")
    with pytest.raises(UnresolvedDerivativeError):
        differentiate(parse("D(u, xi, 1)"), "xi")


def test_known_derivatives():
    cases = {
        "tanh(x)": "1 - tanh(x)^2",
        "coth(x)": "1 - coth(x)^2",
        "tan(x)": "1 + tan(x)^2",
        "cot(x)": "-1 - cot(x)^2",
        "ln(x)": "1/x",
        "exp(2*x)": "2*exp(2*x)",
    }
    for f, df in cases.items():
        got = to_poly(differentiate(parse(f), "x")) - to_poly(parse(df))
        assert got.is_zero(), f


def test_together_and_radicals():
    n, d = together(parse("1/x + 1/y"))
    assert (n - to_poly(parse("x + y"))).is_zero()
    assert (d - to_poly(parse("x*y"))).is_zero()
    p = to_poly(parse("sqrt(r^2 - 4*q)^2 - r^2"))
    assert (reduce_radicals(p) - to_poly(parse("-4*q"))).is_zero()
    p = to_poly(parse("pm^2 - 1"))
    assert reduce_radicals(p, ("pm",)).is_zero()


def test_compile_backends_agree():
    e = parse("tanh(x)*exp(-x^2) + sqrt(x^2 + 1)")
    xs = np.linspace(-2, 2, 11)
    f_np = compile_numeric(e, ["x"], "numpy")
    f_m = compile_numeric(e, ["x"], "math")
    assert np.allclose(f_np(xs), [f_m(x) for x in xs], rtol=1e-14)
    f_c = compile_numeric(parse("sqrt(x)"), ["x"], "complex")
    assert f_c(np.array([-4.0]))[0] == pytest.approx(2j)
    with pytest.raises(ValueError):
        compile_numeric(e, ["x"], "fortran")


def test_symbol_identity():
    assert Sym("x") == parse("x")
    assert hash(parse("x + 1")) == hash(parse("1 + x"))
    assert math.isclose(eval_numeric(parse("gamma(1/2)^2"), {}), math.pi)
