import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracwave.catalog import (
    BRANCH_IDS,
    AuxParams,
    ConstraintError,
    aux_exp_neg_phi,
    branches_for,
    builtin_families,
    catalog_json,
    composition_degree,
    draw_aux_params,
    get_branch,
    get_family,
)
from fracwave.expansion import UnknownEquationError
from fracwave.symexpr import Num, compile_numeric, eval_numeric, parse, substitute, to_poly
from fracwave.verify import aux_ode_residual, default_samples

small = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def test_t3_closed_form():
    e = aux_exp_neg_phi("T3", AuxParams(2, 0, 0, 0))
    assert (to_poly(e) - to_poly(parse("1/(2*xi)"))).is_zero()


def test_t1a_example():
    params = AuxParams(1, 1, 3, 0)
    rep = aux_ode_residual("T1a", params, default_samples(100))
    assert rep.verdict == "pass" and rep.max_residual < 1e-9


@pytest.mark.parametrize(
    "branch,params",
    [
        ("T1a", AuxParams(1, 1, 1, 0)),
        ("T1b", AuxParams(1, 1, 3, 0)),
        ("T1c", AuxParams(1, 1, 1, 0)),
        ("T1d", AuxParams(1, 1, 1, 0)),
        ("T2tan", AuxParams(-1, 1, 0, 0)),
        ("T2tanh", AuxParams(1, 1, 0, 0)),
        ("T3", AuxParams(1, 0, 1, 0)),
    ],
)
def test_constraint_violations(branch, params):
    with pytest.raises(ConstraintError) as info:
        aux_exp_neg_phi(branch, params)
    assert branch in str(info.value)


def test_violation_names_the_failed_inequality():
    assert get_branch("T1a").violations(AuxParams(1, 1, 1, 0)) == ["r^2 - 4*q > 0"]


def test_unknown_branch():
    with pytest.raises(KeyError):
        get_branch("T9")


def test_aux_params_exact():
    a = AuxParams(0.1, 1, 0)
    assert a.p == Fraction(1, 10)
    assert a.to_json()["p"] == "1/10"


@pytest.mark.parametrize("branch", BRANCH_IDS)
def test_drawn_params_satisfy_branch(branch):
    rng = random.Random(3)
    for _ in range(20):
        params = draw_aux_params(branch, rng)
        assert get_branch(branch).violations(params) == []


def test_t1a_small_r_limit_is_coth():
    # with p = 1, q < 0 and r -> 0 the tanh-type Type-1 form tends to the coth form
    q = Fraction(-9, 4)
    xs = np.linspace(0.2, 2.0, 40)
    r = Fraction(1, 10**7)
    t1a = compile_numeric(aux_exp_neg_phi("T1a", AuxParams(1, q, r, 0)), ["xi"], "numpy")(xs)
    coth = compile_numeric(aux_exp_neg_phi("T2coth", AuxParams(1, q, 0, 0)), ["xi"], "numpy")(xs)
    tanh = compile_numeric(aux_exp_neg_phi("T2tanh", AuxParams(1, q, 0, 0)), ["xi"], "numpy")(xs)
    assert np.max(np.abs(t1a - coth)) < 1e-6
    assert np.max(np.abs(t1a - tanh)) > 1e-2


def _covered(p, q, r):
    if p == 1:
        return True
    if r == 0 and (q == 0 or p * q < 0 or (p > 0 and q > 0)):
        return True
    return False


@given(small, small, small)
@settings(max_examples=300)
def test_branch_selection_completeness(p, q, r):
    if p == 0:
        with pytest.raises(ConstraintError):
            branches_for(p, q, r)
        return
    got = branches_for(p, q, r)
    aux = AuxParams(p, q, r)
    assert got == [b for b in BRANCH_IDS if not get_branch(b).violations(aux)]
    assert bool(got) == _covered(p, q, r)


def test_branches_for_examples():
    assert branches_for(1, 1, 3) == ["T1a"]
    assert set(branches_for(-1, 1, 0)) == {"T2tanh", "T2coth"}
    assert branches_for(2, 0, 0) == ["T3"]


def test_family_counts():
    burgers = builtin_families("burgers")
    assert len(burgers) == 9
    assert {f.branch for f in burgers} == set(BRANCH_IDS)
    sk = [f for f in builtin_families("sawada-kotera") if f.family_id.startswith("U1_")]
    assert len(sk) == 8
    assert len(builtin_families("coupled-burgers")) == 9
    assert len(builtin_families("foam-drainage")) == 9
    with pytest.raises(UnknownEquationError):
        builtin_families("kdv")


@pytest.mark.parametrize("eq", ["burgers", "coupled-burgers", "foam-drainage", "sawada-kotera"])
def test_composition_degree_matches_balance(eq):
    n = 2 if eq == "sawada-kotera" else 1
    for fam in builtin_families(eq):
        for name, _ in fam.fields:
            assert composition_degree(fam, name) == n


def test_composed_fields_are_kernel_free():
    for fam in builtin_families("coupled-burgers"):
        for _, e in fam.fields:
            assert not ({"E", "Phi"} & e.free_symbols)
        for e in fam.fields_xt().values():
            assert e.free_symbols <= {"x", "t", "alpha", "beta", "k", "L", "M", "B0", "p", "q", "r", "xi0", "A", "pm", "c"}


def _eval(fam, name, vals, xs):
    e = substitute(dict(fam.fields)[name], vals)
    return compile_numeric(e, ["xi"], "numpy")(xs)


def test_burgers_tanh_shape():
    fam = get_family("burgers", "T2tanh")
    xs = np.linspace(-2, 2, 9)
    for pm in (1, -1):
        vals = {"A": 2, "k": Fraction(3, 2), "p": -1, "q": 1, "r": 0, "xi0": 0, "pm": pm}
        # p < 0 gives p*sign(p) = |p|, so the tanh term enters with a plus sign
        want = 2 * 1.5 * (pm + np.tanh(xs))
        assert np.allclose(_eval(fam, "w", vals, xs), want, rtol=1e-13)


def test_coupled_tanh_prefactors():
    fam = get_family("coupled-burgers", "T2tanh")
    xs = np.linspace(-2, 2, 9)
    L, M, B0 = 3, 5, Fraction(1, 2)
    vals = {"L": L, "M": M, "B0": B0, "p": -1, "q": 4, "r": 0, "xi0": 0}
    th = -2 * np.tanh(2 * xs)
    assert np.allclose(_eval(fam, "u", vals, xs), float(B0) * (L - 1) / (M - 1) + (L - 1) / (L * M - 1) * th)
    assert np.allclose(_eval(fam, "v", vals, xs), float(B0) + (M - 1) / (L * M - 1) * th)


def test_sk_set1_tanh_shape():
    fam = get_family("sawada-kotera", "U1_7")
    xs = np.linspace(-2, 2, 9)
    vals = {"k": 1, "p": -1, "q": 1, "r": 0, "xi0": 0}
    pq = -1.0
    want = -6 * pq + 6 * pq * np.tanh(xs) ** 2
    assert np.allclose(_eval(fam, "w", vals, xs), want)


def test_family_lookup_by_branch_and_id():
    assert get_family("burgers", "T3").family_id == "u1_9"
    assert get_family("coupled-burgers", "u7/v7").branch == "T2tanh"
    with pytest.raises(KeyError):
        get_family("burgers", "nope")


def test_family_check_reports_constraint():
    fam = get_family("burgers", "T2tanh")
    with pytest.raises(ConstraintError):
        fam.check({"A": 1, "k": 1, "p": 1, "q": 1, "r": 0, "xi0": 0, "pm": 1})
    with pytest.raises(ConstraintError):
        fam.check({"A": 0, "k": 1, "p": -1, "q": 1, "r": 0, "xi0": 0, "pm": 1})


def test_catalog_json_shape():
    rows = catalog_json()
    assert len(rows) == 37
    for row in rows:
        assert {"equation", "family_id", "branch", "constraints", "u", "speed"} <= set(row)
    assert all("v" in r for r in rows if r["equation"] == "coupled-burgers")
    assert catalog_json(["foam-drainage"]) == [r for r in rows if r["equation"] == "foam-drainage"]


def test_speed_numeric():
    fam = get_family("foam-drainage", "V7")
    c = eval_numeric(substitute(fam.speed, {"k": 2, "p": -1, "q": 1, "r": 0}), {})
    assert math.isclose(c, 8.0)
    assert substitute(fam.speed, {"k": 0, "p": -1, "q": 1, "r": 0}) == Num(0)
