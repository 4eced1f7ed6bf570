import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracwave.fracderiv import (
    QuadratureError,
    QuadratureSettings,
    TransformParams,
    gamma_fn,
    mrl_power_rule,
    mrl_quadrature,
    wave_coordinate,
)


@given(st.floats(0.01, 30.0))
@settings(max_examples=200)
def test_gamma_matches_math(x):
    assert gamma_fn(x) == pytest.approx(math.gamma(x), rel=1e-13)


@given(st.floats(30.0, 170.0))
@settings(max_examples=100)
def test_gamma_large_arguments(x):
    # the power split loses a few ulps near the overflow edge
    assert gamma_fn(x) == pytest.approx(math.gamma(x), rel=1e-11)


@pytest.mark.parametrize("x", [0.1, 0.5, 1.5, 7.3])
def test_gamma_recurrence(x):
    assert gamma_fn(x + 1) == pytest.approx(x * gamma_fn(x), rel=1e-12)


@given(st.floats(0.1, 3.0), st.floats(0.1, 4.0))
def test_power_rule_classical_limit(g, z):
    assert mrl_power_rule(1.0, g, z) == pytest.approx(g * z ** (g - 1), rel=1e-12)


@given(st.floats(-20.0, 0.49).filter(lambda v: abs(v - round(v)) > 1e-6))
@settings(max_examples=200)
def test_gamma_reflection(x):
    assert gamma_fn(x) == pytest.approx(math.gamma(x), rel=1e-12)


def test_gamma_poles_and_values():
    assert abs(gamma_fn(1.5) - 0.8862269254527580) < 1e-12
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma_fn(5) == pytest.approx(24.0, rel=1e-14)
    for bad in (0, -1, -7):
        with pytest.raises(ValueError):
            gamma_fn(bad)


def test_power_rule():
    assert mrl_power_rule(0.5, 1, 1) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-14)
    # alpha = 1 is the ordinary derivative
    assert mrl_power_rule(1.0, 3, 2.0) == pytest.approx(12.0, rel=1e-13)
    with pytest.raises(ValueError):
        mrl_power_rule(0.5, 0, 1)
    with pytest.raises(ValueError):
        mrl_power_rule(0.5, 1, -1)
    with pytest.raises(ValueError):
        mrl_power_rule(0.75, 0.5, 0)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("gamma", [1, 2, 3])
@pytest.mark.parametrize("z", [0.5, 1.0, 2.0])
def test_quadrature_grid(alpha, gamma, z):
    q = mrl_quadrature(lambda s: s**gamma, alpha, z)
    assert q == pytest.approx(mrl_power_rule(alpha, gamma, z), rel=1e-4)


def _mrl_oracle(f, alpha, z):
    mpmath.mp.dps = 30
    f0 = f(mpmath.mpf(0))

    def J(zz):
        return mpmath.quad(lambda s: (zz - s) ** (-alpha) * (f(s) - f0), [0, zz])

    return float(mpmath.diff(J, z) / mpmath.gamma(1 - alpha))


@pytest.mark.parametrize("alpha", [0.3, 0.6])
def test_quadrature_vs_mpmath(alpha):
    got = mrl_quadrature(np.exp, alpha, 1.3)
    assert got == pytest.approx(_mrl_oracle(mpmath.exp, alpha, 1.3), rel=1e-6)
    got = mrl_quadrature(np.tanh, alpha, 0.8)
    assert got == pytest.approx(_mrl_oracle(mpmath.tanh, alpha, 0.8), rel=1e-6)


def test_quadrature_accepts_scalar_only_callables():
    got = mrl_quadrature(lambda s: math.exp(s), 0.5, 1.0)
    assert got == pytest.approx(mrl_quadrature(np.exp, 0.5, 1.0), rel=1e-12)


def test_quadrature_errors():
    with pytest.raises(ValueError):
        mrl_quadrature(np.exp, 1.0, 1.0)
    with pytest.raises(ValueError):
        mrl_quadrature(np.exp, 0.5, 0.0)
    with pytest.raises(ValueError):
        QuadratureSettings(panels=4)
    with pytest.raises(ValueError):
        QuadratureSettings(rel_tol=0)
    with pytest.raises(QuadratureError):
        mrl_quadrature(np.exp, 0.5, 1.0, QuadratureSettings(max_refinements=1, rel_tol=1e-300))


def test_settings_from_dict():
    s = QuadratureSettings.from_dict({"panels": 32, "ignored": 1})
    assert s.panels == 32 and s.rel_tol == QuadratureSettings().rel_tol


def test_wave_coordinate():
    tp = TransformParams(k=2.0, c=3.0)
    assert wave_coordinate(1.0, 1.0, tp) == pytest.approx(2.0 - 3.0)
    tp = TransformParams(k=1.0, c=1.0, alpha=0.5, beta=0.5, sign=1)
    g = math.gamma(1.5)
    assert wave_coordinate(4.0, 9.0, tp) == pytest.approx(2 / g + 3 / g)
    tp1 = TransformParams(k=1.0, c=1.0, alpha=0.5, beta=1.0, sign=1)
    assert wave_coordinate(0.0, 1.0, tp1) == pytest.approx(1.1283791671, abs=1e-10)
    xi = wave_coordinate(np.array([0.0, 1.0]), np.array([0.0, 0.0]), tp)
    assert xi.shape == (2,)
    with pytest.raises(ValueError):
        wave_coordinate(-1.0, 1.0, tp)
    with pytest.raises(ValueError):
        wave_coordinate(1.0, -1.0, tp)


@pytest.mark.parametrize(
    "kw", [dict(alpha=0.0), dict(alpha=1.5), dict(beta=0.0), dict(k=0.0), dict(sign=2)]
)
def test_transform_params_validation(kw):
    base = dict(k=1.0, c=1.0)
    base.update(kw)
    with pytest.raises(ValueError):
        TransformParams(**base)
