import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdspec.params import make_params
from qdspec.testfunctions import (
    BUILTIN,
    TestFunction,
    apply_H,
    evaluate,
    fourier,
    inner,
    l2_norm_sq,
    multiply_exp,
    shift,
)

small = st.floats(min_value=-1.5, max_value=1.5)
coeffs = st.lists(st.floats(min_value=-2, max_value=2), min_size=1, max_size=3)


@st.composite
def domain_elements(draw):
    n = draw(st.integers(min_value=1, max_value=2))
    out = TestFunction.zero()
    for _ in range(n):
        out = out + TestFunction.gaussian(draw(coeffs), c=complex(draw(small), draw(small)))
    return out


def test_shift_of_gaussian():
    a = 0.7
    g = shift(BUILTIN["gauss"], a)
    xs = np.linspace(-2, 2, 9)
    assert np.allclose(evaluate(g, xs), math.exp(-a * a) * np.exp(-xs * xs - 2 * a * xs), atol=1e-15)


@given(domain_elements(), st.complex_numbers(max_magnitude=1.5))
def test_shift_group(psi, a):
    back = shift(shift(psi, a), -a)
    xs = np.linspace(-2, 2, 7) + 0.3j
    assert np.allclose(evaluate(back, xs), evaluate(psi, xs), rtol=1e-12, atol=1e-12)
    assert np.allclose(evaluate(shift(psi, 0), xs), evaluate(psi, xs), rtol=0, atol=0)


def test_apply_H_at_zero(p1):
    val = evaluate(apply_H(BUILTIN["gauss"], p1), 0.0)
    assert abs(val - (2 * math.e + 1)) < 1e-13


def test_apply_H_term_count(p1):
    psi = TestFunction.gaussian((1.0,)) + TestFunction.gaussian((1.0,), c=0.5)
    assert apply_H(psi, p1, consolidate=False).n_terms == 6


@given(domain_elements(), domain_elements(), st.floats(min_value=0.5, max_value=1.6))
def test_apply_H_linear_and_pointwise(f, g, b):
    p = make_params(b)
    xs = np.linspace(-1.5, 1.5, 5)
    lhs = evaluate(apply_H(f + g, p), xs)
    rhs = evaluate(apply_H(f, p), xs) + evaluate(apply_H(g, p), xs)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)
    # the definition, evaluated directly at shifted complex points
    s = 2 * p.omega_prime
    direct = evaluate(f, xs + s) + evaluate(f, xs - s) + np.exp(2 * math.pi * b * xs) * evaluate(f, xs)
    assert np.allclose(evaluate(apply_H(f, p), xs), direct, rtol=1e-12, atol=1e-12)


def test_evaluate_at_i():
    assert abs(evaluate(BUILTIN["gauss"], 1j) - math.e) < 1e-15


def test_norm_of_gaussian():
    assert l2_norm_sq(BUILTIN["gauss"]) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-13)


def test_fourier_of_gaussian():
    f = fourier(BUILTIN["gauss"])
    ps = np.linspace(-1, 1, 7)
    assert np.allclose(evaluate(f, ps), math.sqrt(math.pi) * np.exp(-math.pi ** 2 * ps ** 2), atol=1e-15)


@given(domain_elements(), st.floats(min_value=-1.0, max_value=1.0))
def test_fourier_against_quadrature(psi, p):
    from qdspec.contour import integrate, line
    from qdspec.testfunctions import tail_bound_interval

    if not psi.terms:
        return
    lo, hi = tail_bound_interval(psi, 1e-20)
    direct = integrate(lambda x: evaluate(psi, x) * np.exp(-2j * math.pi * p * x), line(lo, hi)).value
    assert abs(evaluate(fourier(psi), p) - direct) < 1e-10 * max(1.0, abs(direct))


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_plancherel(name):
    psi = BUILTIN[name]
    assert l2_norm_sq(fourier(psi)) == pytest.approx(l2_norm_sq(psi), rel=1e-10)


def test_plancherel_mixed():
    psi = TestFunction.gaussian((0.5, -1.0, 0.3), c=0.4 + 0.2j)
    assert l2_norm_sq(fourier(psi)) == pytest.approx(l2_norm_sq(psi), rel=1e-10)


def test_inner_is_norm():
    psi = BUILTIN["onepx"]
    assert abs(inner(psi, psi) - l2_norm_sq(psi)) < 1e-13


def test_multiply_exp():
    psi = multiply_exp(BUILTIN["gauss"], 0.5)
    assert abs(evaluate(psi, 1.0) - math.exp(-0.5)) < 1e-15


def test_consolidation_merges():
    psi = BUILTIN["gauss"] + BUILTIN["gauss"]
    assert psi.n_terms == 1
    assert abs(evaluate(psi, 0.0) - 2) < 1e-15


def test_width_mismatch():
    with pytest.raises(ValueError):
        BUILTIN["gauss"] + TestFunction.gaussian((1.0,), alpha=2.0)


def test_zero_function():
    z = TestFunction.zero()
    assert l2_norm_sq(z) == 0.0
    assert inner(z, BUILTIN["gauss"]) == 0
    assert np.all(evaluate(fourier(z), [0.0, 1.0]) == 0)
