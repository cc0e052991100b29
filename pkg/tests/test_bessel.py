import cmath
import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from oracles import bessel_i, bessel_k, gamma_euler
from qdspec import bessel as cb
from qdspec.errors import AccuracyWarning, DomainError, SingularityError, UnderflowWarning
from qdspec.oracles import bessel_I_series, bessel_K_series
from qdspec.testfunctions import BUILTIN

GAMMA_POINTS = [0.5, 1.0, 3.7, 10.2, -0.5, -2.3, 0.1 + 2j, -1.5 + 0.7j, 2 - 5j, 0.3j]


@pytest.mark.parametrize("z", GAMMA_POINTS)
def test_lanczos_gamma(z):
    assert abs(cb.gamma_fn(z) - gamma_euler(z)) < 1e-13 * abs(gamma_euler(z))


def test_loggamma_large_argument():
    z = 40 + 60j
    with mp.workdps(30):
        ref = complex(mp.loggamma(z))
    assert abs(cb.loggamma(z)[0] - ref) < 1e-11


def test_series_oracle_matches_mpmath():
    # the package oracle is itself checked against mpmath
    assert abs(bessel_I_series(0.7, 0.3) - bessel_i(0.3, 0.7)) < 1e-15
    assert abs(bessel_K_series(0.0, 1.0) - bessel_k(1j, 1.0).real) < 1e-14


@pytest.mark.parametrize("x, k", [(0.0, 1.0), (-1.0, 0.5), (0.5, 2.0), (1.0, 0.3), (-2.5, 1.2)])
def test_K_against_series(x, k):
    ref = bessel_K_series(x, k)
    assert abs(cb.bessel_K(x, k) - ref) < 1e-10 * abs(ref)


@given(st.floats(min_value=-3, max_value=6), st.floats(min_value=0.1, max_value=4))
@example(2.5, 0.25)
@example(2.9, 0.25)
@example(2.99, 3.0)
def test_K_against_mpmath(x, k):
    # just below the large-argument switch K ~ e^{-e^x} is tiny; relative accuracy must hold
    ref = bessel_k(1j * k, math.exp(x)).real
    val = cb.bessel_K(x, k)
    # K oscillates for x < log k, so the scale is the envelope rather than the value
    scale = max(abs(ref), 1e-12 * math.exp(-math.pi * k / 2))
    assert abs(val - ref) < 1e-11 * scale


def test_K_decay():
    assert abs(cb.bessel_K(3.0, 1.0)) < math.exp(-math.exp(3.0)) * 10


def test_K_even_in_k():
    xs = np.linspace(-2, 2, 5)
    assert np.allclose(cb.bessel_K(xs, 1.0), cb.bessel_K(xs, -1.0), rtol=0, atol=1e-12)


def test_K_real_for_real_arguments():
    v = cb.bessel_K_nu(np.linspace(-1, 1, 3), 0.8j)
    assert np.max(np.abs(v.imag)) < 1e-14


def test_K_underflow():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        assert cb.bessel_K(8.0, 2.0) == 0.0
    assert any(issubclass(w.category, UnderflowWarning) for w in caught)


def test_K_zero_order_rejected():
    with pytest.raises(SingularityError):
        cb.bessel_K(0.0, 0.0)


def test_wronskian():
    nu = 0.3
    w = cb.wronskian_I(0.2, nu)
    assert abs(w - 2 * math.sin(math.pi * nu) / math.pi) < 1e-8


def test_I_quasi_periodicity():
    nu = 0.3
    lhs = cb.bessel_I(1j * math.pi, nu)
    rhs = cmath.exp(1j * math.pi * nu) * cb.bessel_I(0.0, nu)
    assert abs(lhs - rhs) < 1e-12


def test_I_against_series():
    ref = bessel_I_series(math.exp(-2), 0.5)
    assert abs(cb.bessel_I(-2.0, 0.5) - ref) < 1e-10 * abs(ref)


@given(st.floats(min_value=-2, max_value=1.5), st.floats(min_value=-1.8, max_value=1.8),
       st.floats(min_value=-1.5, max_value=1.5))
def test_I_against_mpmath(x, re, im):
    nu = complex(re, im)
    if abs(nu.imag) < 1e-3 and abs(nu.real - round(nu.real)) < 1e-3:
        return
    ref = bessel_i(nu, math.exp(x))
    assert abs(cb.bessel_I(x, nu) - ref) < 1e-9 * max(1.0, abs(ref))


def test_I_integer_order():
    with pytest.raises(DomainError):
        cb.bessel_I(0.0, 2.0)


@pytest.mark.parametrize("x, nu", [(0.0, 0.3), (1.0, 0.5j), (-3.0, 0.7)])
def test_k_to_i_relations(x, nu):
    assert cb.k_to_i_relation_check(x, nu) < 1e-8


def test_k_to_i_integer_order():
    with pytest.raises(DomainError):
        cb.k_to_i_relation_check(0.0, 1.0)


def test_spectral_point():
    pt = cb.ClassicalSpectralPoint(0.5)
    assert pt.nu == 0.5j and pt.lambda_tilde == pytest.approx(0.25)


def test_tilde_S():
    assert abs(abs(cb.tilde_S(0.7)) - 1) < 1e-12
    assert abs(cb.tilde_S(1e-4) + 1) < 1e-3
    k = 0.9
    assert abs(cb.tilde_M(-k) / cb.tilde_M(k) - cb.tilde_S(k)) < 1e-10
    with pytest.raises(SingularityError):
        cb.tilde_M(0.0)


def test_tilde_M_against_mpmath():
    k = 0.6
    with mp.workdps(25):
        ref = complex(mp.power(2, -1 - 1j * k) * mp.gamma(-1j * k))
    assert abs(cb.tilde_M(k) - ref) < 1e-13


@pytest.mark.parametrize("x, k", [(0.2, 0.7), (-1.0, 1.5), (1.0, 0.25)])
def test_jost_decomposition(x, k):
    assert cb.jost_decomposition_residual(x, k) < 1e-6


def test_jost_asymptotics():
    k, x = 0.8, -6.0
    assert abs(cb.tilde_jost(x, k) - cmath.exp(1j * k * x)) < 1e-4


@given(st.floats(min_value=-2, max_value=2), st.floats(min_value=0.2, max_value=3))
def test_ode_residual(x, k):
    assert cb.ode_residual(x, k) < 1e-5


def test_resolvent_homogeneous():
    assert cb.resolvent_homogeneous_residual(0.5, -0.3, 0.7 + 0.4j) < 1e-5
    assert cb.resolvent_homogeneous_residual(-0.5, 0.3, 0.3 + 1.2j) < 1e-5


def test_resolvent_symmetric_and_domain():
    k = 0.6 + 0.5j
    a, b = cb.tilde_resolvent(0.3, -0.4, k), cb.tilde_resolvent(-0.4, 0.3, k)
    assert abs(a - b) < 1e-14 * abs(a)
    with pytest.raises(DomainError):
        cb.tilde_resolvent(0.0, 1.0, 0.5)


def test_rho_tilde():
    assert cb.tilde_rho(0.0) == 0.0
    assert cb.tilde_rho(1.0) == pytest.approx(2 * math.sinh(math.pi) / math.pi ** 2)


def test_kl_forward_against_mpmath():
    k = 1.3
    with mp.workdps(20):
        ref = float(mp.quad(lambda x: mp.exp(-x * x) * mp.re(mp.besselk(1j * k, mp.exp(x))),
                            [-7, -3, 0, 2, 3.5]))
    assert abs(cb.kl_forward(BUILTIN["gauss"], [k]).values[0] - ref) < 1e-10


def test_kl_forward_linear():
    ks = [0.4, 2.0]
    f, g = BUILTIN["gauss"], BUILTIN["xgauss"]
    both = np.asarray(cb.kl_forward([f, g, f + g], ks).values)
    assert np.allclose(both[:, 0] + both[:, 1], both[:, 2], rtol=0, atol=1e-13)


def test_kl_truncation_warning():
    with pytest.warns(AccuracyWarning):
        s = cb.kl_samples(BUILTIN["gauss"], k_cap=2.0)
    assert s.meta["k_max"] == pytest.approx(2.0)


def test_kl_inverse_needs_weights():
    from qdspec.transform import SampledFunction

    with pytest.raises(ValueError):
        cb.kl_inverse(SampledFunction(np.array([1.0]), np.array([1.0])), [0.0])
