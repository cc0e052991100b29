import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdspec.errors import DomainError, SingularityError
from qdspec.params import make_params
from qdspec.testfunctions import TestFunction
from qdspec.transform import (
    SampledFunction,
    diagonalization_gap,
    forward,
    inverse,
    parseval_gap,
    rho,
    rho_from_M,
    round_trip_error,
    scattering_S,
    scattering_limit_trend,
    spectral_samples,
)
from qdspec.wavefunctions import WaveContext

GAUSS = TestFunction.gaussian()
XGAUSS = TestFunction.gaussian(poly=(0.0, 1.0))
ONEPX = TestFunction.gaussian(poly=(1.0, 1.0))
XPROBE = np.array([-1.0, 0.0, 1.0])


@pytest.fixture(scope="module")
def samples(ctx1):
    return spectral_samples([GAUSS, XGAUSS], ctx1, xprobe=XPROBE)


def test_rho_value(p1):
    assert rho(0.5, p1) == pytest.approx(4 * math.sinh(math.pi) ** 2, rel=1e-14)
    assert rho(0.5, p1) == pytest.approx(533.49, abs=5e-3)


def test_rho_from_M():
    ctx = WaveContext(make_params(1.2))
    assert abs(rho(0.3, ctx.params) * (1 / rho_from_M(0.3, ctx)) - 1) < 1e-8


def test_rho_small_k(p1):
    assert abs(rho(1e-3, p1) / (16 * math.pi ** 2 * 1e-6) - 1) < 1e-3


def test_rho_domain(p1):
    with pytest.raises(DomainError):
        rho(0.0, p1)


@given(st.floats(min_value=1e-3, max_value=3), st.floats(min_value=0.5, max_value=2))
def test_rho_positive_and_dual_symmetric(k, b):
    assert rho(k, make_params(b)) > 0
    assert rho(k, make_params(b)) == pytest.approx(rho(k, make_params(1 / b)), rel=1e-12)


def test_forward_decay(ctx1):
    v = forward(GAUSS, [0.2, 2.0], ctx1).values
    assert abs(v[1]) < 1e-3 * abs(v[0])


def test_forward_linear_and_real(ctx1):
    ks = [0.15, 0.4, 0.9]
    a = forward(GAUSS, ks, ctx1).values
    b = forward(XGAUSS, ks, ctx1).values
    s = forward(GAUSS + XGAUSS, ks, ctx1).values
    assert np.max(np.abs(s - a - b)) < 1e-12
    assert np.max(np.abs(a.imag)) < 1e-10 * np.max(np.abs(a))


def test_forward_methods_agree(ctx1):
    ks = [0.2, 0.6]
    x = forward(ONEPX, ks, ctx1).values
    f = forward(ONEPX, ks, ctx1, method="fourier").values
    assert np.max(np.abs(x - f)) < 1e-8 * np.max(np.abs(x))


def test_inverse_zero(ctx1):
    c = SampledFunction(np.array([0.2, 0.4]), np.zeros(2), np.array([0.1, 0.1]))
    assert np.all(inverse(c, [0.0, 1.0], ctx1).values == 0)


def test_inverse_needs_weights(ctx1):
    with pytest.raises(ValueError):
        inverse(SampledFunction(np.array([0.2]), np.zeros(1)), [0.0], ctx1)


def test_parseval(samples, ctx1):
    gaps = parseval_gap([GAUSS, XGAUSS], ctx1, samples=samples)
    assert max(gaps) < 1e-4


def test_parseval_scaling(samples, ctx1):
    v = np.asarray(samples.values)[:, 0]
    s1 = SampledFunction(samples.grid, v, samples.weights)
    s2 = SampledFunction(samples.grid, 2 * v, samples.weights)
    g1 = parseval_gap(GAUSS, ctx1, samples=s1)
    g2 = parseval_gap(2 * GAUSS, ctx1, samples=s2)
    assert g2 == pytest.approx(g1, rel=1e-9, abs=1e-15)


def test_round_trip(samples, ctx1):
    errs = round_trip_error([GAUSS, XGAUSS], XPROBE, ctx1, samples=samples)
    assert max(errs) < 1e-4


def test_samples_stop_early(samples):
    assert samples.meta["k_max"] < 8.0
    assert samples.meta["tail_share"] < 1e-7


def test_parseval_other_b():
    ctx = WaveContext(make_params(0.8))
    assert parseval_gap(ONEPX, ctx) < 1e-4


def test_diagonalization(ctx1):
    assert diagonalization_gap(GAUSS, [0.1, 0.3, 0.5], ctx1) < 1e-4
    assert diagonalization_gap(ONEPX, [0.1, 0.3, 0.5], ctx1) < 1e-4


def test_diagonalization_near_exclusion(ctx1):
    assert diagonalization_gap(GAUSS, [0.05], ctx1) < 1e-3


def test_S_unitary(ctx1):
    assert abs(abs(scattering_S(0.4, ctx1)) - 1) < 1e-10
    assert abs(scattering_S(0.3, ctx1) * scattering_S(-0.3, ctx1) - 1) < 1e-10


def test_S_two_forms(ctx1):
    for k in (0.1, 0.7):
        a = scattering_S(k, ctx1)
        assert abs(a - scattering_S(k, ctx1, form="gamma")) < 1e-10


def test_S_limit(ctx1):
    trend = scattering_limit_trend([1e-2, 5e-3], ctx1)
    assert trend[1] < trend[0] < 0.05


def test_S_origin(ctx1):
    with pytest.raises(SingularityError):
        scattering_S(0.0, ctx1)
