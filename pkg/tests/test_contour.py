import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdspec.contour import (
    LineSegment,
    ContourSpec,
    QuadConfig,
    circle,
    integrate,
    kashaev_L,
    line,
    shifted_line,
)
from qdspec.errors import AccuracyError, DomainError
from qdspec.params import make_params


def test_constant():
    assert abs(integrate(lambda z: np.ones_like(z), line(0, 1)).value - 1) < 1e-15


def test_gaussian():
    val, err = integrate(lambda t: np.exp(-math.pi * t * t), line(-6, 6))
    assert abs(val - 1) < 1e-12
    assert err < 1e-12


def test_residue():
    val = integrate(lambda z: 1 / z, circle(0, 1.0, pieces=4)).value
    assert abs(val - 2j * math.pi) < 1e-12


def test_vector_valued():
    f = lambda z: np.stack([z, z * z], axis=-1)
    val = integrate(f, line(0, 2)).value
    assert np.allclose(val, [2.0, 8.0 / 3.0], atol=1e-13)


@given(st.complex_numbers(max_magnitude=2), st.complex_numbers(max_magnitude=2))
def test_reversal_negates(a, b):
    if abs(a - b) < 1e-3:
        return
    c = line(a, b)
    f = lambda z: np.exp(z) * np.cos(2 * z)
    fwd = integrate(f, c).value
    assert abs(integrate(f, c.reversed()).value + fwd) < 1e-12 * max(1, abs(fwd))
    # the exact antiderivative is the oracle
    F = lambda z: np.exp(z) * (np.cos(2 * z) + 2 * np.sin(2 * z)) / 5
    assert abs(fwd - (F(b) - F(a))) < 1e-11 * max(1, abs(fwd))


@given(st.floats(min_value=0.05, max_value=0.95))
def test_split_invariance(frac):
    f = lambda z: 1 / (1 + z * z)
    whole = integrate(f, line(-3, 3)).value
    m = -3 + 6 * frac
    parts = integrate(f, line(-3, m)).value + integrate(f, line(m, 3)).value
    assert abs(whole - parts) < 1e-12
    assert abs(whole - 2 * math.atan(3)) < 1e-12


def test_deterministic():
    f = lambda z: np.sin(5 * z) / (1 + z * z)
    assert integrate(f, line(-4, 4)).value == integrate(f, line(-4, 4)).value


def test_accuracy_error_carries_estimate():
    cfg = QuadConfig(abs_tol=1e-15, rel_tol=1e-15, max_refinement_depth=1, panel_order=2)
    with pytest.raises(AccuracyError) as info:
        integrate(lambda z: np.sin(40 * z), line(0, 10), cfg)
    assert info.value.estimate is not None and info.value.error is not None


def test_config_validation():
    with pytest.raises(ValueError):
        QuadConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadConfig(max_refinement_depth=0)


def test_disconnected_contour():
    with pytest.raises(DomainError):
        ContourSpec((LineSegment(0j, 1 + 0j, 0, 1), LineSegment(2 + 0j, 1 + 0j, 0, 1)))


def test_shifted_line():
    c = shifted_line(0.5, 40)
    assert len(c.segments) == 1
    assert abs(c.start - (-40 + 0.5j)) < 1e-15 and abs(c.end - (40 + 0.5j)) < 1e-12
    assert shifted_line(0.1, 10).label == "gamma-line"
    with pytest.raises(DomainError):
        shifted_line(2 * math.pi, 10, make_params(1.0))


def test_kashaev_L_shape(p1):
    c = kashaev_L(0.2, p1, sigma=0.75, T=4)
    assert len(c.segments) == 3
    mid = c.segments[1]
    assert abs(mid.point(mid.t0) - (-1.2 + 0.75j)) < 1e-14
    assert abs(mid.point(mid.t1) - (1.2 + 0.75j)) < 1e-14
    # rays descend at pi/4 on both sides
    assert c.start.imag < 0.75 and c.end.imag < 0.75
    assert abs(cmath.phase(c.end - mid.point(mid.t1)) + math.pi / 4) < 1e-14


@pytest.mark.parametrize("sigma", [0.4, 1.1])
def test_kashaev_L_sigma_range(p1, sigma):
    with pytest.raises(DomainError):
        kashaev_L(0.2, p1, sigma=sigma)
