import mpmath
import numpy as np
import pytest

from spikedgue.airy import airy_ai, airy_kernel_closed
from spikedgue.errors import DomainError

mpmath.mp.dps = 40


def test_values_at_zero():
    ai, aip = airy_ai(0.0)
    exact_ai = 3 ** (-2 / 3) / mpmath.gamma(mpmath.mpf(2) / 3)
    exact_aip = -(3 ** (-1 / 3)) / mpmath.gamma(mpmath.mpf(1) / 3)
    assert ai == pytest.approx(float(exact_ai), abs=1e-15)
    assert aip == pytest.approx(float(exact_aip), abs=1e-15)
    assert ai == pytest.approx(0.3550280539, abs=1e-10)
    assert aip == pytest.approx(-0.2588194038, abs=1e-10)


@pytest.mark.parametrize("x", np.linspace(-8, 8, 81))
def test_series_range_absolute_error(x):
    ai, aip = airy_ai(x)
    assert abs(ai - float(mpmath.airyai(x))) <= 1e-12
    assert abs(aip - float(mpmath.airyai(x, derivative=1))) <= 1e-12


@pytest.mark.parametrize("x", [8.5, 10.0, 15.0, 25.0, 40.0])
def test_asymptotic_positive_relative_error(x):
    ai, aip = airy_ai(x)
    assert ai == pytest.approx(float(mpmath.airyai(x)), rel=1e-10)
    assert aip == pytest.approx(float(mpmath.airyai(x, derivative=1)), rel=1e-10)


@pytest.mark.parametrize("x", [-8.5, -10.0, -17.3, -25.0, -40.0])
def test_asymptotic_negative_envelope_error(x):
    # oscillatory side: error relative to the envelope |x|^(-1/4) (resp. |x|^(1/4))
    ai, aip = airy_ai(x)
    assert abs(ai - float(mpmath.airyai(x))) <= 1e-10 * abs(x) ** -0.25
    assert abs(aip - float(mpmath.airyai(x, derivative=1))) <= 1e-10 * abs(x) ** 0.25


def test_out_of_range():
    with pytest.raises(DomainError):
        airy_ai(40.5)
    with pytest.raises(DomainError):
        airy_ai(float("nan"))


def test_ode_residual():
    h = 1e-3
    for x in np.linspace(-6, 6, 25):
        ai_m, _ = airy_ai(x - h)
        ai_0, _ = airy_ai(x)
        ai_p, _ = airy_ai(x + h)
        second = (ai_p - 2 * ai_0 + ai_m) / h**2
        assert abs(second - x * ai_0) <= 1e-6


def test_derivative_consistency():
    h = 1e-5
    for x in (-3.0, 0.5, 2.0):
        fd = (airy_ai(x + h)[0] - airy_ai(x - h)[0]) / (2 * h)
        assert fd == pytest.approx(airy_ai(x)[1], abs=1e-9)


def test_kernel_at_origin():
    assert airy_kernel_closed(0, 0).value == pytest.approx(airy_ai(0)[1] ** 2, abs=1e-15)
    assert airy_kernel_closed(0, 0).value == pytest.approx(0.066987, abs=1e-6)


def test_kernel_symmetric_and_positive_diagonal():
    pts = [-2.0, -1.0, 0.0, 1.0, 2.0]
    for x in pts:
        assert airy_kernel_closed(x, x).value > 0
        for y in pts:
            assert airy_kernel_closed(x, y).value == pytest.approx(airy_kernel_closed(y, x).value, abs=1e-15)


def test_kernel_near_diagonal_continuity():
    a = airy_kernel_closed(0.3, 0.3 + 2e-6).value
    b = airy_kernel_closed(0.3, 0.3).value
    assert a == pytest.approx(b, abs=1e-6)
