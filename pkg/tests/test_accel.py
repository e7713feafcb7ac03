import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from spikedgue import _accel_py, accel

compiled = accel.backends().get("cython")
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def test_fallback_is_always_available():
    assert "python" in accel.backends()
    assert accel.BACKEND in accel.backends()


def test_environment_forces_fallback():
    env = dict(os.environ, SPIKEDGUE_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from spikedgue import accel; print(accel.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "python"


def test_log_ratio_sum_reference():
    acc, sign = _accel_py.log_ratio_sum(0.0, [1.0, -2.0], [3.0, 4.0, -5.0], skip=1)
    assert acc == pytest.approx(np.log(2.0 / 15.0))
    assert sign == 1
    assert _accel_py.log_ratio_sum(0.0, [1.0], [-3.0])[1] == -1
    with pytest.raises(ZeroDivisionError):
        _accel_py.log_ratio_sum(1.0, [1.0], [2.0])


@needs_compiled
@settings(max_examples=100, deadline=None)
@given(x0=finite, num=arrays(np.float64, st.integers(0, 20), elements=finite),
       den=arrays(np.float64, st.integers(1, 20), elements=finite), data=st.data())
def test_log_ratio_sum_parity(x0, num, den, data):
    skip = data.draw(st.integers(-1, den.size - 1))
    try:
        ref = _accel_py.log_ratio_sum(x0, num, den, skip)
    except ZeroDivisionError:
        with pytest.raises(ZeroDivisionError):
            compiled.log_ratio_sum(x0, num, den, skip)
        return
    got = compiled.log_ratio_sum(x0, num, den, skip)
    assert got[1] == ref[1]
    assert got[0] == pytest.approx(ref[0], rel=1e-12, abs=1e-10)


@needs_compiled
@settings(max_examples=100, deadline=None)
@given(pts=arrays(np.float64, st.integers(1, 30), elements=finite, unique=True),
       xs=arrays(np.float64, st.integers(1, 30), elements=finite))
def test_step_tail_parity(pts, xs):
    s = np.sort(pts)[::-1]
    rights, lefts = s[:-1:2], s[1::2]
    n = min(rights.size, lefts.size)
    rights, lefts = np.ascontiguousarray(rights[:n]), np.ascontiguousarray(lefts[:n])
    np.testing.assert_allclose(compiled.step_tail(lefts, rights, xs), _accel_py.step_tail(lefts, rights, xs), atol=1e-10)


@needs_compiled
@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 40), m=st.integers(1, 40), seed=st.integers(0, 2**32 - 1))
def test_cauchy_sum_parity(n, m, seed):
    g = np.random.default_rng(seed)
    u = g.normal(size=n) + 1j * g.normal(size=n) + 5.0
    v = g.normal(size=m) + 1j * g.normal(size=m) - 5.0
    fu = g.normal(size=n) + 1j * g.normal(size=n)
    gv = g.normal(size=m) + 1j * g.normal(size=m)
    t1, a1 = compiled.cauchy_sum(fu, u, gv, v)
    t2, a2 = _accel_py.cauchy_sum(fu, u, gv, v)
    assert abs(t1 - t2) <= 1e-12 * max(1.0, a2)
    assert a1 == pytest.approx(a2, rel=1e-12)


@needs_compiled
@settings(max_examples=50, deadline=None)
@given(samples=arrays(np.float64, st.integers(1, 200), elements=finite),
       h=st.floats(1e-3, 10))
def test_kde_grid_parity(samples, h):
    grid = np.linspace(samples.min() - 3 * h, samples.max() + 3 * h, 101)
    np.testing.assert_allclose(
        compiled.gaussian_kde_grid(samples, grid, h), _accel_py.gaussian_kde_grid(samples, grid, h),
        rtol=1e-12, atol=1e-14,
    )
