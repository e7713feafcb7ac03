"""Backend selection for the inner loops.

The compiled module is used when it imports; set ``SPIKEDGUE_PURE_PYTHON=1``
to force the numpy fallback. ``BACKEND`` names the active choice.
"""
import os

from spikedgue import _accel_py

if os.environ.get("SPIKEDGUE_PURE_PYTHON") == "1":
    _impl = _accel_py
    BACKEND = "python"
else:
    try:
        from spikedgue import _accel as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _accel_py
        BACKEND = "python"

log_ratio_sum = _impl.log_ratio_sum
step_tail = _impl.step_tail
cauchy_sum = _impl.cauchy_sum
gaussian_kde_grid = _impl.gaussian_kde_grid


def backends():
    """Map of importable backend names to their modules."""
    found = {"python": _accel_py}
    try:
        from spikedgue import _accel
        found["cython"] = _accel
    except ImportError:
        pass
    return found
