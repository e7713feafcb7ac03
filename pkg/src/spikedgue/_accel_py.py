"""Pure numpy versions of the compiled kernels in ``_accel.pyx``."""
import numpy as np

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def log_ratio_sum(x0, num, den, skip=-1):
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    if skip >= 0:
        den = np.delete(den, skip)
    dn = x0 - num
    dd = x0 - den
    if np.any(dn == 0.0):
        raise ZeroDivisionError("zero numerator factor")
    if np.any(dd == 0.0):
        raise ZeroDivisionError("zero denominator factor")
    negatives = int(np.count_nonzero(dn < 0.0) + np.count_nonzero(dd < 0.0))
    acc = float(np.sum(np.log(np.abs(dn))) - np.sum(np.log(np.abs(dd))))
    return acc, (-1 if negatives % 2 else 1)


def step_tail(lefts, rights, xs):
    lefts = np.asarray(lefts, dtype=np.float64)
    rights = np.asarray(rights, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    lo = np.maximum(lefts[None, :], xs[:, None])
    return np.clip(rights[None, :] - lo, 0.0, None).sum(axis=1)


def cauchy_sum(fu, u, gv, v, chunk=256):
    fu = np.asarray(fu, dtype=np.complex128)
    u = np.asarray(u, dtype=np.complex128)
    gv = np.asarray(gv, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    total = 0j
    atotal = 0.0
    for start in range(0, u.size, chunk):
        sl = slice(start, start + chunk)
        terms = gv[None, :] / (u[sl, None] - v[None, :])
        total += complex(fu[sl] @ terms.sum(axis=1))
        atotal += float(np.abs(fu[sl]) @ np.abs(terms).sum(axis=1))
    return total, atotal


def gaussian_kde_grid(samples, grid, bandwidth, chunk=4096):
    samples = np.asarray(samples, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    out = np.zeros(grid.size)
    for start in range(0, samples.size, chunk):
        z = (grid[:, None] - samples[None, start:start + chunk]) / bandwidth
        out += np.exp(-0.5 * z * z).sum(axis=1)
    return out / (samples.size * bandwidth * _SQRT_2PI)
