"""Double-contour quadrature for the Airy, extended Airy and finite-N kernels.

Contours are wedges: a vertex on the real axis with two straight legs. Each
leg is discretised by Gauss-Legendre; the double integral then reduces to a
Cauchy-type double sum over node pairs (see ``accel.cauchy_sum``). Error
estimates come from comparing the result at (n, T), (2n, T) and (2n, 2T),
plus a rounding floor proportional to the absolute size of the summands.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from spikedgue import accel
from spikedgue.errors import (
    ContourConfigurationError,
    DistinctSpikesError,
    InvalidDimensionError,
    QuadratureError,
)

_TWO_PI_I_SQ = (2j * np.pi) ** 2
_LOG_CUTOFF = math.log(1e-18)
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class KernelValue:
    value: float
    est_error: float

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class KernelParams:
    """Species indices, offsets and quadrature settings for one kernel evaluation.

    ``contour_offset`` is ``(g, b)``: the vertex of the left contour (legs at
    +-2pi/3) and of the right contour (legs at +-pi/3), in edge-scaled units.
    ``None`` picks anchors from the arguments. ``truncation_radius`` of
    ``None`` chooses each leg length a priori from the decay of the exponent.
    """

    m1: int = 0
    m2: int = 0
    a: Tuple[float, ...] = ()
    contour_offset: Optional[Tuple[float, float]] = None
    quad_points: int = 64
    truncation_radius: Optional[float] = None
    tol: float = 1e-10
    max_refine: int = 3

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        if self.contour_offset is not None:
            g, b = self.contour_offset
            object.__setattr__(self, "contour_offset", (float(g), float(b)))
        if self.m1 < 0 or self.m2 < 0:
            raise InvalidDimensionError("species indices must be >= 0")
        if self.quad_points < 16:
            raise InvalidDimensionError(f"quad_points must be >= 16, got {self.quad_points}")
        if self.truncation_radius is not None and self.truncation_radius <= 0:
            raise InvalidDimensionError("truncation_radius must be positive")
        check_distinct(self.a)


def check_distinct(a: Sequence[float], gap: float = 1e-8) -> None:
    s = np.sort(np.asarray(a, dtype=np.float64))
    if s.size > 1 and np.min(np.diff(s)) < gap:
        raise DistinctSpikesError("distinct-spikes required: offsets closer than 1e-8")


@lru_cache(maxsize=32)
def _gl(n: int):
    x, w = leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _leg(vertex: complex, direction: complex, length: float, n: int, sign: float):
    """Nodes and signed weights on ``vertex + t*direction``, t in [0, length]."""
    x, w = _gl(n)
    t = (x + 1.0) * (0.5 * length)
    return vertex + direction * t, sign * direction * w * (0.5 * length)


def _wedge(vertex: float, angle: float, lengths: Tuple[float, float], n: int):
    """Upward wedge: in along ``exp(-i angle)``, out along ``exp(+i angle)``."""
    z1, w1 = _leg(vertex, np.exp(-1j * angle), lengths[0], n, -1.0)
    z2, w2 = _leg(vertex, np.exp(1j * angle), lengths[1], n, +1.0)
    return np.concatenate([z1, z2]), np.concatenate([w1, w2])


def _leg_length(logf: Callable, vertex: float, direction: complex, start: float) -> float:
    """Shortest length (from ``start`` up, growing by 1.25x) at which the real part
    of ``logf`` has fallen 41.4 (= -log 1e-18) below its maximum on the leg."""
    T = start
    for _ in range(200):
        t = np.linspace(0.0, T, 257)
        r = np.real(logf(vertex + direction * t))
        if r[-1] - np.max(r) < _LOG_CUTOFF and np.all(np.diff(r[-8:]) < 0):
            return T
        T *= 1.25
    raise QuadratureError("integrand does not decay along contour leg")


def _refined(evaluate: Callable, n: int, tol: float, max_refine: int):
    """Run ``evaluate(n, scale) -> (complex value, abs scale)`` at increasing
    resolution until successive estimates agree to ``tol``."""
    for _ in range(max_refine + 1):
        v1, s1 = evaluate(n, 1.0)
        v2, s2 = evaluate(2 * n, 1.0)
        v3, s3 = evaluate(2 * n, 2.0)
        diff = max(abs(v2 - v1), abs(v3 - v2))
        floor = 64.0 * _EPS * max(s1, s2, s3)
        if diff <= max(tol, floor):
            return v3, diff + floor + abs(v3.imag)
        n *= 2
    raise QuadratureError(
        f"contour quadrature did not converge: change {diff:.3e} > tol {tol:.1e} at n={n // 2}"
    )


def _residue_sum(poles: np.ndarray, shift: float, log_pref: float = 0.0) -> float:
    """``sum_p exp(shift*p + log_pref) / prod_{q != p} (p - q)`` over simple poles."""
    total = 0.0
    for i, p in enumerate(poles):
        den = np.prod([p - q for j, q in enumerate(poles) if j != i])
        total += math.exp(shift * p + log_pref) / den
    return total


def default_anchors(x: float, y: float, poles: Sequence[float]) -> Tuple[float, float]:
    g = -max(1.0, math.sqrt(max(y, 0.0)))
    if len(poles):
        g = max(g, max(poles) + 1.0)
    b = max(max(1.0, math.sqrt(max(x, 0.0))), g + 1.0)
    return g, b


def extended_airy_kernel(x: float, y: float, params: KernelParams = KernelParams()) -> KernelValue:
    """Extended Airy kernel for species ``(m1, m2)`` with offsets ``params.a``.

    The double integral runs over a wedge through ``b`` (u variable) and a
    wedge through ``g`` (v variable) with the poles ``a_1..a_m2`` of the v
    integrand to the left of ``g``. When ``m1 < m2`` and ``x < y`` the
    single-contour term is added as an exact residue sum.
    """
    m1, m2 = params.m1, params.m2
    a = np.asarray(params.a, dtype=np.float64)
    if max(m1, m2) > a.size:
        raise InvalidDimensionError(f"need at least {max(m1, m2)} offsets, got {a.size}")
    x = float(x)
    y = float(y)
    au, av = a[:m1], a[:m2]
    if params.contour_offset is None:
        g, b = default_anchors(x, y, av)
    else:
        g, b = params.contour_offset
        if av.size and g <= float(np.max(av)):
            raise ContourConfigurationError("left contour must pass to the right of all poles")
        if b <= g:
            raise ContourConfigurationError("right contour vertex must lie right of the left one")

    def logf_u(u):
        out = u**3 / 3.0 - x * u
        for aj in au:
            out = out + np.log(u - aj + 0j)
        return out

    def logf_v(v):
        out = -(v**3 / 3.0 - y * v)
        for aj in av:
            out = out - np.log(v - aj + 0j)
        return out

    if params.truncation_radius is None:
        Tu = tuple(_leg_length(logf_u, b, np.exp(s * 1j * np.pi / 3), 4.0) for s in (-1, 1))
        Tv = tuple(_leg_length(logf_v, g, np.exp(s * 2j * np.pi / 3), 4.0) for s in (-1, 1))
    else:
        Tu = Tv = (params.truncation_radius,) * 2

    def evaluate(n, scale):
        u, wu = _wedge(b, np.pi / 3, (Tu[0] * scale, Tu[1] * scale), n)
        v, wv = _wedge(g, 2 * np.pi / 3, (Tv[0] * scale, Tv[1] * scale), n)
        fu = np.exp(u**3 / 3.0 - x * u) * wu
        for aj in au:
            fu = fu * (u - aj)
        gv = np.exp(-(v**3 / 3.0 - y * v)) * wv
        for aj in av:
            gv = gv / (v - aj)
        total, atotal = accel.cauchy_sum(fu, u, gv, v)
        return total / _TWO_PI_I_SQ, atotal / (4 * np.pi**2)

    val, err = _refined(evaluate, params.quad_points, params.tol, params.max_refine)
    value = val.real
    if m1 < m2 and x < y:
        value -= _residue_sum(a[m1:m2], y - x)
    return KernelValue(float(value), float(err))


def airy_kernel_contour(x: float, y: float, params: Optional[KernelParams] = None) -> KernelValue:
    """Plain Airy kernel by the same double-contour quadrature (species 0, 0)."""
    if params is None:
        params = KernelParams()
    p = KernelParams(
        m1=0,
        m2=0,
        a=(),
        contour_offset=params.contour_offset,
        quad_points=params.quad_points,
        truncation_radius=params.truncation_radius,
        tol=params.tol,
        max_refine=params.max_refine,
    )
    return extended_airy_kernel(x, y, p)


def scaled_gue_kernel(
    N: int,
    j1: int,
    j2: int,
    x: float,
    y: float,
    a: Sequence[float],
    params: Optional[KernelParams] = None,
) -> KernelValue:
    """Edge-scaled correlation kernel of the spiked GUE minor process.

    ``j1`` and ``j2`` count deleted rows (0..k). The kernel is evaluated at
    ``2 sqrt(N) + N^(-1/6) x`` and ``2 sqrt(N) + N^(-1/6) y`` and multiplied by
    ``N^(-1/6) N^((j1-j2)/6) exp(N^(1/3) (x - y))``. As N grows it approaches
    the extended Airy kernel with species ``k - j1`` and ``k - j2``.

    The w contour is closed: a wedge with legs at +-2pi/3 from ``V`` that end
    on the circle ``|w| = V``, completed by the arc of that circle through the
    negative axis. ``log w`` is carried continuously along the arc. The z
    contour is a wedge with legs at +-pi/3 from ``B > V``. Only ``quad_points``,
    ``contour_offset``, ``tol`` and ``max_refine`` are read from ``params``.
    """
    if params is None:
        params = KernelParams(quad_points=96)
    from spikedgue.linalg import SpikeConfig

    a = tuple(float(v) for v in a)
    check_distinct(a)
    k = len(a)
    if N < k + 1:
        raise InvalidDimensionError(f"need N >= k+1, got N={N}, k={k}")
    if not (0 <= j1 <= k and 0 <= j2 <= k):
        raise InvalidDimensionError(f"minor indices must lie in [0, {k}]")
    alpha = SpikeConfig(N, k, a).alphas
    s6 = N ** (1.0 / 6.0)
    rn = math.sqrt(N)
    x = float(x)
    y = float(y)
    X = 2.0 * rn + x / s6
    Y = 2.0 * rn + y / s6
    if params.contour_offset is None:
        g, b = default_anchors(x, y, a)
    else:
        g, b = params.contour_offset
        if k and g <= max(a):
            raise ContourConfigurationError("closed contour must enclose every spike")
        if b <= g:
            raise ContourConfigurationError("right contour vertex must lie right of the left one")
    V = rn + s6 * g
    B = rn + s6 * b
    if V <= 0:
        raise ContourConfigurationError("closed contour must enclose the origin")
    az = alpha[j1:]
    aw = alpha[j2:]

    def logf_z(z):
        out = z * z / 2.0 - X * z + (N - k) * np.log(z + 0j)
        for al in az:
            out = out + np.log(z - al + 0j)
        return out

    Tz = tuple(_leg_length(logf_z, B, np.exp(s * 1j * np.pi / 3), 2.0 * s6) for s in (-1, 1))
    log_pref = -math.log(N) / 6.0 + (j1 - j2) / 6.0 * math.log(N) + N ** (1.0 / 3.0) * (x - y)

    def evaluate(n, scale):
        z, wz = _wedge(B, np.pi / 3, (Tz[0] * scale, Tz[1] * scale), n)
        w1, ww1 = _leg(V, np.exp(-2j * np.pi / 3), V, n, -1.0)
        w2, ww2 = _leg(V, np.exp(2j * np.pi / 3), V, n, +1.0)
        xt, wt = _gl(2 * n)
        th = np.pi / 3 + (xt + 1.0) * (2 * np.pi / 3)
        w3 = V * np.exp(1j * th)
        ww3 = 1j * w3 * wt * (2 * np.pi / 3)
        w = np.concatenate([w1, w2, w3])
        ww = np.concatenate([ww1, ww2, ww3])
        logw = np.concatenate([np.log(w1), np.log(w2), math.log(V) + 1j * th])
        lz = logf_z(z)
        lw = -(w * w / 2.0 - Y * w) - (N - k) * logw
        for al in aw:
            lw = lw - np.log(w - al + 0j)
        mz = float(np.max(lz.real))
        mw = float(np.max(lw.real))
        fz = np.exp(lz - mz) * wz
        gw = np.exp(lw - mw) * ww
        total, atotal = accel.cauchy_sum(fz, z, gw, w)
        shift = mz + mw + log_pref
        if shift > 700.0:
            raise QuadratureError("finite-N kernel overflows double range despite log scaling")
        f = math.exp(shift)
        return total * f / _TWO_PI_I_SQ, atotal * f / (4 * np.pi**2)

    val, err = _refined(evaluate, params.quad_points, params.tol, params.max_refine)
    value = val.real
    if j1 > j2 and x < y:
        value -= _residue_sum(alpha[j2:j1], Y - X, log_pref)
    if not math.isfinite(value):
        raise QuadratureError("finite-N kernel is not finite")
    return KernelValue(float(value), float(err))


def airy_species(k: int, j: int) -> int:
    """Species index of the edge limit for a minor that drops ``j`` of ``k`` spikes."""
    return k - j
