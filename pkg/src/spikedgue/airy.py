"""Airy function Ai and its derivative, and the closed-form Airy kernel.

Small arguments use the Maclaurin series summed in 50-digit decimal
arithmetic (the series cancels heavily for negative x); large arguments use
the standard asymptotic expansions truncated at their smallest term.
"""
from __future__ import annotations

import math
from decimal import Decimal, localcontext

from spikedgue.errors import DomainError

SERIES_LIMIT = 8.0
MAX_ABS_ARG = 40.0

# Ai(0) = 3^(-2/3)/Gamma(2/3) and -Ai'(0) = 3^(-1/3)/Gamma(1/3)
_AI0 = "0.355028053887817239260063186004183176397979174199177"
_AIP0 = "0.258819403792806798405183560189203963479091138354935"


def _series(x: float):
    with localcontext() as ctx:
        ctx.prec = 50
        X = Decimal(x)
        x3 = X * X * X
        c1 = Decimal(_AI0)
        c2 = Decimal(_AIP0)
        eps = Decimal(10) ** -45
        # f = sum x^(3k)/((3k)! / (1*4*...*(3k-2))), g the companion odd series
        f = t = Decimal(1)
        k = 1
        while True:
            t = t * x3 / ((3 * k - 1) * (3 * k))
            f += t
            if abs(t) < eps and k > 2:
                break
            k += 1
        g = t = X
        k = 1
        while True:
            t = t * x3 / ((3 * k) * (3 * k + 1))
            g += t
            if abs(t) < eps and k > 2:
                break
            k += 1
        fp = t = X * X / 2
        k = 2
        while True:
            t = t * x3 / ((3 * k - 1) * (3 * k - 3))
            fp += t
            if abs(t) < eps and k > 3:
                break
            k += 1
        gp = t = Decimal(1)
        k = 1
        while True:
            t = t * x3 / ((3 * k) * (3 * k - 2))
            gp += t
            if abs(t) < eps and k > 2:
                break
            k += 1
        return float(c1 * f - c2 * g), float(c1 * fp - c2 * gp)


def _asym_terms(zeta: float):
    """Terms ``u_k / zeta^k`` and ``v_k / zeta^k`` of the large-argument
    expansions, stopping before the smallest term or once below 1e-17."""
    us = [1.0]
    vs = [1.0]
    k = 1
    while k < 200:
        u = us[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k * zeta)
        if abs(u) > abs(us[-1]) or abs(us[-1]) < 1e-17:
            break
        us.append(u)
        vs.append(-(6 * k + 1) / (6 * k - 1) * u)
        k += 1
    return us, vs


def _asymptotic(x: float):
    ax = abs(x)
    zeta = 2.0 / 3.0 * ax**1.5
    us, vs = _asym_terms(zeta)
    q = ax**0.25
    if x > 0:
        su = sum((-1) ** k * u for k, u in enumerate(us))
        sv = sum((-1) ** k * v for k, v in enumerate(vs))
        e = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
        return e * su / q, -e * q * sv
    ue = sum((-1) ** (k // 2) * u for k, u in enumerate(us) if k % 2 == 0)
    uo = sum((-1) ** (k // 2) * u for k, u in enumerate(us) if k % 2 == 1)
    ve = sum((-1) ** (k // 2) * v for k, v in enumerate(vs) if k % 2 == 0)
    vo = sum((-1) ** (k // 2) * v for k, v in enumerate(vs) if k % 2 == 1)
    ph = zeta - math.pi / 4.0
    c, s = math.cos(ph), math.sin(ph)
    rp = math.sqrt(math.pi)
    return (c * ue + s * uo) / (rp * q), q * (s * ve - c * vo) / rp


def airy_ai(x: float):
    """Return ``(Ai(x), Ai'(x))`` for real ``|x| <= 40``."""
    x = float(x)
    if not math.isfinite(x) or abs(x) > MAX_ABS_ARG:
        raise DomainError(f"Airy argument {x} outside [-{MAX_ABS_ARG}, {MAX_ABS_ARG}]")
    if abs(x) <= SERIES_LIMIT:
        return _series(x)
    return _asymptotic(x)


def airy_kernel_closed(x: float, y: float):
    """Christoffel-Darboux form of the Airy kernel, returned as a KernelValue."""
    from spikedgue.kernels import KernelValue

    ax, apx = airy_ai(x)
    if abs(x - y) < 1e-6:
        return KernelValue(apx * apx - x * ax * ax, 0.0)
    ay, apy = airy_ai(y)
    return KernelValue((ax * apy - apx * ay) / (x - y), 0.0)
