"""Eigenvector components from spectra alone, the truncated edge product, and
the step measure built from two interlaced spectra.

Every product of eigenvalue gaps is accumulated as a sum of logarithms with
the sign tracked separately; at N = 1000 the raw factors span far more than
the double range.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy import integrate

from spikedgue import accel
from spikedgue.errors import (
    DegenerateSpectrumError,
    InterlacingError,
    InvalidDimensionError,
)
from spikedgue.linalg import HermitianMatrix, eigvalsh, principal_minor, swap_conjugate
from spikedgue.spectra import MinorChain, ScaledEdge, edge_scale, require_interlacing


@dataclass(frozen=True)
class ComponentQuery:
    """Eigenvalue index ``j`` and coordinate ``l``, both 1-based."""

    j: int
    l: int

    def validate(self, N: int) -> None:
        if not (1 <= self.j <= N and 1 <= self.l <= N):
            raise InvalidDimensionError(f"query ({self.j}, {self.l}) out of range for N={N}")


def _f64(v) -> np.ndarray:
    return np.ascontiguousarray(v, dtype=np.float64)


def _log_ratio(x0, num, den, skip=-1):
    try:
        return accel.log_ratio_sum(float(x0), _f64(num), _f64(den), skip)
    except ZeroDivisionError as exc:
        raise DegenerateSpectrumError(f"coincident eigenvalues in gap product: {exc}") from exc


def log_component_sq(outer, minor, j: int, check: bool = True) -> float:
    """``log |v_j1|^2`` from the spectrum of A and of A with row/column 1 removed."""
    outer = _f64(outer)
    minor = _f64(minor)
    if minor.size != outer.size - 1:
        raise InvalidDimensionError(
            f"minor spectrum must have length {outer.size - 1}, got {minor.size}"
        )
    if not 1 <= j <= outer.size:
        raise InvalidDimensionError(f"index {j} out of range for N={outer.size}")
    if check:
        require_interlacing(outer, minor)
    acc, sign = _log_ratio(outer[j - 1], minor, outer, j - 1)
    if sign < 0:
        raise InterlacingError("gap product came out negative; spectra are not interlaced")
    return acc


def component_sq_via_identity(outer, minor, j: int, check: bool = True) -> float:
    """``|v_j1|^2 = prod_l (sigma_j - lambda_l) / prod_{l != j} (sigma_j - sigma_l)``."""
    return float(min(1.0, np.exp(log_component_sq(outer, minor, j, check))))


def minor_spectrum(m: HermitianMatrix, l: int) -> np.ndarray:
    """Spectrum of ``m`` with row and column ``l`` deleted, via the 1 <-> l swap."""
    return eigvalsh(principal_minor(swap_conjugate(m, l), 1))


def component_sq_matrix(m: HermitianMatrix, outer: Optional[np.ndarray] = None) -> np.ndarray:
    """All ``|v_jl|^2`` at once; entry ``[j-1, l-1]``. Costs one eigensolve per column."""
    if outer is None:
        outer = eigvalsh(m)
    n = m.dim
    out = np.empty((n, n))
    if n == 1:
        out[0, 0] = 1.0
        return out
    for l in range(1, n + 1):
        mu = minor_spectrum(m, l)
        require_interlacing(outer, mu)
        for j in range(1, n + 1):
            out[j - 1, l - 1] = component_sq_via_identity(outer, mu, j, check=False)
    return out


def scaled_component_sq(chain: MinorChain, j: int) -> float:
    """``N^(1/3) |x_j1|^2`` from the first two levels of a chain."""
    if chain.depth < 2:
        raise InvalidDimensionError("chain needs depth >= 2")
    N = chain.N
    return float(np.exp(np.log(N) / 3.0 + log_component_sq(chain.levels[0], chain.levels[1], j, check=False)))


def _coords(v) -> np.ndarray:
    return _f64(v.coords if isinstance(v, ScaledEdge) else v)


def log_xi_truncated(top_outer, top_inner, j: int, n: int, check: bool = True) -> float:
    """Logarithm of the order-n truncated edge product for particle ``j``.

    With ``xi`` the outer and ``eta`` the inner scaled coordinates this is
    ``log n/3 + sum_{i<n} log(xi_j - eta_i) - sum_{i<=n, i!=j} log(xi_j - xi_i)``,
    which is the same as splitting the inner factors at ``j``.
    """
    xi = _coords(top_outer)
    eta = _coords(top_inner)
    if not 1 <= j < n:
        raise InvalidDimensionError(f"need 1 <= j < n, got j={j}, n={n}")
    if n > xi.size or n - 1 > eta.size:
        raise InvalidDimensionError(
            f"truncation n={n} exceeds available particles ({xi.size}, {eta.size})"
        )
    if check:
        require_interlacing(xi[:n], eta[: n - 1])
    acc, sign = _log_ratio(xi[j - 1], eta[: n - 1], xi[:n], j - 1)
    if sign < 0:
        raise InterlacingError("truncated product came out negative")
    return float(np.log(n) / 3.0 + acc)


def xi_truncated(top_outer, top_inner, j: int, n: int, check: bool = True) -> float:
    return float(np.exp(log_xi_truncated(top_outer, top_inner, j, n, check)))


@dataclass(frozen=True, eq=False)
class StepMeasure:
    """Union of intervals ``(lefts[i], rights[i]]`` in ascending order; density one on each."""

    lefts: np.ndarray
    rights: np.ndarray

    @property
    def intervals(self):
        return list(zip(self.lefts.tolist(), self.rights.tolist()))

    @property
    def total_length(self) -> float:
        return float(np.sum(self.rights - self.lefts))

    def shifted(self, c: float) -> "StepMeasure":
        return StepMeasure(self.lefts + c, self.rights + c)


def build_step_measure(outer, inner) -> StepMeasure:
    """Intervals ``(sigma_i, lambda_{i-1}]`` for ``i = 2..N`` from descending spectra."""
    outer = _f64(outer)
    inner = _f64(inner)
    require_interlacing(outer, inner)
    return StepMeasure(outer[1:][::-1].copy(), inner[::-1].copy())


def measure_tail(meas: StepMeasure, x):
    """``M_N(x)``: length of the measure's support above ``x``. Scalar or array."""
    xs = np.atleast_1d(_f64(x))
    vals = accel.step_tail(meas.lefts, meas.rights, xs)
    return float(vals[0]) if np.ndim(x) == 0 else np.asarray(vals)


def _check_tail_args(chain: MinorChain, j: int, L: int) -> None:
    if chain.depth < 2:
        raise InvalidDimensionError("chain needs depth >= 2")
    if not 1 <= j <= L <= chain.N:
        raise InvalidDimensionError(f"need 1 <= j <= L <= N, got j={j}, L={L}, N={chain.N}")


def log_tail_product(chain: MinorChain, j: int, L: int) -> float:
    """``sum_{i=L+1}^{N} [log(sigma_j - lambda_{i-1}) - log(sigma_j - sigma_i)]``."""
    _check_tail_args(chain, j, L)
    sig, lam = chain.levels[0], chain.levels[1]
    N = chain.N
    if L == N:
        return 0.0
    acc, sign = _log_ratio(sig[j - 1], lam[L - 1 : N - 1], sig[L:N])
    if sign < 0:
        raise InterlacingError("tail product came out negative")
    return float(acc)


def log_tail_product_stieltjes(chain: MinorChain, j: int, L: int) -> float:
    """Same quantity as :func:`log_tail_product`, as minus the integral of
    ``1/(sigma_j - x)`` over the measure intervals with index above ``L``.

    Each interval is integrated numerically, so this path shares no algebra
    with the closed log-gap sum and serves as its cross-check.
    """
    _check_tail_args(chain, j, L)
    sig, lam = chain.levels[0], chain.levels[1]
    s = float(sig[j - 1])
    total = 0.0
    for i in range(L + 1, chain.N + 1):
        lo, hi = float(sig[i - 1]), float(lam[i - 2])
        val, _ = integrate.quad(lambda x: 1.0 / (s - x), lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)
        total += val
    return -total


@dataclass
class ComponentRecord:
    """One observable from one trial, in the raw-record schema."""

    trial: int
    seed: int
    N: int
    k: int
    a: List[float]
    j: int
    l: int
    direct_sq: Optional[float]
    identity_sq: Optional[float]
    scaled_value: float
    xi_truncations: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def scale_factor(N: int, k: int, l: int) -> float:
    """``N^(1/3)`` for spiked coordinates ``l <= k``, ``N`` otherwise."""
    return N ** (1.0 / 3.0) if l <= k else float(N)


def log_xi_orders(chain: MinorChain, j: int, ns: Sequence[int]) -> List[float]:
    """``log`` of the truncated product of particle ``j`` at each order in ``ns``."""
    if chain.depth < 2:
        raise InvalidDimensionError("chain needs depth >= 2")
    xi = edge_scale(chain.levels[0], chain.N)
    eta = edge_scale(chain.levels[1], chain.N)
    return [log_xi_truncated(xi, eta, j, n, check=False) for n in ns]
