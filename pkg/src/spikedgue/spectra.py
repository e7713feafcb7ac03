"""Minor chains, edge scaling, interlacing checks, semicircle quantiles, rigidity."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from spikedgue.errors import InterlacingError, InvalidDimensionError
from spikedgue.linalg import HermitianMatrix, eigvalsh, principal_minor

INTERLACING_TOL = 1e-12


@dataclass(frozen=True)
class InterlacingReport:
    """Outcome of comparing a spectrum with the spectrum of a one-smaller minor."""

    strict: bool
    degenerate: bool
    max_violation: float
    ties: int


def check_interlacing(outer, inner, tol: float = INTERLACING_TOL) -> InterlacingReport:
    """Compare ``outer[0] >= inner[0] >= outer[1] >= ... >= inner[n-2] >= outer[n-1]``.

    Both inputs are descending. Gaps smaller than ``tol`` times the spectral
    scale count as ties (degenerate); a reversed gap beyond it is a violation.
    """
    outer = np.asarray(outer, dtype=np.float64)
    inner = np.asarray(inner, dtype=np.float64)
    if inner.size != outer.size - 1:
        raise InvalidDimensionError(
            f"minor spectrum must have length {outer.size - 1}, got {inner.size}"
        )
    if inner.size == 0:
        return InterlacingReport(True, False, 0.0, 0)
    scale = max(1.0, float(np.max(np.abs(outer))))
    thr = tol * scale
    gaps = np.concatenate([outer[:-1] - inner, inner - outer[1:]])
    worst = float(max(0.0, -np.min(gaps)))
    ties = int(np.count_nonzero(np.abs(gaps) <= thr))
    violated = bool(np.any(gaps < -thr))
    return InterlacingReport(
        strict=not violated and ties == 0,
        degenerate=ties > 0,
        max_violation=worst,
        ties=ties,
    )


def require_interlacing(outer, inner, tol: float = INTERLACING_TOL) -> InterlacingReport:
    rep = check_interlacing(outer, inner, tol)
    if rep.max_violation > tol * max(1.0, float(np.max(np.abs(outer)))):
        raise InterlacingError(f"spectra fail to interlace (worst reversal {rep.max_violation:.3e})")
    return rep


@dataclass(frozen=True, eq=False)
class MinorChain:
    """Spectra of a matrix and of its leading principal-minor truncations.

    ``levels[j]`` holds the descending eigenvalues after deleting the first
    ``j`` rows and columns. ``reports[j]`` compares levels ``j`` and ``j+1``.
    """

    N: int
    levels: List[np.ndarray]
    reports: List[InterlacingReport] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def degenerate(self) -> bool:
        return any(r.degenerate for r in self.reports)

    @property
    def strictly_interlaced(self) -> bool:
        return all(r.strict for r in self.reports)


def build_minor_chain(m: HermitianMatrix, depth: int) -> MinorChain:
    if not 1 <= depth <= m.dim:
        raise InvalidDimensionError(f"depth must be in [1, {m.dim}], got {depth}")
    levels = [eigvalsh(principal_minor(m, j)) for j in range(depth)]
    return chain_from_levels(levels)


def chain_from_levels(levels) -> MinorChain:
    """Wrap precomputed descending spectra, verifying adjacent interlacing."""
    levels = [np.asarray(v, dtype=np.float64) for v in levels]
    if not levels:
        raise InvalidDimensionError("a chain needs at least one level")
    reports = [require_interlacing(levels[j], levels[j + 1]) for j in range(len(levels) - 1)]
    return MinorChain(N=levels[0].size, levels=levels, reports=reports)


@dataclass(frozen=True, eq=False)
class ScaledEdge:
    coords: np.ndarray


def edge_scale(values, N: int):
    return N ** (1.0 / 6.0) * (np.asarray(values, dtype=np.float64) - 2.0 * np.sqrt(N))


def scaled_edge_coords(level, N: int, m: int) -> ScaledEdge:
    level = np.asarray(level, dtype=np.float64)
    if not 0 <= m <= level.size:
        raise InvalidDimensionError(f"requested {m} coordinates from a level of length {level.size}")
    c = edge_scale(level[:m], N)
    if c.size > 1 and np.any(np.diff(c) >= 0):
        raise ValueError("level is not strictly descending")
    return ScaledEdge(c)


def semicircle_tail(u):
    """Mass of the semicircle density on ``[u, 2]`` (closed form)."""
    u = np.clip(np.asarray(u, dtype=np.float64), -2.0, 2.0)
    return 0.5 - u * np.sqrt(4.0 - u * u) / (4.0 * np.pi) - np.arcsin(u / 2.0) / np.pi


def semicircle_quantile(N: int, i, tol: float = 1e-12):
    """Location of the i-th largest classical eigenvalue, unscaled (order sqrt(N)).

    Solves ``semicircle_tail(u) = (i - 1/2) / N`` by bisection and returns
    ``u * sqrt(N)``. Accepts an integer or an array of indices.
    """
    idx = np.asarray(i)
    if np.any(idx < 1) or np.any(idx > N):
        raise InvalidDimensionError(f"index must be in [1, {N}]")
    target = (idx.astype(np.float64) - 0.5) / N
    lo = np.full(target.shape, -2.0)
    hi = np.full(target.shape, 2.0)
    # tail is decreasing in u; density <= 1/pi bounds the residual by width/pi
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        above = semicircle_tail(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    u = 0.5 * (lo + hi)
    out = u * np.sqrt(N)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class RigidityReport:
    N: int
    epsilon: float
    cut: float
    checked: int
    satisfied_fraction: float
    worst_index: int
    worst_deviation: float
    edge_checked: int
    edge_satisfied_fraction: Optional[float]

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def rigidity_report(chain, epsilon: float = 0.1, c: float = 0.1) -> RigidityReport:
    """Fraction of indices ``i <= (1-c)N`` with ``|sigma_i - Upsilon_i| <= N^(eps-1/6) i^(-1/3)``.

    ``chain`` may be a MinorChain or a bare descending spectrum.
    ``worst_deviation`` is the largest ratio of deviation to bound, attained
    at ``worst_index``. The edge block ``i <= N^(1/10)`` is reported apart.
    """
    sig = np.asarray(chain.levels[0] if isinstance(chain, MinorChain) else chain, dtype=np.float64)
    N = sig.size
    if N == 0:
        raise InvalidDimensionError("empty spectrum")
    last = max(1, int(np.floor((1.0 - c) * N)))
    idx = np.arange(1, last + 1)
    ups = np.atleast_1d(semicircle_quantile(N, idx))
    bound = N ** (epsilon - 1.0 / 6.0) * idx ** (-1.0 / 3.0)
    ratio = np.abs(sig[:last] - ups) / bound
    ok = ratio <= 1.0
    w = int(np.argmax(ratio))
    n_edge = min(last, int(np.floor(N ** 0.1)))
    return RigidityReport(
        N=N,
        epsilon=float(epsilon),
        cut=float(c),
        checked=int(last),
        satisfied_fraction=float(np.mean(ok)),
        worst_index=w + 1,
        worst_deviation=float(ratio[w]),
        edge_checked=n_edge,
        edge_satisfied_fraction=float(np.mean(ok[:n_edge])) if n_edge else None,
    )
