"""Hermitian matrices: GUE sampling, critical spikes, eigendecomposition, minors.

Eigenvalues are always returned in descending order, matching the indexing
``sigma_1 > sigma_2 > ... > sigma_N`` used throughout the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.linalg

from spikedgue.errors import (
    DegenerateSpectrumError,
    DimensionMismatchError,
    EigenSolverError,
    InvalidDimensionError,
)

SeedLike = Union[int, np.random.Generator]

#: relative gap below which a spectrum is treated as degenerate
DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Dense complex Hermitian matrix, read-only after construction."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.complex128, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise InvalidDimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.conj().T):
            raise ValueError("matrix is not exactly Hermitian")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries))


@dataclass(frozen=True)
class SpikeConfig:
    """Spike strengths in the critical window, alpha_i = sqrt(N) + N^(1/6) a_{k-i+1}."""

    N: int
    k: int
    a: tuple = ()

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        object.__setattr__(self, "a", a)
        if self.N < 1:
            raise InvalidDimensionError(f"N must be >= 1, got {self.N}")
        if not 0 <= self.k <= self.N:
            raise InvalidDimensionError(f"need 0 <= k <= N, got k={self.k}, N={self.N}")
        if len(a) != self.k:
            raise DimensionMismatchError(f"expected {self.k} offsets, got {len(a)}")

    @property
    def alphas(self) -> np.ndarray:
        n = float(self.N)
        return np.array(
            [np.sqrt(n) + n ** (1.0 / 6.0) * self.a[self.k - 1 - i] for i in range(self.k)],
            dtype=np.float64,
        )


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Descending eigenvalues with unit eigenvectors stored column-wise."""

    values: np.ndarray
    vectors: np.ndarray

    def residual(self, m: HermitianMatrix) -> float:
        """Relative Frobenius reconstruction error ||M - V diag(values) V*|| / ||M||."""
        v = self.vectors
        recon = (v * self.values) @ v.conj().T
        scale = m.frobenius_norm() or 1.0
        return float(np.linalg.norm(m.entries - recon) / scale)

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=0)


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_gue(n: int, seed: SeedLike) -> HermitianMatrix:
    """Standard GUE: diagonal N(0,1), off-diagonal N(0,1/2) + i N(0,1/2).

    Draw order is fixed (diagonal, then real parts, then imaginary parts of
    the strict upper triangle in row-major order), so a seed fully
    determines the matrix. Normals come from numpy's ziggurat sampler.
    """
    if n < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {n}")
    rng = make_rng(seed)
    diag = rng.standard_normal(n)
    iu = np.triu_indices(n, 1)
    m = iu[0].size
    re = rng.standard_normal(m) * np.sqrt(0.5)
    im = rng.standard_normal(m) * np.sqrt(0.5)
    g = np.zeros((n, n), dtype=np.complex128)
    g[iu] = re + 1j * im
    g = g + g.conj().T
    g[np.diag_indices(n)] = diag
    return HermitianMatrix(g)


def apply_spikes(m: HermitianMatrix, cfg: SpikeConfig) -> HermitianMatrix:
    if cfg.N != m.dim:
        raise DimensionMismatchError(f"config N={cfg.N} but matrix has dim {m.dim}")
    if cfg.k == 0:
        return m
    a = m.entries.copy()
    idx = np.arange(cfg.k)
    a[idx, idx] += cfg.alphas
    return HermitianMatrix(a)


def spiked_gue(cfg: SpikeConfig, seed: SeedLike) -> HermitianMatrix:
    return apply_spikes(sample_gue(cfg.N, seed), cfg)


def _check_gaps(values: np.ndarray, scale: float) -> None:
    if values.size < 2:
        return
    gaps = values[:-1] - values[1:]
    i = int(np.argmin(gaps))
    if gaps[i] < DEGENERACY_RTOL * max(scale, np.finfo(float).tiny):
        raise DegenerateSpectrumError(
            f"eigenvalues {i + 1} and {i + 2} are separated by {gaps[i]:.3e}"
        )


def _spectral_scale(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if values.size else 0.0


def eigh(m: HermitianMatrix, check: bool = True) -> EigenSystem:
    """Full eigendecomposition, descending.

    With ``check`` the reconstruction residual and column norms are verified
    (contract: residual <= 1e-10, norms 1 +- 1e-10).
    """
    try:
        w, v = np.linalg.eigh(m.entries)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(
            f"eigh failed to converge: {exc}", {"dim": m.dim, "driver": "numpy.linalg.eigh"}
        ) from exc
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    _check_gaps(w, _spectral_scale(w))
    es = EigenSystem(w, v)
    if check:
        res = es.residual(m)
        norm_err = float(np.max(np.abs(es.column_norms() - 1.0)))
        if res > 1e-10 or norm_err > 1e-10:
            raise EigenSolverError(
                "eigendecomposition failed its accuracy contract",
                {"dim": m.dim, "residual": res, "norm_error": norm_err},
            )
    return es


def eigvalsh(m: HermitianMatrix) -> np.ndarray:
    """Eigenvalues only, descending, with the degeneracy check."""
    try:
        w = np.linalg.eigvalsh(m.entries)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(
            f"eigvalsh failed to converge: {exc}", {"dim": m.dim, "driver": "numpy.linalg.eigvalsh"}
        ) from exc
    w = w[::-1].copy()
    _check_gaps(w, _spectral_scale(w))
    return w


def eigh_top(m: HermitianMatrix, count: int) -> EigenSystem:
    """Leading ``count`` eigenpairs only (LAPACK MRRR driver)."""
    n = m.dim
    if not 1 <= count <= n:
        raise InvalidDimensionError(f"count must be in [1, {n}], got {count}")
    try:
        w, v = scipy.linalg.eigh(
            m.entries, subset_by_index=[n - count, n - 1], driver="evr", check_finite=False
        )
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverError(
            f"subset eigh failed: {exc}", {"dim": n, "count": count, "driver": "evr"}
        ) from exc
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    _check_gaps(w, _spectral_scale(w))
    return EigenSystem(w, v)


def principal_minor(m: HermitianMatrix, drop: int) -> HermitianMatrix:
    """Delete the first ``drop`` rows and columns."""
    if not 0 <= drop < m.dim:
        raise InvalidDimensionError(f"drop must be in [0, {m.dim - 1}], got {drop}")
    if drop == 0:
        return m
    return HermitianMatrix(m.entries[drop:, drop:])


def delete_index(m: HermitianMatrix, l: int) -> HermitianMatrix:
    """Minor with the ``l``-th row and column (1-based) removed."""
    if not 1 <= l <= m.dim or m.dim < 2:
        raise InvalidDimensionError(f"cannot delete index {l} from a {m.dim}x{m.dim} matrix")
    keep = np.delete(np.arange(m.dim), l - 1)
    return HermitianMatrix(m.entries[np.ix_(keep, keep)])


def swap_conjugate(m: HermitianMatrix, l: int) -> HermitianMatrix:
    """Conjugate by the permutation exchanging coordinates 1 and ``l`` (1-based).

    Component ``l`` of an eigenvector of ``m`` becomes component 1 of the
    matching eigenvector of the result; the spectrum is unchanged.
    """
    if not 1 <= l <= m.dim:
        raise InvalidDimensionError(f"index {l} out of range for dim {m.dim}")
    perm = np.arange(m.dim)
    perm[[0, l - 1]] = perm[[l - 1, 0]]
    return HermitianMatrix(m.entries[np.ix_(perm, perm)])


def hermitian(a: Sequence) -> HermitianMatrix:
    """Shorthand constructor for literal matrices."""
    return HermitianMatrix(np.asarray(a))
