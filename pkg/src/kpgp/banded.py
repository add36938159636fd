"""Band-storage square matrices and their pivoted LU factorization.

Storage follows the LAPACK/``scipy.linalg.solve_banded`` convention:
``bands[ku + i - j, j] == B[i, j]`` for ``-ku <= i - j <= kl``.  The
factorization is LAPACK ``dgbtrf`` (partial pivoting); solves use ``dgbtrs``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg.lapack import dgbtrf, dgbtrs

from .errors import ParameterError, SingularMatrixError

__all__ = [
    "BandedMatrix",
    "BandedFactorization",
    "band_matvec",
    "band_lu",
    "band_solve",
    "band_logdet",
    "band_add_scaled",
]


@dataclass(frozen=True)
class BandedMatrix:
    """Square ``n x n`` matrix with ``kl`` sub- and ``ku`` super-diagonals."""

    n: int
    kl: int
    ku: int
    bands: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParameterError("a banded matrix needs n >= 1")
        if not (0 <= self.kl < self.n and 0 <= self.ku < self.n):
            raise ParameterError(f"bandwidths ({self.kl}, {self.ku}) invalid for n={self.n}")
        if self.bands.shape != (self.kl + self.ku + 1, self.n):
            raise ParameterError(
                f"band storage must have shape {(self.kl + self.ku + 1, self.n)}, "
                f"got {self.bands.shape}"
            )

    @classmethod
    def zeros(cls, n: int, kl: int, ku: int) -> "BandedMatrix":
        return cls(n, kl, ku, np.zeros((kl + ku + 1, n)))

    @classmethod
    def identity(cls, n: int) -> "BandedMatrix":
        return cls(n, 0, 0, np.ones((1, n)))

    @classmethod
    def from_dense(cls, M, kl: int, ku: int) -> "BandedMatrix":
        """Copy the in-band part of ``M``; out-of-band entries are dropped."""
        M = np.asarray(M, dtype=float)
        n = M.shape[0]
        if M.shape != (n, n):
            raise ParameterError("from_dense expects a square matrix")
        bands = np.zeros((kl + ku + 1, n))
        for off in range(-ku, kl + 1):
            diag = np.diagonal(M, -off)
            if off >= 0:
                bands[ku + off, : n - off] = diag
            else:
                bands[ku + off, -off:] = diag
        return cls(n, kl, ku, bands)

    def diagonal(self, off: int = 0) -> np.ndarray:
        """Diagonal ``B[i, i - off]`` (``off > 0`` is below the main diagonal)."""
        if off >= 0:
            return self.bands[self.ku + off, : self.n - off]
        return self.bands[self.ku + off, -off:]

    def to_dense(self) -> np.ndarray:
        M = np.zeros((self.n, self.n))
        for off in range(-self.ku, self.kl + 1):
            if abs(off) >= self.n:
                continue
            idx = np.arange(max(0, off), min(self.n, self.n + off))
            M[idx, idx - off] = self.bands[self.ku + off, idx - off]
        return M

    @property
    def T(self) -> "BandedMatrix":
        bands = np.zeros_like(self.bands)
        for off in range(-self.ku, self.kl + 1):
            d = self.diagonal(off)
            # B[i, i-off] becomes B^T[i-off, i], i.e. offset -off
            if off >= 0:
                bands[self.kl - off, off:] = d
            else:
                bands[self.kl - off, : self.n + off] = d
        return BandedMatrix(self.n, self.ku, self.kl, bands)

    @property
    def nbytes(self) -> int:
        return self.bands.nbytes

    def scale_columns(self, s) -> "BandedMatrix":
        return BandedMatrix(self.n, self.kl, self.ku, self.bands * np.asarray(s)[None, :])

    def __matmul__(self, v):
        return band_matvec(self, v)


@dataclass(frozen=True)
class BandedFactorization:
    """Output of :func:`band_lu`: LAPACK ``gbtrf`` factors plus pivot data."""

    n: int
    kl: int
    ku: int
    lu: np.ndarray
    ipiv: np.ndarray
    pivot_sign: int

    @property
    def u_diagonal(self) -> np.ndarray:
        return self.lu[self.kl + self.ku]

    @property
    def nbytes(self) -> int:
        return self.lu.nbytes + self.ipiv.nbytes

    def solve(self, rhs):
        return band_solve(self, rhs)

    def logdet(self) -> tuple[float, int]:
        return band_logdet(self)


def band_matvec(B: BandedMatrix, v) -> np.ndarray:
    """Multiply ``B @ v`` for a vector or a matrix of column vectors."""
    v = np.asarray(v, dtype=float)
    if v.shape[0] != B.n:
        raise ParameterError(f"length mismatch: matrix order {B.n}, vector {v.shape[0]}")
    out = np.zeros(v.shape)
    n = B.n
    for off in range(-B.ku, B.kl + 1):
        if abs(off) >= n:
            continue
        d = B.diagonal(off)
        if v.ndim > 1:
            d = d.reshape((-1,) + (1,) * (v.ndim - 1))
        if off >= 0:
            out[off:] += d * v[: n - off]
        else:
            out[: n + off] += d * v[-off:]
    return out


def band_lu(B: BandedMatrix) -> BandedFactorization:
    """Partial-pivoting LU of a banded matrix in ``O((kl + ku)^2 n)`` work."""
    ab = np.empty((2 * B.kl + B.ku + 1, B.n), order="F")
    ab[: B.kl] = 0.0
    ab[B.kl :] = B.bands
    lu, ipiv, info = dgbtrf(ab, B.kl, B.ku, overwrite_ab=1)
    if info < 0:
        raise ParameterError(f"dgbtrf rejected argument {-info}")
    if info > 0:
        raise SingularMatrixError(f"exactly zero pivot in column {info - 1}")
    swaps = np.count_nonzero(ipiv != np.arange(B.n))
    return BandedFactorization(B.n, B.kl, B.ku, lu, ipiv, -1 if swaps % 2 else 1)


def band_solve(F: BandedFactorization, rhs, trans: bool = False) -> np.ndarray:
    """Solve ``B x = rhs`` (``B^T x = rhs`` with ``trans``) for one or many columns."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != F.n:
        raise ParameterError(f"rhs has {rhs.shape[0]} rows, expected {F.n}")
    b = rhs.reshape(F.n, -1)
    if b.shape[1] == 0:
        return rhs.copy()
    x, info = dgbtrs(F.lu, F.kl, F.ku, b, F.ipiv, trans=int(trans))
    if info != 0:
        raise ParameterError(f"dgbtrs rejected argument {-info}")
    return x.reshape(rhs.shape)


def band_logdet(F: BandedFactorization) -> tuple[float, int]:
    """Return ``(log|det B|, sign(det B))`` from the factorization."""
    u = F.u_diagonal
    if np.any(u == 0.0):
        raise SingularMatrixError("zero on the diagonal of U")
    sign = F.pivot_sign * (-1 if np.count_nonzero(u < 0) % 2 else 1)
    return float(np.sum(np.log(np.abs(u)))), int(sign)


def band_add_scaled(B1: BandedMatrix, B2: BandedMatrix, alpha: float) -> BandedMatrix:
    """``B1 + alpha * B2`` stored at the larger of the two bandwidths."""
    if B1.n != B2.n:
        raise ParameterError(f"order mismatch: {B1.n} vs {B2.n}")
    kl, ku = max(B1.kl, B2.kl), max(B1.ku, B2.ku)
    bands = np.zeros((kl + ku + 1, B1.n))
    bands[ku - B1.ku : ku + B1.kl + 1] += B1.bands
    if alpha != 0.0:
        bands[ku - B2.ku : ku + B2.kl + 1] += alpha * B2.bands
    return BandedMatrix(B1.n, kl, ku, bands)
