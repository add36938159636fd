"""Kernel packets: compactly supported combinations of Matérn translates.

A central packet on knots ``a_1 < ... < a_k`` (``k = 2p + 3``) is
``phi(x) = sum_t A_t K(x, a_t)`` with coefficients spanning the null space of

    sum_t A_t a_t^l exp(+-c a_t) = 0,    l = 0 .. (k - 3) / 2.

The rows span the kernel of ``(D + c)^m (D - c)^m`` sampled at the knots, so
the null vector annihilates that whole function space.  One-sided packets
drop some of the ``exp(+c a)`` (right-sided) or ``exp(-c a)`` (left-sided)
rows and are supported on a half line.

Numerics
--------
* Knots are shifted (midpoint for central packets, first/last knot for
  one-sided ones) and scaled to unit half-span before solving.
* When ``c * halfspan <= 1`` the rows are replaced by a Taylor-normalised
  basis ``E_i`` of the same function space (``E_i^{(j)}(0) = delta_ij``); the
  raw exponential rows become nearly collinear in that regime.
* Columns are scaled to unit max before the SVD so a knot far from the rest
  (``c * gap >> 1``) does not swamp the others.  When the trailing singular
  value is still below ``GRADED_TOL`` of the leading one, double precision
  cannot isolate the null vector and the window is redone in mpmath.
* Near the boundary of its support (``c * distance <= GFORM_MAX``) a packet is
  evaluated as ``sum A_t g(c |x - a_t|)`` over the knots on one side of ``x``
  only, where ``g(rho) = P(rho) e^{-rho} -
  P(-rho) e^{rho}`` is the non-analytic part of the kernel.  This subtracts
  the identically-zero analytic continuation of the packet and avoids the
  cancellation of the plain sum when knots are close relative to ``1/c``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Iterator, Optional

import mpmath as mp
import numpy as np

from .banded import BandedMatrix
from .errors import (
    ConditioningError,
    DegenerateDesignError,
    InsufficientDataError,
    ParameterError,
)
from .matern import HalfIntegerMatern

__all__ = [
    "KpCoefficients",
    "KpBasis",
    "BasisRow",
    "central_kp_coefficients",
    "right_kp_coefficients",
    "left_kp_coefficients",
    "system_matrix",
    "build_basis",
    "evaluate_basis_row",
    "evaluate_basis_rows",
    "basis_dump_lines",
]

# c * (standardised half-span) at or below which the Taylor basis is used
SERIES_MAX = 1.0
# largest rho = c * |x - a_t| for which the one-sided difference form is used
GFORM_MAX = 2.0
# c * (a_s - a_1) beyond which exp(+-c a) leaves the double range
EXP_GUARD = 700.0
EQUAL_SPACING_RTOL = 1e-12
# trailing singular-value ratio below which a window is solved in extended precision
GRADED_TOL = 1e-12
_CHUNK = 1 << 15
_N_TAYLOR = 30


@dataclass(frozen=True)
class KpCoefficients:
    """Coefficients of one packet on its knots.

    ``kind`` is ``"central"``, ``"left"`` (support ``(-inf, a_s]``) or
    ``"right"`` (support ``[a_1, inf)``).
    """

    knots: np.ndarray
    coeffs: np.ndarray
    kind: str

    def __call__(self, kern: HalfIntegerMatern, x) -> np.ndarray:
        """Plain ``sum_t A_t K(x, a_t)``; no support truncation."""
        x = np.asarray(x, dtype=float)
        return np.tensordot(kern(x[..., None], self.knots), self.coeffs, axes=1)


@dataclass(frozen=True)
class BasisRow:
    window_start: int
    values: np.ndarray


# ---------------------------------------------------------------------------
# coefficient systems
# ---------------------------------------------------------------------------


def _counts(k: int, s: int, kind: str) -> tuple[int, int]:
    """Number of ``exp(-c a)`` rows and ``exp(+c a)`` rows."""
    m = (k - 1) // 2
    if kind == "central":
        return m, m
    aux = s - (k + 1) // 2
    return (m, aux) if kind == "right" else (aux, m)


def _standardise(a: np.ndarray, kind: str) -> tuple[np.ndarray, np.ndarray]:
    """Shift and scale knot windows (rows of ``a``); returns (a_tilde, halfspan)."""
    if kind == "central":
        half = 0.5 * (a[:, -1] - a[:, 0])
        at = (a - 0.5 * (a[:, -1] + a[:, 0])[:, None]) / half[:, None]
    elif kind == "right":
        half = a[:, -1] - a[:, 0]
        at = (a - a[:, :1]) / half[:, None]
    else:
        half = a[:, -1] - a[:, 0]
        at = (a - a[:, -1:]) / half[:, None]
    return at, half


def _taylor_rows(at: np.ndarray, ct: np.ndarray, m_minus: int, m_plus: int) -> np.ndarray:
    """Rows ``E_i(a_t)`` for the Taylor-normalised basis of ker (D+c)^m- (D-c)^m+."""
    N = m_minus + m_plus
    beta = np.polynomial.polynomial.polyfromroots([-1.0] * m_minus + [1.0] * m_plus)
    W = at.shape[0]
    # b_q = beta_q * c^(N - q), q < N; beta_N = 1
    b = beta[None, :N] * ct[:, None] ** (N - np.arange(N))[None, :]
    T = N + _N_TAYLOR
    f = np.zeros((W, N, T))
    f[:, np.arange(N), np.arange(N)] = 1.0
    for n in range(N, T):
        f[:, :, n] = -np.einsum("wq,wiq->wi", b, f[:, :, n - N : n])
    inv_fact = np.array([1.0 / factorial(n) for n in range(T)])
    powers = at[:, :, None] ** np.arange(T)[None, None, :] * inv_fact
    return np.einsum("win,wtn->wit", f, powers)


def _exp_rows(at: np.ndarray, ct: np.ndarray, m_minus: int, m_plus: int) -> np.ndarray:
    rows = []
    for delta, m in ((-1.0, m_minus), (1.0, m_plus)):
        if m == 0:
            continue
        ex = delta * ct[:, None] * at
        e = np.exp(ex - ex.max(axis=1, keepdims=True))
        for l in range(m):
            rows.append(at**l * e)
    return np.stack(rows, axis=1)


def _system(kern: HalfIntegerMatern, a: np.ndarray, kind: str) -> np.ndarray:
    """Row-equilibrated systems, one per window (rows of ``a``)."""
    k = kern.k
    s = a.shape[1]
    m_minus, m_plus = _counts(k, s, kind)
    at, half = _standardise(a, kind)
    ct = kern.c * half
    M = np.empty((a.shape[0], m_minus + m_plus, s))
    small = ct <= SERIES_MAX
    if np.any(small):
        M[small] = _taylor_rows(at[small], ct[small], m_minus, m_plus)
    if not np.all(small):
        M[~small] = _exp_rows(at[~small], ct[~small], m_minus, m_plus)
    return M / np.abs(M).max(axis=2, keepdims=True)


def _check_windows(kern: HalfIntegerMatern, a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise ParameterError("knots must be finite")
    if np.any(np.diff(a, axis=1) <= 0):
        raise DegenerateDesignError("knots must be strictly increasing and distinct")
    span = kern.c * (a[:, -1] - a[:, 0])
    if np.any(span > EXP_GUARD):
        raise ConditioningError(
            f"c * (a_s - a_1) = {span.max():.1f} exceeds {EXP_GUARD}; exp() out of range"
        )


def _solve_windows(kern: HalfIntegerMatern, a: np.ndarray, kind: str) -> np.ndarray:
    """Normalised null vectors for a batch of windows of equal length."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    _check_windows(kern, a)
    M = _system(kern, a, kind)
    # column scaling keeps knots far apart (c * gap >> 1) from swamping each other
    D = 1.0 / np.abs(M).max(axis=1, keepdims=True)
    MD = M * D
    MD = MD / np.abs(MD).max(axis=2, keepdims=True)
    # distinct knots always give a one-dimensional null space; tiny trailing
    # singular values here come from grading (far-apart knots), not rank loss
    _, S, Vt = np.linalg.svd(MD)
    A = Vt[:, -1, :] * D[:, 0, :]
    # but then double precision cannot single out the null vector: redo those in mpmath
    for w in np.nonzero(S[:, -1] < GRADED_TOL * S[:, 0])[0]:
        A[w] = _precise_null(kern, a[w], kind)
    if not np.all(np.isfinite(A)):
        raise ConditioningError("packet coefficients are not finite")
    A = A / np.abs(A).max(axis=1, keepdims=True)
    first = np.argmax(np.abs(A) > 1e-12, axis=1)
    sign = np.sign(A[np.arange(A.shape[0]), first])
    return A * sign[:, None]


def _precise_null(kern: HalfIntegerMatern, a: np.ndarray, kind: str) -> np.ndarray:
    """Null vector of the exponential system in extended precision, one window."""
    s = a.size
    m_minus, m_plus = _counts(kern.k, s, kind)
    span = kern.c * (a[-1] - a[0])
    # exp(+-c a) spans e^span; clustered knots cost digits as well
    tiny = max(0.0, -np.log10(kern.c * np.min(np.diff(a))))
    with mp.workdps(int(30 + span / 2.3 + 2 * s * tiny)):
        c = mp.sqrt(2 * kern.p + 1) / mp.mpf(kern.omega)
        knots = [mp.mpf(float(v)) for v in a]
        origin = {"central": (knots[0] + knots[-1]) / 2, "right": knots[0], "left": knots[-1]}[kind]
        t = [v - origin for v in knots]
        rows = []
        for delta, count in ((-1, m_minus), (1, m_plus)):
            for l in range(count):
                rows.append([v**l * mp.exp(delta * c * v) for v in t])
        # the last column of Q in a full QR of M^T is orthogonal to every row
        Q, _ = mp.qr(mp.matrix(rows).T, mode="full")
        return np.array([float(Q[i, s - 1]) for i in range(s)])


def system_matrix(kern: HalfIntegerMatern, a, kind: str = "central") -> np.ndarray:
    """Equilibrated system matrix (as solved) for one knot window."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    _check_windows(kern, a)
    return _system(kern, a, kind)[0]


def _validate_one_sided(kern: HalfIntegerMatern, s: int) -> None:
    k = kern.k
    if not (k + 1) // 2 <= s <= k - 1:
        raise ParameterError(f"one-sided packets need {(k + 1) // 2} <= s <= {k - 1}, got s={s}")


def central_kp_coefficients(kern: HalfIntegerMatern, a) -> KpCoefficients:
    a = np.asarray(a, dtype=float)
    if a.shape != (kern.k,):
        raise ParameterError(f"a central packet needs exactly k={kern.k} knots")
    return KpCoefficients(a, _solve_windows(kern, a, "central")[0], "central")


def right_kp_coefficients(kern: HalfIntegerMatern, a) -> KpCoefficients:
    a = np.asarray(a, dtype=float)
    _validate_one_sided(kern, a.size)
    return KpCoefficients(a, _solve_windows(kern, a, "right")[0], "right")


def left_kp_coefficients(kern: HalfIntegerMatern, a) -> KpCoefficients:
    a = np.asarray(a, dtype=float)
    _validate_one_sided(kern, a.size)
    return KpCoefficients(a, _solve_windows(kern, a, "left")[0], "left")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _gap_series(p: int, poly: np.ndarray, nterms: int = 40) -> np.ndarray:
    """Odd Taylor coefficients of g(rho) = P(rho)e^-rho - P(-rho)e^rho."""
    h = np.zeros(nterms)
    for n in range(nterms):
        for i in range(min(n, p) + 1):
            h[n] += poly[i] * (-1.0) ** (n - i) / factorial(n - i)
    g = np.zeros(nterms)
    odd = np.arange(2 * p + 1, nterms, 2)
    g[odd] = 2.0 * h[odd]
    return g


def _gap(kern: HalfIntegerMatern, rho: np.ndarray) -> np.ndarray:
    """g(rho) for rho >= 0: series below 1, closed form above."""
    series = _gap_series(kern.p, kern.poly)
    poly = np.polynomial.polynomial
    out = np.empty_like(rho)
    small = rho <= 1.0
    out[small] = poly.polyval(rho[small], series)
    r = rho[~small]
    out[~small] = poly.polyval(r, kern.poly) * np.exp(-r) - poly.polyval(-r, kern.poly) * np.exp(r)
    return out


def _packet_values(
    kern: HalfIntegerMatern,
    a: np.ndarray,
    A: np.ndarray,
    side: np.ndarray,
    x: np.ndarray,
) -> np.ndarray:
    """Evaluate packets with knots ``a`` (..., s), coefficients ``A`` at ``x`` (...).

    ``side`` (...) is +1 where the packet vanishes identically to the left of
    its knots (central or right-sided), -1 where it vanishes to the right
    (central or left-sided), 0 where both hold.  Padding knots carry A = 0.
    """
    c = kern.c
    d = x[..., None] - a
    direct = np.einsum("...t,...t->...", A, kern.of_distance(d))
    # central packets: take the identity whose side of x is closer
    use_left = np.where(side == 0, (x - a[..., 0]) <= (a[..., -1] - x), side > 0)
    rho_max = c * np.where(use_left, x - a[..., 0], a[..., -1] - x)
    ok = rho_max <= GFORM_MAX
    if not np.any(ok):
        return direct
    d_ok = d[ok]
    left_ok = use_left[ok][:, None]
    rho = c * np.where(left_ok, d_ok, -d_ok)
    active = rho > 0
    gval = np.zeros_like(rho)
    gval[active] = _gap(kern, rho[active])
    # left identity: sum over a_t < x of A_t g(c(x - a_t)); right: a_t > x
    direct[ok] = np.einsum("wt,wt->w", A[ok], gval)
    return direct


# ---------------------------------------------------------------------------
# basis assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KpBasis:
    """Kernel-packet basis on sorted knots, realising ``K A = Phi``.

    ``A`` has bandwidth ``(k-1)/2`` and its band storage row ``t`` holds the
    coefficient of knot ``j - (k-1)/2 + t`` in basis function ``j``.  ``Phi``
    has bandwidth ``(k-3)/2``.
    """

    kernel: HalfIntegerMatern
    knots: np.ndarray
    A: BandedMatrix
    Phi: BandedMatrix
    equally_spaced: bool

    @property
    def n(self) -> int:
        return self.knots.size

    @property
    def half(self) -> int:
        return (self.kernel.k - 1) // 2

    def kind(self, j: int) -> str:
        if j < self.half:
            return "left"
        if j >= self.n - self.half:
            return "right"
        return "central"

    def packet(self, j: int) -> KpCoefficients:
        h = self.half
        lo, hi = max(0, j - h), min(self.n, j + h + 1)
        coeffs = self.A.bands[lo - j + h : hi - j + h, j].copy()
        return KpCoefficients(self.knots[lo:hi].copy(), coeffs, self.kind(j))

    def packets(self) -> Iterator[KpCoefficients]:
        for j in range(self.n):
            yield self.packet(j)

    @property
    def nbytes(self) -> int:
        return self.knots.nbytes + self.A.nbytes + self.Phi.nbytes

    def rescale_columns(self, s) -> "KpBasis":
        """Same basis with column ``j`` of A and Phi multiplied by ``s[j]``."""
        return KpBasis(
            self.kernel,
            self.knots,
            self.A.scale_columns(s),
            self.Phi.scale_columns(s),
            self.equally_spaced,
        )

    def _gather(self, cols: np.ndarray):
        """Knot windows, coefficients and side flags for basis columns ``cols``."""
        h = self.half
        n = self.n
        t = np.arange(2 * h + 1)
        idx = cols[..., None] - h + t
        valid = (idx >= 0) & (idx < n)
        idx_c = np.clip(idx, 0, n - 1)
        A = np.where(valid, self.A.bands[t, cols[..., None]], 0.0)
        a = self.knots[idx_c]
        side = np.where(cols < h, -1, np.where(cols >= n - h, 1, 0))
        return a, A, side

    def values(self, cols: np.ndarray, x: np.ndarray) -> np.ndarray:
        """``phi_cols(x)`` assuming ``x`` lies in each column's support."""
        a, A, side = self._gather(cols)
        return _packet_values(self.kernel, a, A, side, x)


def _is_equally_spaced(x: np.ndarray) -> bool:
    gaps = np.diff(x)
    if gaps.size == 0:
        return True
    g0 = gaps.mean()
    return bool(np.max(np.abs(gaps - g0)) <= EQUAL_SPACING_RTOL * abs(g0))


def build_basis(kern: HalfIntegerMatern, knots) -> KpBasis:
    """Assemble the full basis: left-sided, central, then right-sided packets."""
    x = np.asarray(knots, dtype=float).ravel()
    k = kern.k
    n = x.size
    if n < k:
        raise InsufficientDataError(f"need at least k={k} knots, got {n}")
    if not np.all(np.isfinite(x)):
        raise ParameterError("knots must be finite")
    if np.any(np.diff(x) <= 0):
        raise DegenerateDesignError("knots must be strictly increasing and distinct")
    h = (k - 1) // 2
    equal = _is_equally_spaced(x)

    coef = np.zeros((k, n))  # band storage of A, kl = ku = h
    for j in range(h):
        s = h + 1 + j
        coef[h - j :, j] = _solve_windows(kern, x[None, :s], "left")[0]
        coef[: s, n - 1 - j] = _solve_windows(kern, x[None, n - s :], "right")[0]
    n_central = n - k + 1
    if equal:
        coef[:, h : n - h] = _solve_windows(kern, x[None, :k], "central")[0][:, None]
    else:
        win = np.lib.stride_tricks.sliding_window_view(x, k)
        for lo in range(0, n_central, _CHUNK):
            hi = min(n_central, lo + _CHUNK)
            coef[:, h + lo : h + hi] = _solve_windows(kern, win[lo:hi], "central").T
    A = BandedMatrix(n, h, h, coef)

    basis = KpBasis(kern, x, A, BandedMatrix.zeros(n, h - 1, h - 1), equal)
    phi = np.zeros((2 * h - 1, n))
    for lo in range(0, n, _CHUNK):
        cols = np.arange(lo, min(n, lo + _CHUNK))
        for off in range(-(h - 1), h):
            rows = cols + off
            ok = (rows >= 0) & (rows < n)
            phi[h - 1 + off, cols[ok]] = basis.values(cols[ok], x[rows[ok]])
    return KpBasis(kern, x, A, BandedMatrix(n, h - 1, h - 1, phi), equal)


# ---------------------------------------------------------------------------
# rows of phi(x*)
# ---------------------------------------------------------------------------


def _interval_index(basis: KpBasis, xs: np.ndarray) -> np.ndarray:
    """``i`` with ``x_i <= x* < x_{i+1}`` (``-1`` left of the data)."""
    x = basis.knots
    if basis.equally_spaced and x.size > 1:
        step = (x[-1] - x[0]) / (x.size - 1)
        i = np.floor((xs - x[0]) / step).astype(np.int64)
        i = np.clip(i, -1, x.size - 1)
        # one-step correction for rounding at knot boundaries
        i = np.where((i >= 0) & (xs < x[np.clip(i, 0, None)]), i - 1, i)
        nxt = np.clip(i + 1, 0, x.size - 1)
        i = np.where((i + 1 < x.size) & (xs >= x[nxt]), i + 1, i)
        return i
    # searchsorted narrows its bracket from the previous key when keys ascend
    return np.searchsorted(x, xs, side="right") - 1


def evaluate_basis_rows(basis: KpBasis, xs) -> tuple[np.ndarray, np.ndarray]:
    """Nonzero basis values at many points.

    Returns ``(starts, values)`` where ``values[m, r]`` is
    ``phi_{starts[m] + r}(xs[m])`` for ``r < k - 1`` (zero where the index
    falls outside ``0 .. n-1``).
    """
    xs = np.asarray(xs, dtype=float).ravel()
    h = basis.half
    n = basis.n
    width = 2 * h
    starts = _interval_index(basis, xs) + 1 - h
    values = np.zeros((xs.size, width))
    for lo in range(0, xs.size, _CHUNK):
        sl = slice(lo, min(xs.size, lo + _CHUNK))
        cols = starts[sl, None] + np.arange(width)
        ok = (cols >= 0) & (cols < n)
        xx = np.broadcast_to(xs[sl, None], cols.shape)
        block = np.zeros(cols.shape)
        block[ok] = basis.values(cols[ok], xx[ok])
        values[sl] = block
    return starts, values


def _locate(x: np.ndarray, xs: float, hint: Optional[int]) -> int:
    n = x.size
    if hint is not None:
        i = int(hint)
        for cand in (i, i + 1, i - 1):
            lo_ok = cand < 0 or (cand < n and x[cand] <= xs)
            hi_ok = cand + 1 >= n or xs < x[cand + 1]
            if -1 <= cand < n and lo_ok and hi_ok:
                return cand
    return int(np.searchsorted(x, xs, side="right")) - 1


def evaluate_basis_row(basis: KpBasis, xs: float, hint: Optional[int] = None) -> BasisRow:
    """Nonzero basis values at one point; ``hint`` is a guess for the knot interval."""
    h = basis.half
    i = _locate(basis.knots, float(xs), hint)
    start = i + 1 - h
    cols = np.arange(start, start + 2 * h)
    cols = cols[(cols >= 0) & (cols < basis.n)]
    vals = basis.values(cols, np.full(cols.size, float(xs)))
    return BasisRow(int(cols[0]) if cols.size else max(start, 0), vals)


def basis_dump_lines(basis: KpBasis) -> Iterator[str]:
    """Text table ``j kind window_start window_len coeffs...``, one row per function."""
    h = basis.half
    for j in range(basis.n):
        pk = basis.packet(j)
        start = max(0, j - h)
        coeffs = " ".join(f"{v:.17g}" for v in pk.coeffs)
        yield f"{j} {pk.kind} {start} {pk.coeffs.size} {coeffs}"
