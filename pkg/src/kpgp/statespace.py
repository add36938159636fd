"""Exact linear-time GP regression for noisy 1-D data via the Markov state of the process.

A half-integer Matérn process ``f`` together with its first ``p`` derivatives
is a stationary Gauss-Markov process.  We use the dimensionless state
``z_i = f^(i) / c^i`` so every covariance entry is a polynomial in ``rho = c t``
times ``exp(-rho)``; the Kalman filter then whitens the data and the RTS
smoother produces exact posterior moments at query points.

This route is used for noisy data when ``Phi + eta A`` cannot be formed
accurately in double precision (see :func:`kpgp.gp1d.fit_1d`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import NumericalBreakdown, ParameterError
from .matern import HalfIntegerMatern

__all__ = ["StateSpaceMatern", "FilterPass", "kalman_whiten", "rts_posterior"]


def _derivative_polys(poly: np.ndarray, order: int) -> list[np.ndarray]:
    """``q_m`` with ``d^m/drho^m [q(rho) e^-rho] = q_m(rho) e^-rho``."""
    out = [np.asarray(poly, dtype=float)]
    for _ in range(order):
        q = out[-1]
        out.append(P.polysub(P.polyder(q), q) if q.size > 1 else -q)
    return out


@dataclass(frozen=True)
class StateSpaceMatern:
    kernel: HalfIntegerMatern

    @property
    def dim(self) -> int:
        return self.kernel.p + 1

    def _cross(self, rho: np.ndarray) -> np.ndarray:
        """``Cov(z(t + r), z(t))`` for ``rho = c r >= 0``, shape ``(m, d, d)``."""
        d = self.dim
        qs = _derivative_polys(self.kernel.poly, 2 * d - 2)
        rho = np.asarray(rho, dtype=float)
        e = np.exp(-rho)
        vals = [P.polyval(rho, q) * e for q in qs]
        C = np.empty(rho.shape + (d, d))
        for i in range(d):
            for j in range(d):
                C[..., i, j] = (-1) ** j * vals[i + j]
        return C

    def stationary(self) -> np.ndarray:
        return self._cross(np.zeros(()))

    def transitions(self, gaps) -> tuple[np.ndarray, np.ndarray]:
        """Transition matrices and process-noise covariances for each gap."""
        gaps = np.asarray(gaps, dtype=float)
        if np.any(gaps < 0):
            raise ParameterError("gaps must be non-negative")
        Pinf = self.stationary()
        C = self._cross(self.kernel.c * gaps)
        T = np.linalg.solve(Pinf, np.swapaxes(C, -1, -2))
        T = np.swapaxes(T, -1, -2)
        Q = Pinf - T @ np.swapaxes(C, -1, -2)
        Q = 0.5 * (Q + np.swapaxes(Q, -1, -2))
        return T, Q


@dataclass
class FilterPass:
    """Result of whitening a block of columns through the Kalman filter."""

    white: np.ndarray  # (n, ncols): L^{-1} columns, where L L^T = K + eta I
    log_s: np.ndarray  # (n,): log innovation variances, summing to log det(K + eta I)

    @property
    def logdet(self) -> float:
        return float(np.sum(self.log_s))


def kalman_whiten(ss: StateSpaceMatern, x: np.ndarray, cols: np.ndarray, eta: float) -> FilterPass:
    """Apply ``L^{-1}`` to the columns of ``cols``; ``x`` strictly increasing.

    The gains do not depend on the data, so every column shares one pass.
    """
    if not eta > 0:
        raise ParameterError("the state-space route needs a positive nugget ratio")
    x = np.asarray(x, dtype=float)
    cols = np.asarray(cols, dtype=float).reshape(x.size, -1)
    T, Q = ss.transitions(np.diff(x))
    Pm = ss.stationary()
    m = np.zeros((ss.dim, cols.shape[1]))
    white = np.empty_like(cols)
    log_s = np.empty(x.size)
    for i in range(x.size):
        if i:
            m = T[i - 1] @ m
            Pm = T[i - 1] @ Pm @ T[i - 1].T + Q[i - 1]
        s = Pm[0, 0] + eta
        if not s > 0:
            raise NumericalBreakdown("non-positive innovation variance in the Kalman filter")
        g = Pm[:, 0] / s
        v = cols[i] - m[0]
        white[i] = v / np.sqrt(s)
        log_s[i] = np.log(s)
        m = m + np.outer(g, v)
        IKH = np.eye(ss.dim)
        IKH[:, 0] -= g
        Pm = IKH @ Pm @ IKH.T + eta * np.outer(g, g)
    return FilterPass(white, log_s)


def rts_posterior(
    ss: StateSpaceMatern, x: np.ndarray, r: np.ndarray, eta: float, xs: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean (of the zero-mean residual process) and correlation-scale
    variance at ``xs``, given residuals ``r`` observed at increasing ``x``."""
    x = np.asarray(x, dtype=float)
    xs = np.asarray(xs, dtype=float).ravel()
    t = np.concatenate([x, xs])
    is_obs = np.concatenate([np.ones(x.size, bool), np.zeros(xs.size, bool)])
    # stable sort keeps observations ahead of coincident queries
    order = np.argsort(t, kind="stable")
    t, is_obs = t[order], is_obs[order]
    y = np.zeros(t.size)
    y[is_obs] = np.asarray(r, dtype=float)
    N, d = t.size, ss.dim
    T, Q = ss.transitions(np.diff(t))
    mp = np.empty((N, d))
    Pp = np.empty((N, d, d))
    mf = np.empty((N, d))
    Pf = np.empty((N, d, d))
    m = np.zeros(d)
    Pm = ss.stationary()
    for i in range(N):
        if i:
            m = T[i - 1] @ m
            Pm = T[i - 1] @ Pm @ T[i - 1].T + Q[i - 1]
        mp[i], Pp[i] = m, Pm
        if is_obs[i]:
            s = Pm[0, 0] + eta
            g = Pm[:, 0] / s
            m = m + g * (y[i] - m[0])
            IKH = np.eye(d)
            IKH[:, 0] -= g
            Pm = IKH @ Pm @ IKH.T + eta * np.outer(g, g)
        mf[i], Pf[i] = m, Pm
    ms = mf.copy()
    Ps = Pf.copy()
    for i in range(N - 2, -1, -1):
        # G = Pf T^T Pp^{-1}; pseudo-inverse tolerates the rank drop at zero gaps
        G = np.linalg.lstsq(Pp[i + 1], T[i] @ Pf[i], rcond=1e-14)[0].T
        ms[i] = mf[i] + G @ (ms[i + 1] - mp[i + 1])
        Ps[i] = Pf[i] + G @ (Ps[i + 1] - Pp[i + 1]) @ G.T
    inv = np.empty(N, dtype=int)
    inv[order] = np.arange(N)
    q = inv[x.size :]
    return ms[q, 0], Ps[q, 0, 0]
