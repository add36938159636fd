"""Exact one-dimensional GP regression through the kernel-packet factorization.

With ``K A = Phi`` and a nugget ratio ``eta = sigma_Y^2 / sigma^2``,

    K + eta I = (Phi + eta A) A^{-1} = M A^{-1},

so ``(K + eta I)^{-1} v = A M^{-1} v`` and ``K(x*, X) = phi(x*)^T A^{-1}``.
Everything reduces to banded solves with ``M``.

When ``eta > 0`` and the packets are tiny compared with ``eta A`` (dense
designs, smooth kernels), ``M`` cannot be represented in double precision
without losing ``Phi``.  Such fits are routed to the exact state-space
recursion in :mod:`kpgp.statespace`; :func:`noise_ratio` is the test.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .banded import (
    BandedFactorization,
    BandedMatrix,
    band_add_scaled,
    band_logdet,
    band_lu,
    band_matvec,
    band_solve,
)
from .errors import (
    CollinearRegressorsError,
    NumericalBreakdown,
    ParameterError,
    SingularMatrixError,
)
from .matern import HalfIntegerMatern
from .packets import KpBasis, build_basis, evaluate_basis_rows
from .statespace import StateSpaceMatern, kalman_whiten, rts_posterior

__all__ = [
    "Regressors",
    "constant_mean",
    "zero_mean",
    "polynomial_mean",
    "Gp1dModel",
    "KpSystem",
    "fit_1d",
    "predict_mean",
    "predict_variance",
    "log_likelihood_1d",
    "predict",
    "noise_ratio",
    "choose_route",
]

Regressors = Callable[[np.ndarray], np.ndarray]
LOG_2PI = float(np.log(2 * np.pi))
NEG_VAR_TOL = 1e-10
_VAR_CHUNK_ELEMS = 1 << 22
# below this packet-to-nugget scale the noisy banded system is not trusted
NOISY_KP_MIN_RATIO = 1e-2
ROUTES = ("auto", "kp", "statespace")


def constant_mean(x) -> np.ndarray:
    return np.ones((np.shape(x)[0], 1))


def zero_mean(x) -> np.ndarray:
    return np.zeros((np.shape(x)[0], 0))


def polynomial_mean(degree: int) -> Regressors:
    def regressors(x):
        return np.vander(np.asarray(x, dtype=float), degree + 1, increasing=True)

    return regressors


@dataclass
class KpSystem:
    """Basis plus the factorized ``M = Phi + eta A`` for one nugget ratio."""

    basis: KpBasis
    eta: float
    M: BandedMatrix
    M_lu: BandedFactorization
    logdet_M: float
    logdet_A: float
    # det(M) and det(A) share a sign exactly when K + eta I is numerically definite
    definite: bool = True

    @classmethod
    def build(cls, basis: KpBasis, eta: float) -> "KpSystem":
        if eta < 0 or not np.isfinite(eta):
            raise ParameterError(f"nugget ratio must be >= 0, got {eta}")
        M = band_add_scaled(basis.Phi, basis.A, eta) if eta > 0 else basis.Phi
        try:
            M_lu = band_lu(M)
            A_lu = band_lu(basis.A)
            ld_M, sg_M = band_logdet(M_lu)
            ld_A, sg_A = band_logdet(A_lu)
        except SingularMatrixError as exc:
            raise NumericalBreakdown(str(exc)) from exc
        return cls(basis, eta, M, M_lu, ld_M, ld_A, sg_M * sg_A == 1)

    @property
    def logdet_K(self) -> float:
        """``log det(K + eta I)``.

        Solves stay backward stable when ``K`` is too ill-conditioned for its
        determinant sign to survive rounding; only this quantity is then lost.
        """
        if not self.definite:
            raise NumericalBreakdown(
                "det(M) and det(A) have opposite signs; K + eta I is not numerically definite"
            )
        return self.logdet_M - self.logdet_A

    def solve(self, v) -> np.ndarray:
        """``M^{-1} v``."""
        return band_solve(self.M_lu, v)

    def kinv(self, v) -> np.ndarray:
        """``(K + eta I)^{-1} v = A M^{-1} v``."""
        return band_matvec(self.basis.A, self.solve(v))

    def gls(self, F: np.ndarray, Y: np.ndarray) -> np.ndarray:
        if F.shape[1] == 0:
            return np.zeros(0)
        KiF = self.kinv(F)
        return _solve_gls(F.T @ KiF, KiF.T @ Y)


def _solve_gls(G: np.ndarray, b: np.ndarray) -> np.ndarray:
    G = 0.5 * (G + G.T)
    try:
        c = np.linalg.cond(G)
    except np.linalg.LinAlgError:
        c = np.inf
    if not np.isfinite(c) or c > 1e14:
        raise CollinearRegressorsError("F^T K^-1 F is singular; regressors are collinear")
    return np.linalg.solve(G, b)


def noise_ratio(basis: KpBasis, eta: float) -> float:
    """Smallest per-column ratio ``max|Phi_j| / (eta max|A_j|)``.

    Rounding ``Phi + eta A`` costs about ``eps / ratio`` relative accuracy.
    """
    if eta <= 0:
        return np.inf
    phi = np.abs(basis.Phi.bands).max(axis=0)
    a = np.abs(basis.A.bands).max(axis=0)
    return float(np.min(phi / (eta * a)))


def choose_route(basis: KpBasis, eta: float, route: str = "auto") -> str:
    if route not in ROUTES:
        raise ParameterError(f"route must be one of {ROUTES}, got {route!r}")
    if route == "statespace" and eta <= 0:
        raise ParameterError("the state-space route needs a positive nugget ratio")
    if route != "auto":
        return route
    return "kp" if noise_ratio(basis, eta) >= NOISY_KP_MIN_RATIO else "statespace"


@dataclass
class Gp1dModel:
    kernel: HalfIntegerMatern
    basis: KpBasis
    Y: np.ndarray
    regressors: Regressors
    F: np.ndarray
    beta: np.ndarray
    sigma2: float
    nugget_ratio: float
    route: str
    logdet_K: float
    quad: float
    system: Optional[KpSystem] = None
    solve_vector: Optional[np.ndarray] = None
    residual: np.ndarray = field(default=None, repr=False)

    @property
    def knots(self) -> np.ndarray:
        return self.basis.knots

    @property
    def n(self) -> int:
        return self.Y.size

    def mean_function(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.beta.size == 0:
            return np.zeros(xs.shape[0])
        return self.regressors(xs) @ self.beta

    def log_likelihood(self) -> float:
        if np.isnan(self.logdet_K):
            raise NumericalBreakdown("log det(K + eta I) is unavailable: K is not numerically definite")
        return _assemble_loglik(self.n, self.sigma2, self.logdet_K, self.quad)

    def predict_mean(self, xs, sorted_hint: bool = False) -> np.ndarray:
        return predict_mean(self, xs, sorted_hint)

    def predict_variance(self, xs) -> np.ndarray:
        return predict_variance(self, xs)


def _as_design(regressors: Regressors, knots: np.ndarray) -> np.ndarray:
    F = np.asarray(regressors(knots), dtype=float)
    if F.ndim != 2 or F.shape[0] != knots.size:
        raise ParameterError(f"regressors must return an (n, q) array, got {F.shape}")
    return F


def _assemble_loglik(n: int, sigma2: float, logdet_K: float, quad: float) -> float:
    return -0.5 * (n * LOG_2PI + n * np.log(sigma2) + logdet_K + quad / sigma2)


def _resolve_sigma2(sigma2, quad: float, n: int) -> float:
    if isinstance(sigma2, str):
        if sigma2 != "profile":
            raise ParameterError(f"sigma2 must be 'profile' or numeric, got {sigma2!r}")
        s2 = quad / n
        return s2 if s2 > 0 else 1.0
    s2 = float(sigma2)
    if not s2 > 0:
        raise ParameterError("sigma2 must be positive")
    return s2


def _fixed_beta(beta, q: int) -> np.ndarray:
    beta_v = np.atleast_1d(np.asarray(beta, dtype=float))
    if beta_v.size != q:
        raise ParameterError(f"beta has {beta_v.size} entries, design has {q}")
    return beta_v


def fit_1d(
    kern: HalfIntegerMatern,
    knots,
    Y,
    regressors: Regressors = constant_mean,
    beta: Union[str, np.ndarray, float] = "profile",
    nugget_ratio: float = 0.0,
    sigma2: Union[str, float] = "profile",
    basis: Optional[KpBasis] = None,
    route: str = "auto",
) -> Gp1dModel:
    """Fit a 1-D GP on strictly increasing ``knots``.

    ``beta="profile"`` uses the GLS estimate; ``sigma2="profile"`` uses
    ``r^T (K + eta I)^{-1} r / n`` (replaced by 1.0 if the residual vanishes).
    Work is ``O(k^3 n)`` for the basis and ``O(k^2 n)`` afterwards.
    """
    knots = np.asarray(knots, dtype=float).ravel()
    Y = np.asarray(Y, dtype=float).ravel()
    if Y.size != knots.size:
        raise ParameterError(f"{knots.size} knots but {Y.size} observations")
    eta = float(nugget_ratio)
    if eta < 0 or not np.isfinite(eta):
        raise ParameterError(f"nugget ratio must be >= 0, got {nugget_ratio}")
    if basis is None:
        basis = build_basis(kern, knots)
    F = _as_design(regressors, knots)
    if isinstance(beta, str) and beta != "profile":
        raise ParameterError(f"beta must be 'profile' or numeric, got {beta!r}")
    chosen = choose_route(basis, eta, route)

    if chosen == "kp":
        system = KpSystem.build(basis, eta)
        beta_v = system.gls(F, Y) if isinstance(beta, str) else _fixed_beta(beta, F.shape[1])
        r = Y - F @ beta_v
        s = system.solve(r)
        quad = float(r @ band_matvec(basis.A, s))
        s2 = _resolve_sigma2(sigma2, quad, Y.size)
        logdet = system.logdet_K if system.definite else np.nan
        return Gp1dModel(kern, basis, Y, regressors, F, beta_v, s2, eta, "kp",
                         logdet, quad, system, s, r)

    fp = kalman_whiten(StateSpaceMatern(kern), knots, np.column_stack([F, Y]), eta)
    wF, wY = fp.white[:, :-1], fp.white[:, -1]
    if isinstance(beta, str):
        beta_v = _solve_gls(wF.T @ wF, wF.T @ wY) if F.shape[1] else np.zeros(0)
    else:
        beta_v = _fixed_beta(beta, F.shape[1])
    wr = wY - wF @ beta_v
    quad = float(wr @ wr)
    s2 = _resolve_sigma2(sigma2, quad, Y.size)
    return Gp1dModel(kern, basis, Y, regressors, F, beta_v, s2, eta, "statespace",
                     fp.logdet, quad, None, None, Y - F @ beta_v)


def predict_mean(model: Gp1dModel, xs, sorted_hint: bool = False) -> np.ndarray:
    """Posterior mean ``mu(x*) + phi(x*)^T s``; ``O(k)`` per point after locating.

    ``sorted_hint`` is accepted for API symmetry: the interval search already
    reuses the previous bracket when the query points ascend.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    if model.route == "statespace":
        mu, _ = rts_posterior(StateSpaceMatern(model.kernel), model.knots, model.residual,
                              model.nugget_ratio, xs)
        return model.mean_function(xs) + mu
    starts, vals = evaluate_basis_rows(model.basis, xs)
    s = model.solve_vector
    idx = starts[:, None] + np.arange(vals.shape[1])
    ok = (idx >= 0) & (idx < s.size)
    contrib = np.where(ok, vals * s[np.clip(idx, 0, s.size - 1)], 0.0).sum(axis=1)
    return model.mean_function(xs) + contrib


def kinv_reduction(kernel, basis: KpBasis, solve, xs: np.ndarray) -> np.ndarray:
    """``K(x*, X) (K + eta I)^{-1} K(X, x*)`` as ``phi(x*)^T solve(K(X, x*))``.

    ``solve`` applies ``M^{-1}``; the work is batched over query chunks.
    """
    starts, vals = evaluate_basis_rows(basis, xs)
    X = basis.knots
    n = X.size
    width = vals.shape[1]
    out = np.empty(xs.size)
    step = max(1, _VAR_CHUNK_ELEMS // n)
    for lo in range(0, xs.size, step):
        sl = slice(lo, min(xs.size, lo + step))
        z = solve(kernel(X[:, None], xs[None, sl]))
        idx = starts[sl, None] + np.arange(width)
        ok = (idx >= 0) & (idx < n)
        cols = np.arange(z.shape[1])[:, None]
        picked = np.where(ok, z[np.clip(idx, 0, n - 1), cols], 0.0)
        out[sl] = np.sum(vals[sl] * picked, axis=1)
    return out


def _clamp_variance(var: np.ndarray, sigma2: float) -> np.ndarray:
    if np.any(var < -NEG_VAR_TOL * sigma2):
        raise NumericalBreakdown(f"posterior variance {var.min():.3e} is negative")
    return np.maximum(var, 0.0)


def predict_variance(model: Gp1dModel, xs) -> np.ndarray:
    """Posterior variance ``sigma^2 (1 - phi(x*)^T M^{-1} K(X, x*))``.

    One banded solve of length ``n`` per query point, batched across points.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    if model.route == "statespace":
        _, v = rts_posterior(StateSpaceMatern(model.kernel), model.knots, model.residual,
                             model.nugget_ratio, xs)
        return _clamp_variance(model.sigma2 * v, model.sigma2)
    out = 1.0 - kinv_reduction(model.kernel, model.basis, model.system.solve, xs)
    return _clamp_variance(model.sigma2 * out, model.sigma2)


def predict(model: Gp1dModel, xs) -> tuple[np.ndarray, np.ndarray]:
    """Mean and variance together (one smoother pass on the state-space route)."""
    xs = np.asarray(xs, dtype=float).ravel()
    if model.route == "statespace":
        mu, v = rts_posterior(StateSpaceMatern(model.kernel), model.knots, model.residual,
                              model.nugget_ratio, xs)
        return model.mean_function(xs) + mu, _clamp_variance(model.sigma2 * v, model.sigma2)
    return predict_mean(model, xs), predict_variance(model, xs)


def log_likelihood_1d(
    kern: HalfIntegerMatern,
    knots,
    Y,
    mean_design=None,
    beta=None,
    sigma2: float = 1.0,
    nugget_ratio: float = 0.0,
    basis: Optional[KpBasis] = None,
    route: str = "auto",
) -> float:
    """Gaussian log-likelihood, ``-(n/2) log 2 pi`` included.

    ``mean_design`` is the ``(n, q)`` regressor matrix at the knots (``None``
    for a zero mean) and ``beta`` its coefficients.
    """
    knots = np.asarray(knots, dtype=float).ravel()
    Y = np.asarray(Y, dtype=float).ravel()
    if not sigma2 > 0:
        raise ParameterError("sigma2 must be positive")
    r = Y.copy()
    if mean_design is not None:
        F = np.asarray(mean_design, dtype=float).reshape(Y.size, -1)
        if F.shape[1]:
            r = r - F @ _fixed_beta(beta, F.shape[1])
    model = fit_1d(kern, knots, r, regressors=zero_mean, beta=np.zeros(0),
                   nugget_ratio=nugget_ratio, sigma2=sigma2, basis=basis, route=route)
    return model.log_likelihood()
