"""Profile maximum likelihood for the 1-D model.

``beta`` and ``sigma^2`` have closed-form maximizers, so only ``log omega``
(and ``log eta`` when the nugget is estimated) are searched numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import KPError, NumericalBreakdown, OptimizationFailure, ParameterError
from .gp1d import LOG_2PI, Regressors, constant_mean, fit_1d
from .matern import HalfIntegerMatern

__all__ = ["MleSearch", "MleResult", "profile_loglik", "profile_mle_1d"]


@dataclass(frozen=True)
class MleSearch:
    """Search configuration.

    ``omega_bounds`` defaults to ``[0.01, 10] * range(knots)``.  ``nugget`` is
    either a fixed ratio or ``"mle"``, in which case ``log eta`` is searched
    inside ``eta_bounds`` jointly with ``log omega`` by Nelder-Mead.
    """

    omega_bounds: Optional[tuple[float, float]] = None
    nugget: float | str = 0.0
    eta_bounds: tuple[float, float] = (1e-8, 10.0)
    n_starts: int = 5
    xatol: float = 1e-6
    seed: int = 0


@dataclass
class MleResult:
    omega_hat: float
    sigma2_hat: float
    beta_hat: np.ndarray
    nugget_ratio_hat: Optional[float]
    loglik_value: float
    iterations: int
    converged: bool
    boundary: bool = False
    evaluations: int = 0
    history: list = field(default_factory=list, repr=False)


def profile_loglik(
    p: int, omega: float, knots, Y, regressors: Regressors = constant_mean, eta: float = 0.0
) -> float:
    """Log-likelihood with ``beta`` and ``sigma^2`` at their maximizers."""
    m = fit_1d(HalfIntegerMatern(p, omega), knots, Y, regressors, "profile", eta, "profile")
    n = m.n
    s2 = m.quad / n
    if not (s2 > 0 and np.isfinite(m.logdet_K)):
        raise NumericalBreakdown(f"K is not numerically definite at omega={omega:g}")
    return -0.5 * (n * LOG_2PI + n * np.log(s2) + m.logdet_K + n)


def _degenerate(knots, Y, regressors) -> bool:
    F = np.asarray(regressors(knots), dtype=float)
    if F.shape[1] == 0:
        return not np.any(Y)
    coef, *_ = np.linalg.lstsq(F, Y, rcond=None)
    scale = max(1.0, float(np.max(np.abs(Y))))
    return float(np.max(np.abs(Y - F @ coef))) <= 1e-12 * scale


def profile_mle_1d(
    p: int,
    knots,
    Y,
    regressors: Regressors = constant_mean,
    search: MleSearch = MleSearch(),
) -> MleResult:
    """Maximize the profile likelihood over ``omega`` (and ``eta``)."""
    knots = np.asarray(knots, dtype=float).ravel()
    Y = np.asarray(Y, dtype=float).ravel()
    span = float(knots[-1] - knots[0]) if knots.size > 1 else 0.0
    if search.omega_bounds is None:
        if not span > 0:
            raise ParameterError("default omega bounds need at least two distinct knots")
        lo_w, hi_w = 0.01 * span, 10.0 * span
    else:
        lo_w, hi_w = map(float, search.omega_bounds)
    if not (0 < lo_w < hi_w and np.isfinite(hi_w)):
        raise ParameterError(f"invalid omega bounds ({lo_w}, {hi_w})")
    estimate_eta = search.nugget == "mle"
    if not estimate_eta:
        if isinstance(search.nugget, str):
            raise ParameterError(f"nugget must be a ratio or 'mle', got {search.nugget!r}")
        eta_fixed = float(search.nugget)
        if eta_fixed < 0:
            raise ParameterError("nugget ratio must be >= 0")

    if _degenerate(knots, Y, regressors):
        # residual vanishes identically: sigma^2 -> 0 and the likelihood is unbounded
        omega = float(np.sqrt(lo_w * hi_w))
        m = fit_1d(HalfIntegerMatern(p, omega), knots, Y, regressors, "profile",
                   0.0 if estimate_eta else eta_fixed, 1.0)
        return MleResult(omega, 0.0, m.beta, None if not estimate_eta else 0.0,
                         np.inf, 0, False, boundary=True)

    history: list[tuple] = []

    def negll(theta) -> float:
        theta = np.atleast_1d(theta)
        omega = float(np.exp(theta[0]))
        eta = float(np.exp(theta[1])) if estimate_eta else eta_fixed
        try:
            val = profile_loglik(p, omega, knots, Y, regressors, eta)
        except KPError:
            val = -np.inf
        history.append((omega, eta, val))
        return -val if np.isfinite(val) else 1e300

    a, b = np.log(lo_w), np.log(hi_w)
    best = None
    iterations = 0
    converged = False
    if not estimate_eta:
        edges = np.linspace(a, b, search.n_starts + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            res = minimize_scalar(negll, bounds=(lo, hi), method="bounded",
                                  options={"xatol": search.xatol})
            iterations += int(res.nfev)
            if best is None or res.fun < best[1]:
                best = (np.array([res.x]), res.fun)
                converged = bool(res.success)
    else:
        la, lb = np.log(search.eta_bounds[0]), np.log(search.eta_bounds[1])
        rng = np.random.default_rng(search.seed)
        starts = np.column_stack([rng.uniform(a, b, search.n_starts),
                                  rng.uniform(la, lb, search.n_starts)])
        for x0 in starts:
            res = minimize(negll, x0, method="Nelder-Mead", bounds=[(a, b), (la, lb)],
                           options={"xatol": search.xatol, "fatol": 1e-9, "maxiter": 2000})
            iterations += int(res.nit)
            if best is None or res.fun < best[1]:
                best = (np.asarray(res.x), res.fun)
                converged = bool(res.success)

    if best is None or best[1] >= 1e300:
        raise OptimizationFailure("no start produced a finite likelihood")
    theta = best[0]
    omega = float(np.exp(theta[0]))
    eta = float(np.exp(theta[1])) if estimate_eta else eta_fixed
    model = fit_1d(HalfIntegerMatern(p, omega), knots, Y, regressors, "profile", eta, "profile")
    at_edge = abs(theta[0] - a) < 1e-4 or abs(theta[0] - b) < 1e-4
    return MleResult(
        omega_hat=omega,
        sigma2_hat=model.sigma2,
        beta_hat=model.beta,
        nugget_ratio_hat=eta if estimate_eta else None,
        loglik_value=model.log_likelihood(),
        iterations=iterations,
        converged=converged,
        boundary=bool(at_edge),
        evaluations=len(history),
        history=history,
    )
