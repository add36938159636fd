"""Brute-force GP reference: dense correlation matrix and Cholesky.

Deliberately independent of the kernel-packet code; used as ground truth in
tests and as the baseline in benchmarks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from .errors import DegenerateDesignError, ParameterError
from .matern import HalfIntegerMatern, ProductKernel

__all__ = ["DenseGpProblem", "dense_predict", "dense_loglik", "DENSE_MAX_N"]

DENSE_MAX_N = 5000

Kernel = Union[HalfIntegerMatern, ProductKernel]


@dataclass
class DenseGpProblem:
    """Everything the literal GP formulas need.

    ``points`` is ``(n,)`` for a 1-D kernel or ``(n, d)`` for a product kernel.
    ``regressors`` maps points to the ``(m, q)`` design of the mean; ``beta``
    has length ``q``.  ``eta`` is the nugget-to-signal variance ratio.
    """

    kernel: Kernel
    points: np.ndarray
    Y: np.ndarray
    regressors: Optional[Callable[[np.ndarray], np.ndarray]] = None
    beta: Optional[np.ndarray] = None
    sigma2: float = 1.0
    eta: float = 0.0
    allow_large: bool = False

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=float)
        self.Y = np.asarray(self.Y, dtype=float).ravel()
        n = self.points.shape[0]
        if self.Y.size != n:
            raise ParameterError(f"{n} points but {self.Y.size} observations")
        if n > DENSE_MAX_N and not self.allow_large:
            raise ParameterError(f"dense oracle refuses n={n} > {DENSE_MAX_N}")
        if self.sigma2 <= 0 or self.eta < 0:
            raise ParameterError("need sigma2 > 0 and eta >= 0")

    def corr(self, x, y) -> np.ndarray:
        if isinstance(self.kernel, ProductKernel):
            return self.kernel(np.asarray(x)[:, None, :], np.asarray(y)[None, :, :])
        return self.kernel(np.asarray(x)[:, None], np.asarray(y)[None, :])

    def mean_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.regressors is None or self.beta is None:
            return np.zeros(x.shape[0])
        return self.regressors(x) @ np.asarray(self.beta, dtype=float)

    def factor(self):
        K = self.corr(self.points, self.points)
        K[np.diag_indices_from(K)] += self.eta
        try:
            return cho_factor(K, lower=True)
        except np.linalg.LinAlgError as exc:
            raise DegenerateDesignError(
                "correlation matrix is not numerically positive definite"
            ) from exc


def dense_predict(problem: DenseGpProblem, xstars) -> tuple[np.ndarray, np.ndarray]:
    """Conditional mean and variance of the latent process at ``xstars``."""
    xs = np.asarray(xstars, dtype=float)
    cf = problem.factor()
    r = problem.Y - problem.mean_at(problem.points)
    kstar = problem.corr(problem.points, xs)
    mean = problem.mean_at(xs) + kstar.T @ cho_solve(cf, r)
    v = solve_triangular(cf[0], kstar, lower=True)
    var = problem.sigma2 * (1.0 - np.einsum("ij,ij->j", v, v))
    return mean, var


def dense_loglik(problem: DenseGpProblem) -> float:
    """Gaussian log-density of ``Y`` including the ``-(n/2) log 2 pi`` term."""
    n = problem.Y.size
    cf = problem.factor()
    r = problem.Y - problem.mean_at(problem.points)
    logdet = 2.0 * np.sum(np.log(np.diag(cf[0])))
    quad = r @ cho_solve(cf, r)
    s2 = problem.sigma2
    return -0.5 * (n * np.log(2 * np.pi) + n * np.log(s2) + logdet + quad / s2)
