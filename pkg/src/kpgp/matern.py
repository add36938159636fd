"""Half-integer Matérn correlations in closed polynomial-times-exponential form.

For smoothness ``nu = p + 1/2`` the Matérn correlation reduces to

    K(r) = P_p(r) * exp(-c r),   c = sqrt(2 nu) / omega,

    P_p(r) = p!/(2p)! * sum_{j=0}^{p} (p+j)! / (j! (p-j)!) * (2 c r)^(p-j),

so no Bessel functions are needed.  The variance is kept outside the
correlation (``K(x, x) == 1``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, sqrt
from typing import Sequence

import numpy as np

from .errors import ParameterError

__all__ = [
    "HalfIntegerMatern",
    "ProductKernel",
    "make_kernel",
    "correlation",
    "product_correlation",
]


def _poly_coefficients(p: int) -> np.ndarray:
    """Coefficients of P_p in the dimensionless variable rho = c r, lowest first."""
    # exact rationals, so the constant term is exactly 1 and K(x, x) == 1
    coef = np.zeros(p + 1)
    for j in range(p + 1):
        deg = p - j
        c = Fraction(factorial(p) * factorial(p + j) * 2**deg, factorial(2 * p) * factorial(j) * factorial(p - j))
        coef[deg] = float(c)
    return coef


@dataclass(frozen=True)
class HalfIntegerMatern:
    """Matérn correlation with smoothness ``p + 1/2`` and scale ``omega``.

    Attributes
    ----------
    p : int
        Non-negative integer; the smoothness is ``nu = p + 1/2``.
    omega : float
        Positive length scale.
    """

    p: int
    omega: float
    poly: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if isinstance(self.p, bool) or int(self.p) != self.p or self.p < 0:
            raise ParameterError(f"p must be a non-negative integer, got {self.p!r}")
        if not np.isfinite(self.omega) or self.omega <= 0:
            raise ParameterError(f"omega must be positive, got {self.omega!r}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "poly", _poly_coefficients(self.p))

    @property
    def nu(self) -> float:
        return self.p + 0.5

    @property
    def c(self) -> float:
        return sqrt(2 * self.p + 1) / self.omega

    @property
    def k(self) -> int:
        """Kernel-packet degree ``2 nu + 2``."""
        return 2 * self.p + 3

    def with_omega(self, omega: float) -> "HalfIntegerMatern":
        return HalfIntegerMatern(self.p, omega)

    def of_distance(self, r) -> np.ndarray:
        """Correlation as a function of the distance ``|x - x'|``."""
        rho = self.c * np.abs(np.asarray(r, dtype=float))
        return np.polynomial.polynomial.polyval(rho, self.poly) * np.exp(-rho)

    def __call__(self, x, y) -> np.ndarray:
        return self.of_distance(np.subtract(x, y))


def make_kernel(p: int, omega: float) -> HalfIntegerMatern:
    return HalfIntegerMatern(p, omega)


def correlation(kern: HalfIntegerMatern, x, y):
    """Evaluate ``K(x, y)``; broadcasts over array inputs."""
    out = kern(x, y)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ProductKernel:
    """Separable correlation ``prod_j K_j(x_j, y_j)``."""

    factors: tuple[HalfIntegerMatern, ...]

    def __post_init__(self) -> None:
        factors = tuple(self.factors)
        if not factors:
            raise ParameterError("a product kernel needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def isotropic(cls, p: int, omega: float, d: int) -> "ProductKernel":
        return cls(tuple(HalfIntegerMatern(p, omega) for _ in range(d)))

    @property
    def d(self) -> int:
        return len(self.factors)

    def __call__(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape[-1] != self.d or y.shape[-1] != self.d:
            raise ParameterError(
                f"expected points of dimension {self.d}, got {x.shape[-1]} and {y.shape[-1]}"
            )
        out = np.ones(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]))
        for j, kern in enumerate(self.factors):
            out = out * kern(x[..., j], y[..., j])
        return out


def product_correlation(pk: ProductKernel, x: Sequence[float], y: Sequence[float]):
    out = pk(x, y)
    return float(out) if np.ndim(out) == 0 else out
