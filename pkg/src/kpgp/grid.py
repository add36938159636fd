"""Noiseless GP regression on full grids (Kronecker algebra) and sparse grids
(combination technique).

Points of a full grid are flattened lexicographically with the last
dimension fastest, so the correlation matrix is ``K_1 kron K_2 kron ... K_d``.
Each 1-D factor contributes ``K_j = Phi_j A_j^{-1}``; sweeping the factors
one axis at a time keeps every solve banded.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .banded import BandedFactorization, band_logdet, band_lu, band_matvec, band_solve
from .errors import (
    ConfigError,
    DataError,
    DegenerateDesignError,
    NumericalBreakdown,
    ParameterError,
    SingularMatrixError,
)
from .gp1d import LOG_2PI, NEG_VAR_TOL, Regressors, _solve_gls, constant_mean, kinv_reduction
from .matern import HalfIntegerMatern, ProductKernel
from .packets import build_basis, evaluate_basis_rows

__all__ = [
    "FullGridDesign",
    "SparseGridDesign",
    "GridGpModel",
    "SparseGridModel",
    "KpFactor",
    "DenseFactor",
    "make_factor",
    "kron_solve",
    "fit_full_grid",
    "predict_full_grid",
    "full_grid_loglik",
    "dyadic",
    "FAMILIES",
    "make_sparse_grid",
    "fit_sparse_grid",
    "predict_sparse_grid",
    "sparse_grid_loglik",
    "write_manifest",
    "read_manifest",
]

_PRED_CHUNK = 4096


# ---------------------------------------------------------------- 1-D factors


def _along(arr: np.ndarray, axis: int, fn) -> np.ndarray:
    """Apply ``fn`` to the ``(n_axis, -1)`` unfolding of ``arr`` along ``axis``."""
    moved = np.moveaxis(arr, axis, 0)
    shape = moved.shape
    out = fn(moved.reshape(shape[0], -1)).reshape(shape)
    return np.moveaxis(out, 0, axis)


@dataclass
class KpFactor:
    """Packet factorization ``K_j = Phi_j A_j^{-1}`` of one grid axis."""

    kernel: HalfIntegerMatern
    knots: np.ndarray
    basis: object
    phi_lu: BandedFactorization
    logdet_phi: float
    logdet_a: float

    @classmethod
    def build(cls, kernel: HalfIntegerMatern, knots) -> "KpFactor":
        basis = build_basis(kernel, knots)
        try:
            phi_lu = band_lu(basis.Phi)
            ld_p, sg_p = band_logdet(phi_lu)
            ld_a, sg_a = band_logdet(band_lu(basis.A))
        except SingularMatrixError as exc:
            raise NumericalBreakdown(str(exc)) from exc
        if sg_p * sg_a != 1:
            raise NumericalBreakdown("det(Phi) and det(A) differ in sign on a grid axis")
        return cls(kernel, basis.knots, basis, phi_lu, ld_p, ld_a)

    @property
    def n(self) -> int:
        return self.knots.size

    @property
    def logdet_K(self) -> float:
        return self.logdet_phi - self.logdet_a

    def solve_phi(self, v2: np.ndarray) -> np.ndarray:
        return band_solve(self.phi_lu, v2)

    def apply_a(self, v2: np.ndarray) -> np.ndarray:
        return band_matvec(self.basis.A, v2)

    def rows(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return evaluate_basis_rows(self.basis, xs)

    def reduction(self, xs: np.ndarray) -> np.ndarray:
        return kinv_reduction(self.kernel, self.basis, self.solve_phi, xs)


@dataclass
class DenseFactor:
    """Plain Cholesky factor, used for axes with fewer than ``k`` points
    (a packet needs ``k`` knots).  Here ``Phi = K`` and ``A = I``."""

    kernel: HalfIntegerMatern
    knots: np.ndarray
    chol: tuple
    logdet_K: float

    @classmethod
    def build(cls, kernel: HalfIntegerMatern, knots) -> "DenseFactor":
        knots = np.asarray(knots, dtype=float)
        try:
            cf = cho_factor(kernel(knots[:, None], knots[None, :]), lower=True)
        except np.linalg.LinAlgError as exc:
            raise NumericalBreakdown("axis correlation matrix is not positive definite") from exc
        return cls(kernel, knots, cf, float(2 * np.sum(np.log(np.diag(cf[0])))))

    @property
    def n(self) -> int:
        return self.knots.size

    @property
    def logdet_phi(self) -> float:
        return self.logdet_K

    logdet_a = 0.0

    def solve_phi(self, v2: np.ndarray) -> np.ndarray:
        return cho_solve(self.chol, v2)

    def apply_a(self, v2: np.ndarray) -> np.ndarray:
        return v2

    def rows(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return np.zeros(xs.size, dtype=np.int64), self.kernel(xs[:, None], self.knots[None, :])

    def reduction(self, xs: np.ndarray) -> np.ndarray:
        kx = self.kernel(self.knots[:, None], xs[None, :])
        return np.einsum("ij,ij->j", kx, cho_solve(self.chol, kx))


Factor = Union[KpFactor, DenseFactor]


def make_factor(kernel: HalfIntegerMatern, knots) -> Factor:
    knots = np.asarray(knots, dtype=float).ravel()
    if knots.size > 1 and np.any(np.diff(knots) <= 0):
        raise DegenerateDesignError("grid axis knots must be strictly increasing")
    if knots.size >= kernel.k:
        return KpFactor.build(kernel, knots)
    return DenseFactor.build(kernel, knots)


def kron_solve(factorizations: Sequence[BandedFactorization], v) -> np.ndarray:
    """``(Phi_1^{-1} kron ... kron Phi_d^{-1}) v`` by ``d`` axis sweeps."""
    shape = tuple(F.n for F in factorizations)
    v = np.asarray(v, dtype=float)
    if v.size != int(np.prod(shape)):
        raise ParameterError(f"vector of length {v.size} does not match grid {shape}")
    t = v.reshape(shape)
    for j, F in enumerate(factorizations):
        t = _along(t, j, lambda m, F=F: band_solve(F, m))
    return t.reshape(v.shape)


def _sweep(factors: Sequence[Factor], t: np.ndarray, op: str) -> np.ndarray:
    for j, f in enumerate(factors):
        t = _along(t, j, getattr(f, op))
    return t


def _kinv(factors: Sequence[Factor], v: np.ndarray) -> np.ndarray:
    """``K^{-1} v`` for a flat vector or ``(n, q)`` block."""
    shape = tuple(f.n for f in factors)
    v2 = v.reshape(int(np.prod(shape)), -1)
    out = np.empty_like(v2)
    for c in range(v2.shape[1]):
        t = _sweep(factors, v2[:, c].reshape(shape), "solve_phi")
        out[:, c] = _sweep(factors, t, "apply_a").ravel()
    return out.reshape(v.shape)


def _contract(factors: Sequence[Factor], s: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """``(kron_j phi_j(x_j*))^T s`` per query row of ``xs``."""
    d = len(factors)
    out = np.empty(xs.shape[0])
    for lo in range(0, xs.shape[0], _PRED_CHUNK):
        sl = slice(lo, min(xs.shape[0], lo + _PRED_CHUNK))
        acc = None
        idx = []
        for j, f in enumerate(factors):
            st, vals = f.rows(xs[sl, j])
            cols = np.clip(st[:, None] + np.arange(vals.shape[1]), 0, f.n - 1)
            shape = [-1] + [1] * d
            shape[j + 1] = vals.shape[1]
            idx.append(cols.reshape(shape))
            w = vals.reshape(shape)
            acc = w if acc is None else acc * w
        gathered = s[tuple(idx)]
        out[sl] = np.sum((acc * gathered).reshape(gathered.shape[0], -1), axis=1)
    return out


# ---------------------------------------------------------------- full grids


@dataclass(frozen=True)
class FullGridDesign:
    per_dim_knots: tuple

    def __post_init__(self) -> None:
        axes = tuple(np.asarray(k, dtype=float).ravel() for k in self.per_dim_knots)
        if not axes:
            raise ParameterError("a grid needs at least one axis")
        for a in axes:
            if a.size == 0 or np.any(np.diff(a) <= 0):
                raise DegenerateDesignError("grid axis knots must be strictly increasing")
        object.__setattr__(self, "per_dim_knots", axes)

    @property
    def d(self) -> int:
        return len(self.per_dim_knots)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.per_dim_knots)

    @property
    def n(self) -> int:
        return int(np.prod(self.shape))

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.per_dim_knots, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def flat_index(self, multi) -> int:
        return int(np.ravel_multi_index(tuple(multi), self.shape))


def _check_kernel(pk: ProductKernel, d: int) -> None:
    if not isinstance(pk, ProductKernel):
        raise ParameterError("grid models need a ProductKernel")
    if pk.d != d:
        raise ParameterError(f"kernel has {pk.d} factors, design has {d} dimensions")


def _design_matrix(regressors: Optional[Regressors], pts: np.ndarray) -> np.ndarray:
    if regressors is None:
        return np.zeros((pts.shape[0], 0))
    F = np.asarray(regressors(pts), dtype=float)
    if F.ndim != 2 or F.shape[0] != pts.shape[0]:
        raise ParameterError(f"regressors must return an (n, q) array, got {F.shape}")
    return F


def _sigma2(sigma2, quad: float, n: int) -> float:
    if isinstance(sigma2, str):
        if sigma2 != "profile":
            raise ParameterError(f"sigma2 must be 'profile' or numeric, got {sigma2!r}")
        return quad / n if quad > 0 else 1.0
    if not float(sigma2) > 0:
        raise ParameterError("sigma2 must be positive")
    return float(sigma2)


def _loglik(n: int, sigma2: float, logdet: float, quad: float) -> float:
    return -0.5 * (n * LOG_2PI + n * np.log(sigma2) + logdet + quad / sigma2)


def _clamp(var: np.ndarray, sigma2: float) -> np.ndarray:
    if np.any(var < -NEG_VAR_TOL * sigma2):
        raise NumericalBreakdown(f"posterior variance {var.min():.3e} is negative")
    return np.maximum(var, 0.0)


def _query(xs, d: int) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1 and d == 1:
        xs = xs[:, None]
    if xs.ndim != 2 or xs.shape[1] != d:
        raise ParameterError(f"query points must have shape (m, {d})")
    return xs


@dataclass
class GridGpModel:
    kernel: ProductKernel
    design: FullGridDesign
    factors: list
    Y: np.ndarray
    regressors: Optional[Regressors]
    beta: np.ndarray
    sigma2: float
    solve_tensor: np.ndarray
    quad: float
    logdet_K: float

    @property
    def n(self) -> int:
        return self.design.n

    def mean_function(self, xs: np.ndarray) -> np.ndarray:
        if self.beta.size == 0:
            return np.zeros(xs.shape[0])
        return self.regressors(xs) @ self.beta

    def log_likelihood(self) -> float:
        return _loglik(self.n, self.sigma2, self.logdet_K, self.quad)

    def logdet_split(self) -> tuple[float, float]:
        """``(sum_j (n/n_j) logdet Phi_j, sum_j (n/n_j) logdet A_j)``."""
        n = self.n
        return (
            sum(n / f.n * f.logdet_phi for f in self.factors),
            sum(n / f.n * f.logdet_a for f in self.factors),
        )


def _grid_logdet(factors: Sequence[Factor]) -> float:
    n = int(np.prod([f.n for f in factors]))
    return float(sum(n / f.n * f.logdet_K for f in factors))


def fit_full_grid(
    pk: ProductKernel,
    design: FullGridDesign,
    Y,
    regressors: Optional[Regressors] = constant_mean,
    beta="profile",
    sigma2="profile",
) -> GridGpModel:
    """Fit the noiseless GP on a Cartesian grid; ``Y`` in lexicographic order."""
    _check_kernel(pk, design.d)
    Y = np.asarray(Y, dtype=float).ravel()
    if Y.size != design.n:
        raise DataError(f"grid has {design.n} points but {Y.size} observations were given")
    factors = [make_factor(kern, knots) for kern, knots in zip(pk.factors, design.per_dim_knots)]
    F = _design_matrix(regressors, design.points())
    if isinstance(beta, str):
        if beta != "profile":
            raise ParameterError(f"beta must be 'profile' or numeric, got {beta!r}")
        if F.shape[1]:
            KiF = _kinv(factors, F)
            beta_v = _solve_gls(F.T @ KiF, KiF.T @ Y)
        else:
            beta_v = np.zeros(0)
    else:
        beta_v = np.atleast_1d(np.asarray(beta, dtype=float))
        if beta_v.size != F.shape[1]:
            raise ParameterError(f"beta has {beta_v.size} entries, design has {F.shape[1]}")
    r = Y - F @ beta_v
    s = _sweep(factors, r.reshape(design.shape), "solve_phi")
    quad = float(r @ _sweep(factors, s, "apply_a").ravel())
    s2 = _sigma2(sigma2, quad, design.n)
    return GridGpModel(pk, design, factors, Y, regressors, beta_v, s2, s, quad,
                       _grid_logdet(factors))


def predict_full_grid(model: GridGpModel, xs) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance at the rows of ``xs``."""
    xs = _query(xs, model.design.d)
    mean = model.mean_function(xs) + _contract(model.factors, model.solve_tensor, xs)
    prod = np.ones(xs.shape[0])
    for j, f in enumerate(model.factors):
        prod = prod * f.reduction(xs[:, j])
    return mean, _clamp(model.sigma2 * (1.0 - prod), model.sigma2)


def full_grid_loglik(
    pk: ProductKernel,
    design: FullGridDesign,
    Y,
    regressors: Optional[Regressors] = None,
    beta=None,
    sigma2: float = 1.0,
) -> float:
    """Gaussian log-density of grid data with a fixed mean and variance."""
    q_beta = np.zeros(0) if regressors is None else beta
    m = fit_full_grid(pk, design, Y, regressors, q_beta, sigma2)
    return m.log_likelihood()


# ---------------------------------------------------------------- sparse grids


def dyadic(level: int) -> np.ndarray:
    """Interior dyadic points ``i / 2^level``, ``i = 1 .. 2^level - 1``."""
    if level < 1:
        raise ParameterError("dyadic levels start at 1")
    return np.arange(1, 2**level) / 2.0**level


FAMILIES: dict[str, Callable[[int], np.ndarray]] = {"dyadic": dyadic}


@dataclass
class SparseGridDesign:
    """Retained subgrids, their combination coefficients and the deduplicated union.

    ``levels[l]`` holds the 1-D point set ``X_l``; ``maps[i]`` sends the
    lexicographic points of subgrid ``indices[i]`` to rows of ``points``.
    """

    d: int
    level: int
    family: str
    levels: dict
    indices: list
    coefficients: list
    points: np.ndarray
    maps: list = field(repr=False)

    @property
    def q(self) -> int:
        return self.level + self.d - 1

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def subgrid(self, i: int) -> FullGridDesign:
        return FullGridDesign(tuple(self.levels[l] for l in self.indices[i]))


def _compositions(d: int, total: int):
    """Multi-indices ``l >= 1`` in ``N^d`` with ``|l| == total``, lexicographic."""
    if d == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - d + 2):
        for rest in _compositions(d - 1, total - first):
            yield (first,) + rest


def _assemble_sparse(d: int, level: int, family: str, levels: dict) -> SparseGridDesign:
    q = level + d - 1
    for l in range(2, q - d + 2):
        lo, hi = levels[l - 1], levels[l]
        if not np.all(np.isin(lo, hi)):
            raise DegenerateDesignError(f"family is not nested: X_{l - 1} is not inside X_{l}")
    indices, coeffs = [], []
    for total in range(max(d, q - d + 1), q + 1):
        c = (-1) ** (q - total) * comb(d - 1, q - total)
        for l in _compositions(d, total):
            indices.append(l)
            coeffs.append(c)
    lookup: dict = {}
    maps = []
    for l in indices:
        pts = FullGridDesign(tuple(levels[m] for m in l)).points()
        m = np.empty(pts.shape[0], dtype=np.int64)
        for r, row in enumerate(map(tuple, pts)):
            m[r] = lookup.setdefault(row, len(lookup))
        maps.append(m)
    points = np.array(list(lookup), dtype=float).reshape(len(lookup), d)
    return SparseGridDesign(d, level, family, levels, indices, coeffs, points, maps)


def make_sparse_grid(d: int, level: int, family: Union[str, Callable] = "dyadic") -> SparseGridDesign:
    """Sparse grid of ``level`` >= 1 in ``d`` dimensions from a nested 1-D family.

    Retains ``q - d + 1 <= |l| <= q`` (``q = level + d - 1``) with coefficients
    ``(-1)^(q - |l|) C(d - 1, q - |l|)``.
    """
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise ParameterError(f"d must be a positive integer, got {d!r}")
    if not (isinstance(level, (int, np.integer)) and level >= 1):
        raise ParameterError(f"level must be a positive integer, got {level!r}")
    if isinstance(family, str):
        if family not in FAMILIES:
            raise ConfigError(f"unknown point family {family!r}; known: {sorted(FAMILIES)}")
        name, gen = family, FAMILIES[family]
    else:
        name, gen = getattr(family, "__name__", "custom"), family
    q = int(level) + d - 1
    levels = {}
    for l in range(1, q - d + 2):
        pts = np.asarray(gen(l), dtype=float).ravel()
        if pts.size == 0 or np.any(np.diff(pts) <= 0):
            raise DegenerateDesignError(f"family level {l} is not strictly increasing")
        levels[l] = pts
    return _assemble_sparse(int(d), int(level), name, levels)


@dataclass
class SparseGridModel:
    kernel: ProductKernel
    design: SparseGridDesign
    factors: dict
    Y: np.ndarray
    regressors: Optional[Regressors]
    beta: np.ndarray
    sigma2: float
    solve_tensors: list
    quad: float
    logdet_K: float

    def mean_function(self, xs: np.ndarray) -> np.ndarray:
        if self.beta.size == 0:
            return np.zeros(xs.shape[0])
        return self.regressors(xs) @ self.beta

    def _axes(self, i: int) -> list:
        return [self.factors[(j, l)] for j, l in enumerate(self.design.indices[i])]

    def log_likelihood(self) -> float:
        return _loglik(self.design.n, self.sigma2, self.logdet_K, self.quad)


def _sparse_factors(pk: ProductKernel, design: SparseGridDesign) -> dict:
    cache: dict = {}
    factors = {}
    for l in design.indices:
        for j, lev in enumerate(l):
            key = (pk.factors[j], lev)
            if key not in cache:
                cache[key] = make_factor(pk.factors[j], design.levels[lev])
            factors[(j, lev)] = cache[key]
    # telescoping log det also needs every level below the retained ones
    for j in range(design.d):
        for lev in design.levels:
            key = (pk.factors[j], lev)
            if key not in cache:
                cache[key] = make_factor(pk.factors[j], design.levels[lev])
            factors[(j, lev)] = cache[key]
    return factors


def _sparse_logdet(design: SparseGridDesign, factors: dict) -> float:
    """``log det K`` on the union by telescoping over the nested levels.

    With ``D_j(m) = logdet K_j(X_m) - logdet K_j(X_{m-1})`` and
    ``dn(m) = |X_m| - |X_{m-1}|`` (level 0 empty, log det 0), the union over
    ``|m| <= q`` contributes ``sum_m sum_j D_j(m_j) prod_{w != j} dn(m_w)``.
    """
    d, q = design.d, design.q
    size = {0: 0, **{l: design.levels[l].size for l in design.levels}}
    total = 0.0
    for tot in range(d, q + 1):
        for m in _compositions(d, tot):
            dn = [size[v] - size[v - 1] for v in m]
            for j in range(d):
                lower = factors[(j, m[j] - 1)].logdet_K if m[j] > 1 else 0.0
                Dj = factors[(j, m[j])].logdet_K - lower
                total += Dj * float(np.prod([dn[w] for w in range(d) if w != j]))
    return total


def fit_sparse_grid(
    pk: ProductKernel,
    design: SparseGridDesign,
    Y,
    regressors: Optional[Regressors] = constant_mean,
    beta="profile",
    sigma2="profile",
) -> SparseGridModel:
    """Fit the noiseless GP on a sparse grid; ``Y`` is indexed like ``design.points``."""
    _check_kernel(pk, design.d)
    Y = np.asarray(Y, dtype=float).ravel()
    if Y.size != design.n:
        raise DataError(f"sparse grid has {design.n} points but {Y.size} observations")
    if not np.all(np.isfinite(Y)):
        raise DataError("observations must be finite at every sparse-grid point")
    factors = _sparse_factors(pk, design)
    F = _design_matrix(regressors, design.points)

    def combine(fn):
        acc = None
        for i, c in enumerate(design.coefficients):
            axes = [factors[(j, l)] for j, l in enumerate(design.indices[i])]
            term = c * fn(axes, design.maps[i])
            acc = term if acc is None else acc + term
        return acc

    if isinstance(beta, str):
        if beta != "profile":
            raise ParameterError(f"beta must be 'profile' or numeric, got {beta!r}")
        if F.shape[1]:
            def bilinear(axes, mp):
                KiF = _kinv(axes, F[mp])
                return np.concatenate([F[mp].T @ KiF, (KiF.T @ Y[mp])[:, None]], axis=1)

            G = combine(bilinear)
            beta_v = _solve_gls(G[:, :-1], G[:, -1])
        else:
            beta_v = np.zeros(0)
    else:
        beta_v = np.atleast_1d(np.asarray(beta, dtype=float))
        if beta_v.size != F.shape[1]:
            raise ParameterError(f"beta has {beta_v.size} entries, design has {F.shape[1]}")
    r = Y - F @ beta_v
    tensors = []
    quad = 0.0
    for i, c in enumerate(design.coefficients):
        axes = [factors[(j, l)] for j, l in enumerate(design.indices[i])]
        rl = r[design.maps[i]]
        s = _sweep(axes, rl.reshape(tuple(a.n for a in axes)), "solve_phi")
        tensors.append(s)
        quad += c * float(rl @ _sweep(axes, s, "apply_a").ravel())
    s2 = _sigma2(sigma2, quad, design.n)
    return SparseGridModel(pk, design, factors, Y, regressors, beta_v, s2, tensors, quad,
                           _sparse_logdet(design, factors))


def _sparse_predict(model: SparseGridModel, xs) -> tuple[np.ndarray, np.ndarray]:
    xs = _query(xs, model.design.d)
    mean = model.mean_function(xs)
    red = np.zeros(xs.shape[0])
    for i, c in enumerate(model.design.coefficients):
        axes = model._axes(i)
        mean = mean + c * _contract(axes, model.solve_tensors[i], xs)
        prod = np.ones(xs.shape[0])
        for j, f in enumerate(axes):
            prod = prod * f.reduction(xs[:, j])
        red = red + c * prod
    return mean, _clamp(model.sigma2 * (1.0 - red), model.sigma2)


def predict_sparse_grid(
    pk: Union[ProductKernel, SparseGridModel],
    design: Optional[SparseGridDesign] = None,
    Y=None,
    xs=None,
    regressors: Optional[Regressors] = constant_mean,
    beta="profile",
    sigma2="profile",
) -> tuple[np.ndarray, np.ndarray]:
    """Combination-technique mean and variance; accepts a fitted model or raw inputs."""
    if isinstance(pk, SparseGridModel):
        return _sparse_predict(pk, xs if xs is not None else design)
    if Y is None:
        raise DataError("observations are required at every sparse-grid point")
    return _sparse_predict(fit_sparse_grid(pk, design, Y, regressors, beta, sigma2), xs)


def sparse_grid_loglik(
    pk: ProductKernel,
    design: SparseGridDesign,
    Y,
    regressors: Optional[Regressors] = None,
    beta=None,
    sigma2: float = 1.0,
) -> float:
    q_beta = np.zeros(0) if regressors is None else beta
    return fit_sparse_grid(pk, design, Y, regressors, q_beta, sigma2).log_likelihood()


# ---------------------------------------------------------------- manifest

_MAGIC = "# kpgp sparse-grid manifest v1"


def write_manifest(design: SparseGridDesign) -> str:
    """Self-contained text form: the 1-D levels, retained indices and union points."""
    lines = [_MAGIC, f"family {design.family}", f"d {design.d}", f"level {design.level}"]
    for l in sorted(design.levels):
        lines.append(f"levelpoints {l} " + " ".join(repr(float(v)) for v in design.levels[l]))
    for l, c in zip(design.indices, design.coefficients):
        lines.append("index " + " ".join(map(str, l)) + f" coeff {c}")
    for row in design.points:
        lines.append("point " + " ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def read_manifest(text: str) -> SparseGridDesign:
    """Inverse of :func:`write_manifest`; the stored structure is re-derived and checked."""
    lines = [ln.strip() for ln in text.splitlines()]
    if not lines or lines[0] != _MAGIC:
        raise ConfigError("not a sparse-grid manifest (missing header)")
    meta: dict = {}
    levels: dict = {}
    indices, coeffs, points = [], [], []
    for no, ln in enumerate(lines[1:], start=2):
        if not ln or ln.startswith("#"):
            continue
        key, *rest = ln.split()
        try:
            if key in ("family", "d", "level"):
                meta[key] = rest[0]
            elif key == "levelpoints":
                levels[int(rest[0])] = np.array([float(v) for v in rest[1:]])
            elif key == "index":
                cut = rest.index("coeff")
                indices.append(tuple(int(v) for v in rest[:cut]))
                coeffs.append(int(rest[cut + 1]))
            elif key == "point":
                points.append([float(v) for v in rest])
            else:
                raise ValueError(f"unknown key {key!r}")
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"manifest line {no}: {exc}") from exc
    try:
        d, level = int(meta["d"]), int(meta["level"])
    except KeyError as exc:
        raise ConfigError(f"manifest lacks {exc.args[0]!r}") from exc
    design = _assemble_sparse(d, level, meta.get("family", "custom"), levels)
    if design.indices != indices or design.coefficients != coeffs:
        raise ConfigError("manifest index set disagrees with its level structure")
    if not np.array_equal(design.points, np.array(points, dtype=float).reshape(-1, d)):
        raise ConfigError("manifest points disagree with its level structure")
    return design
