"""Exact linear-cost Gaussian-process regression with kernel packets."""

from .banded import BandedFactorization, BandedMatrix, band_add_scaled, band_logdet, band_lu, band_matvec, band_solve
from .dense import DenseGpProblem, dense_loglik, dense_predict
from .errors import (
    CollinearRegressorsError,
    ConditioningError,
    ConfigError,
    DataError,
    DegenerateDesignError,
    InsufficientDataError,
    KPError,
    NumericalBreakdown,
    OptimizationFailure,
    ParameterError,
    SingularMatrixError,
)
from .gp1d import (
    Gp1dModel,
    constant_mean,
    fit_1d,
    log_likelihood_1d,
    polynomial_mean,
    predict,
    predict_mean,
    predict_variance,
    zero_mean,
)
from .grid import (
    FullGridDesign,
    GridGpModel,
    SparseGridDesign,
    SparseGridModel,
    fit_full_grid,
    fit_sparse_grid,
    full_grid_loglik,
    kron_solve,
    make_sparse_grid,
    predict_full_grid,
    predict_sparse_grid,
    read_manifest,
    sparse_grid_loglik,
    write_manifest,
)
from .matern import HalfIntegerMatern, ProductKernel, correlation, make_kernel, product_correlation
from .mle import MleResult, MleSearch, profile_loglik, profile_mle_1d
from .packets import (
    BasisRow,
    KpBasis,
    KpCoefficients,
    build_basis,
    central_kp_coefficients,
    evaluate_basis_row,
    evaluate_basis_rows,
    left_kp_coefficients,
    right_kp_coefficients,
)

__version__ = "0.1.0"
