import numpy as np
import pytest

from kpgp.dense import DENSE_MAX_N, DenseGpProblem, dense_loglik, dense_predict
from kpgp.errors import DegenerateDesignError, ParameterError
from kpgp.gp1d import constant_mean
from kpgp.matern import ProductKernel, make_kernel


def test_single_point_noiseless():
    kern = make_kernel(0, 1.0)
    prob = DenseGpProblem(kern, [0.0], [2.0], constant_mean, [0.5], sigma2=3.0)
    mean, var = dense_predict(prob, [0.0, 1.0])
    assert mean[0] == pytest.approx(2.0)
    assert mean[1] == pytest.approx(0.5 + 1.5 * np.exp(-1.0))
    assert var[0] == pytest.approx(0.0, abs=1e-15)
    assert var[1] == pytest.approx(3.0 * (1 - np.exp(-2.0)))
    ll = dense_loglik(prob)
    assert ll == pytest.approx(-0.5 * (np.log(2 * np.pi * 3.0) + 1.5**2 / 3.0))


def test_single_point_with_nugget():
    prob = DenseGpProblem(make_kernel(1, 1.0), [0.0], [1.0], eta=1.0)
    mean, var = dense_predict(prob, [0.0])
    assert mean[0] == pytest.approx(0.5)
    assert var[0] == pytest.approx(0.5)


def test_product_kernel_points():
    pk = ProductKernel.isotropic(1, 0.5, 2)
    pts = np.array([[0.0, 0.0], [0.5, 0.2], [1.0, 1.0]])
    prob = DenseGpProblem(pk, pts, [1.0, 2.0, 3.0])
    mean, _ = dense_predict(prob, pts)
    np.testing.assert_allclose(mean, [1.0, 2.0, 3.0], atol=1e-10)


def test_guards():
    kern = make_kernel(0, 1.0)
    with pytest.raises(ParameterError):
        DenseGpProblem(kern, np.zeros(DENSE_MAX_N + 1), np.zeros(DENSE_MAX_N + 1))
    with pytest.raises(ParameterError):
        DenseGpProblem(kern, [0.0, 1.0], [0.0])
    with pytest.raises(ParameterError):
        DenseGpProblem(kern, [0.0], [0.0], sigma2=0.0)
    with pytest.raises(DegenerateDesignError):
        dense_loglik(DenseGpProblem(kern, [0.0, 0.0], [1.0, 2.0]))
