import numpy as np
import pytest

from kpgp.errors import ParameterError
from kpgp.gp1d import fit_1d
from kpgp.matern import make_kernel
from kpgp.mle import MleSearch, profile_loglik, profile_mle_1d


def sample_path(rng, p, omega, x, eta=0.0):
    kern = make_kernel(p, omega)
    K = kern(x[:, None], x[None, :]) + 1e-10 * np.eye(x.size)
    f = np.linalg.cholesky(K) @ rng.standard_normal(x.size)
    return 1.0 + f + np.sqrt(eta) * rng.standard_normal(x.size)


@pytest.fixture(scope="module")
def noiseless_case():
    rng = np.random.default_rng(7)
    x = np.sort(rng.uniform(0, 1, 200))
    return x, sample_path(rng, 1, 0.2, x)


def test_recovers_scale_and_beats_sweep(noiseless_case):
    x, Y = noiseless_case
    res = profile_mle_1d(1, x, Y)
    assert res.converged and not res.boundary
    assert 0.1 < res.omega_hat < 0.4
    sweep = [profile_loglik(1, w, x, Y) for w in np.geomspace(0.01, 10, 20)]
    assert res.loglik_value >= max(sweep) - 1e-9
    refit = fit_1d(make_kernel(1, res.omega_hat), x, Y).log_likelihood()
    assert refit == pytest.approx(res.loglik_value, abs=1e-9)


def test_profile_matches_fixed_parameters(noiseless_case):
    x, Y = noiseless_case
    m = fit_1d(make_kernel(1, 0.3), x, Y)
    assert profile_loglik(1, 0.3, x, Y) == pytest.approx(m.log_likelihood(), abs=1e-9)
    assert m.sigma2 == pytest.approx(m.quad / x.size)


def test_constant_data_flags_boundary():
    x = np.linspace(0, 1, 30)
    res = profile_mle_1d(0, x, np.full(30, 2.5))
    assert res.boundary and not res.converged
    assert res.loglik_value == np.inf
    assert res.beta_hat[0] == pytest.approx(2.5)


def test_joint_nugget_estimate():
    rng = np.random.default_rng(3)
    x = np.sort(rng.uniform(0, 1, 120))
    Y = sample_path(rng, 0, 0.3, x, eta=0.05)
    res = profile_mle_1d(0, x, Y, search=MleSearch(nugget="mle", n_starts=3))
    assert res.nugget_ratio_hat > 1e-4
    refit = fit_1d(make_kernel(0, res.omega_hat), x, Y, nugget_ratio=res.nugget_ratio_hat)
    assert refit.log_likelihood() == pytest.approx(res.loglik_value, abs=1e-9)
    fixed = profile_mle_1d(0, x, Y, search=MleSearch(nugget=0.0))
    assert res.loglik_value >= fixed.loglik_value - 1e-6


def test_search_validation():
    x = np.linspace(0, 1, 10)
    with pytest.raises(ParameterError):
        profile_mle_1d(0, x, x, search=MleSearch(omega_bounds=(1.0, 0.5)))
    with pytest.raises(ParameterError):
        profile_mle_1d(0, x, x, search=MleSearch(nugget="lots"))
    with pytest.raises(ParameterError):
        profile_mle_1d(0, x, x, search=MleSearch(nugget=-1.0))
    with pytest.raises(ParameterError):
        profile_mle_1d(0, np.zeros(1), np.zeros(1))
