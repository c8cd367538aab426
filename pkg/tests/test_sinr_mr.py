import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mimo_uplink.channel import gamma_from_beta
from mimo_uplink.errors import DomainError
from mimo_uplink.sinr_mr import check_eta, mr_upper_bound, sinr_cf_mr, sinr_cl_mr

from oracles import random_cf_instance

RHO = 3.16e12


def test_single_user_perfect_csi():
    beta = np.array([2e-12])
    rep = sinr_cl_mr(beta, beta, [1.0], 64, RHO)
    assert rep.sinr[0] == pytest.approx(64 * RHO * 2e-12 / (1 + RHO * 2e-12))
    assert rep.se[0] == np.log2(1 + rep.sinr[0])
    assert rep.config == "cl-MR"


def test_zero_power_zero_sinr():
    g = np.array([1e-12, 2e-12])
    assert not sinr_cl_mr(g, g, np.zeros(2), 10, RHO).sinr.any()
    assert not sinr_cf_mr(np.ones((3, 2)), np.ones((3, 2)), np.zeros(2), RHO).sinr.any()


def test_dimension_checks():
    with pytest.raises(DomainError):
        sinr_cl_mr([1.0, 2.0], [1.0], [1.0, 1.0], 4, 1.0)
    with pytest.raises(DomainError):
        sinr_cf_mr(np.ones((3, 2)), np.ones((2, 2)), [1, 1], 1.0)
    with pytest.raises(DomainError):
        check_eta([1.2, 0.5], 2)
    with pytest.raises(DomainError):
        check_eta([1.0], 2)


def test_cl_mr_mean_sinr_at_most_m_over_k():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        K = int(rng.integers(1, 30))
        M = int(rng.integers(K + 1, 3000))
        beta = 10 ** rng.uniform(-14, -9, K)
        gamma = gamma_from_beta(beta, RHO, K).gamma
        eta = rng.random(K)
        assert sinr_cl_mr(gamma, beta, eta, M, RHO).sinr.mean() <= M / K


def test_cf_reduces_to_cl_for_colocated(rng):
    beta_k = 10 ** rng.uniform(-13, -10, 18)
    gamma_k = gamma_from_beta(beta_k, RHO, 18).gamma
    M = 200
    eta = rng.random(18)
    cl = sinr_cl_mr(gamma_k, beta_k, eta, M, RHO).sinr
    cf = sinr_cf_mr(np.tile(gamma_k, (M, 1)), np.tile(beta_k, (M, 1)), eta, RHO).sinr
    np.testing.assert_allclose(cf, cl, rtol=1e-12)


def test_single_antenna_collapse(rng):
    beta = 10 ** rng.uniform(-13, -10, (1, 5))
    gamma = gamma_from_beta(beta, RHO, 5).gamma
    eta = rng.random(5)
    got = sinr_cf_mr(gamma, beta, eta, RHO).sinr
    want = RHO * gamma[0] * eta / (1 + RHO * beta[0] @ eta)
    np.testing.assert_allclose(got, want, rtol=1e-12)


def test_bound_examples():
    assert mr_upper_bound(np.full((7, 1), 3.0)).per_user[0] == pytest.approx(7.0)
    col = np.zeros((6, 1))
    col[2] = 5.0
    assert mr_upper_bound(col).per_user[0] == pytest.approx(1.0)
    b = mr_upper_bound(np.array([[3.0, 1.0], [4.0, 1.0], [0.0, 1.0], [0.0, 1.0]]))
    assert b.per_user[0] == pytest.approx(49 / 25)
    assert b.per_user[1] == pytest.approx(4.0)
    assert b.common == pytest.approx(1.96)
    with pytest.raises(DomainError):
        mr_upper_bound(np.zeros((3, 2)))


def test_sinr_strictly_below_bound():
    rng = np.random.default_rng(1)
    for _ in range(200):
        M, K = int(rng.integers(2, 300)), int(rng.integers(1, 20))
        gamma, beta, rho = random_cf_instance(rng, M, K)
        eta = rng.uniform(0.01, 1, K)
        sinr = sinr_cf_mr(gamma, beta, eta, rho).sinr
        bound = mr_upper_bound(gamma)
        assert np.all(sinr < bound.per_user)
        assert sinr.min() < bound.common


unit_inputs = arrays(np.float64, st.integers(1, 60),
                     elements=st.floats(0, 1e6, allow_subnormal=False))


@given(unit_inputs)
@settings(max_examples=300)
def test_l1_l2_ratio_bounds(v):
    assume(np.linalg.norm(v) > 1e-100)
    x = v / np.linalg.norm(v)
    s = x.sum()
    assert 1 - 1e-12 <= s <= np.sqrt(x.size) * (1 + 1e-12)


def test_l1_l2_ratio_equality_cases():
    for M in (1, 2, 17, 1000):
        x = np.full(M, 1 / np.sqrt(M))
        assert x.sum() == pytest.approx(np.sqrt(M))
        e = np.zeros(M)
        e[M // 2] = 1.0
        assert e.sum() == 1.0
        assert mr_upper_bound(e).per_user[0] == pytest.approx(1.0)
        assert mr_upper_bound(np.full(M, 0.3)).per_user[0] == pytest.approx(M)


def test_l1_l2_ratio_random_vectors_strict():
    # two or more positive entries push the sum strictly above 1
    rng = np.random.default_rng(8)
    for _ in range(10_000):
        M = int(rng.integers(2, 100))
        x = rng.random(M)
        x /= np.linalg.norm(x)
        assert 1 < x.sum() <= np.sqrt(M) + 1e-12
