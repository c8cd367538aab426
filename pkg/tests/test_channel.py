import numpy as np
import pytest

from mimo_uplink.channel import ChannelStats, draw_channel, gamma_from_beta
from mimo_uplink.errors import ConfigurationError


def test_gamma_examples():
    stats = gamma_from_beta(np.array([[0.0, 1e-12]]), rho_u=3.16e12, tau=2)
    assert stats.gamma[0, 0] == 0.0
    # rho*tau*beta = 1 -> gamma = beta / 2
    assert gamma_from_beta(np.array([0.5]), 1.0, 2).gamma[0] == pytest.approx(0.25)
    # rho*tau*beta = 56.88; ratio frozen from a scalar evaluation
    g = gamma_from_beta(np.full(18, 1e-12), 3.16e12, 18).gamma
    assert g[0] / 1e-12 == pytest.approx(0.9827228749136143, rel=1e-12)


def test_tau_must_cover_users():
    with pytest.raises(ConfigurationError):
        gamma_from_beta(np.ones((4, 18)), 1.0, 17)


def test_gamma_bounds_and_monotonicity(rng):
    beta = 10 ** rng.uniform(-14, -9, size=(50, 6))
    s = gamma_from_beta(beta, 3.16e12, 6)
    assert np.all(s.gamma > 0) and np.all(s.gamma < beta)
    assert np.all(gamma_from_beta(beta, 3.16e12, 12).gamma > s.gamma)
    assert np.all(gamma_from_beta(beta, 6.32e12, 6).gamma > s.gamma)
    assert np.all(gamma_from_beta(beta * 1.01, 3.16e12, 6).gamma > s.gamma)
    # gamma/beta -> 1 as the estimation SNR grows
    ratios = [gamma_from_beta(beta, rho, 6).gamma / beta for rho in (1e10, 1e12, 1e14, 1e18)]
    assert np.all(np.diff(np.stack(ratios), axis=0) > 0)
    assert np.all(ratios[-1] > 0.99)


def test_colocated_rows_stay_equal():
    beta = np.tile([1e-12, 3e-11, 2e-13], (5, 1))
    g = gamma_from_beta(beta, 3.16e12, 3).gamma
    assert np.all(g == g[0])


def test_perfect_estimation_has_zero_error(rng):
    beta = np.full((4, 3), 2.0)
    stats = ChannelStats(gamma=beta.copy(), beta=beta, tau=3, rho_u=1.0)
    real = draw_channel(stats, rng)
    assert not real.g_tilde.any()
    np.testing.assert_array_equal(real.g, real.g_hat)


def test_sample_variances_match():
    beta = np.array([[1e-12, 4e-11], [2.5e-13, 1e-10]])
    stats = gamma_from_beta(beta, 3.16e12, 2)
    real = draw_channel(stats, np.random.default_rng(11), n=100_000)
    np.testing.assert_allclose(np.mean(np.abs(real.g_hat) ** 2, axis=0), stats.gamma, rtol=0.01)
    np.testing.assert_allclose(np.mean(np.abs(real.g_tilde) ** 2, axis=0),
                               stats.error_variance, rtol=0.01)
    # orthogonality: the two variances add up to beta
    np.testing.assert_allclose(np.mean(np.abs(real.g) ** 2, axis=0), beta, rtol=0.01)
    # real and imaginary parts each carry half of the variance
    np.testing.assert_allclose(np.mean(real.g_hat.real ** 2, axis=0), stats.gamma / 2, rtol=0.015)
    # estimate and error are uncorrelated
    corr = np.mean(real.g_hat * np.conj(real.g_tilde), axis=0)
    assert np.all(np.abs(corr) < 0.02 * np.sqrt(stats.gamma * stats.error_variance))


def test_replay_is_bit_identical():
    stats = gamma_from_beta(np.full((3, 2), 1e-12), 3.16e12, 2)
    a = draw_channel(stats, np.random.default_rng(4))
    b = draw_channel(stats, np.random.default_rng(4))
    np.testing.assert_array_equal(a.g_hat, b.g_hat)
    np.testing.assert_array_equal(a.g_tilde, b.g_tilde)
