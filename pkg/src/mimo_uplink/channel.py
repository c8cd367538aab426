"""MMSE channel-estimate statistics and small-scale channel realizations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError

__all__ = ["ChannelStats", "ChannelRealization", "gamma_from_beta",
           "draw_channel", "complex_gaussian"]


@dataclass(frozen=True)
class ChannelStats:
    """Mean-square of the MMSE channel estimate for every link.

    ``gamma = rho_u * tau * beta**2 / (1 + rho_u * tau * beta)``; the
    estimation error then has variance ``beta - gamma``.
    """

    gamma: np.ndarray
    beta: np.ndarray
    tau: int
    rho_u: float

    @property
    def error_variance(self) -> np.ndarray:
        return np.maximum(self.beta - self.gamma, 0.0)

    @property
    def shape(self):
        return self.gamma.shape


@dataclass(frozen=True)
class ChannelRealization:
    g_hat: np.ndarray
    g_tilde: np.ndarray

    @property
    def g(self) -> np.ndarray:
        return self.g_hat + self.g_tilde


def gamma_from_beta(beta, rho_u: float, tau: int) -> ChannelStats:
    """Compute the estimate statistics from large-scale fading.

    Parameters
    ----------
    beta : array_like
        Large-scale fading, shape ``(M, K)`` or ``(K,)``. A
        :class:`~mimo_uplink.propagation.LargeScaleFading` is also accepted.
    rho_u : float
        Normalized uplink SNR (linear).
    tau : int
        Pilot length in symbols; orthogonal pilots need ``tau >= K``.
    """
    beta = np.asarray(getattr(beta, "beta", beta), dtype=float)
    K = beta.shape[-1]
    if tau < K:
        raise ConfigurationError(f"tau={tau} < K={K}: pilots cannot be orthogonal")
    if rho_u <= 0:
        raise DomainError("rho_u must be > 0")
    if np.any(beta < 0) or not np.all(np.isfinite(beta)):
        raise DomainError("beta must be finite and non-negative")
    snr = rho_u * tau * beta
    gamma = snr * beta / (1.0 + snr)
    return ChannelStats(gamma=gamma, beta=beta, tau=int(tau), rho_u=float(rho_u))


def complex_gaussian(variance, rng: np.random.Generator, size=None) -> np.ndarray:
    """CN(0, variance) samples; real and imaginary parts each carry half."""
    variance = np.asarray(variance, dtype=float)
    if size is None:
        size = variance.shape
    scale = np.sqrt(variance / 2.0)
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return scale * (re + 1j * im)


def draw_channel(stats: ChannelStats, rng: np.random.Generator,
                 n: int | None = None) -> ChannelRealization:
    """Draw the channel estimate and its independent estimation error.

    With ``n`` given, a leading axis of ``n`` independent realizations is
    added to both matrices.
    """
    shape = stats.shape if n is None else (n,) + stats.shape
    g_hat = complex_gaussian(stats.gamma, rng, shape)
    g_tilde = complex_gaussian(stats.error_variance, rng, shape)
    return ChannelRealization(g_hat=g_hat, g_tilde=g_tilde)
