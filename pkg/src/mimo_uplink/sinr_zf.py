"""Effective uplink SINR with zero-forcing decoding.

The single-cell SINR is closed form. For cell-free deployments the SINR
depends on two expectations over small-scale fading, conditioned on the
large-scale profile:

* ``E|b_kk'|^2`` with ``B = A_ZF @ G_tilde`` and ``A_ZF`` the pseudo-inverse
  of the channel estimate, and
* the diagonal of ``E[(G_hat^H G_hat)^-1]``.

:func:`estimate_zf_expectations` estimates both by Monte Carlo.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelStats, draw_channel
from .errors import ConfigurationError, DomainError
from .sinr_mr import SinrReport, check_eta

__all__ = ["ZfExpectations", "sinr_cl_zf", "estimate_zf_expectations",
           "sinr_cf_zf", "sinr_cf_zf_stderr"]

log = logging.getLogger(__name__)

# smallest admissible sine between a column of G_hat and the span of the others
_COLLINEARITY_FLOOR = 1e-10
_BATCH = 64


def sinr_cl_zf(gamma_k, beta_k, eta, M: int, rho_u: float,
               power: str = "full") -> SinrReport:
    """Single-cell ZF SINR.

    ``sinr_k = (M-K) rho gamma_k eta_k / (1 + rho sum_k' (beta_k'-gamma_k') eta_k')``
    """
    gamma_k = np.asarray(gamma_k, dtype=float)
    beta_k = np.asarray(beta_k, dtype=float)
    if gamma_k.ndim != 1 or gamma_k.shape != beta_k.shape:
        raise DomainError("gamma_k and beta_k must be equal-length vectors")
    K = gamma_k.size
    if M <= K:
        raise DomainError(f"ZF needs M > K (M={M}, K={K})")
    eta = check_eta(eta, K)
    err = np.maximum(beta_k - gamma_k, 0.0)
    sinr = (M - K) * rho_u * gamma_k * eta / (1.0 + rho_u * np.dot(err, eta))
    return SinrReport(sinr, "cl-ZF", power, eta)


@dataclass
class ZfExpectations:
    """Sample estimates of the expectations in the cell-free ZF SINR.

    `e_b2[k, k']` estimates ``E|b_kk'|^2`` and `e_diag_inv[k]` estimates
    ``[E (G_hat^H G_hat)^-1]_kk``. The per-realization samples are kept so
    that standard errors of derived quantities can be formed.
    """

    e_b2: np.ndarray
    e_diag_inv: np.ndarray
    e_b2_se: np.ndarray
    e_diag_inv_se: np.ndarray
    n_realizations: int
    n_rejected: int = 0
    b2_samples: np.ndarray = field(default=None, repr=False)
    diag_samples: np.ndarray = field(default=None, repr=False)

    @property
    def K(self) -> int:
        return self.e_diag_inv.shape[0]

    @classmethod
    def from_samples(cls, b2_samples, diag_samples, n_rejected=0):
        b2_samples = np.asarray(b2_samples, dtype=float)
        diag_samples = np.asarray(diag_samples, dtype=float)
        n = b2_samples.shape[0]
        if n < 2:
            raise ConfigurationError("need at least two realizations")
        sqrt_n = math.sqrt(n)
        return cls(
            e_b2=_fsum_mean(b2_samples),
            e_diag_inv=_fsum_mean(diag_samples),
            e_b2_se=b2_samples.std(axis=0, ddof=1) / sqrt_n,
            e_diag_inv_se=diag_samples.std(axis=0, ddof=1) / sqrt_n,
            n_realizations=n,
            n_rejected=n_rejected,
            b2_samples=b2_samples,
            diag_samples=diag_samples,
        )


def _fsum_mean(samples):
    n = samples.shape[0]
    flat = samples.reshape(n, -1)
    means = np.array([math.fsum(flat[:, j]) for j in range(flat.shape[1])]) / n
    return means.reshape(samples.shape[1:])


def _zf_terms(g_hat, g_tilde):
    """Per-realization |B|^2 and diag((G^H G)^-1) via a QR factorization.

    With ``G_hat = Q R``: ``A_ZF = R^-1 Q^H`` and
    ``(G_hat^H G_hat)^-1 = R^-1 R^-H``, so its diagonal is the squared row
    norms of ``R^-1``. Also returns a mask of realizations whose columns are
    numerically collinear.
    """
    q, r = np.linalg.qr(g_hat)
    col_norm = np.linalg.norm(g_hat, axis=-2)
    r_diag = np.abs(np.diagonal(r, axis1=-2, axis2=-1))
    with np.errstate(divide="ignore", invalid="ignore"):
        sines = r_diag / col_norm
    bad = ~np.all(sines > _COLLINEARITY_FLOOR, axis=-1)
    if np.any(bad):
        # keep inv() away from singular blocks; these rows are discarded
        r = r.copy()
        r[bad] = np.eye(r.shape[-1])
    r_inv = np.linalg.inv(r)
    b = r_inv @ (np.conj(np.swapaxes(q, -1, -2)) @ g_tilde)
    b2 = b.real**2 + b.imag**2
    diag = np.sum(r_inv.real**2 + r_inv.imag**2, axis=-1)
    return b2, diag, bad


def estimate_zf_expectations(stats: ChannelStats, n_real: int,
                             rng: np.random.Generator,
                             max_rejections: int = 1000) -> ZfExpectations:
    """Monte Carlo estimate of the cell-free ZF expectations.

    Draws `n_real` independent pairs ``(G_hat, G_tilde)`` from `stats`.
    Realizations with numerically collinear estimate columns are redrawn;
    the number of redraws is reported in ``n_rejected``.
    """
    M, K = stats.shape
    if M <= K:
        raise DomainError(f"ZF needs M > K (M={M}, K={K})")
    if n_real < 2:
        raise ConfigurationError("n_real must be at least 2")

    b2_out = np.empty((n_real, K, K))
    diag_out = np.empty((n_real, K))
    filled = 0
    rejected = 0
    while filled < n_real:
        n = min(_BATCH, n_real - filled)
        real = draw_channel(stats, rng, n=n)
        b2, diag, bad = _zf_terms(real.g_hat, real.g_tilde)
        good = ~bad
        n_good = int(good.sum())
        b2_out[filled:filled + n_good] = b2[good]
        diag_out[filled:filled + n_good] = diag[good]
        filled += n_good
        rejected += n - n_good
        if rejected > max_rejections:
            raise DomainError(
                f"{rejected} singular channel estimates; statistics degenerate")
    if rejected:
        log.warning("redrew %d numerically singular ZF realizations", rejected)
    return ZfExpectations.from_samples(b2_out, diag_out, n_rejected=rejected)


def _denominator(exp: ZfExpectations, eta, rho_u):
    return rho_u * (exp.e_b2 @ eta) + exp.e_diag_inv


def sinr_cf_zf(exp: ZfExpectations, eta, rho_u: float,
               power: str = "full") -> SinrReport:
    """Cell-free ZF SINR from estimated expectations.

    ``sinr_k = rho eta_k / (rho sum_k' eta_k' E|b_kk'|^2 + [E(G^H G)^-1]_kk)``
    """
    eta = check_eta(eta, exp.K)
    sinr = rho_u * eta / _denominator(exp, eta, rho_u)
    return SinrReport(sinr, "cf-ZF", power, eta)


def sinr_cf_zf_stderr(exp: ZfExpectations, eta, rho_u: float) -> np.ndarray:
    """Delta-method standard error of :func:`sinr_cf_zf` per user.

    The denominator is a mean of per-realization terms, so its standard
    error comes straight from those samples (cross-entry covariance
    included).
    """
    if exp.b2_samples is None:
        raise DomainError("expectations carry no per-realization samples")
    eta = check_eta(eta, exp.K)
    per_real = rho_u * (exp.b2_samples @ eta) + exp.diag_samples
    den = per_real.mean(axis=0)
    den_se = per_real.std(axis=0, ddof=1) / math.sqrt(per_real.shape[0])
    sinr = rho_u * eta / den
    return sinr * den_se / den
