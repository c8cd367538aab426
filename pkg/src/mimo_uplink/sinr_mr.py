"""Effective uplink SINR with maximum-ratio decoding.

All SINRs are linear. Conversion to spectral efficiency happens in
:class:`SinrReport`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError

__all__ = ["SinrReport", "check_eta", "sinr_cl_mr", "sinr_cf_mr",
           "mr_upper_bound", "MrBound", "CONFIGS", "POWER_MODES"]

CONFIGS = ("cl-MR", "cl-ZF", "cf-MR", "cf-ZF")
POWER_MODES = ("full", "maxmin")


@dataclass
class SinrReport:
    sinr: np.ndarray
    config: str
    power: str
    eta: np.ndarray
    se: np.ndarray = field(init=False)

    def __post_init__(self):
        self.sinr = np.asarray(self.sinr, dtype=float)
        if np.any(self.sinr < 0):
            raise DomainError("negative SINR")
        self.se = np.log2(1.0 + self.sinr)

    @property
    def K(self) -> int:
        return self.sinr.shape[0]


def check_eta(eta, K: int, atol: float = 1e-12) -> np.ndarray:
    """Validate a power-control vector: length K, entries in [0, 1]."""
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (K,):
        raise DomainError(f"eta has shape {eta.shape}, expected ({K},)")
    if np.any(eta < -atol) or np.any(eta > 1 + atol):
        raise DomainError("power control coefficients must lie in [0, 1]")
    return np.clip(eta, 0.0, 1.0)


def _vector(x, name):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-D vector")
    return x


def sinr_cl_mr(gamma_k, beta_k, eta, M: int, rho_u: float,
               power: str = "full") -> SinrReport:
    """Single-cell MR SINR; `gamma_k` and `beta_k` are per-user vectors."""
    gamma_k = _vector(gamma_k, "gamma_k")
    beta_k = _vector(beta_k, "beta_k")
    if gamma_k.shape != beta_k.shape:
        raise DomainError("gamma_k and beta_k differ in length")
    eta = check_eta(eta, gamma_k.size)
    sinr = M * rho_u * gamma_k * eta / (1.0 + rho_u * np.dot(beta_k, eta))
    return SinrReport(sinr, "cl-MR", power, eta)


def _mr_terms(gamma, beta):
    """Per-user sums <gamma_k, 1> and the K x K matrix <gamma_k, beta_k'>."""
    gamma = np.asarray(gamma, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if gamma.ndim != 2 or gamma.shape != beta.shape:
        raise DomainError(
            f"gamma {gamma.shape} and beta {beta.shape} must be equal-shape M x K")
    return gamma.sum(axis=0), gamma.T @ beta


def sinr_cf_mr(gamma, beta, eta, rho_u: float, power: str = "full") -> SinrReport:
    """Cell-free MR SINR for M x K estimate statistics `gamma` and fading `beta`.

    ``sinr_k = rho (sum_m gamma_mk)^2 eta_k /
    (sum_m gamma_mk + rho sum_k' eta_k' sum_m gamma_mk beta_mk')``
    """
    s, cross = _mr_terms(gamma, beta)
    eta = check_eta(eta, s.size)
    sinr = rho_u * s**2 * eta / (s + rho_u * (cross @ eta))
    return SinrReport(sinr, "cf-MR", power, eta)


class MrBound(NamedTuple):
    per_user: np.ndarray
    common: float


def mr_upper_bound(gamma) -> MrBound:
    """Power-control-independent caps on the cell-free MR SINR.

    ``per_user[k] = (sum_m gamma_mk)^2 / sum_m gamma_mk^2``, i.e. the squared
    inner product of the normalized column with the all-ones vector. It lies
    in ``[1, M]``; ``common`` is its minimum over users and caps the max-min
    SINR.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim == 1:
        gamma = gamma[:, None]
    sq = np.einsum("mk,mk->k", gamma, gamma)
    if np.any(sq <= 0):
        raise DomainError("mr_upper_bound: gamma has an all-zero column")
    per_user = gamma.sum(axis=0) ** 2 / sq
    return MrBound(per_user, float(per_user.min()))
