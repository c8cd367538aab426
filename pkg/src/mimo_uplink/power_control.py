"""Full-power and max-min uplink power control.

Cellular max-min has a closed form. For cell-free deployments the common
SINR ``zeta`` is found by bisection: for a trial ``zeta`` the equal-SINR
conditions form a K x K linear system in ``eta``, and ``zeta`` is feasible
when its solution lies in ``[0, 1]^K``. Feasibility is monotone in
``zeta`` (a positive solution exists only below the Perron root of the
coupling matrix), which is what makes bisection valid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .sinr_mr import mr_upper_bound, sinr_cf_mr, sinr_cl_mr, _mr_terms
from .sinr_zf import ZfExpectations, sinr_cf_zf, sinr_cl_zf

__all__ = ["MaxMinResult", "full_power", "maxmin_cl_eta", "maxmin_cl",
           "maxmin_cf_mr", "maxmin_cf_zf", "bisect_common_sinr",
           "DEFAULT_TOL", "DEFAULT_MAX_ITER"]

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-5
DEFAULT_MAX_ITER = 100


@dataclass
class MaxMinResult:
    eta: np.ndarray
    zeta: float
    iterations: int
    residual: float
    converged: bool = True


def full_power(K: int) -> np.ndarray:
    if K < 1:
        raise DomainError("K must be >= 1")
    return np.ones(int(K))


def maxmin_cl_eta(gamma_k) -> np.ndarray:
    """Cellular max-min power control: ``eta_k = min(gamma) / gamma_k``."""
    gamma_k = np.asarray(gamma_k, dtype=float)
    if np.any(gamma_k <= 0):
        raise DomainError("max-min power control needs gamma_k > 0 for all users")
    return gamma_k.min() / gamma_k


def _equalization_residual(sinr, zeta):
    if zeta <= 0:
        return float(np.max(np.abs(sinr))) if sinr.size else 0.0
    return float(np.max(np.abs(sinr - zeta)) / zeta)


def maxmin_cl(gamma_k, beta_k, M: int, rho_u: float,
              decoder: str = "mr") -> MaxMinResult:
    """Closed-form cellular max-min power control for MR or ZF decoding."""
    gamma_k = np.asarray(gamma_k, dtype=float)
    beta_k = np.asarray(beta_k, dtype=float)
    eta = maxmin_cl_eta(gamma_k)
    g_min = gamma_k.min()
    if decoder == "mr":
        zeta = M * rho_u / (1.0 / g_min + rho_u * np.sum(beta_k / gamma_k))
        sinr = sinr_cl_mr(gamma_k, beta_k, eta, M, rho_u).sinr
    elif decoder == "zf":
        K = gamma_k.size
        if M <= K:
            raise DomainError(f"ZF needs M > K (M={M}, K={K})")
        err = np.maximum(beta_k - gamma_k, 0.0)
        zeta = (M - K) * rho_u / (1.0 / g_min + rho_u * np.sum(err / gamma_k))
        sinr = sinr_cl_zf(gamma_k, beta_k, eta, M, rho_u).sinr
    else:
        raise DomainError(f"unknown decoder {decoder!r}")
    return MaxMinResult(eta, float(zeta), 0, _equalization_residual(sinr, zeta))


def _solve(gain, coupling, noise, zeta):
    """eta solving (diag(gain) - zeta*coupling) eta = zeta*noise, or None."""
    A = np.diag(gain) - zeta * coupling
    try:
        eta = np.linalg.solve(A, zeta * noise)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(eta)):
        return None
    return eta


def _feasible(eta):
    return eta is not None and np.all(eta >= 0.0) and np.all(eta <= 1.0)


def bisect_common_sinr(gain, coupling, noise, upper: float,
                       tol: float = DEFAULT_TOL,
                       max_iter: int = DEFAULT_MAX_ITER):
    """Largest ``zeta`` whose equal-SINR system has a solution in ``[0,1]^K``.

    The system is ``(diag(gain) - zeta*coupling) eta = zeta*noise``.
    Stops once the bracket is narrower than ``tol`` relative to its upper
    end and the largest feasible coefficient is within ``tol`` of one, or
    after `max_iter` halvings.

    Returns
    -------
    zeta, eta, iterations, converged
    """
    gain = np.asarray(gain, dtype=float)
    coupling = np.asarray(coupling, dtype=float)
    noise = np.asarray(noise, dtype=float)
    K = gain.size

    lo, eta_lo = 0.0, np.zeros(K)
    hi = float(upper)
    it = 0
    # a valid cap is normally infeasible; grow it if not
    while _feasible(eta_hi := _solve(gain, coupling, noise, hi)):
        lo, eta_lo = hi, eta_hi
        hi *= 2.0
        it += 1
        if it >= max_iter:
            return lo, eta_lo, it, False

    converged = False
    while it < max_iter:
        it += 1
        mid = 0.5 * (lo + hi)
        eta = _solve(gain, coupling, noise, mid)
        if _feasible(eta):
            lo, eta_lo = mid, eta
        else:
            hi = mid
        if hi - lo <= tol * hi and 1.0 - eta_lo.max() <= tol:
            converged = True
            break
    return lo, eta_lo, it, converged


def _finish(zeta, eta, it, converged, sinr_fn):
    if zeta <= 0.0:
        log.warning("max-min solve found no feasible common SINR above zero")
        eta = np.zeros_like(eta)
        return MaxMinResult(eta, 0.0, it, 0.0, converged)
    eta = np.clip(eta, 0.0, 1.0)
    sinr = sinr_fn(eta)
    return MaxMinResult(eta, float(zeta), it, _equalization_residual(sinr, zeta),
                        converged)


def maxmin_cf_mr(gamma, beta, rho_u: float, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER) -> MaxMinResult:
    """Cell-free MR max-min power control by bisection.

    The bracket's upper end is the power-control-independent cap from
    :func:`~mimo_uplink.sinr_mr.mr_upper_bound`.
    """
    if rho_u <= 0:
        raise DomainError("rho_u must be > 0")
    s, cross = _mr_terms(gamma, beta)
    upper = mr_upper_bound(gamma).common
    zeta, eta, it, ok = bisect_common_sinr(s**2, cross, s / rho_u, upper, tol, max_iter)
    return _finish(zeta, eta, it, ok,
                   lambda e: sinr_cf_mr(gamma, beta, e, rho_u).sinr)


def maxmin_cf_zf(exp: ZfExpectations, rho_u: float, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER) -> MaxMinResult:
    """Cell-free ZF max-min power control by bisection.

    The upper end of the bracket is ``min_k rho/(rho E|b_kk|^2 + d_k)``:
    user k's SINR can never exceed its value with every other user silent.
    """
    if rho_u <= 0:
        raise DomainError("rho_u must be > 0")
    K = exp.K
    d = exp.e_diag_inv
    upper = float(np.min(rho_u / (rho_u * np.diag(exp.e_b2) + d)))
    zeta, eta, it, ok = bisect_common_sinr(np.ones(K), exp.e_b2, d / rho_u,
                                           upper, tol, max_iter)
    return _finish(zeta, eta, it, ok, lambda e: sinr_cf_zf(exp, e, rho_u).sinr)
