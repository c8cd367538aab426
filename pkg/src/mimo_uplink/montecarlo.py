"""Monte Carlo harness: large-scale drops, per-configuration SINR, pooled CDFs.

Every random draw comes from a child stream keyed by
``(master_seed, realization_index, purpose)``, so results do not depend on
the number of worker processes or on which configurations are requested
together.
"""

from __future__ import annotations

import logging
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import gamma_from_beta
from .config import ScenarioConfig
from .errors import ConfigurationError, DomainError
from .geometry import Placement, place_colocated, place_uniform_disk
from .power_control import maxmin_cf_mr, maxmin_cf_zf, maxmin_cl
from .propagation import draw_beta
from .sinr_mr import CONFIGS, POWER_MODES, mr_upper_bound, sinr_cf_mr, sinr_cl_mr
from .sinr_zf import estimate_zf_expectations, sinr_cf_zf, sinr_cl_zf

__all__ = ["ExperimentPlan", "CdfSummary", "run_experiment", "likely_rate",
           "throughput_from_se", "child_rng", "worker_count", "WORKERS_ENV"]

log = logging.getLogger(__name__)

WORKERS_ENV = "MIMO_UPLINK_WORKERS"


def child_rng(master_seed: int, index: int, purpose: str) -> np.random.Generator:
    """Independent generator for one (realization, purpose) pair."""
    tag = zlib.crc32(purpose.encode("ascii"))
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(index, tag))
    return np.random.default_rng(seq)


def worker_count(default: int = 1) -> int:
    raw = os.environ.get(WORKERS_ENV)
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError:
        raise ConfigurationError(f"{WORKERS_ENV}={raw!r} is not an integer") from None
    if n < 1:
        raise ConfigurationError(f"{WORKERS_ENV} must be >= 1")
    return n


@dataclass
class ExperimentPlan:
    scenario: ScenarioConfig
    configurations: list
    n_largescale: int
    n_smallscale: int
    master_seed: int
    percentiles: tuple = (1.0, 5.0)
    workers: int | None = None

    def __post_init__(self):
        self.configurations = [tuple(c) for c in self.configurations]
        if self.n_largescale < 1:
            raise ConfigurationError("n_largescale must be >= 1")
        if not all(0 < p < 100 for p in self.percentiles):
            raise ConfigurationError("percentiles must lie in (0, 100)")
        if not self.configurations:
            raise ConfigurationError("plan has no configurations")
        sc = self.scenario
        for config, power in self.configurations:
            if config not in CONFIGS or power not in POWER_MODES:
                raise ConfigurationError(f"unknown configuration {config}/{power}")
            if config.endswith("ZF") and sc.M <= sc.K:
                raise ConfigurationError(
                    f"{config} needs M > K (M={sc.M}, K={sc.K})")
        if any(c == "cf-ZF" for c, _ in self.configurations) and self.n_smallscale < 2:
            raise ConfigurationError("n_smallscale must be >= 2 for cf-ZF")

    @classmethod
    def from_scenario(cls, sc: ScenarioConfig, workers: int | None = None):
        return cls(scenario=sc,
                   configurations=[(sc.config_tag, p) for p in sc.power_modes],
                   n_largescale=sc.n_largescale, n_smallscale=sc.n_smallscale,
                   master_seed=sc.seed, percentiles=tuple(sc.percentiles),
                   workers=workers)


@dataclass
class CdfSummary:
    """Pooled per-user results of one configuration over all drops.

    Arrays are indexed ``[realization, user]``. For cf-MR, `bound` holds the
    per-user SINR cap and `common_bound` its minimum over users (the cap on
    the max-min SINR).
    """

    config: str
    power: str
    sinr: np.ndarray
    eta: np.ndarray
    percentiles: tuple = (1.0, 5.0)
    zeta: np.ndarray | None = None
    bound: np.ndarray | None = None
    common_bound: np.ndarray | None = None
    n_out_of_range: int = 0
    _sorted: np.ndarray | None = field(default=None, init=False, repr=False)

    @property
    def se(self) -> np.ndarray:
        return np.log2(1.0 + self.sinr)

    @property
    def samples(self) -> np.ndarray:
        """Sorted pooled spectral efficiencies (bits/s/Hz)."""
        if self._sorted is None:
            self._sorted = np.sort(self.se, axis=None)
        return self._sorted

    @property
    def n_samples(self) -> int:
        return self.sinr.size

    @property
    def percentile_values(self) -> dict:
        return {p: likely_rate(self, p) for p in self.percentiles}


def likely_rate(summary, percentile: float) -> float:
    """Empirical lower percentile of pooled SE samples.

    Uses the lower-rank order statistic: the value at 1-based position
    ``ceil(p/100 * N)`` of the sorted samples. The 99%-likely rate is the
    1st percentile.
    """
    samples = summary.samples if isinstance(summary, CdfSummary) else np.asarray(summary)
    if samples.size == 0:
        raise DomainError("no samples")
    if not 0 < percentile < 100:
        raise DomainError("percentile must lie in (0, 100)")
    return float(np.percentile(samples, percentile, method="inverted_cdf"))


def throughput_from_se(se, uplink_bandwidth_hz: float):
    """Throughput in bits/s for a spectral efficiency in bits/s/Hz."""
    if np.any(np.asarray(se) < 0) or uplink_bandwidth_hz < 0:
        raise DomainError("throughput_from_se needs non-negative inputs")
    return np.asarray(se) * uplink_bandwidth_hz if np.ndim(se) else float(se) * uplink_bandwidth_hz


def _realization(plan: ExperimentPlan, index: int) -> dict:
    sc = plan.scenario
    params = sc.params
    rho = sc.budget.rho_u
    tau = sc.pilot_length
    seed = plan.master_seed
    wanted = {c for c, _ in plan.configurations}
    out = {}

    users = place_uniform_disk(sc.K, params.radius_m, child_rng(seed, index, "users"))

    if wanted & {"cl-MR", "cl-ZF"}:
        cl_params = params.for_deployment("cellular")
        site = Placement(place_colocated(1), users, cl_params.ap_height,
                         cl_params.user_height, params.radius_m, colocated=True)
        lsf = draw_beta(site, cl_params, child_rng(seed, index, "shadow-cl"))
        beta_k = lsf.beta[0]
        gamma_k = gamma_from_beta(beta_k, rho, tau).gamma
        n_oor = int((~lsf.validity_flags).sum())
        for config, power in plan.configurations:
            if not config.startswith("cl"):
                continue
            decoder = config[3:].lower()
            sinr_fn = sinr_cl_mr if decoder == "mr" else sinr_cl_zf
            if power == "full":
                rep = sinr_fn(gamma_k, beta_k, np.ones(sc.K), sc.M, rho)
                zeta = None
            else:
                res = maxmin_cl(gamma_k, beta_k, sc.M, rho, decoder)
                rep = sinr_fn(gamma_k, beta_k, res.eta, sc.M, rho, power)
                zeta = res.zeta
            out[config, power] = dict(sinr=rep.sinr, eta=rep.eta, zeta=zeta,
                                      n_out_of_range=n_oor)

    if wanted & {"cf-MR", "cf-ZF"}:
        aps = place_uniform_disk(sc.M, params.radius_m, child_rng(seed, index, "aps"))
        placement = Placement(aps, users, params.ap_height, params.user_height,
                              params.radius_m)
        lsf = draw_beta(placement, params, child_rng(seed, index, "shadow-cf"))
        stats = gamma_from_beta(lsf.beta, rho, tau)
        n_oor = int(lsf.validity_flags.size - np.count_nonzero(lsf.validity_flags))
        del lsf
        bound = mr_upper_bound(stats.gamma) if "cf-MR" in wanted else None
        exp = None
        if "cf-ZF" in wanted:
            exp = estimate_zf_expectations(stats, plan.n_smallscale,
                                           child_rng(seed, index, "smallscale"))
        for config, power in plan.configurations:
            if config == "cf-MR":
                if power == "full":
                    rep = sinr_cf_mr(stats.gamma, stats.beta, np.ones(sc.K), rho)
                    zeta = None
                else:
                    res = maxmin_cf_mr(stats.gamma, stats.beta, rho, sc.tol, sc.max_iter)
                    rep = sinr_cf_mr(stats.gamma, stats.beta, res.eta, rho, power)
                    zeta = res.zeta
                out[config, power] = dict(sinr=rep.sinr, eta=rep.eta, zeta=zeta,
                                          bound=bound.per_user,
                                          common_bound=bound.common,
                                          n_out_of_range=n_oor)
            elif config == "cf-ZF":
                if power == "full":
                    rep = sinr_cf_zf(exp, np.ones(sc.K), rho)
                    zeta = None
                else:
                    res = maxmin_cf_zf(exp, rho, sc.tol, sc.max_iter)
                    rep = sinr_cf_zf(exp, res.eta, rho, power)
                    zeta = res.zeta
                out[config, power] = dict(sinr=rep.sinr, eta=rep.eta, zeta=zeta,
                                          n_out_of_range=n_oor)
    return out


def _realization_star(args):
    return _realization(*args)


def run_experiment(plan: ExperimentPlan) -> dict:
    """Run every large-scale drop of `plan`.

    Returns
    -------
    dict
        ``{(config, power): CdfSummary}`` in the order of
        ``plan.configurations``.
    """
    workers = plan.workers if plan.workers is not None else worker_count()
    n = plan.n_largescale
    jobs = [(plan, i) for i in range(n)]
    if workers <= 1 or n == 1:
        results = []
        for i, job in enumerate(jobs):
            results.append(_realization_star(job))
            if (i + 1) % 50 == 0:
                log.info("realization %d/%d", i + 1, n)
    else:
        chunk = max(1, n // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_realization_star, jobs, chunksize=chunk))

    summaries = {}
    for key in plan.configurations:
        rows = [r[key] for r in results]
        first = rows[0]
        summaries[key] = CdfSummary(
            config=key[0], power=key[1],
            sinr=np.stack([r["sinr"] for r in rows]),
            eta=np.stack([r["eta"] for r in rows]),
            percentiles=tuple(plan.percentiles),
            zeta=(np.array([r["zeta"] for r in rows]) if first["zeta"] is not None
                  else None),
            bound=(np.stack([r["bound"] for r in rows]) if "bound" in first else None),
            common_bound=(np.array([r["common_bound"] for r in rows])
                          if "common_bound" in first else None),
            n_out_of_range=sum(r["n_out_of_range"] for r in rows),
        )
    return summaries
