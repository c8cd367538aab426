"""NLoS path loss, lognormal shadowing and the uplink link budget.

The path-loss expression is the ITU-R street-canyon NLoS model, valid for
link distances between 10 m and 5 km. Distances outside that range are
flagged rather than rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, DomainError
from .geometry import Placement, link_distances

__all__ = [
    "MorphologyParams",
    "PRESETS",
    "get_preset",
    "LinkBudget",
    "LargeScaleFading",
    "path_loss_db",
    "in_model_range",
    "compute_rho_u",
    "draw_beta",
    "MIN_VALID_DISTANCE",
    "MAX_VALID_DISTANCE",
]

MIN_VALID_DISTANCE = 10.0
MAX_VALID_DISTANCE = 5000.0
THERMAL_NOISE_DBM_HZ = -174.0


@dataclass(frozen=True)
class MorphologyParams:
    """Propagation environment for one morphology.

    Lengths are in meters except `radius_km`; `carrier_ghz` in GHz and
    `shadow_sigma_db` in dB. `ap_height` is the distributed access-point
    height; `bs_height` replaces it for co-located (cellular) deployments.
    """

    name: str
    street_width: float
    building_height: float
    ap_height: float
    bs_height: float
    user_height: float
    carrier_ghz: float
    shadow_sigma_db: float
    radius_km: float

    def __post_init__(self):
        lengths = (self.street_width, self.building_height, self.ap_height,
                   self.bs_height, self.user_height, self.radius_km)
        if min(lengths) <= 0:
            raise ConfigurationError(f"{self.name}: all lengths must be > 0")
        if self.carrier_ghz <= 0:
            raise ConfigurationError(f"{self.name}: carrier_ghz must be > 0")
        if self.shadow_sigma_db < 0:
            raise ConfigurationError(f"{self.name}: shadow_sigma_db must be >= 0")

    @property
    def radius_m(self) -> float:
        return 1000.0 * self.radius_km

    def for_deployment(self, deployment: str) -> "MorphologyParams":
        """Return params whose `ap_height` is the one used by `deployment`."""
        if deployment == "cellular":
            return replace(self, ap_height=self.bs_height)
        if deployment == "cellfree":
            return self
        raise ConfigurationError(f"unknown deployment {deployment!r}")


PRESETS = {
    "urban": MorphologyParams("urban", 20.0, 20.0, 20.0, 50.0, 1.5, 2.0, 6.0, 0.5),
    "suburban": MorphologyParams("suburban", 20.0, 10.0, 20.0, 50.0, 1.5, 2.0, 8.0, 1.0),
    "rural": MorphologyParams("rural", 20.0, 5.0, 40.0, 50.0, 1.5, 0.45, 8.0, 4.0),
}


def get_preset(name: str) -> MorphologyParams:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown morphology {name!r}; expected one of {sorted(PRESETS)}") from None


def path_loss_db(d, params: MorphologyParams):
    """NLoS path loss in dB at 3-D distance `d` (meters, scalar or array)."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise DomainError("path loss requires d > 0")
    W = params.street_width
    h = params.building_height
    h_ap = params.ap_height
    h_at = params.user_height
    const = (161.04 - 7.1 * np.log10(W) + 7.5 * np.log10(h)
             - (24.37 - 3.7 * (h / h_ap) ** 2) * np.log10(h_ap)
             + 20.0 * np.log10(params.carrier_ghz)
             - (3.2 * np.log10(11.75 * h_at) ** 2 - 4.97))
    slope = 43.42 - 3.1 * np.log10(h_ap)
    pl = np.log10(d)
    pl -= 3.0
    pl *= slope
    pl += const
    return pl if pl.ndim else float(pl)


def in_model_range(d):
    """Boolean mask of distances inside the model's stated validity range."""
    d = np.asarray(d, dtype=float)
    return (d >= MIN_VALID_DISTANCE) & (d <= MAX_VALID_DISTANCE)


@dataclass(frozen=True)
class LinkBudget:
    """Uplink link budget; `rho_u` is the transmit power over noise power."""

    tx_power_w: float = 2.0
    bandwidth_hz: float = 20e6
    noise_figure_db: float = 9.0
    tx_gain_dbi: float = 0.0
    rx_gain_dbi: float = 0.0

    @property
    def rho_u(self) -> float:
        return compute_rho_u(self)

    @property
    def rho_u_db(self) -> float:
        return 10.0 * np.log10(self.rho_u)


def compute_rho_u(budget: LinkBudget) -> float:
    """Normalized uplink SNR (linear) from a link budget.

    The noise power is thermal noise over the full bandwidth plus the
    receiver noise figure.
    """
    if budget.tx_power_w <= 0 or budget.bandwidth_hz <= 0:
        raise ConfigurationError("tx_power_w and bandwidth_hz must be > 0")
    tx_dbm = 10.0 * np.log10(budget.tx_power_w * 1e3)
    noise_dbm = (THERMAL_NOISE_DBM_HZ + 10.0 * np.log10(budget.bandwidth_hz)
                 + budget.noise_figure_db)
    rho_db = tx_dbm - noise_dbm + budget.tx_gain_dbi + budget.rx_gain_dbi
    return float(10.0 ** (rho_db / 10.0))


@dataclass
class LargeScaleFading:
    """Linear large-scale power gains for one drop of antennas and users."""

    beta: np.ndarray  # (M, K)
    placement: Placement
    params: MorphologyParams
    validity_flags: np.ndarray = field(repr=False, default=None)

    @property
    def any_out_of_range(self) -> bool:
        return bool(self.validity_flags is not None and not self.validity_flags.all())


def draw_beta(placement: Placement, params: MorphologyParams,
              rng: np.random.Generator) -> LargeScaleFading:
    """Path loss plus i.i.d. lognormal shadowing for every antenna-user link.

    `params.ap_height` must match the placement's antenna height; use
    :meth:`MorphologyParams.for_deployment` to pick the cellular height.
    For a co-located placement the antennas see the same large-scale
    fading, so a single shadowing draw per user is shared by all rows.
    """
    if not np.isclose(params.ap_height, placement.ap_height):
        raise ConfigurationError(
            f"placement ap_height {placement.ap_height} does not match "
            f"params.ap_height {params.ap_height}")
    if not np.isclose(params.user_height, placement.user_height):
        raise ConfigurationError("placement and params disagree on user_height")

    if placement.colocated:
        row = Placement(placement.ap_positions[:1], placement.user_positions,
                        placement.ap_height, placement.user_height,
                        placement.radius, colocated=True)
        d = link_distances(row)
        shadow = rng.standard_normal(d.shape)
    else:
        d = link_distances(placement)
        shadow = rng.standard_normal(d.shape)

    valid = in_model_range(d)
    exponent = path_loss_db(d, params)
    np.negative(exponent, out=exponent)
    exponent += params.shadow_sigma_db * shadow
    exponent /= 10.0
    beta = np.power(10.0, exponent, out=exponent)
    if placement.colocated and placement.M > 1:
        beta = np.broadcast_to(beta, (placement.M, placement.K))
        valid = np.broadcast_to(valid, (placement.M, placement.K))
    return LargeScaleFading(beta=beta, placement=placement, params=params,
                            validity_flags=valid)
