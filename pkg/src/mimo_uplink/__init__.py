"""Uplink Massive MIMO feasibility simulator.

Evaluates the 99%-likely uplink spectral efficiency of single-cell and
cell-free Massive MIMO with MR or ZF decoding under full-power or max-min
power control.
"""

from .channel import ChannelRealization, ChannelStats, draw_channel, gamma_from_beta
from .config import ScenarioConfig, load_config
from .errors import ConfigurationError, DomainError
from .geometry import (Placement, link_distance, link_distances, place_colocated,
                       place_uniform_disk)
from .montecarlo import (CdfSummary, ExperimentPlan, likely_rate, run_experiment,
                         throughput_from_se)
from .power_control import (MaxMinResult, full_power, maxmin_cf_mr, maxmin_cf_zf,
                            maxmin_cl, maxmin_cl_eta)
from .propagation import (PRESETS, LargeScaleFading, LinkBudget, MorphologyParams,
                          compute_rho_u, draw_beta, path_loss_db)
from .sinr_mr import SinrReport, mr_upper_bound, sinr_cf_mr, sinr_cl_mr
from .sinr_zf import (ZfExpectations, estimate_zf_expectations, sinr_cf_zf,
                      sinr_cl_zf)

__version__ = "0.1.0"
