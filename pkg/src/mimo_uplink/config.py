"""Scenario configuration: defaults, JSON loading and validation.

A configuration file is a flat JSON object whose keys are the field names
of :class:`ScenarioConfig`, e.g.::

    {"morphology": "urban", "deployment": "cellfree", "decoder": "zf",
     "M": 70, "power": "both", "seed": 42}

`morphology` may also be an object with the fields of
:class:`~mimo_uplink.propagation.MorphologyParams` for a custom environment.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError
from .power_control import DEFAULT_MAX_ITER, DEFAULT_TOL
from .propagation import LinkBudget, MorphologyParams, get_preset

__all__ = ["ScenarioConfig", "load_config", "config_from_mapping"]

DEPLOYMENTS = ("cellular", "cellfree")
DECODERS = ("mr", "zf")
POWERS = ("full", "maxmin", "both")


@dataclass
class ScenarioConfig:
    morphology: str | MorphologyParams = "urban"
    M: int = 70
    K: int = 18
    tau: int | None = None
    deployment: str = "cellfree"
    decoder: str = "zf"
    power: str = "both"
    tx_power_w: float = 2.0
    bandwidth_hz: float = 20e6
    noise_figure_db: float = 9.0
    tx_gain_dbi: float = 0.0
    rx_gain_dbi: float = 0.0
    uplink_bandwidth_hz: float = 10e6
    n_largescale: int = 1000
    n_smallscale: int = 200
    seed: int = 0
    percentiles: list = field(default_factory=lambda: [1.0, 5.0])
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    out: str = "."

    def __post_init__(self):
        self.validate()

    @property
    def params(self) -> MorphologyParams:
        if isinstance(self.morphology, MorphologyParams):
            return self.morphology
        return get_preset(self.morphology)

    @property
    def pilot_length(self) -> int:
        return self.K if self.tau is None else self.tau

    @property
    def budget(self) -> LinkBudget:
        return LinkBudget(self.tx_power_w, self.bandwidth_hz, self.noise_figure_db,
                          self.tx_gain_dbi, self.rx_gain_dbi)

    @property
    def config_tag(self) -> str:
        return ("cl-" if self.deployment == "cellular" else "cf-") + self.decoder.upper()

    @property
    def power_modes(self) -> tuple:
        return ("full", "maxmin") if self.power == "both" else (self.power,)

    def validate(self):
        def bad(key, msg):
            raise ConfigurationError(f"{key}: {msg}", key)

        if self.deployment not in DEPLOYMENTS:
            bad("deployment", f"must be one of {DEPLOYMENTS}, got {self.deployment!r}")
        if self.decoder not in DECODERS:
            bad("decoder", f"must be one of {DECODERS}, got {self.decoder!r}")
        if self.power not in POWERS:
            bad("power", f"must be one of {POWERS}, got {self.power!r}")
        for key in ("M", "K", "n_largescale", "n_smallscale", "max_iter"):
            v = getattr(self, key)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                bad(key, f"must be a positive integer, got {v!r}")
        if self.tau is not None and (not isinstance(self.tau, int) or self.tau < self.K):
            bad("tau", f"must be an integer >= K={self.K}, got {self.tau!r}")
        if self.decoder == "zf" and self.M <= self.K:
            bad("M", f"ZF decoding requires M > K (M={self.M}, K={self.K})")
        if self.decoder == "zf" and self.deployment == "cellfree" and self.n_smallscale < 2:
            bad("n_smallscale", "must be at least 2")
        if not all(0 < p < 100 for p in self.percentiles):
            bad("percentiles", "values must lie strictly between 0 and 100")
        if not 0 < self.tol < 1:
            bad("tol", "must lie in (0, 1)")
        for key in ("tx_power_w", "bandwidth_hz", "uplink_bandwidth_hz"):
            if not getattr(self, key) > 0:
                bad(key, "must be > 0")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            bad("seed", f"must be a non-negative integer, got {self.seed!r}")
        try:
            self.params
        except ConfigurationError as exc:
            bad("morphology", str(exc))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if isinstance(self.morphology, MorphologyParams):
            d["morphology"] = dataclasses.asdict(self.morphology)
        return d

    def provenance(self) -> dict:
        """Effective settings echoed into output headers (output path omitted)."""
        d = self.to_dict()
        d.pop("out")
        d["tau"] = self.pilot_length
        return d


_FIELDS = {f.name for f in dataclasses.fields(ScenarioConfig)}


def config_from_mapping(values: dict) -> ScenarioConfig:
    unknown = set(values) - _FIELDS
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigurationError(f"{key}: unknown configuration key", key)
    values = dict(values)
    morph = values.get("morphology")
    if isinstance(morph, dict):
        try:
            values["morphology"] = MorphologyParams(**morph)
        except TypeError as exc:
            raise ConfigurationError(f"morphology: {exc}", "morphology") from None
    return ScenarioConfig(**values)


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def load_config(path, overrides: dict | None = None) -> ScenarioConfig:
    """Read a JSON scenario file; `overrides` (e.g. CLI flags) take precedence.

    Errors are raised as :class:`ConfigurationError` whose message names the
    file line of the offending key where it can be located.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        values = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}:{exc.lineno}: {exc.msg}") from None
    if not isinstance(values, dict):
        raise ConfigurationError(f"{path}:1: top level must be a JSON object")
    values.update(overrides or {})
    try:
        return config_from_mapping(values)
    except ConfigurationError as exc:
        key = exc.args[1] if len(exc.args) > 1 else None
        line = _line_of(text, key) if key and key not in (overrides or {}) else None
        where = f"{path}:{line}" if line else str(path)
        raise ConfigurationError(f"{where}: {exc.args[0]}") from None
    except TypeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
