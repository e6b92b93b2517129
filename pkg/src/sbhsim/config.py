"""Campaign configuration: dataclasses, TOML loading, content hashing.

Every knob of the simulator lives here so a campaign is reproducible from
(config, master seed) alone.  ``default.toml`` ships inside the package
and mirrors ``CampaignConfig()`` exactly; a test pins that equivalence.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .analytic import AnalyticParams
from .channel import (AntennaPattern, OMNI_BACKHAUL_PATTERN, PATCH_PATTERN,
                      SECTOR_PATTERN, YAGI_PATTERN)
from .rates import FrameConfig

DEPLOYMENT_KINDS = ("sbh_random", "sbh_adhoc", "direct_access")
PILOT_SCHEMES = ("orthogonal", "reuse1", "reuse3")


@dataclass(frozen=True)
class LayoutConfig:
    isd_m: float = 500.0
    n_sites: int = 19
    bs_height_m: float = 32.0
    sc_height_m: float = 5.0
    ue_height_m: float = 1.5


@dataclass(frozen=True)
class DeploymentConfig:
    kind: str = "sbh_random"
    mean_sc_per_sector: float = 16.0
    mean_ue_per_sector: float = 16.0
    sc_ue_offset_m: float = 0.0         # ad-hoc pairing distance
    min_bs_sc_distance_m: float = 35.0  # keep-out for random SC drops

    def __post_init__(self):
        if self.kind not in DEPLOYMENT_KINDS:
            raise ValueError(f"unknown deployment kind {self.kind!r}")


@dataclass(frozen=True)
class RadioConfig:
    m_antennas: int = 64
    antenna_spacing_wavelengths: float = 0.5
    codebook_size: int = 16
    bs_power_dbm: float = 46.0
    sc_power_dbm: float = 30.0
    ue_ul_power_dbm: float = 23.0
    bs_noise_figure_db: float = 5.0
    sc_noise_figure_db: float = 5.0
    ue_noise_figure_db: float = 9.0
    sc_access_antenna: str = "yagi"     # "patch" or "yagi"
    sc_backhaul_gain_dbi: float = 5.0
    rician_k_intercept_db: float = 13.0
    rician_k_slope_db_per_m: float = -0.03
    site_planning: bool = True          # planned backhaul: boosted LoS odds
    da_pilot_scheme: str = "reuse1"     # direct access: "reuse1" or "reuse3"

    def __post_init__(self):
        if self.sc_access_antenna not in ("patch", "yagi"):
            raise ValueError(f"unknown SC access antenna {self.sc_access_antenna!r}")
        if self.da_pilot_scheme not in ("reuse1", "reuse3"):
            raise ValueError(f"unknown pilot scheme {self.da_pilot_scheme!r}")

    @property
    def sc_access_pattern(self) -> AntennaPattern:
        return PATCH_PATTERN if self.sc_access_antenna == "patch" else YAGI_PATTERN

    @property
    def sc_backhaul_pattern(self) -> AntennaPattern:
        return dataclasses.replace(OMNI_BACKHAUL_PATTERN,
                                   max_gain_dbi=self.sc_backhaul_gain_dbi)


@dataclass(frozen=True)
class CampaignConfig:
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    deployment: DeploymentConfig = field(default_factory=DeploymentConfig)
    radio: RadioConfig = field(default_factory=RadioConfig)
    frame: FrameConfig = field(default_factory=FrameConfig)
    alpha: float = 0.5                  # backhaul share of the frame
    n_drops: int = 100
    master_seed: int = 20240817
    los_decay_scale_m: float = 82.0     # Gaussian fit of the access LoS curve

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if self.n_drops < 1:
            raise ValueError("need at least one drop")

    @property
    def bs_sc_height_diff_m(self) -> float:
        return self.layout.bs_height_m - self.layout.sc_height_m

    @property
    def bs_ue_height_diff_m(self) -> float:
        return self.layout.bs_height_m - self.layout.ue_height_m

    @property
    def sc_ue_height_diff_m(self) -> float:
        return self.layout.sc_height_m - self.layout.ue_height_m

    def analytic_params(self) -> AnalyticParams:
        dep, rad = self.deployment, self.radio
        return AnalyticParams(
            m_antennas=rad.m_antennas,
            bs_power_w=10.0 ** ((rad.bs_power_dbm - 30.0) / 10.0),
            sc_power_w=10.0 ** ((rad.sc_power_dbm - 30.0) / 10.0),
            sc_backhaul_gain_dbi=rad.sc_backhaul_gain_dbi,
            sc_access_gain_dbi=rad.sc_access_pattern.max_gain_dbi,
            sector_pattern=SECTOR_PATTERN,
            bs_sc_height_diff_m=self.bs_sc_height_diff_m,
            sc_ue_height_diff_m=self.sc_ue_height_diff_m,
            isd_m=self.layout.isd_m,
            min_backhaul_dist_m=dep.min_bs_sc_distance_m,
            mean_sc_per_sector=dep.mean_sc_per_sector,
            mean_ue_per_sector=dep.mean_ue_per_sector,
            adhoc=(dep.kind == "sbh_adhoc"),
            adhoc_offset_m=dep.sc_ue_offset_m,
            los_decay_scale_m=self.los_decay_scale_m,
            bandwidth_hz=self.frame.bandwidth_hz,
        )


_SECTION_TYPES = {
    "layout": LayoutConfig,
    "deployment": DeploymentConfig,
    "radio": RadioConfig,
    "frame": FrameConfig,
}


def _build_section(cls, table: dict):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(table) - names
    if unknown:
        raise ValueError(f"unknown keys in [{cls.__name__}]: {sorted(unknown)}")
    return cls(**table)


def config_from_dict(raw: dict) -> CampaignConfig:
    kwargs = {}
    top_names = {f.name for f in dataclasses.fields(CampaignConfig)}
    for key, value in raw.items():
        if key in _SECTION_TYPES:
            if not isinstance(value, dict):
                raise ValueError(f"[{key}] must be a table")
            kwargs[key] = _build_section(_SECTION_TYPES[key], value)
        elif key in top_names:
            kwargs[key] = value
        else:
            raise ValueError(f"unknown config key {key!r}")
    return CampaignConfig(**kwargs)


def load_config(path: str | Path | None = None) -> CampaignConfig:
    """Load a TOML campaign config; ``None`` loads the packaged defaults."""
    if path is None:
        text = resources.files("sbhsim").joinpath("default.toml").read_text()
        return config_from_dict(tomllib.loads(text))
    with open(path, "rb") as fh:
        return config_from_dict(tomllib.load(fh))


def config_to_dict(cfg: CampaignConfig) -> dict:
    return dataclasses.asdict(cfg)


def config_hash(cfg: CampaignConfig) -> str:
    """Stable digest of the full configuration, for output manifests."""
    blob = json.dumps(config_to_dict(cfg), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()
