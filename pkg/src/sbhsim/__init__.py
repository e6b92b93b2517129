"""System simulator and closed-form calculator for massive-MIMO in-band
self-backhaul versus direct access."""

from .config import CampaignConfig, DeploymentConfig, LayoutConfig, RadioConfig, load_config
from .rates import FrameConfig
from .scenario import NetworkLayout, build_layout

__version__ = "0.1.0"

__all__ = [
    "CampaignConfig",
    "DeploymentConfig",
    "FrameConfig",
    "LayoutConfig",
    "NetworkLayout",
    "RadioConfig",
    "build_layout",
    "load_config",
    "__version__",
]
