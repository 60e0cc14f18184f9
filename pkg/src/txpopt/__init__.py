"""Satellite transponder link-configuration workbench."""

from .core import BACKEND, compute_bandwidth
from .env import TransponderEnv, FullAction, SingleParamAction, denormalize
from .profile import EnvProfile, default_profile, load_profile
from .rewards import MetricWeights, RewardBreakdown, total_reward

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "EnvProfile",
    "FullAction",
    "MetricWeights",
    "RewardBreakdown",
    "SingleParamAction",
    "TransponderEnv",
    "compute_bandwidth",
    "default_profile",
    "denormalize",
    "load_profile",
    "total_reward",
    "__version__",
]
