"""Stable-throughput analysis, optimisation and simulation of a cognitive relay
network with an energy-harvesting secondary user."""

from .channel import ChannelTable, ConfigError, PhysicalConfig, build_table
from .optimize import OptimizationResult, optimize, optimize_conventional, optimize_s1, optimize_s2, optimize_s3
from .presets import get_preset, presets
from .queues import BernoulliQueueSpec, energy_empty_prob, energy_state_probs, occupancy
from .rates import PolicyParams, RateVector, rates_conventional, rates_s1, rates_s2, rates_s3

__version__ = "0.1.0"

__all__ = [
    "BernoulliQueueSpec", "ChannelTable", "ConfigError", "OptimizationResult", "PhysicalConfig",
    "PolicyParams", "RateVector", "build_table", "energy_empty_prob", "energy_state_probs",
    "get_preset", "occupancy", "optimize", "optimize_conventional", "optimize_s1", "optimize_s2",
    "optimize_s3", "presets", "rates_conventional", "rates_s1", "rates_s2", "rates_s3",
]
