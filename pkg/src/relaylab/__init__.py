"""Achievable rates and cut-set bounds for the half-duplex Gaussian diamond relay network."""

from .kernel import DomainError, c_gauss, coherent_snr, power_for_slot_rate, slot_term
from .model import (
    AllocationError,
    BmeBackAllocation,
    BmeDpcAllocation,
    BmeSuccAllocation,
    BoundAllocation,
    ChannelGains,
    DdfAllocation,
    DpcAllocation,
    OptimizerConfig,
    PowerBudget,
    RateReport,
    Scenario,
    SsrdAllocation,
    TimeAllocation,
    ValidationError,
    load_scenario,
    parse_scenario,
    validate_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError", "c_gauss", "coherent_snr", "power_for_slot_rate", "slot_term",
    "AllocationError", "BmeBackAllocation", "BmeDpcAllocation", "BmeSuccAllocation",
    "BoundAllocation", "ChannelGains", "DdfAllocation", "DpcAllocation", "OptimizerConfig",
    "PowerBudget", "RateReport", "Scenario", "SsrdAllocation", "TimeAllocation",
    "ValidationError", "load_scenario", "parse_scenario", "validate_scenario",
]
