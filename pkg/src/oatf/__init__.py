"""Seeded simulator for overbooked forward trading of edge and cloud resources."""

from .config import (
    CloudSideState,
    ConfigError,
    LatencyEnergyProfile,
    MarketConfig,
    RiskThresholds,
    SpotConfig,
)
from .engine import RoundOutcome, run_campaign, run_round
from .market import CloudContract, Contracts, EdgeContract, RoundSample, make_rng, overbooking_rate, sample_round
from .negotiation import ContractPair, NoFeasibleContract, QuotationGrid, default_grid, negotiate
from .scenario import Scenario, load_scenario

__all__ = [
    "CloudContract",
    "CloudSideState",
    "ConfigError",
    "ContractPair",
    "Contracts",
    "EdgeContract",
    "LatencyEnergyProfile",
    "MarketConfig",
    "NoFeasibleContract",
    "QuotationGrid",
    "RiskThresholds",
    "RoundOutcome",
    "RoundSample",
    "Scenario",
    "SpotConfig",
    "default_grid",
    "load_scenario",
    "make_rng",
    "negotiate",
    "overbooking_rate",
    "run_campaign",
    "run_round",
    "sample_round",
]
