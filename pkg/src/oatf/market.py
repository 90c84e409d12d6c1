"""Contracts, per-round random draws and the overbooking rate."""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .config import ConfigError, MarketConfig


@dataclass(frozen=True)
class EdgeContract:
    """Type-1 forward contract between each end-user and the edge server."""

    reserved_per_user: int
    price_user_to_edge: float
    penalty_user_to_edge: float
    compensation_edge_to_user: float

    def __post_init__(self):
        if int(self.reserved_per_user) != self.reserved_per_user or self.reserved_per_user < 1:
            raise ConfigError("reserved_per_user", "must be a positive integer")
        for key in ("price_user_to_edge", "penalty_user_to_edge", "compensation_edge_to_user"):
            if getattr(self, key) < 0:
                raise ConfigError(key, "must be non-negative")


@dataclass(frozen=True)
class CloudContract:
    """Type-2 forward contract: backup cloud slots reserved for the edge."""

    backup_slots: int
    price_edge_to_cloud: float
    penalty_edge_to_cloud: float

    def __post_init__(self):
        if int(self.backup_slots) != self.backup_slots or self.backup_slots < 0:
            raise ConfigError("backup_slots", "must be a non-negative integer")
        for key in ("price_edge_to_cloud", "penalty_edge_to_cloud"):
            if getattr(self, key) < 0:
                raise ConfigError(key, "must be non-negative")

    def check_against(self, config: MarketConfig) -> None:
        if self.backup_slots > config.cloud_capacity:
            raise ConfigError("backup_slots", "exceeds cloud_capacity")


@dataclass(frozen=True)
class Contracts:
    edge: EdgeContract
    cloud: CloudContract

    def total_booked(self, config: MarketConfig) -> int:
        return config.num_users * self.edge.reserved_per_user

    def supply(self, config: MarketConfig) -> int:
        return config.edge_capacity + self.cloud.backup_slots


@dataclass(frozen=True)
class RoundSample:
    attendance: np.ndarray  # bool, one per user
    channel_gain: np.ndarray
    other_demand: int
    arrival_order: np.ndarray  # permutation of user indices
    e2e_delay_ms: np.ndarray

    @property
    def attendees(self) -> int:
        return int(self.attendance.sum())


def make_rng(seed: int, stream: str = "rounds") -> np.random.Generator:
    """Independent generator for a named stream derived from ``seed``.

    Distinct stream names never share state, so adding a consumer (say a
    Monte Carlo check) does not shift the trading-round sequence.
    """
    key = zlib.crc32(stream.encode())
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, key])))


def sample_round(config: MarketConfig, rng: np.random.Generator) -> RoundSample:
    n = config.num_users
    attendance = rng.random(n) < config.attendance_prob
    gain = rng.uniform(config.gamma_low, config.gamma_high, n)
    other = int(rng.integers(0, config.cloud_capacity, endpoint=True))
    order = rng.permutation(n)
    delay = rng.uniform(config.e2e_delay_low_ms, config.e2e_delay_high_ms, n)
    return RoundSample(attendance, gain, other, order, delay)


def round_stream(config: MarketConfig, n_rounds: int, stream: str = "rounds"):
    """Yield ``n_rounds`` samples from the seeded stream of ``config``."""
    rng = make_rng(config.rng_seed, stream)
    for _ in range(n_rounds):
        yield sample_round(config, rng)


def overbooking_rate(edge: EdgeContract, cloud: CloudContract, config: MarketConfig) -> float:
    """Fraction by which booked slots exceed edge plus backup supply.

    Negative values mean the contracts underbook.
    """
    supply = config.edge_capacity + cloud.backup_slots
    if supply <= 0:
        raise ConfigError("edge_capacity", "total supply must be positive")
    return (config.num_users * edge.reserved_per_user - supply) / supply
