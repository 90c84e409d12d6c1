"""Realized per-round utilities of end-users, the edge server and the cloud."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import CloudSideState, LatencyEnergyProfile, MarketConfig
from .market import CloudContract, Contracts
from .physics import local_processing, offload_round_trip


class Status(str, Enum):
    SERVED_EDGE = "served_edge"
    SERVED_CLOUD = "served_cloud"
    COMPENSATED = "compensated"
    ABSENT = "absent"
    FAILED = "failed"  # spot trading only: negotiated but got nothing


@dataclass(frozen=True)
class UserOutcome:
    status: Status
    utility: float
    completion_time: float  # seconds; 0 for absent users


def served_benefit(gain, tier: str, slots: int, profile: LatencyEnergyProfile, config: MarketConfig):
    """Currency value of the time and energy saved by offloading instead of computing locally."""
    local = local_processing(config.apps_per_user, profile, config)
    off = offload_round_trip(gain, config.apps_per_user, profile, config, tier, slots)
    return profile.time_value * (local.delay - off.delay) + profile.energy_value * (
        local.user_energy - off.user_energy
    )


_TIER = {Status.SERVED_EDGE: "edge", Status.SERVED_CLOUD: "cloud"}


def user_utility(
    attended: bool,
    gain: float,
    status: Status,
    contracts: Contracts,
    profile: LatencyEnergyProfile,
    config: MarketConfig,
) -> float:
    status = Status(status)
    if status is Status.FAILED:
        raise ValueError("FAILED is a spot-trading status; use the spot module")
    if attended == (status is Status.ABSENT):
        raise ValueError(f"status {status.value} inconsistent with attended={attended}")
    edge = contracts.edge
    if status is Status.ABSENT:
        return -edge.penalty_user_to_edge
    if status is Status.COMPENSATED:
        return edge.compensation_edge_to_user
    benefit = served_benefit(gain, _TIER[status], edge.reserved_per_user, profile, config)
    return float(benefit) - edge.price_user_to_edge


def completion_time(gain: float, status: Status, slots: int, profile, config) -> float:
    status = Status(status)
    if status is Status.ABSENT:
        return 0.0
    if status in _TIER:
        return float(offload_round_trip(gain, config.apps_per_user, profile, config, _TIER[status], slots).delay)
    return local_processing(config.apps_per_user, profile, config).delay


def backup_cost(cloud: CloudContract, bought: bool) -> float:
    return cloud.price_edge_to_cloud if bought else cloud.penalty_edge_to_cloud


def edge_utility(served: int, absent: int, compensated: int, contracts: Contracts, bought_backup: bool) -> float:
    """Edge income from users minus compensation and the backup payment or penalty."""
    e = contracts.edge
    return (
        served * e.price_user_to_edge
        + absent * e.penalty_user_to_edge
        - compensated * e.compensation_edge_to_user
        - backup_cost(contracts.cloud, bought_backup)
    )


def waiting_requesters(other_demand, backup_slots: int, config: MarketConfig):
    """Other customers who must wait because backup slots are held for the edge."""
    return np.maximum(0, np.asarray(other_demand) - (config.cloud_capacity - backup_slots))


def cloud_utility(
    other_demand,
    backup_slots: int,
    bought_backup,
    cloud_state: CloudSideState,
    contracts: Contracts,
    config: MarketConfig,
):
    """Cloud revenue from others, less waiting refunds, plus the edge's payment.

    The reservation is held whether or not the edge ends up buying it.
    Accepts arrays for ``other_demand`` and ``bought_backup``.
    """
    price = cloud_state.other_price
    waiting = waiting_requesters(other_demand, backup_slots, config)
    income = np.where(
        bought_backup, contracts.cloud.price_edge_to_cloud, contracts.cloud.penalty_edge_to_cloud
    )
    value = price * np.asarray(other_demand) - cloud_state.refund_rate * price * waiting + income
    return float(value) if np.ndim(value) == 0 else value
