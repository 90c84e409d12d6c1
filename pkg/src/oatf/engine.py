"""Practical trading rounds under pre-signed forward contracts.

Attendees are served first-come-first-serve: each claims ``r_user`` slots
on the edge; once the edge cannot fit another user, and only if the edge
bought its backup this round, later arrivals are transferred to the
reserved cloud slots. Everyone after that is compensated and computes
locally. A user is never split across tiers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .config import CloudSideState, LatencyEnergyProfile, MarketConfig
from .market import Contracts, RoundSample, round_stream
from .physics import local_processing, offload_round_trip
from .utility import Status, UserOutcome, cloud_utility, edge_utility, served_benefit

MODES = ("OATF", "CBooking")


@dataclass(frozen=True)
class Allocation:
    status: tuple[Status, ...]
    bought_backup: bool
    occupied_slots: int
    held_slots: int


@dataclass(frozen=True)
class RoundOutcome:
    user_outcomes: tuple[UserOutcome, ...]
    edge_utility: float
    cloud_utility: float
    usage_rate: float
    bought_backup: bool
    failed_users: int
    served_edge_count: int
    served_cloud_count: int
    compensated_count: int
    absent_count: int
    mean_completion_time: float = 0.0  # over attendees
    mean_negotiation_time: float = 0.0  # over attendees

    @property
    def attendees(self) -> int:
        return len(self.user_outcomes) - self.absent_count

    @property
    def mean_user_utility(self) -> float:
        return float(np.mean([u.utility for u in self.user_outcomes]))


def tier_capacities(contracts: Contracts, config: MarketConfig) -> tuple[int, int]:
    """Whole users that fit on the edge and on the backup cloud slots."""
    r = contracts.edge.reserved_per_user
    return config.edge_capacity // r, contracts.cloud.backup_slots // r


def buys_backup(attendees, contracts: Contracts, config: MarketConfig):
    return contracts.edge.reserved_per_user * np.asarray(attendees) > config.edge_capacity


def arrival_ranks(attendance: np.ndarray, order: np.ndarray) -> np.ndarray:
    """Position of each attendee among attendees in arrival order, -1 if absent.

    Works row-wise on 2-D batches (rounds x users).
    """
    att = np.asarray(attendance, dtype=bool)
    order = np.asarray(order)
    in_order = np.take_along_axis(att, order, axis=-1)
    rank_in_order = np.cumsum(in_order, axis=-1) - 1
    ranks = np.empty_like(rank_in_order)
    np.put_along_axis(ranks, order, rank_in_order, axis=-1)
    return np.where(att, ranks, -1)


def allocate_fcfs(sample: RoundSample, contracts: Contracts, config: MarketConfig) -> Allocation:
    n_edge, n_cloud = tier_capacities(contracts, config)
    k = sample.attendees
    bought = bool(buys_backup(k, contracts, config))
    cloud_room = n_cloud if bought else 0
    status = [Status.ABSENT] * config.num_users
    claimed = 0
    for user in sample.arrival_order:
        if not sample.attendance[user]:
            continue
        if claimed < n_edge:
            status[user] = Status.SERVED_EDGE
        elif claimed < n_edge + cloud_room:
            status[user] = Status.SERVED_CLOUD
        else:
            status[user] = Status.COMPENSATED
            continue
        claimed += 1
    held = config.edge_capacity + (contracts.cloud.backup_slots if bought else 0)
    return Allocation(tuple(status), bought, claimed * contracts.edge.reserved_per_user, held)


def run_round(
    sample: RoundSample,
    contracts: Contracts,
    profile: LatencyEnergyProfile,
    config: MarketConfig,
    cloud_state: CloudSideState,
    allocation: Allocation | None = None,
) -> RoundOutcome:
    alloc = allocation or allocate_fcfs(sample, contracts, config)
    e = contracts.edge
    slots = e.reserved_per_user
    status = np.array([s.value for s in alloc.status])
    gain = sample.channel_gain

    utility = np.full(config.num_users, -e.penalty_user_to_edge)
    ctime = np.zeros(config.num_users)
    local = local_processing(config.apps_per_user, profile, config).delay
    for st, tier in ((Status.SERVED_EDGE, "edge"), (Status.SERVED_CLOUD, "cloud")):
        mask = status == st.value
        if mask.any():
            utility[mask] = served_benefit(gain[mask], tier, slots, profile, config) - e.price_user_to_edge
            ctime[mask] = offload_round_trip(gain[mask], config.apps_per_user, profile, config, tier, slots).delay
    comp = status == Status.COMPENSATED.value
    utility[comp] = e.compensation_edge_to_user
    ctime[comp] = local

    n_edge = int((status == Status.SERVED_EDGE.value).sum())
    n_cloud = int((status == Status.SERVED_CLOUD.value).sum())
    n_comp = int(comp.sum())
    n_absent = config.num_users - sample.attendees
    attended = status != Status.ABSENT.value
    return RoundOutcome(
        user_outcomes=tuple(
            UserOutcome(s, float(u), float(t)) for s, u, t in zip(alloc.status, utility, ctime)
        ),
        edge_utility=edge_utility(n_edge + n_cloud, n_absent, n_comp, contracts, alloc.bought_backup),
        cloud_utility=cloud_utility(
            sample.other_demand, contracts.cloud.backup_slots, alloc.bought_backup, cloud_state, contracts, config
        ),
        usage_rate=alloc.occupied_slots / alloc.held_slots,
        bought_backup=alloc.bought_backup,
        failed_users=n_comp,
        served_edge_count=n_edge,
        served_cloud_count=n_cloud,
        compensated_count=n_comp,
        absent_count=n_absent,
        mean_completion_time=float(ctime[attended].mean()) if attended.any() else 0.0,
    )


def run_campaign(
    contracts: Contracts,
    profile: LatencyEnergyProfile,
    config: MarketConfig,
    cloud_state: CloudSideState,
    n_rounds: int,
    samples=None,
) -> Iterator[RoundOutcome]:
    """Yield outcomes of ``n_rounds`` rounds, in order.

    ``samples`` lets several mechanisms replay one paired sample sequence;
    by default the seeded round stream of ``config`` is used.
    """
    if n_rounds < 1:
        raise ValueError("n_rounds must be >= 1")
    if samples is None:
        samples = round_stream(config, n_rounds)
    for i, sample in enumerate(samples):
        if i >= n_rounds:
            break
        yield run_round(sample, contracts, profile, config, cloud_state)
