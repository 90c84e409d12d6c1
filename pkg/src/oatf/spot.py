"""Onsite spot-trading baselines (uniform and differential pricing).

Without forward contracts every attendee negotiates with the edge when the
round starts, paying the radio round trips in time and energy. Whoever
does not get resources has spent that cost for nothing. The pricing rules
are simple stand-ins anchored on the forward-contract price so that a
comparison isolates the cost of trading onsite, not price levels.
"""

from __future__ import annotations

import numpy as np

from .config import CloudSideState, LatencyEnergyProfile, MarketConfig, SpotConfig
from .engine import RoundOutcome
from .market import RoundSample
from .physics import local_processing, negotiation_cost, offload_round_trip
from .utility import Status, UserOutcome, served_benefit

MECHANISMS = {"SpotT_UP": "uniform", "SpotT_DP": "differential"}


def spot_prices(gain, base_price: float, spot: SpotConfig, config: MarketConfig) -> np.ndarray:
    gain = np.asarray(gain, dtype=float)
    if spot.pricing == "uniform":
        return np.full(gain.shape, base_price)
    span = config.gamma_high - config.gamma_low
    norm = (gain - config.gamma_low) / span if span > 0 else np.full(gain.shape, 0.5)
    return base_price * (1.0 + spot.dp_spread * (norm - 0.5))


def spot_round(
    sample: RoundSample,
    spot: SpotConfig,
    profile: LatencyEnergyProfile,
    config: MarketConfig,
    cloud_state: CloudSideState,
    base_price: float,
    slots_per_user: int,
    cloud_unit_price: float,
) -> RoundOutcome:
    """One spot-trading round on the same draws an OATF round would see.

    Each attendee asks for ``slots_per_user`` slots. A deal needs the
    negotiation to finish inside ``spot.time_budget_s`` and the user's value
    of service (net of negotiation cost) to cover its price. Deals are then
    filled from the edge, then from cloud slots left over by other
    customers, in arrival order (uniform) or by descending gain
    (differential).
    """
    n = config.num_users
    r = slots_per_user
    gain = sample.channel_gain
    att = np.asarray(sample.attendance, dtype=bool)
    neg = negotiation_cost(sample.e2e_delay_ms, spot.rounds_of_negotiation, spot.round_trips_per_exchange, config)
    neg_value = profile.time_value * neg.delay + profile.energy_value * neg.user_energy
    price = spot_prices(gain, base_price, spot, config)
    value = served_benefit(gain, "edge", r, profile, config) - neg_value
    willing = att & (neg.delay <= spot.time_budget_s) & (value >= price)

    if spot.pricing == "uniform":
        queue = [u for u in sample.arrival_order if willing[u]]
    else:
        # stable sort keeps arrival order among equal gains
        ranked = sorted(range(n), key=lambda u: -gain[u])
        queue = [u for u in ranked if willing[u]]
    n_edge = config.edge_capacity // r
    n_cloud_room = (config.cloud_capacity - sample.other_demand) // r

    # integer codes: numpy cannot compare object arrays against str-based enums
    ABSENT, FAILED, EDGE, CLOUD = range(4)
    code = np.full(n, ABSENT)
    code[att] = FAILED
    for i, u in enumerate(queue):
        if i < n_edge:
            code[u] = EDGE
        elif i < n_edge + n_cloud_room:
            code[u] = CLOUD

    utility = np.zeros(n)
    ctime = np.zeros(n)
    local = local_processing(config.apps_per_user, profile, config).delay
    paid = 0.0
    for c, tier in ((EDGE, "edge"), (CLOUD, "cloud")):
        mask = code == c
        if mask.any():
            utility[mask] = served_benefit(gain[mask], tier, r, profile, config) - neg_value[mask] - price[mask]
            ctime[mask] = (
                offload_round_trip(gain[mask], config.apps_per_user, profile, config, tier, r).delay
                + neg.delay[mask]
            )
            paid += float(price[mask].sum())
    failed = code == FAILED
    utility[failed] = -neg_value[failed]
    ctime[failed] = local + neg.delay[failed]
    status = np.array([Status.ABSENT, Status.FAILED, Status.SERVED_EDGE, Status.SERVED_CLOUD], dtype=object)[code]

    served_edge = int((code == EDGE).sum())
    served_cloud = int((code == CLOUD).sum())
    bought_slots = served_cloud * r
    cloud_cost = cloud_unit_price * bought_slots
    attendees = int(att.sum())
    return RoundOutcome(
        user_outcomes=tuple(UserOutcome(s, float(u), float(t)) for s, u, t in zip(status, utility, ctime)),
        edge_utility=paid - cloud_cost,
        cloud_utility=cloud_state.other_price * sample.other_demand + cloud_cost,
        usage_rate=(served_edge + served_cloud) * r / (config.edge_capacity + bought_slots),
        bought_backup=bought_slots > 0,
        failed_users=int(failed.sum()),
        served_edge_count=served_edge,
        served_cloud_count=served_cloud,
        compensated_count=0,
        absent_count=n - attendees,
        mean_completion_time=float(ctime[att].mean()) if attendees else 0.0,
        mean_negotiation_time=float(neg.delay[att].mean()) if attendees else 0.0,
    )
