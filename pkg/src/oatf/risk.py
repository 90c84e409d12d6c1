"""The five trading-risk probabilities, exact and Monte Carlo.

Exact paths lean on two facts: users are i.i.d., so the edge's outcome in a
round depends only on the attendee count K ~ Binomial(|U|, a); and under
FCFS with a uniformly random arrival order an attending user's position
among attendees is uniform. The Monte Carlo paths sample rounds instead.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, stats

from .config import RISK_NAMES, CloudSideState, LatencyEnergyProfile, MarketConfig, RiskThresholds
from .engine import buys_backup, tier_capacities
from .market import Contracts
from .utility import backup_cost, cloud_utility, served_benefit

MIN_MC_SAMPLES = 10_000


def _tol(value: float) -> float:
    # float noise guard for "=" comparisons against an expectation
    return 1e-9 * max(1.0, abs(value))


# -- binomial helpers -------------------------------------------------------


def binom_logpmf(n: int, p: float) -> np.ndarray:
    """log P(X = k) for k = 0..n, X ~ Binomial(n, p); -inf where the mass is zero."""
    return stats.binom.logpmf(np.arange(n + 1), n, p)


def binom_pmf(n: int, p: float) -> np.ndarray:
    return stats.binom.pmf(np.arange(n + 1), n, p)


def binom_sf(k: int, n: int, p: float) -> float:
    """P(X >= k); scipy's incomplete-beta form stays accurate deep in the tail."""
    if k <= 0:
        return 1.0
    return float(stats.binom.sf(k - 1, n, p))


@dataclass(frozen=True)
class RiskReport:
    user_negative_utility: float
    user_fail_to_acquire: float
    edge_below_expectation: float
    edge_underutilization: float
    cloud_below_expectation: float
    thresholds: RiskThresholds

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in RISK_NAMES)

    @property
    def satisfied(self) -> bool:
        return self.satisfied_with(0.0)

    def satisfied_with(self, slack: float) -> bool:
        return all(v <= t + slack for v, t in zip(self.values, self.thresholds.as_tuple()))

    def violations(self, slack: float = 0.0) -> list[str]:
        return [
            name
            for name, v, t in zip(RISK_NAMES, self.values, self.thresholds.as_tuple())
            if v > t + slack
        ]


# -- end-user side ----------------------------------------------------------


@lru_cache(maxsize=4096)
def _served_mean(tier: str, slots: int, profile: LatencyEnergyProfile, config: MarketConfig) -> float:
    lo, hi = config.gamma_low, config.gamma_high
    if hi == lo:
        return float(served_benefit(lo, tier, slots, profile, config))
    value, _ = integrate.quad(lambda g: served_benefit(g, tier, slots, profile, config), lo, hi)
    return value / (hi - lo)


def served_nonpositive_prob(
    tier: str, slots: int, price: float, profile: LatencyEnergyProfile, config: MarketConfig
) -> float:
    """P(benefit(gain) - price <= 0) for gain uniform on [gamma_low, gamma_high].

    The benefit rises with gain, so the event is gain <= root.
    """
    lo, hi = config.gamma_low, config.gamma_high

    def f(g):
        return float(served_benefit(g, tier, slots, profile, config)) - price

    if f(hi) <= 0:
        return 1.0
    if hi == lo or f(lo) > 0:
        return 0.0
    root = optimize.brentq(f, lo, hi, xtol=1e-12)
    return (root - lo) / (hi - lo)


def attendee_status_probs(contracts: Contracts, config: MarketConfig) -> tuple[float, float, float]:
    """(edge, cloud, compensated) probabilities for a user who attends."""
    n_edge, n_cloud = tier_capacities(contracts, config)
    pmf = binom_pmf(config.num_users - 1, config.attendance_prob)
    total = np.arange(1, config.num_users + 1)  # attendees including the user
    bought = buys_backup(total, contracts, config)
    on_edge = np.minimum(total, n_edge)
    on_cloud = np.where(bought, np.minimum(total, n_edge + n_cloud) - on_edge, 0)
    p_edge = float(pmf @ (on_edge / total))
    p_cloud = float(pmf @ (on_cloud / total))
    return p_edge, p_cloud, max(0.0, 1.0 - p_edge - p_cloud)


def user_risk_negative(contracts: Contracts, profile: LatencyEnergyProfile, config: MarketConfig) -> float:
    """P(U_user <= 0).

    An absent user pays the penalty, so the absence branch always counts
    (a zero penalty still gives utility 0, which is <= 0).
    """
    e = contracts.edge
    a = config.attendance_prob
    p_edge, p_cloud, p_comp = attendee_status_probs(contracts, config)
    slots = e.reserved_per_user
    served = p_edge * served_nonpositive_prob("edge", slots, e.price_user_to_edge, profile, config)
    served += p_cloud * served_nonpositive_prob("cloud", slots, e.price_user_to_edge, profile, config)
    comp = p_comp if e.compensation_edge_to_user <= 0 else 0.0
    return min(1.0, (1 - a) + a * (served + comp))


def user_risk_unserved(contracts: Contracts, config: MarketConfig, rule: str = "per_user") -> float:
    """P(the user attends and attending demand exceeds edge + backup supply).

    ``rule="literal"`` uses the right-hand side r_edge + r_backup - r_User
    for the demand of the other users instead.
    """
    r = contracts.edge.reserved_per_user
    supply = contracts.supply(config)
    a = config.attendance_prob
    others = config.num_users - 1
    if rule == "per_user":
        # r * (K + 1) > supply  <=>  K >= floor(supply / r)
        k_min = supply // r
    elif rule == "literal":
        # r * K > supply - r_User
        rhs = supply - contracts.total_booked(config)
        k_min = 0 if rhs < 0 else rhs // r + 1
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return a * binom_sf(k_min, others, a)


def expected_user_utility(contracts: Contracts, profile: LatencyEnergyProfile, config: MarketConfig) -> float:
    """E[U] of one contractual user."""
    e = contracts.edge
    a = config.attendance_prob
    p_edge, p_cloud, p_comp = attendee_status_probs(contracts, config)
    slots = e.reserved_per_user
    attend = (
        p_edge * (_served_mean("edge", slots, profile, config) - e.price_user_to_edge)
        + p_cloud * (_served_mean("cloud", slots, profile, config) - e.price_user_to_edge)
        + p_comp * e.compensation_edge_to_user
    )
    return a * attend - (1 - a) * e.penalty_user_to_edge


# -- edge side --------------------------------------------------------------


def edge_round_values(attendees, contracts: Contracts, config: MarketConfig):
    """(edge utility, usage rate) of a round as a function of the attendee count."""
    k = np.asarray(attendees)
    n_edge, n_cloud = tier_capacities(contracts, config)
    bought = buys_backup(k, contracts, config)
    served = np.minimum(k, n_edge + np.where(bought, n_cloud, 0))
    e = contracts.edge
    cost = np.where(bought, backup_cost(contracts.cloud, True), backup_cost(contracts.cloud, False))
    util = (
        served * e.price_user_to_edge
        + (config.num_users - k) * e.penalty_user_to_edge
        - (k - served) * e.compensation_edge_to_user
        - cost
    )
    held = config.edge_capacity + np.where(bought, contracts.cloud.backup_slots, 0)
    usage = served * e.reserved_per_user / held
    return util, usage


def edge_distribution(contracts: Contracts, config: MarketConfig):
    pmf = binom_pmf(config.num_users, config.attendance_prob)
    util, usage = edge_round_values(np.arange(config.num_users + 1), contracts, config)
    return pmf, util, usage


def expected_edge_utility(contracts: Contracts, config: MarketConfig) -> float:
    pmf, util, _ = edge_distribution(contracts, config)
    return float(pmf @ util)


def edge_risks_exact(contracts: Contracts, config: MarketConfig) -> dict[str, float]:
    pmf, util, usage = edge_distribution(contracts, config)
    mean = float(pmf @ util)
    below = float(pmf[util < mean - _tol(mean)].sum())
    under = float(pmf[usage < config.usage_floor].sum())
    return {"below_expectation": min(1.0, below), "underutilization": min(1.0, under)}


def edge_risks(contracts: Contracts, config: MarketConfig, n_mc: int, rng: np.random.Generator) -> dict[str, float]:
    """Two-pass Monte Carlo: estimate E[U_edge], then the two risks on fresh rounds."""
    if n_mc < MIN_MC_SAMPLES:
        raise ValueError(f"n_mc must be >= {MIN_MC_SAMPLES}")
    n, a = config.num_users, config.attendance_prob
    util, _ = edge_round_values(rng.binomial(n, a, n_mc), contracts, config)
    mean = float(util.mean())
    util, usage = edge_round_values(rng.binomial(n, a, n_mc), contracts, config)
    return {
        "below_expectation": float(np.mean(util < mean - _tol(mean))),
        "underutilization": float(np.mean(usage < config.usage_floor)),
    }


# -- cloud side -------------------------------------------------------------


def backup_purchase_prob(contracts: Contracts, config: MarketConfig) -> float:
    r = contracts.edge.reserved_per_user
    return binom_sf(config.edge_capacity // r + 1, config.num_users, config.attendance_prob)


def cloud_distribution(contracts: Contracts, cloud_state: CloudSideState, config: MarketConfig):
    """Values and probabilities of U_cloud over (other demand, purchase) outcomes."""
    beta = np.arange(config.cloud_capacity + 1)
    p_beta = 1.0 / (config.cloud_capacity + 1)
    pi = backup_purchase_prob(contracts, config)
    b = contracts.cloud.backup_slots
    vals = np.concatenate(
        [
            cloud_utility(beta, b, True, cloud_state, contracts, config),
            cloud_utility(beta, b, False, cloud_state, contracts, config),
        ]
    )
    probs = np.concatenate([np.full(beta.size, pi * p_beta), np.full(beta.size, (1 - pi) * p_beta)])
    return vals, probs


def expected_cloud_utility(contracts: Contracts, cloud_state: CloudSideState, config: MarketConfig) -> float:
    vals, probs = cloud_distribution(contracts, cloud_state, config)
    return float(probs @ vals)


def cloud_risk(contracts: Contracts, cloud_state: CloudSideState, config: MarketConfig) -> float:
    """P(U_cloud <= E[U_cloud]), by exact enumeration."""
    vals, probs = cloud_distribution(contracts, cloud_state, config)
    mean = float(probs @ vals)
    return float(min(1.0, probs[vals <= mean + _tol(mean)].sum()))


def cloud_risk_mc(
    contracts: Contracts, cloud_state: CloudSideState, config: MarketConfig, n_mc: int, rng: np.random.Generator
) -> float:
    if n_mc < MIN_MC_SAMPLES:
        raise ValueError(f"n_mc must be >= {MIN_MC_SAMPLES}")

    def draw():
        beta = rng.integers(0, config.cloud_capacity, n_mc, endpoint=True)
        bought = buys_backup(rng.binomial(config.num_users, config.attendance_prob, n_mc), contracts, config)
        return cloud_utility(beta, contracts.cloud.backup_slots, bought, cloud_state, contracts, config)

    mean = float(draw().mean())
    return float(np.mean(draw() <= mean + _tol(mean)))


# -- user Monte Carlo -------------------------------------------------------


def user_risks_mc(
    contracts: Contracts,
    profile: LatencyEnergyProfile,
    config: MarketConfig,
    n_mc: int,
    rng: np.random.Generator,
) -> dict[str, float]:
    """Both user risks from ``n_mc`` independent rounds seen by one tagged user.

    Each draw samples the tagged user's attendance and gain, how many of
    the others attend, and the tagged user's arrival slot among attendees,
    then applies the FCFS rule.
    """
    if n_mc < MIN_MC_SAMPLES:
        raise ValueError(f"n_mc must be >= {MIN_MC_SAMPLES}")
    e = contracts.edge
    a = config.attendance_prob
    n_edge, n_cloud = tier_capacities(contracts, config)
    attend = rng.random(n_mc) < a
    gain = rng.uniform(config.gamma_low, config.gamma_high, n_mc)
    total = rng.binomial(config.num_users - 1, a, n_mc) + 1
    pos = rng.integers(0, total)
    bought = buys_backup(total, contracts, config)
    on_edge = pos < n_edge
    on_cloud = ~on_edge & bought & (pos < n_edge + n_cloud)
    util = np.where(attend, e.compensation_edge_to_user, -e.penalty_user_to_edge)
    slots = e.reserved_per_user
    for mask, tier in ((attend & on_edge, "edge"), (attend & on_cloud, "cloud")):
        util[mask] = served_benefit(gain[mask], tier, slots, profile, config) - e.price_user_to_edge
    short = e.reserved_per_user * total > contracts.supply(config)
    return {
        "negative_utility": float(np.mean(util <= 0)),
        "fail_to_acquire": float(np.mean(attend & short)),
    }


# -- full report ------------------------------------------------------------


def risk_report(
    contracts: Contracts,
    profile: LatencyEnergyProfile,
    config: MarketConfig,
    cloud_state: CloudSideState,
) -> RiskReport:
    edge = edge_risks_exact(contracts, config)
    return RiskReport(
        user_negative_utility=user_risk_negative(contracts, profile, config),
        user_fail_to_acquire=user_risk_unserved(contracts, config),
        edge_below_expectation=edge["below_expectation"],
        edge_underutilization=edge["underutilization"],
        cloud_below_expectation=cloud_risk(contracts, cloud_state, config),
        thresholds=config.risk_thresholds,
    )


def risk_report_mc(
    contracts: Contracts,
    profile: LatencyEnergyProfile,
    config: MarketConfig,
    cloud_state: CloudSideState,
    n_mc: int,
    rng: np.random.Generator,
) -> RiskReport:
    """Monte Carlo counterpart of :func:`risk_report` used for certification."""
    user = user_risks_mc(contracts, profile, config, n_mc, rng)
    edge = edge_risks(contracts, config, n_mc, rng)
    return RiskReport(
        user_negative_utility=user["negative_utility"],
        user_fail_to_acquire=user["fail_to_acquire"],
        edge_below_expectation=edge["below_expectation"],
        edge_underutilization=edge["underutilization"],
        cloud_below_expectation=cloud_risk_mc(contracts, cloud_state, config, n_mc, rng),
        thresholds=config.risk_thresholds,
    )


def report_as_dict(report: RiskReport) -> dict[str, float]:
    return {f.name: getattr(report, f.name) for f in fields(report) if f.name != "thresholds"}
