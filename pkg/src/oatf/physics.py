"""Latency and energy of offloading versus local execution.

All delays are in seconds and all energies in joules. Functions accept
scalar or numpy-array gains.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .config import LatencyEnergyProfile, MarketConfig


class Cost(NamedTuple):
    delay: float | np.ndarray
    user_energy: float | np.ndarray


def snr_db(gain, config: MarketConfig):
    return 10.0 * np.log10(config.tx_power * np.asarray(gain, dtype=float))


def uplink_rate(gain, config: MarketConfig):
    """Shannon rate in bits/s with linear SNR ``tx_power * gain``."""
    return config.bandwidth * np.log2(1.0 + config.tx_power * np.asarray(gain, dtype=float))


def offload_round_trip(
    gain,
    n_apps: int,
    profile: LatencyEnergyProfile,
    config: MarketConfig,
    tier: str = "edge",
    slots: int = 1,
) -> Cost:
    """Upload ``n_apps`` applications and run them on ``slots`` server slots.

    Uploads are serial over the user's link. Applications then run one
    after another, each spread over all of the user's slots, so compute
    time scales as 1/slots. Result download is not modeled.
    """
    if n_apps < 1:
        raise ValueError("n_apps must be >= 1")
    if slots < 1:
        raise ValueError("slots must be >= 1")
    if tier == "edge":
        cpu = profile.edge_cpu_hz_per_slot
    elif tier == "cloud":
        cpu = profile.cloud_cpu_hz_per_slot
    else:
        raise ValueError(f"unknown tier {tier!r}")
    tx_time = n_apps * config.data_size_bits / uplink_rate(gain, config)
    run_time = n_apps * config.workload_cycles / (slots * cpu)
    return Cost(tx_time + run_time, config.tx_power * tx_time)


def local_processing(n_apps: int, profile: LatencyEnergyProfile, config: MarketConfig) -> Cost:
    if n_apps < 1:
        raise ValueError("n_apps must be >= 1")
    cycles = n_apps * config.workload_cycles
    f = profile.local_cpu_hz
    return Cost(cycles / f, profile.compute_energy_coeff * f**2 * cycles)


def negotiation_cost(e2e_delay_ms, rounds: int, round_trips: int, config: MarketConfig) -> Cost:
    """Time and radio energy spent reaching an onsite agreement."""
    latency = rounds * round_trips * 2.0 * np.asarray(e2e_delay_ms, dtype=float) / 1000.0
    return Cost(latency, config.tx_power * latency)
