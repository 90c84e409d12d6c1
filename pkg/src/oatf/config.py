"""Configuration types for the OATF market simulator.

Every numeric knob of a run lives in one of the frozen dataclasses below.
Defaults reproduce the case-study setting (137 users, 197 edge slots,
600 cloud slots, 76% attendance, gain in [100, 400], 6 MHz uplink).
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Raised when a configuration value violates its invariant."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


RISK_NAMES = (
    "user_negative_utility",
    "user_fail_to_acquire",
    "edge_below_expectation",
    "edge_underutilization",
    "cloud_below_expectation",
)


@dataclass(frozen=True)
class RiskThresholds:
    """Upper bounds on the five trading-risk probabilities."""

    user_negative_utility: float = 0.30
    user_fail_to_acquire: float = 0.20
    edge_below_expectation: float = 0.30
    edge_underutilization: float = 0.20
    cloud_below_expectation: float = 0.40

    def __post_init__(self):
        for name in RISK_NAMES:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"risk_{name}", f"threshold {value} outside [0, 1]")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in RISK_NAMES)


@dataclass(frozen=True)
class MarketConfig:
    num_users: int = 137
    attendance_prob: float = 0.76
    gamma_low: float = 100.0
    gamma_high: float = 400.0
    edge_capacity: int = 197
    cloud_capacity: int = 600
    apps_per_user: int = 5
    tx_power: float = 0.55  # W
    bandwidth: float = 6e6  # Hz
    data_size_bits: float = 2.0**20
    cycles_per_bit: float = 600.0
    e2e_delay_low_ms: float = 2.0
    e2e_delay_high_ms: float = 15.0
    risk_thresholds: RiskThresholds = field(default_factory=RiskThresholds)
    usage_floor: float = 0.5
    rng_seed: int = 20211

    def __post_init__(self):
        if not 0.0 <= self.attendance_prob <= 1.0:
            raise ConfigError("attendance_prob", "must lie in [0, 1]")
        # equal bounds are allowed: they pin the gain to a single value
        if self.gamma_low > self.gamma_high:
            raise ConfigError("gamma_low", "must not exceed gamma_high")
        if self.gamma_low < 0:
            raise ConfigError("gamma_low", "must be non-negative")
        for key in ("num_users", "edge_capacity", "cloud_capacity", "apps_per_user"):
            value = getattr(self, key)
            if int(value) != value or value < 1:
                raise ConfigError(key, "must be a positive integer")
        for key in ("tx_power", "bandwidth", "data_size_bits", "cycles_per_bit"):
            if getattr(self, key) <= 0:
                raise ConfigError(key, "must be positive")
        if not 0 <= self.e2e_delay_low_ms <= self.e2e_delay_high_ms:
            raise ConfigError("e2e_delay_low_ms", "need 0 <= low <= high")
        if not 0.0 <= self.usage_floor <= 1.0:
            raise ConfigError("usage_floor", "must lie in [0, 1]")
        if not 0 <= self.rng_seed < 2**64:
            raise ConfigError("rng_seed", "must be a 64-bit unsigned integer")

    @property
    def workload_cycles(self) -> float:
        """CPU cycles needed by one application."""
        return self.cycles_per_bit * self.data_size_bits


@dataclass(frozen=True)
class LatencyEnergyProfile:
    """Device and server speeds plus the currency value of time and energy."""

    local_cpu_hz: float = 1e9
    edge_cpu_hz_per_slot: float = 4e9
    cloud_cpu_hz_per_slot: float = 8e9
    compute_energy_coeff: float = 1e-27
    time_value: float = 1.0  # currency per second saved
    energy_value: float = 0.5  # currency per joule saved

    def __post_init__(self):
        for key in (
            "local_cpu_hz",
            "edge_cpu_hz_per_slot",
            "cloud_cpu_hz_per_slot",
            "compute_energy_coeff",
            "time_value",
            "energy_value",
        ):
            if getattr(self, key) <= 0:
                raise ConfigError(key, "must be positive")
        if not self.cloud_cpu_hz_per_slot >= self.edge_cpu_hz_per_slot >= self.local_cpu_hz:
            raise ConfigError("edge_cpu_hz_per_slot", "need cloud >= edge >= local cpu speed")


@dataclass(frozen=True)
class CloudSideState:
    """Price the cloud charges its other customers and the refund it owes waiters."""

    other_price: float = 0.2
    refund_rate: float = 0.8

    def __post_init__(self):
        if self.other_price < 0:
            raise ConfigError("other_price", "must be non-negative")
        if not 0.0 <= self.refund_rate <= 1.0:
            raise ConfigError("refund_rate", "must lie in [0, 1]")


@dataclass(frozen=True)
class SpotConfig:
    """Onsite spot-trading baseline settings.

    The pricing rules are stand-ins: uniform pricing posts one price (the
    forward-contract price) to everybody, differential pricing scales that
    price linearly with the user's normalized channel gain by
    ``dp_spread``.
    """

    pricing: str = "uniform"
    rounds_of_negotiation: int = 5
    round_trips_per_exchange: int = 2
    time_budget_s: float = 0.5
    dp_spread: float = 0.5

    def __post_init__(self):
        if self.pricing not in ("uniform", "differential"):
            raise ConfigError("spot_pricing", "must be 'uniform' or 'differential'")
        if self.rounds_of_negotiation < 1:
            raise ConfigError("spot_rounds_of_negotiation", "must be >= 1")
        if self.round_trips_per_exchange < 1:
            raise ConfigError("spot_round_trips_per_exchange", "must be >= 1")
        if self.time_budget_s <= 0:
            raise ConfigError("spot_time_budget_s", "must be positive")
        if not 0.0 <= self.dp_spread < 2.0:
            raise ConfigError("spot_dp_spread", "must lie in [0, 2)")


def parse_key_values(text: str, allowed) -> dict[str, str]:
    """Split ``key = value`` lines, enforcing that every allowed key appears once."""
    allowed = list(allowed)
    found: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in allowed:
            raise ConfigError(key, "unknown key")
        if key in found:
            raise ConfigError(key, "duplicate key")
        found[key] = value
    for key in allowed:
        if key not in found:
            raise ConfigError(key, "missing key")
    return found
