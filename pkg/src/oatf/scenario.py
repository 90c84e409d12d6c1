"""Plain-text key/value configuration files.

One ``key = value`` pair per line; ``#`` starts a comment. Every key listed
in ``KEYS`` must appear exactly once and unknown keys are rejected, so a
file fully determines a run. Quote lists use ``,`` between quotes and ``:``
between the fields of one quote.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .config import (
    CloudSideState,
    ConfigError,
    LatencyEnergyProfile,
    MarketConfig,
    RiskThresholds,
    SpotConfig,
    parse_key_values,
)
from .negotiation import CloudQuote, EdgeQuote, QuotationGrid, default_grid


@dataclass(frozen=True)
class Scenario:
    market: MarketConfig = field(default_factory=MarketConfig)
    profile: LatencyEnergyProfile = field(default_factory=LatencyEnergyProfile)
    cloud: CloudSideState = field(default_factory=CloudSideState)
    spot: SpotConfig = field(default_factory=SpotConfig)
    grid: QuotationGrid = field(default_factory=default_grid)
    mc_samples_certify: int = 1_000_000

    def with_seed(self, seed: int) -> Scenario:
        return replace(self, market=replace(self.market, rng_seed=seed))


def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def _ints(text: str) -> tuple[int, ...]:
    return tuple(_int(t) for t in text.split(",") if t.strip())


def _quotes(width: int):
    def parse(text: str) -> tuple[tuple[float, ...], ...]:
        out = []
        for item in text.split(","):
            parts = [float(x) for x in item.split(":")]
            if len(parts) != width:
                raise ValueError(f"quote {item.strip()!r} needs {width} fields")
            out.append(tuple(parts))
        return tuple(out)

    return parse


def _fmt_quotes(quotes) -> str:
    return ", ".join(":".join(repr(float(v)) for v in q) for q in quotes)


# key -> (section, attribute, parser)
KEYS: dict[str, tuple[str, str, object]] = {
    "num_users": ("market", "num_users", _int),
    "attendance_prob": ("market", "attendance_prob", float),
    "gamma_low": ("market", "gamma_low", float),
    "gamma_high": ("market", "gamma_high", float),
    "edge_capacity": ("market", "edge_capacity", _int),
    "cloud_capacity": ("market", "cloud_capacity", _int),
    "apps_per_user": ("market", "apps_per_user", _int),
    "tx_power": ("market", "tx_power", float),
    "bandwidth": ("market", "bandwidth", float),
    "data_size_bits": ("market", "data_size_bits", float),
    "cycles_per_bit": ("market", "cycles_per_bit", float),
    "e2e_delay_low_ms": ("market", "e2e_delay_low_ms", float),
    "e2e_delay_high_ms": ("market", "e2e_delay_high_ms", float),
    "risk_user_negative_utility": ("risk", "user_negative_utility", float),
    "risk_user_fail_to_acquire": ("risk", "user_fail_to_acquire", float),
    "risk_edge_below_expectation": ("risk", "edge_below_expectation", float),
    "risk_edge_underutilization": ("risk", "edge_underutilization", float),
    "risk_cloud_below_expectation": ("risk", "cloud_below_expectation", float),
    "usage_floor": ("market", "usage_floor", float),
    "rng_seed": ("market", "rng_seed", _int),
    "local_cpu_hz": ("profile", "local_cpu_hz", float),
    "edge_cpu_hz_per_slot": ("profile", "edge_cpu_hz_per_slot", float),
    "cloud_cpu_hz_per_slot": ("profile", "cloud_cpu_hz_per_slot", float),
    "compute_energy_coeff": ("profile", "compute_energy_coeff", float),
    "time_value": ("profile", "time_value", float),
    "energy_value": ("profile", "energy_value", float),
    "other_price": ("cloud", "other_price", float),
    "refund_rate": ("cloud", "refund_rate", float),
    "spot_rounds_of_negotiation": ("spot", "rounds_of_negotiation", _int),
    "spot_round_trips_per_exchange": ("spot", "round_trips_per_exchange", _int),
    "spot_time_budget_s": ("spot", "time_budget_s", float),
    "spot_dp_spread": ("spot", "dp_spread", float),
    "edge_quotes": ("grid", "edge_quotes", _quotes(3)),
    "cloud_quotes": ("grid", "cloud_quotes", _quotes(2)),
    "r_user_domain": ("grid", "r_user_domain", _ints),
    "r_backup_domain": ("grid", "r_backup_domain", _ints),
    "mc_samples_certify": ("run", "mc_samples_certify", _int),
}


def parse_scenario(text: str) -> Scenario:
    raw = parse_key_values(text, KEYS)
    sections: dict[str, dict] = {s: {} for s in ("market", "risk", "profile", "cloud", "spot", "grid", "run")}
    for key, (section, attr, parse) in KEYS.items():
        try:
            sections[section][attr] = parse(raw[key])
        except ValueError as exc:
            raise ConfigError(key, f"cannot parse {raw[key]!r}: {exc}") from None
    grid = sections["grid"]
    return Scenario(
        market=MarketConfig(**sections["market"], risk_thresholds=RiskThresholds(**sections["risk"])),
        profile=LatencyEnergyProfile(**sections["profile"]),
        cloud=CloudSideState(**sections["cloud"]),
        spot=SpotConfig(**sections["spot"]),
        grid=QuotationGrid(
            edge_quotes=tuple(EdgeQuote(*q) for q in grid["edge_quotes"]),
            cloud_quotes=tuple(CloudQuote(*q) for q in grid["cloud_quotes"]),
            r_user_domain=grid["r_user_domain"],
            r_backup_domain=grid["r_backup_domain"],
        ),
        mc_samples_certify=sections["run"]["mc_samples_certify"],
    )


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text())


def format_scenario(scenario: Scenario) -> str:
    sources = {
        "market": scenario.market,
        "risk": scenario.market.risk_thresholds,
        "profile": scenario.profile,
        "cloud": scenario.cloud,
        "spot": scenario.spot,
        "grid": scenario.grid,
        "run": scenario,
    }
    lines = []
    for key, (section, attr, parse) in KEYS.items():
        value = getattr(sources[section], attr)
        if attr == "edge_quotes":
            text = _fmt_quotes((q.price, q.penalty, q.compensation) for q in value)
        elif attr == "cloud_quotes":
            text = _fmt_quotes((q.unit_price, q.unit_penalty) for q in value)
        elif isinstance(value, tuple):
            text = ", ".join(str(v) for v in value)
        else:
            text = repr(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"
