"""Campaign orchestration and per-mechanism averages.

Per-round rows go to ``rounds.csv`` (column order in ``ROUND_COLUMNS``,
also documented in ``schema/rounds.schema``); the averages go to
``summary.json`` and a plain table in ``summary.txt``. Floats are written
with ``repr`` so re-reading the rows reproduces every summary mean exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Iterable

from .engine import RoundOutcome, run_round
from .market import round_stream
from .negotiation import ContractPair
from .scenario import Scenario
from .spot import MECHANISMS as SPOT_MECHANISMS
from .spot import spot_round

SCHEMA_VERSION = "oatf-rounds/1"
ALL_MECHANISMS = ("OATF", "CBooking", "SpotT_UP", "SpotT_DP")
ROUND_COLUMNS = (
    "mechanism",
    "round",
    "attendees",
    "served_edge",
    "served_cloud",
    "compensated",
    "failed",
    "absent",
    "bought_backup",
    "usage_rate",
    "mean_user_utility",
    "edge_utility",
    "cloud_utility",
    "mean_completion_time",
    "mean_negotiation_time",
)


@dataclass(frozen=True)
class MechanismSummary:
    n_rounds: int
    mean_user_utility: float
    mean_edge_utility: float
    mean_cloud_utility: float
    mean_usage_rate: float
    mean_completion_time: float
    mean_negotiation_time: float
    mean_failed_users: float
    failure_rate: float
    total_failed: int
    total_attendees: int


def round_row(mechanism: str, index: int, o: RoundOutcome) -> dict:
    return {
        "mechanism": mechanism,
        "round": index,
        "attendees": o.attendees,
        "served_edge": o.served_edge_count,
        "served_cloud": o.served_cloud_count,
        "compensated": o.compensated_count,
        "failed": o.failed_users,
        "absent": o.absent_count,
        "bought_backup": int(o.bought_backup),
        "usage_rate": o.usage_rate,
        "mean_user_utility": o.mean_user_utility,
        "edge_utility": float(o.edge_utility),
        "cloud_utility": float(o.cloud_utility),
        "mean_completion_time": o.mean_completion_time,
        "mean_negotiation_time": o.mean_negotiation_time,
    }


def aggregate_rows(rows: list[dict]) -> MechanismSummary:
    if not rows:
        raise ValueError("cannot aggregate an empty stream")
    n = len(rows)

    def mean(key):
        return math.fsum(float(r[key]) for r in rows) / n

    failed = sum(int(r["failed"]) for r in rows)
    attendees = sum(int(r["attendees"]) for r in rows)
    return MechanismSummary(
        n_rounds=n,
        mean_user_utility=mean("mean_user_utility"),
        mean_edge_utility=mean("edge_utility"),
        mean_cloud_utility=mean("cloud_utility"),
        mean_usage_rate=mean("usage_rate"),
        mean_completion_time=mean("mean_completion_time"),
        mean_negotiation_time=mean("mean_negotiation_time"),
        mean_failed_users=failed / n,
        failure_rate=failed / attendees if attendees else 0.0,
        total_failed=failed,
        total_attendees=attendees,
    )


def aggregate(outcomes: Iterable[RoundOutcome]) -> MechanismSummary:
    return aggregate_rows([round_row("", i, o) for i, o in enumerate(outcomes)])


def run_mechanisms(
    scenario: Scenario,
    contracts: dict[str, ContractPair],
    mechanisms: Iterable[str],
    n_rounds: int,
) -> dict[str, list[RoundOutcome]]:
    """Replay one shared sample sequence through every requested mechanism.

    Spot baselines borrow price, slots per user and cloud unit price from
    the OATF contract.
    """
    if n_rounds < 1:
        raise ValueError("n_rounds must be >= 1")
    cfg = scenario.market
    samples = list(round_stream(cfg, n_rounds))
    out: dict[str, list[RoundOutcome]] = {}
    for mech in mechanisms:
        if mech in ("OATF", "CBooking"):
            pair = contracts[mech].contracts
            out[mech] = [run_round(s, pair, scenario.profile, cfg, scenario.cloud) for s in samples]
        elif mech in SPOT_MECHANISMS:
            ref = contracts["OATF"]
            spot = replace(scenario.spot, pricing=SPOT_MECHANISMS[mech])
            out[mech] = [
                spot_round(
                    s,
                    spot,
                    scenario.profile,
                    cfg,
                    scenario.cloud,
                    base_price=ref.edge_contract.price_user_to_edge,
                    slots_per_user=ref.edge_contract.reserved_per_user,
                    cloud_unit_price=ref.cloud_unit_price,
                )
                for s in samples
            ]
        else:
            raise ValueError(f"unknown mechanism {mech!r}")
    return out


def write_rounds(path: Path, results: dict[str, list[RoundOutcome]]) -> list[dict]:
    rows = [round_row(m, i, o) for m, outs in results.items() for i, o in enumerate(outs)]
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema={SCHEMA_VERSION}\n")
        writer = csv.DictWriter(fh, fieldnames=ROUND_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return rows


def read_rounds(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if first != f"# schema={SCHEMA_VERSION}":
            raise ValueError(f"unexpected schema line {first!r}")
        return list(csv.DictReader(fh))


def contract_terms(pair: ContractPair, scenario: Scenario) -> dict:
    return {
        "edge_contract": asdict(pair.edge_contract),
        "cloud_contract": asdict(pair.cloud_contract),
        "cloud_unit_price": pair.cloud_unit_price,
        "overbooking_rate": pair.overbooking_rate(scenario.market),
        "expected_user_utility": pair.expected_user_utility,
        "expected_edge_utility": pair.expected_edge_utility,
        "expected_cloud_utility": pair.expected_cloud_utility,
        "risks": dict(zip(
            ("user_negative_utility", "user_fail_to_acquire", "edge_below_expectation",
             "edge_underutilization", "cloud_below_expectation"),
            pair.risk_report.values,
        )),
    }


def build_summary(
    rows: list[dict], scenario: Scenario, contracts: dict[str, ContractPair], n_rounds: int
) -> dict:
    by_mech: dict[str, list[dict]] = {}
    for row in rows:
        by_mech.setdefault(row["mechanism"], []).append(row)
    return {
        "schema": SCHEMA_VERSION,
        "n_rounds": n_rounds,
        "seed": scenario.market.rng_seed,
        "mechanisms": {m: asdict(aggregate_rows(r)) for m, r in by_mech.items()},
        "contracts": {m: contract_terms(p, scenario) for m, p in contracts.items()},
    }


def format_table(summary: dict) -> str:
    cols = [
        ("user U", "mean_user_utility"),
        ("edge U", "mean_edge_utility"),
        ("cloud U", "mean_cloud_utility"),
        ("usage", "mean_usage_rate"),
        ("time s", "mean_completion_time"),
        ("negot s", "mean_negotiation_time"),
        ("failed", "mean_failed_users"),
        ("fail rate", "failure_rate"),
    ]
    head = f"{'mechanism':<10}" + "".join(f"{c:>11}" for c, _ in cols)
    lines = [f"{summary['n_rounds']} rounds, seed {summary['seed']}", head]
    for mech, s in summary["mechanisms"].items():
        lines.append(f"{mech:<10}" + "".join(f"{s[k]:>11.4f}" for _, k in cols))
    return "\n".join(lines) + "\n"


def write_summary(directory: Path, summary: dict) -> None:
    (directory / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    (directory / "summary.txt").write_text(format_table(summary))
