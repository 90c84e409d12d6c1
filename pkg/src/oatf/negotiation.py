"""Two-way multilateral negotiation of the two forward contracts.

The edge server walks its price quotes; for each one the users report the
reservation sizes they can live with. For every cloud quote the edge then
narrows the backup sizes it can afford, the cloud keeps the ones it is
willing to reserve, and the users pick their favourite (r_user, r_backup)
pair among what is left. Finally the edge keeps the candidate with the
highest expected utility. All domains are small and discrete, so every
step is an exhaustive sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .config import CloudSideState, ConfigError, LatencyEnergyProfile, MarketConfig, parse_key_values
from .market import CloudContract, Contracts, EdgeContract, make_rng, overbooking_rate
from .risk import (
    RiskReport,
    cloud_risk,
    edge_risks_exact,
    expected_cloud_utility,
    expected_edge_utility,
    expected_user_utility,
    risk_report,
    risk_report_mc,
    user_risk_negative,
    user_risk_unserved,
)

MODES = ("OATF", "CBooking")
CERTIFY_SLACK = 0.02


class NoFeasibleContract(RuntimeError):
    """Every candidate violates some risk threshold or participation constraint."""


@dataclass(frozen=True)
class EdgeQuote:
    price: float  # p^UtoE, per user and round
    penalty: float  # q^UtoE, paid by an absent user
    compensation: float  # c^EtoU, paid to a user left without resources


@dataclass(frozen=True)
class CloudQuote:
    unit_price: float  # per reserved backup slot, paid when the backup is used
    unit_penalty: float  # per reserved backup slot, paid when it is not


@dataclass(frozen=True)
class QuotationGrid:
    edge_quotes: tuple[EdgeQuote, ...]
    cloud_quotes: tuple[CloudQuote, ...]
    r_user_domain: tuple[int, ...]
    r_backup_domain: tuple[int, ...]

    def validate(self, config: MarketConfig) -> None:
        for name in ("edge_quotes", "cloud_quotes", "r_user_domain", "r_backup_domain"):
            if not getattr(self, name):
                raise ConfigError(name, "must not be empty")
        if min(self.r_user_domain) < 1:
            raise ConfigError("r_user_domain", "values must be >= 1")
        if min(self.r_backup_domain) < 0 or max(self.r_backup_domain) > config.cloud_capacity:
            raise ConfigError("r_backup_domain", "values must lie within [0, cloud_capacity]")

    @property
    def size(self) -> int:
        return len(self.edge_quotes) * len(self.cloud_quotes) * len(self.r_user_domain) * len(self.r_backup_domain)


def default_grid() -> QuotationGrid:
    return QuotationGrid(
        edge_quotes=tuple(
            EdgeQuote(p, q, c)
            for p, q, c in [
                (2.6, 2.0, 0.5),
                (2.8, 2.8, 0.5),
                (3.0, 2.4, 0.8),
                (3.0, 3.0, 0.8),
                (3.2, 3.2, 1.0),
                (3.4, 3.4, 1.0),
                (3.6, 3.0, 1.2),
                (3.8, 3.8, 1.2),
            ]
        ),
        cloud_quotes=tuple(
            CloudQuote(u, v) for u, v in [(0.2, 0.2), (0.3, 0.3), (0.4, 0.3), (0.5, 0.5), (0.8, 0.6), (1.5, 1.5)]
        ),
        r_user_domain=(1, 2, 3, 4, 5),
        r_backup_domain=tuple(range(0, 451, 25)),
    )


def make_contracts(eq: EdgeQuote, cq: CloudQuote, r_user: int, r_backup: int) -> Contracts:
    return Contracts(
        EdgeContract(r_user, eq.price, eq.penalty, eq.compensation),
        CloudContract(r_backup, cq.unit_price * r_backup, cq.unit_penalty * r_backup),
    )


@dataclass(frozen=True)
class ContractPair:
    edge_contract: EdgeContract
    cloud_contract: CloudContract
    expected_user_utility: float  # sum over all users
    expected_edge_utility: float
    expected_cloud_utility: float
    risk_report: RiskReport
    cloud_unit_price: float = 0.0
    certification: RiskReport | None = None
    mode: str = "OATF"
    evaluations: int = 0

    @property
    def contracts(self) -> Contracts:
        return Contracts(self.edge_contract, self.cloud_contract)

    def overbooking_rate(self, config: MarketConfig) -> float:
        return overbooking_rate(self.edge_contract, self.cloud_contract, config)


@dataclass
class Negotiation:
    """Evaluates candidates for one (config, profile, cloud) setting."""

    config: MarketConfig
    profile: LatencyEnergyProfile
    cloud_state: CloudSideState
    evaluations: int = field(default=0, init=False)

    @property
    def thresholds(self):
        return self.config.risk_thresholds

    # step 2
    def user_checks(self, eq: EdgeQuote, r_user: int, r_backup: int) -> tuple[float, float, float]:
        c = make_contracts(eq, CloudQuote(0.0, 0.0), r_user, r_backup)
        return (
            user_risk_negative(c, self.profile, self.config),
            user_risk_unserved(c, self.config),
            expected_user_utility(c, self.profile, self.config),
        )

    def user_accepts(self, eq: EdgeQuote, r_user: int, r_backup: int) -> bool:
        neg, unserved, util = self.user_checks(eq, r_user, r_backup)
        t = self.thresholds
        return neg <= t.user_negative_utility and unserved <= t.user_fail_to_acquire and util >= 0

    def user_feasible_r(self, eq: EdgeQuote, grid: QuotationGrid) -> list[int]:
        """r_user values that pass each user check at its most favourable backup size."""
        t = self.thresholds
        keep = []
        for r in grid.r_user_domain:
            checks = [self.user_checks(eq, r, b) for b in grid.r_backup_domain]
            if (
                min(c[0] for c in checks) <= t.user_negative_utility
                and min(c[1] for c in checks) <= t.user_fail_to_acquire
                and max(c[2] for c in checks) >= 0
            ):
                keep.append(r)
        return keep

    # step 4
    def edge_accepts(self, eq: EdgeQuote, cq: CloudQuote, r_user: int, r_backup: int) -> bool:
        c = make_contracts(eq, cq, r_user, r_backup)
        risks = edge_risks_exact(c, self.config)
        t = self.thresholds
        return (
            risks["below_expectation"] <= t.edge_below_expectation
            and risks["underutilization"] <= t.edge_underutilization
            and expected_edge_utility(c, self.config) >= 0
        )

    def edge_feasible_backup(self, eq: EdgeQuote, cq: CloudQuote, r_user: int, grid: QuotationGrid) -> list[int]:
        return [b for b in grid.r_backup_domain if self.edge_accepts(eq, cq, r_user, b)]

    # step 5
    def cloud_accepts(self, cq: CloudQuote, r_user: int, r_backup: int) -> bool:
        c = make_contracts(EdgeQuote(0.0, 0.0, 0.0), cq, r_user, r_backup)
        baseline = self.cloud_state.other_price * self.config.cloud_capacity / 2
        return (
            cloud_risk(c, self.cloud_state, self.config) <= self.thresholds.cloud_below_expectation
            and expected_cloud_utility(c, self.cloud_state, self.config) >= baseline - 1e-9 * max(1.0, baseline)
        )

    def cloud_feasible_backup(self, cq: CloudQuote, candidates, r_user: int) -> list[int]:
        candidates = list(candidates)
        if not candidates:
            return []
        return [b for b in candidates if self.cloud_accepts(cq, r_user, b)]

    def evaluate(self, eq: EdgeQuote, cq: CloudQuote, r_user: int, r_backup: int, mode: str) -> ContractPair:
        self.evaluations += 1
        c = make_contracts(eq, cq, r_user, r_backup)
        return ContractPair(
            edge_contract=c.edge,
            cloud_contract=c.cloud,
            expected_user_utility=self.config.num_users * expected_user_utility(c, self.profile, self.config),
            expected_edge_utility=expected_edge_utility(c, self.config),
            expected_cloud_utility=expected_cloud_utility(c, self.cloud_state, self.config),
            risk_report=risk_report(c, self.profile, self.config, self.cloud_state),
            cloud_unit_price=cq.unit_price,
            mode=mode,
        )

    def books_within_supply(self, r_user: int, r_backup: int) -> bool:
        cfg = self.config
        whole_users = cfg.edge_capacity // r_user + r_backup // r_user
        return cfg.num_users * r_user <= cfg.edge_capacity + r_backup and cfg.num_users <= whole_users

    def candidates(self, grid: QuotationGrid, mode: str) -> list[ContractPair]:
        """Steps 1-7: one user-preferred candidate per (edge quote, cloud quote) consensus."""
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        grid.validate(self.config)
        out = []
        for eq in grid.edge_quotes:
            r_range = self.user_feasible_r(eq, grid)
            if not r_range:
                continue
            for cq in grid.cloud_quotes:
                pairs = []
                for r in r_range:
                    backups = self.edge_feasible_backup(eq, cq, r, grid)
                    for b in self.cloud_feasible_backup(cq, backups, r):
                        if mode == "CBooking" and not self.books_within_supply(r, b):
                            continue
                        if self.user_accepts(eq, r, b):
                            pairs.append(self.evaluate(eq, cq, r, b, mode))
                pairs = [p for p in pairs if p.risk_report.satisfied]
                if pairs:
                    out.append(max(pairs, key=user_key))
        return out


def user_key(p: ContractPair):
    return (
        p.expected_user_utility,
        p.expected_edge_utility,
        p.expected_cloud_utility,
        -p.edge_contract.reserved_per_user,
        -p.cloud_contract.backup_slots,
    )


def edge_key(p: ContractPair):
    return (
        p.expected_edge_utility,
        p.expected_user_utility,
        p.expected_cloud_utility,
        -p.edge_contract.reserved_per_user,
        -p.cloud_contract.backup_slots,
    )


def negotiate(
    grid: QuotationGrid,
    config: MarketConfig,
    profile: LatencyEnergyProfile,
    cloud_state: CloudSideState,
    mode: str = "OATF",
    certify_samples: int = 1_000_000,
) -> ContractPair:
    """Run the negotiation and return the edge's preferred certified contract pair.

    Candidates are ranked by the edge's expected utility (ties broken by
    user, then cloud utility, then smaller reservations). The winner is
    re-checked by Monte Carlo with ``certify_samples`` draws; if it misses a
    threshold by more than ``CERTIFY_SLACK`` the next candidate is tried.
    Set ``certify_samples=0`` to skip the Monte Carlo check.
    """
    neg = Negotiation(config, profile, cloud_state)
    ranked = sorted(neg.candidates(grid, mode), key=edge_key, reverse=True)
    rng = make_rng(config.rng_seed, f"certify-{mode}")
    for pair in ranked:
        if not certify_samples:
            return _with(pair, evaluations=neg.evaluations)
        cert = risk_report_mc(pair.contracts, profile, config, cloud_state, certify_samples, rng)
        if cert.satisfied_with(CERTIFY_SLACK):
            return _with(pair, certification=cert, evaluations=neg.evaluations)
    raise NoFeasibleContract(
        f"no {mode} contract meets all risk thresholds over {grid.size} quotation combinations"
    )


def _with(pair: ContractPair, **changes) -> ContractPair:
    return replace(pair, **changes)


# -- contract file ----------------------------------------------------------

_CONTRACT_KEYS = (
    ("mode", str),
    ("reserved_per_user", int),
    ("price_user_to_edge", float),
    ("penalty_user_to_edge", float),
    ("compensation_edge_to_user", float),
    ("backup_slots", int),
    ("price_edge_to_cloud", float),
    ("penalty_edge_to_cloud", float),
    ("cloud_unit_price", float),
)


def save_contract(pair: ContractPair, path: str | Path) -> None:
    e, c = pair.edge_contract, pair.cloud_contract
    values = {
        "mode": pair.mode,
        "reserved_per_user": e.reserved_per_user,
        "price_user_to_edge": e.price_user_to_edge,
        "penalty_user_to_edge": e.penalty_user_to_edge,
        "compensation_edge_to_user": e.compensation_edge_to_user,
        "backup_slots": c.backup_slots,
        "price_edge_to_cloud": c.price_edge_to_cloud,
        "penalty_edge_to_cloud": c.penalty_edge_to_cloud,
        "cloud_unit_price": pair.cloud_unit_price,
    }
    lines = [f"{k} = {values[k]!r}" if not isinstance(values[k], str) else f"{k} = {values[k]}" for k, _ in _CONTRACT_KEYS]
    Path(path).write_text("\n".join(lines) + "\n")


def load_contract(
    path: str | Path,
    config: MarketConfig,
    profile: LatencyEnergyProfile,
    cloud_state: CloudSideState,
) -> ContractPair:
    """Read a saved contract and recompute its expectations and risks."""
    raw = parse_key_values(Path(path).read_text(), [k for k, _ in _CONTRACT_KEYS])
    v = {}
    for key, cast in _CONTRACT_KEYS:
        try:
            v[key] = cast(raw[key])
        except ValueError:
            raise ConfigError(key, f"cannot parse {raw[key]!r}") from None
    if v["mode"] not in MODES:
        raise ConfigError("mode", f"must be one of {MODES}")
    edge = EdgeContract(
        v["reserved_per_user"], v["price_user_to_edge"], v["penalty_user_to_edge"], v["compensation_edge_to_user"]
    )
    cloud = CloudContract(v["backup_slots"], v["price_edge_to_cloud"], v["penalty_edge_to_cloud"])
    cloud.check_against(config)
    c = Contracts(edge, cloud)
    return ContractPair(
        edge_contract=edge,
        cloud_contract=cloud,
        expected_user_utility=config.num_users * expected_user_utility(c, profile, config),
        expected_edge_utility=expected_edge_utility(c, config),
        expected_cloud_utility=expected_cloud_utility(c, cloud_state, config),
        risk_report=risk_report(c, profile, config, cloud_state),
        cloud_unit_price=v["cloud_unit_price"],
        mode=v["mode"],
    )
