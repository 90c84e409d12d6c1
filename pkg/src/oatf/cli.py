"""Command-line entry point: negotiate contracts and run a paired campaign."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError
from .negotiation import NoFeasibleContract, load_contract, negotiate, save_contract
from .reporting import ALL_MECHANISMS, build_summary, run_mechanisms, write_rounds, write_summary
from .scenario import load_scenario

EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_INFEASIBLE = 4
EXIT_IO = 5

log = logging.getLogger("oatf")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oatf", description="Simulate overbooked forward trading of edge/cloud resources.")
    p.add_argument("--config", required=True, type=Path, help="key/value scenario file")
    p.add_argument("--mechanisms", default=",".join(ALL_MECHANISMS), help="comma-separated subset of %(default)s")
    p.add_argument("--rounds", type=int, default=5000)
    p.add_argument("--seed", type=int, default=None, help="overrides rng_seed from the config file")
    p.add_argument("--output-dir", "--out", dest="out", type=Path, required=True, help="output directory")
    p.add_argument("--load-contracts", type=Path, default=None, help="directory with saved <MODE>.contract files")
    p.add_argument(
        "--save-contracts", type=Path, default=None, help="also write negotiated contracts to this directory"
    )
    p.add_argument("--certify-samples", type=int, default=None, help="overrides mc_samples_certify")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def run_experiment(
    config_path: Path,
    mechanisms: list[str],
    n_rounds: int,
    seed: int | None,
    out_dir: Path,
    load_dir: Path | None = None,
    certify_samples: int | None = None,
    save_dir: Path | None = None,
) -> int:
    try:
        scenario = load_scenario(config_path)
        if seed is not None:
            scenario = scenario.with_seed(seed)
        if certify_samples is not None:
            scenario = replace(scenario, mc_samples_certify=certify_samples)
        unknown = [m for m in mechanisms if m not in ALL_MECHANISMS]
        if unknown:
            raise ConfigError("mechanisms", f"unknown mechanism {unknown[0]!r}")
        if n_rounds < 1:
            raise ConfigError("rounds", "must be >= 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: cannot read {config_path}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG

    modes = {"OATF"} | ({"CBooking"} & set(mechanisms))
    contracts = {}
    try:
        for mode in sorted(modes, key=ALL_MECHANISMS.index):
            if load_dir is not None:
                contracts[mode] = load_contract(
                    load_dir / f"{mode}.contract", scenario.market, scenario.profile, scenario.cloud
                )
            else:
                contracts[mode] = negotiate(
                    scenario.grid,
                    scenario.market,
                    scenario.profile,
                    scenario.cloud,
                    mode,
                    scenario.mc_samples_certify,
                )
            log.info("%s contract: %s %s", mode, contracts[mode].edge_contract, contracts[mode].cloud_contract)
    except NoFeasibleContract as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO

    results = run_mechanisms(scenario, contracts, mechanisms, n_rounds)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for target in {out_dir, save_dir or out_dir}:
            target.mkdir(parents=True, exist_ok=True)
            for mode, pair in contracts.items():
                save_contract(pair, target / f"{mode}.contract")
        rows = write_rounds(out_dir / "rounds.csv", results)
        summary = build_summary(rows, scenario, contracts, n_rounds)
        write_summary(out_dir, summary)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    print((out_dir / "summary.txt").read_text(), end="")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    mechanisms = [m.strip() for m in args.mechanisms.split(",") if m.strip()]
    return run_experiment(
        args.config, mechanisms, args.rounds, args.seed, args.out, args.load_contracts,
        args.certify_samples,
        args.save_contracts,
    )


if __name__ == "__main__":
    sys.exit(main())
