"""Batch front end: one subcommand per experiment, CSV tables plus a manifest.

    prosumer-cpt penalty-sweep --config run.yaml --out results/ --grid p_e=2.05:3.5:30
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .config import (
    ALPHA_CAVEAT,
    SUBCOMMANDS,
    ConfigError,
    ConfigModel,
    RunConfig,
    build_scenario,
    manifest_text,
    parse_grid_flag,
    parse_model,
    resolve_grids,
)
from .contract import (
    ContractTerms,
    optimal_contract_eut,
    optimal_contract_pt,
    realtime_sellback,
)
from .lottery import LotterySpec, optimal_lottery_sellback
from .market import (
    MarketScenario,
    SimulationResult,
    contract_comparison_sweep,
    default_lottery_scale,
    draw_population,
    penetration_sweep,
    run_contract_simulation,
    run_lottery_simulation,
)

log = logging.getLogger("prosumer_cpt")

MANIFEST_NAME = "manifest.yaml"

Table = tuple[list[str], list[list[object]]]


def fmt(x: object) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".9g")


def to_csv(table: Table) -> str:
    header, rows = table
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


CONTRACT_COLUMNS = [
    "base_demand",
    "sellback",
    "net_demand",
    "mean_contract_pt",
    "mean_contract_eut",
    "incentive_cost",
    "savings",
    "total_contract_pt",
    "sellback_eut",
    "negative_net_demand",
]


def _contract_row(param: float, pt: SimulationResult, eut: SimulationResult) -> list[object]:
    return [
        param,
        pt.base_demand,
        pt.total_sellback,
        pt.net_demand,
        pt.mean_contract,
        eut.mean_contract,
        pt.incentive_cost,
        pt.savings,
        pt.total_contract,
        eut.total_sellback,
        pt.negative_net_demand,
    ]


def _contract_sweep(scenario: MarketScenario, name: str, grid: list[float], workers: int) -> Table:
    pop = draw_population(scenario)
    terms = scenario.mechanism
    rows = []
    for v in grid:
        if name == "p_e":
            t = ContractTerms(terms.p_s, v)
        else:
            t = ContractTerms(v, terms.p_e)
        sc = replace(scenario, mechanism=t)
        pt = run_contract_simulation(sc, pop, workers)
        eut = run_contract_simulation(sc.with_eut(), pop, workers)
        rows.append(_contract_row(v, pt, eut))
    return [name, *CONTRACT_COLUMNS], rows


def _lottery_sweep(scenario: MarketScenario, grid: list[float], workers: int) -> Table:
    pop = draw_population(scenario)
    rows = []
    for prize in grid:
        sc = replace(scenario, mechanism=LotterySpec(prize, scenario.mechanism.scale))
        r = run_lottery_simulation(sc, pop, workers)
        # sell-back saturates at total generation once every prosumer sells all of s
        rows.append([
            prize, r.base_demand, r.total_sellback, r.net_demand,
            r.incentive_cost, r.savings, r.negative_net_demand, r.total_generation,
        ])
    header = ["prize", "base_demand", "sellback", "net_demand", "incentive_cost", "savings",
              "negative_net_demand", "total_generation"]
    return header, rows


def _penetration(scenario: MarketScenario, prize: float, grid: list[float], workers: int) -> Table:
    levels = [int(round(v)) for v in grid]
    total = scenario.n_consumers + scenario.n_prosumers
    results = penetration_sweep(scenario, levels, prize=prize, total=total, workers=workers)
    rows = []
    for n, r in zip(levels, results):
        rows.append([
            n, total - n, 100.0 * n / total, r.base_demand, r.total_sellback, r.net_demand,
            r.incentive_cost, r.savings, r.negative_net_demand,
        ])
    header = ["n_prosumers", "n_consumers", "penetration_pct", "base_demand", "sellback",
              "net_demand", "incentive_cost", "savings", "negative_net_demand"]
    return header, rows


def _compare(scenario: MarketScenario, grids: dict[str, list[float]]) -> Table:
    rows = contract_comparison_sweep(scenario, grids["p_s"], grids["lambda"])
    header = ["p_s", "lambda", "mean_contract_pt", "mean_contract_eut", "ratio"]
    return header, [[r.p_s, r.lam, r.mean_contract_pt, r.mean_contract_eut, r.ratio] for r in rows]


def _single(model: ConfigModel, scenario: MarketScenario) -> Table:
    omega = model.prosumer.omega
    profile = scenario.profile(omega)
    gen = profile.generation
    s = model.prosumer.generation
    if s is None:
        s = 0.5 * (gen.s_min + gen.s_max)
    terms = scenario.mechanism
    c_pt = optimal_contract_pt(profile, terms, scenario.value_params, scenario.weight_params)
    c_eut = optimal_contract_eut(profile, terms)
    if model.lottery.scale is None:
        raise ConfigError("lottery infeasible: scale m = 0.1/n is undefined for n_prosumers = 0")
    spec = LotterySpec(model.lottery.prize, model.lottery.scale)
    z_lot = optimal_lottery_sellback(profile, spec, scenario.weight_params, s)
    header = ["omega", "alpha", "s_min", "s_max", "generation", "p_s", "p_e", "lambda", "gamma",
              "contract_pt", "contract_eut", "sellback_pt", "sellback_eut",
              "prize", "lottery_scale", "lottery_sellback"]
    row = [
        omega, scenario.alpha, gen.s_min, gen.s_max, s, terms.p_s, terms.p_e,
        scenario.value_params.lam, scenario.weight_params.gamma,
        c_pt, c_eut,
        realtime_sellback(profile, terms, s, c_pt),
        realtime_sellback(profile, terms, s, c_eut),
        spec.prize, spec.scale, z_lot,
    ]
    return header, [row]


def execute(subcommand: str, model: ConfigModel) -> Table:
    """Run one experiment on a resolved configuration."""
    grids = {k: g.values() for k, g in model.grids.items()}
    workers = model.workers
    if subcommand == "lottery-sweep":
        if model.n_prosumers == 0 and model.lottery.scale is None:
            raise ConfigError("lottery infeasible: scale m = 0.1/n is undefined for n_prosumers = 0")
        return _lottery_sweep(build_scenario(model, "lottery"), grids["prize"], workers)
    scenario = build_scenario(model, "contract")
    if subcommand == "penetration-sweep":
        # the scale is reset per level; only the prize carries over
        return _penetration(scenario, model.lottery.prize, grids["n_prosumers"], workers)
    if subcommand == "contract-compare":
        return _compare(scenario, grids)
    if subcommand == "penalty-sweep":
        return _contract_sweep(scenario, "p_e", grids["p_e"], workers)
    if subcommand == "sellback-sweep":
        return _contract_sweep(scenario, "p_s", grids["p_s"], workers)
    return _single(model, scenario)


def resolve(run_cfg: RunConfig) -> ConfigModel:
    text = Path(run_cfg.config_path).read_text() if run_cfg.config_path else ""
    model = parse_model(text)
    update: dict = {"grids": resolve_grids(run_cfg.subcommand, model, run_cfg.grids)}
    if run_cfg.seed is not None:
        update["seed"] = run_cfg.seed
    if run_cfg.workers is not None:
        update["workers"] = run_cfg.workers
    if (
        model.lottery.scale is None
        and model.n_prosumers > 0
        and run_cfg.subcommand != "penetration-sweep"
    ):
        update["lottery"] = model.lottery.model_copy(update={"scale": default_lottery_scale(model.n_prosumers)})
    return model.model_copy(update=update)


def _write_atomically(out_dir: Path, files: dict[str, str]) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    staged: list[tuple[str, Path]] = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=out_dir)
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            staged.append((tmp, out_dir / name))
        for tmp, final in staged:
            os.replace(tmp, final)
    except BaseException:
        for tmp, final in staged:
            for p in (Path(tmp), final):
                p.unlink(missing_ok=True)
        raise


def run(run_cfg: RunConfig) -> int:
    """Resolve, execute and write outputs; returns the process exit status."""
    try:
        model = resolve(run_cfg)
        table = execute(run_cfg.subcommand, model)
    except (ConfigError, OSError) as exc:
        log.error("configuration error: %s", exc)
        return 2
    except Exception as exc:  # any module failure becomes a diagnostic, not a traceback
        log.error("%s failed: %s: %s", run_cfg.subcommand, type(exc).__name__, exc)
        return 1
    files = {
        f"{run_cfg.subcommand}.csv": to_csv(table),
        MANIFEST_NAME: manifest_text(model, run_cfg.subcommand),
    }
    try:
        _write_atomically(Path(run_cfg.out_dir), files)
    except OSError as exc:
        log.error("could not write outputs: %s", exc)
        return 1
    log.info("%s: %d rows -> %s (%s)", run_cfg.subcommand, len(table[1]), run_cfg.out_dir, ALPHA_CAVEAT)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prosumer-cpt",
        description="Prosumer sell-back experiments: day-ahead contracts vs fixed-prize lottery.",
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="YAML scenario file (omitted keys take defaults)")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, help="override the scenario seed")
    parser.add_argument(
        "--grid", action="append", default=[], metavar="NAME=START:STOP:STEPS",
        help="swept parameter grid (repeatable)",
    )
    parser.add_argument("--workers", type=int, help="processes for per-prosumer solves")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        if args.seed is not None and args.seed < 0:
            raise ConfigError("--seed must be nonnegative")
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        grids = dict(parse_grid_flag(g) for g in args.grid)
        run_cfg = RunConfig(
            subcommand=args.subcommand,
            out_dir=args.out,
            config_path=args.config,
            seed=args.seed,
            grids=grids,
            workers=args.workers,
        )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(run_cfg)


if __name__ == "__main__":
    sys.exit(main())
