"""Retail market simulation: consumers, prosumers, one incentive mechanism.

Random draws use one numpy stream per agent, keyed by ``(seed, kind,
index)``, so agent ``j`` has the same willingness and generation noise no
matter how many other agents exist.  Penetration sweeps rely on this.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence, Union

import numpy as np

from .contract import ContractTerms, optimal_contract_pt, realtime_sellback
from .cpt_core import ValueFunctionParams, WeightFunctionParams
from .lottery import LotterySpec, optimal_lottery_sellback
from .prosumer import ProsumerProfile, consumer_demand

Mechanism = Union[ContractTerms, LotterySpec]

_CONSUMER_STREAM = 0
_PROSUMER_STREAM = 1
LOTTERY_SCALE_NUMERATOR = 0.1


def default_lottery_scale(n_prosumers: int) -> float:
    """m = 0.1 / n: keeps total win probability <= 1 while nobody sells over 10 units."""
    if n_prosumers <= 0:
        raise ValueError("lottery scale undefined without prosumers (n_prosumers = 0)")
    return LOTTERY_SCALE_NUMERATOR / n_prosumers


def _check_range(name: str, rng: tuple[float, float]) -> None:
    lo, hi = rng
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise ValueError(f"{name} must be a finite range [lo, hi] with lo <= hi, got {rng}")


@dataclass(frozen=True)
class MarketScenario:
    n_consumers: int = 7500
    n_prosumers: int = 2500
    consumer_omega_range: tuple[float, float] = (3.0, 7.0)
    prosumer_omega_range: tuple[float, float] = (4.0, 7.0)
    alpha: float = 1.0
    retail_price: float = 1.5
    generation_noise_range: tuple[float, float] = (0.0, 0.5)
    cost_a: float = 1.0
    cost_b: float = 2e-5
    mechanism: Mechanism = field(default_factory=lambda: ContractTerms(1.0, 3.5))
    value_params: ValueFunctionParams = field(default_factory=ValueFunctionParams)
    weight_params: WeightFunctionParams = field(default_factory=WeightFunctionParams)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_consumers < 0 or self.n_prosumers < 0:
            raise ValueError("population counts must be nonnegative")
        _check_range("consumer_omega_range", self.consumer_omega_range)
        _check_range("prosumer_omega_range", self.prosumer_omega_range)
        _check_range("generation_noise_range", self.generation_noise_range)
        if self.prosumer_omega_range[0] < 0 or self.consumer_omega_range[0] < 0:
            raise ValueError("willingness-for-demand ranges must be nonnegative")
        if self.generation_noise_range[0] < 0:
            raise ValueError("generation noise must be nonnegative")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        for name in ("retail_price", "cost_a", "cost_b"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    def with_eut(self) -> MarketScenario:
        return replace(
            self, value_params=ValueFunctionParams.eut(), weight_params=WeightFunctionParams.eut()
        )

    def procurement_cost(self, x: float) -> float:
        return self.cost_a * x + self.cost_b * x * x

    def profile(self, omega: float) -> ProsumerProfile:
        lo, hi = self.generation_noise_range
        return ProsumerProfile.with_noise(omega, self.alpha, lo, hi)


@dataclass(frozen=True)
class Population:
    consumer_omegas: np.ndarray
    prosumer_omegas: np.ndarray
    # uncertain generation component r_j; realised generation is omega/alpha + r_j
    prosumer_noise: np.ndarray

    def head(self, n_consumers: int, n_prosumers: int) -> Population:
        if n_consumers > len(self.consumer_omegas) or n_prosumers > len(self.prosumer_omegas):
            raise ValueError("cannot take more agents than were drawn")
        return Population(
            self.consumer_omegas[:n_consumers],
            self.prosumer_omegas[:n_prosumers],
            self.prosumer_noise[:n_prosumers],
        )


@dataclass(frozen=True, eq=False)
class SimulationResult:
    base_demand: float
    total_sellback: float
    net_demand: float
    incentive_cost: float
    savings: float
    omegas: np.ndarray
    generation: np.ndarray
    sellbacks: np.ndarray
    contracts: np.ndarray | None = None

    @property
    def negative_net_demand(self) -> bool:
        """Retailer is left with surplus energy; Q(D) is economically dubious here."""
        return self.net_demand < 0

    @property
    def total_generation(self) -> float:
        return math.fsum(self.generation.tolist())

    @property
    def total_contract(self) -> float:
        if self.contracts is None:
            raise ValueError("no contracts in a lottery simulation")
        return math.fsum(self.contracts.tolist())

    @property
    def mean_contract(self) -> float:
        if self.contracts is None:
            raise ValueError("no contracts in a lottery simulation")
        return self.total_contract / len(self.contracts) if len(self.contracts) else 0.0


def _agent_uniforms(seed: int, stream: int, count: int, k: int) -> np.ndarray:
    out = np.empty((count, k))
    for i in range(count):
        ss = np.random.SeedSequence(seed, spawn_key=(stream, i))
        out[i] = np.random.default_rng(ss).random(k)
    return out


def draw_population(
    scenario: MarketScenario, n_consumers: int | None = None, n_prosumers: int | None = None
) -> Population:
    """Consumer and prosumer draws; counts default to the scenario's."""
    n_c = scenario.n_consumers if n_consumers is None else n_consumers
    n_p = scenario.n_prosumers if n_prosumers is None else n_prosumers
    c_lo, c_hi = scenario.consumer_omega_range
    p_lo, p_hi = scenario.prosumer_omega_range
    r_lo, r_hi = scenario.generation_noise_range
    cu = _agent_uniforms(scenario.seed, _CONSUMER_STREAM, n_c, 1)
    pu = _agent_uniforms(scenario.seed, _PROSUMER_STREAM, n_p, 2)
    return Population(
        consumer_omegas=c_lo + (c_hi - c_lo) * cu[:, 0],
        prosumer_omegas=p_lo + (p_hi - p_lo) * pu[:, 0],
        prosumer_noise=r_lo + (r_hi - r_lo) * pu[:, 1],
    )


def base_demand(scenario: MarketScenario, population: Population) -> float:
    return math.fsum(
        consumer_demand(w, scenario.alpha, scenario.retail_price)
        for w in population.consumer_omegas.tolist()
    )


def _realised_generation(scenario: MarketScenario, population: Population) -> np.ndarray:
    return population.prosumer_omegas / scenario.alpha + population.prosumer_noise


def _contract_task(args) -> tuple[float, float]:
    scenario, omega, s = args
    profile = scenario.profile(omega)
    c = optimal_contract_pt(profile, scenario.mechanism, scenario.value_params, scenario.weight_params)
    return c, realtime_sellback(profile, scenario.mechanism, s, c)


def _lottery_task(args) -> float:
    scenario, omega, s = args
    profile = scenario.profile(omega)
    return optimal_lottery_sellback(profile, scenario.mechanism, scenario.weight_params, s)


def _map_prosumers(task: Callable, scenario, population, generation, workers: int) -> list:
    jobs = [
        (scenario, w, s)
        for w, s in zip(population.prosumer_omegas.tolist(), generation.tolist())
    ]
    if workers <= 1 or len(jobs) < 2:
        return [task(j) for j in jobs]
    chunk = max(1, len(jobs) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves index order, so aggregation below is order-independent of scheduling
        return list(pool.map(task, jobs, chunksize=chunk))


def _finish(
    scenario: MarketScenario,
    population: Population,
    generation: np.ndarray,
    sellbacks: np.ndarray,
    incentive: float,
    contracts: np.ndarray | None,
) -> SimulationResult:
    b = base_demand(scenario, population)
    z = math.fsum(sellbacks.tolist())
    d = b - z
    savings = scenario.procurement_cost(b) - scenario.procurement_cost(d) - incentive
    return SimulationResult(
        base_demand=b,
        total_sellback=z,
        net_demand=d,
        incentive_cost=incentive,
        savings=savings,
        omegas=population.prosumer_omegas.copy(),
        generation=generation,
        sellbacks=sellbacks,
        contracts=contracts,
    )


def run_contract_simulation(
    scenario: MarketScenario, population: Population | None = None, workers: int = 1
) -> SimulationResult:
    terms = scenario.mechanism
    if not isinstance(terms, ContractTerms):
        raise TypeError("contract simulation needs ContractTerms as the mechanism")
    pop = draw_population(scenario) if population is None else population
    gen = _realised_generation(scenario, pop)
    out = _map_prosumers(_contract_task, scenario, pop, gen, workers)
    contracts = np.array([c for c, _ in out], dtype=float)
    sellbacks = np.array([z for _, z in out], dtype=float)
    incentive = math.fsum(
        terms.p_s * c - terms.p_e * max(c - z, 0.0) for c, z in out
    )
    return _finish(scenario, pop, gen, sellbacks, incentive, contracts)


def run_lottery_simulation(
    scenario: MarketScenario, population: Population | None = None, workers: int = 1
) -> SimulationResult:
    spec = scenario.mechanism
    if not isinstance(spec, LotterySpec):
        raise TypeError("lottery simulation needs a LotterySpec as the mechanism")
    pop = draw_population(scenario) if population is None else population
    gen = _realised_generation(scenario, pop)
    # feasibility against the largest generation any prosumer could realise
    ceiling = pop.prosumer_omegas / scenario.alpha + scenario.generation_noise_range[1]
    spec.check_feasible(math.fsum(ceiling.tolist()))
    sellbacks = np.array(_map_prosumers(_lottery_task, scenario, pop, gen, workers), dtype=float)
    return _finish(scenario, pop, gen, sellbacks, spec.prize, None)


def run_simulation(
    scenario: MarketScenario, population: Population | None = None, workers: int = 1
) -> SimulationResult:
    if isinstance(scenario.mechanism, ContractTerms):
        return run_contract_simulation(scenario, population, workers)
    return run_lottery_simulation(scenario, population, workers)


def lottery_scenario(scenario: MarketScenario, prize: float) -> MarketScenario:
    return replace(scenario, mechanism=LotterySpec(prize, default_lottery_scale(scenario.n_prosumers)))


def penetration_sweep(
    base: MarketScenario,
    levels: Sequence[int],
    prize: float | None = None,
    total: int = 10_000,
    workers: int = 1,
) -> list[SimulationResult]:
    """Lottery outcome as prosumers replace consumers at a fixed community size.

    The prize defaults to the base scenario's lottery prize; the scale is
    reset to 0.1/n at every level.
    """
    if prize is None:
        if not isinstance(base.mechanism, LotterySpec):
            raise TypeError("penetration sweep needs a prize or a lottery scenario")
        prize = base.mechanism.prize
    if any(not 0 < n <= total for n in levels):
        raise ValueError(f"penetration levels must lie in (0, {total}]")
    pool = draw_population(base, total - min(levels), max(levels))
    results = []
    for n in levels:
        sc = replace(
            base,
            n_consumers=total - n,
            n_prosumers=n,
            mechanism=LotterySpec(prize, default_lottery_scale(n)),
        )
        results.append(run_lottery_simulation(sc, pool.head(total - n, n), workers))
    return results


@dataclass(frozen=True)
class ContractComparisonRow:
    p_s: float
    lam: float
    mean_contract_pt: float
    mean_contract_eut: float

    @property
    def ratio(self) -> float:
        return self.mean_contract_pt / self.mean_contract_eut


def _mean_contract(scenario: MarketScenario, omegas: Sequence[float], vp, wp) -> float:
    if not omegas:
        return 0.0
    terms = scenario.mechanism
    vals = [optimal_contract_pt(scenario.profile(w), terms, vp, wp) for w in omegas]
    return math.fsum(vals) / len(vals)


def contract_comparison_sweep(
    scenario: MarketScenario,
    p_s_grid: Sequence[float],
    lambda_grid: Sequence[float],
    population: Population | None = None,
) -> list[ContractComparisonRow]:
    """Mean PT and EUT contract for every (p_s, lambda) cell at the scenario's p_e.

    A lambda of exactly 1 is read as the expected-utility agent (identity
    weights too), so that column reproduces the EUT contract.
    """
    if not isinstance(scenario.mechanism, ContractTerms):
        raise TypeError("contract comparison needs ContractTerms as the mechanism")
    pop = draw_population(scenario) if population is None else population
    omegas = pop.prosumer_omegas.tolist()
    p_e = scenario.mechanism.p_e
    rows = []
    for p_s in p_s_grid:
        sc = replace(scenario, mechanism=ContractTerms(p_s, p_e))
        eut = _mean_contract(sc, omegas, ValueFunctionParams.eut(), WeightFunctionParams.eut())
        for lam in lambda_grid:
            if lam == 1.0:
                # lambda = 1 is the expected-utility reference column
                pt = eut
            else:
                vp = replace(scenario.value_params, lam=lam)
                pt = _mean_contract(sc, omegas, vp, scenario.weight_params)
            rows.append(ContractComparisonRow(p_s, lam, pt, eut))
    return rows
