"""Prosumer sell-back decisions under prospect theory and expected utility."""

from .contract import (
    ContractSolution,
    ContractTerms,
    RealTimeBounds,
    contract_payment_value,
    corollary1_holds,
    corollary2_check,
    optimal_contract_eut,
    optimal_contract_generator,
    optimal_contract_pt,
    realtime_bounds,
    realtime_sellback,
    solve_contract,
)
from .cpt_core import (
    DiscreteProspect,
    ValueFunctionParams,
    WeightFunctionParams,
    cpt_value,
    edit_prospect,
    prospect_value,
    value,
    weight,
    weight_inverse,
)
from .distributions import Discrete, PointMass, Uniform
from .lottery import (
    LotterySolveError,
    LotterySpec,
    lottery_utility,
    optimal_lottery_sellback,
    winning_probabilities,
)
from .prosumer import (
    GenerationModel,
    ProsumerProfile,
    consumer_demand,
    convenience,
    sellback_convenience,
)

__version__ = "0.1.0"
