"""Day-ahead contract pricing with a shortfall penalty.

A prosumer commits ``C`` units a day ahead at price ``p_s`` and pays
``p_e`` per unit it fails to deliver once its generation ``s`` is known.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import integrate, optimize

from .cpt_core import (
    QUAD_ABS_TOL,
    ValueFunctionParams,
    WeightFunctionParams,
    value,
    weight_inverse,
)
from .prosumer import GenerationModel, ProsumerProfile, sellback_convenience

_BOUND_TOL = 1e-9


@dataclass(frozen=True)
class ContractTerms:
    p_s: float
    p_e: float

    def __post_init__(self) -> None:
        if not self.p_s > 0.0:
            raise ValueError(f"sell-back price p_s must be positive, got {self.p_s}")
        if not self.p_e > self.p_s:
            raise ValueError(
                f"penalty price p_e={self.p_e} must exceed sell-back price p_s={self.p_s}"
            )

    @property
    def price_ratio(self) -> float:
        return self.p_s / self.p_e


@dataclass(frozen=True)
class RealTimeBounds:
    z1: float
    z2: float
    z2_min: float
    z2_max: float


@dataclass(frozen=True)
class ContractSolution:
    amount: float
    method: Literal["closed_form", "numeric"]


def penalty_shift(profile: ProsumerProfile, terms: ContractTerms) -> float:
    """Offset between generation and the penalty-avoiding sell-back z2."""
    return (terms.p_e - profile.omega) / profile.alpha


def realtime_bounds(profile: ProsumerProfile, terms: ContractTerms, s: float) -> RealTimeBounds:
    gen = profile.generation
    shift = penalty_shift(profile, terms)
    return RealTimeBounds(
        z1=s - profile.satiation,
        z2=s + shift,
        z2_min=gen.s_min + shift,
        z2_max=gen.s_max + shift,
    )


def realtime_sellback(
    profile: ProsumerProfile, terms: ContractTerms, s: float, contract: float
) -> float:
    """Best real-time delivery once generation is known."""
    if contract < 0:
        raise ValueError(f"contract must be nonnegative, got {contract}")
    b = realtime_bounds(profile, terms, s)
    if contract < b.z1:
        return b.z1
    if contract > b.z2:
        return b.z2
    return contract


def realtime_utility(
    profile: ProsumerProfile, terms: ContractTerms, s: float, contract: float, z: float
) -> float:
    return (
        sellback_convenience(profile, s, z)
        + terms.p_s * contract
        - terms.p_e * max(contract - z, 0.0)
    )


def contract_range(profile: ProsumerProfile, terms: ContractTerms) -> tuple[float, float]:
    gen = profile.generation
    shift = penalty_shift(profile, terms)
    return gen.s_min + shift, gen.s_max + shift


def contract_payment_value(
    profile: ProsumerProfile,
    terms: ContractTerms,
    vparams: ValueFunctionParams,
    wparams: WeightFunctionParams,
    contract: float,
) -> float:
    """Perceived day-ahead payment for committing ``contract`` units.

    The sure payment ``p_s * C`` is edited out; what remains is the loss
    ``-p_e * (C - z2)^+``.  Integrating the cumulative loss valuation by
    parts and substituting ``z2 = s + shift`` leaves

        -lam * beta * p_e**beta * int_{s_min}^{C - shift} w(F_s(s)) (C - shift - s)**(beta - 1) ds

    which is smooth in ``s`` for the linear value function.
    """
    lo, hi = contract_range(profile, terms)
    if not lo - _BOUND_TOL <= contract <= hi + _BOUND_TOL:
        raise ValueError(f"contract {contract} outside admissible range [{lo}, {hi}]")
    contract = min(max(contract, lo), hi)
    sure = value(vparams, terms.p_s * contract)

    dist = profile.generation.distribution
    upper = contract - penalty_shift(profile, terms)
    s_min = dist.lo
    if upper <= s_min or dist.degenerate:
        return sure
    b = vparams.beta
    # the weight is at most 1, so the penalty term is bounded by lam * p_e^b * span^b
    if vparams.lam * (terms.p_e * (upper - s_min)) ** b < QUAD_ABS_TOL:
        return sure

    cdf = dist.cdf
    if wparams.identity:
        tail_weight = cdf
    else:
        g = wparams.gamma

        # inlined weight(cdf(s)); this integrand dominates the cost of every solve
        def tail_weight(s: float) -> float:
            u = cdf(s)
            if u <= 0.0:
                return 0.0
            if u >= 1.0:
                return 1.0
            return math.exp(-((-math.log(u)) ** g))

    if b == 1.0:
        area, _ = integrate.quad(
            tail_weight, s_min, upper, epsabs=QUAD_ABS_TOL, epsrel=1e-10, limit=200
        )
        return sure - vparams.lam * terms.p_e * area
    # (upper - s)**(b-1) endpoint singularity handled by the algebraic weight
    area, _ = integrate.quad(
        tail_weight, s_min, upper, weight="alg", wvar=(0.0, b - 1.0),
        epsabs=QUAD_ABS_TOL, epsrel=1e-10, limit=200,
    )
    return sure - vparams.lam * b * terms.p_e**b * area


def solve_contract(
    profile: ProsumerProfile,
    terms: ContractTerms,
    vparams: ValueFunctionParams,
    wparams: WeightFunctionParams,
) -> ContractSolution:
    lo, hi = contract_range(profile, terms)
    floor = max(0.0, lo)
    if vparams.linear:
        ratio = terms.p_s / (vparams.lam * terms.p_e)
        level = weight_inverse(wparams, ratio)
        amount = profile.generation.distribution.quantile(level) + penalty_shift(profile, terms)
        return ContractSolution(min(max(amount, floor), hi), "closed_form")

    # curved value function: no closed form, maximise the payment directly
    if hi <= floor:
        return ContractSolution(hi if hi >= 0 else 0.0, "numeric")

    def neg(c: float) -> float:
        return -contract_payment_value(profile, terms, vparams, wparams, c)

    grid = np.linspace(floor, hi, 65)
    vals = [neg(c) for c in grid]
    k = int(np.argmin(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(neg, bounds=(a, b), method="bounded", options={"xatol": 1e-10})
    best = float(res.x) if res.fun <= vals[k] else float(grid[k])
    return ContractSolution(best, "numeric")


def optimal_contract_pt(
    profile: ProsumerProfile,
    terms: ContractTerms,
    vparams: ValueFunctionParams,
    wparams: WeightFunctionParams,
) -> float:
    return solve_contract(profile, terms, vparams, wparams).amount


def optimal_contract_eut(profile: ProsumerProfile, terms: ContractTerms) -> float:
    return optimal_contract_pt(
        profile, terms, ValueFunctionParams.eut(), WeightFunctionParams.eut()
    )


def optimal_contract_generator(
    generation: GenerationModel,
    terms: ContractTerms,
    vparams: ValueFunctionParams,
    wparams: WeightFunctionParams,
) -> float:
    """Contract of a pure generator that delivers ``min(C, s)`` and values nothing it keeps.

    Without a convenience term there is no penalty shift, so only the
    quantile survives and the contract falls as ``p_e`` rises.  A prosumer
    profile with ``omega = 0`` is not the same thing: its shift ``p_e/alpha``
    still grows with the penalty.
    """
    if not vparams.linear:
        raise ValueError("generator closed form needs a linear value function (eta = beta = 1)")
    level = weight_inverse(wparams, terms.p_s / (vparams.lam * terms.p_e))
    return generation.distribution.quantile(level)


def corollary1_holds(
    terms: ContractTerms, vparams: ValueFunctionParams, wparams: WeightFunctionParams
) -> bool:
    """True when the prospect-theory quantile level sits below the EUT one."""
    pt_level = weight_inverse(wparams, terms.p_s / (vparams.lam * terms.p_e))
    return pt_level < terms.price_ratio


def corollary2_check(
    profile: ProsumerProfile,
    terms: ContractTerms,
    s: float,
    contract_eut: float,
    contract_pt: float,
) -> bool:
    if contract_eut < contract_pt:
        raise ValueError(
            f"needs contract_eut >= contract_pt, got {contract_eut} < {contract_pt}"
        )
    return realtime_sellback(profile, terms, s, contract_eut) >= realtime_sellback(
        profile, terms, s, contract_pt
    )

