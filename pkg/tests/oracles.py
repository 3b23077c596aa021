"""Brute-force oracles shared by unit and acceptance tests.

None of these reuse the library's solvers; they only evaluate objectives.
"""

from __future__ import annotations

import numpy as np

from prosumer_cpt.contract import ContractTerms, contract_payment_value, contract_range
from prosumer_cpt.cpt_core import ValueFunctionParams, WeightFunctionParams
from prosumer_cpt.lottery import LotterySpec
from prosumer_cpt.prosumer import GenerationModel, ProsumerProfile


def grid(lo: float, hi: float, step: float) -> np.ndarray:
    pts = np.arange(lo, hi, step)
    return np.append(pts, hi)


def contract_grid_argmax(profile, terms, vparams, wparams, step: float = 1e-4) -> float:
    lo, hi = contract_range(profile, terms)
    pts = grid(max(0.0, lo), hi, step)
    vals = [contract_payment_value(profile, terms, vparams, wparams, c) for c in pts]
    return float(pts[int(np.argmax(vals))])


def lottery_grid_argmax(profile, spec, wparams, s: float, step: float = 1e-5) -> float:
    """Argmax of omega (s - z) - alpha/2 (s - z)^2 + R exp(-(-ln(m z))^gamma), written out in numpy."""
    z = grid(0.0, s, step)
    kept = s - z
    q = spec.scale * z
    with np.errstate(divide="ignore"):
        w = np.where(q > 0, np.exp(-((-np.log(q)) ** wparams.gamma)), 0.0)
    u = profile.omega * kept - 0.5 * profile.alpha * kept**2 + spec.prize * w
    return float(z[int(np.argmax(u))])


def newsvendor_mc(profile, terms, contract: float, n: int, rng) -> tuple[float, float]:
    """Monte Carlo p_s C - p_e E[(C - z2)^+] and its standard error."""
    gen = profile.generation
    s = rng.uniform(gen.s_min, gen.s_max, n)
    z2 = s + (terms.p_e - profile.omega) / profile.alpha
    payoff = terms.p_s * contract - terms.p_e * np.maximum(contract - z2, 0.0)
    return float(payoff.mean()), float(payoff.std(ddof=1) / np.sqrt(n))


def random_contract_case(rng, width_range=(0.05, 0.5)):
    """An admissible (profile, terms, vparams, wparams) draw."""
    alpha = rng.uniform(0.5, 2.0)
    omega = rng.uniform(0.0, 7.0)
    floor = omega / alpha + rng.uniform(0.0, 0.5)
    width = rng.uniform(*width_range)
    profile = ProsumerProfile(omega, GenerationModel(floor, floor + width), alpha)
    p_e = rng.uniform(1.0, 6.0)
    p_s = rng.uniform(0.05, 0.98) * p_e
    terms = ContractTerms(p_s, p_e)
    vparams = ValueFunctionParams(lam=rng.uniform(1.0, 3.0))
    wparams = WeightFunctionParams(gamma=rng.uniform(0.3, 0.9))
    return profile, terms, vparams, wparams


def random_lottery_case(rng):
    """Profile, realised generation, scale and weights for a lottery solve."""
    alpha = rng.uniform(0.5, 2.0)
    omega = rng.uniform(3.0, 7.0)
    base = omega / alpha
    profile = ProsumerProfile(omega, GenerationModel(base, base + 0.5), alpha)
    s = base + rng.uniform(0.0, 0.5)
    n = int(rng.integers(500, 5000))
    scale = 0.1 / n
    wparams = WeightFunctionParams(gamma=rng.uniform(0.3, 0.9))
    return profile, s, scale, wparams


__all__ = [
    "ContractTerms",
    "LotterySpec",
    "contract_grid_argmax",
    "lottery_grid_argmax",
    "newsvendor_mc",
    "random_contract_case",
    "random_lottery_case",
]
