"""Prospect-theory primitives.

Value function, Prelec probability weighting (plus an identity mode so that
expected-utility decisions are just another configuration), discrete
prospect valuation with editing, and the continuous cumulative valuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy import integrate

from .distributions import Distribution

QUAD_ABS_TOL = 1e-8


@dataclass(frozen=True)
class ValueFunctionParams:
    lam: float = 2.0
    eta: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not self.lam >= 1.0:
            raise ValueError(f"loss aversion lambda must be >= 1, got {self.lam}")
        for name in ("eta", "beta"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")

    @property
    def linear(self) -> bool:
        return self.eta == 1.0 and self.beta == 1.0

    @classmethod
    def eut(cls) -> ValueFunctionParams:
        return cls(lam=1.0, eta=1.0, beta=1.0)


@dataclass(frozen=True)
class WeightFunctionParams:
    """Prelec weighting ``exp(-(-ln q)**gamma)``, or the identity if ``identity``."""

    gamma: float = 0.5
    identity: bool = False

    def __post_init__(self) -> None:
        if not self.identity and not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")

    @classmethod
    def eut(cls) -> WeightFunctionParams:
        return cls(gamma=1.0, identity=True)


Outcome = tuple[float, float]


@dataclass(frozen=True)
class DiscreteProspect:
    """Outcomes as ``(payoff, probability)`` pairs; the null outcome may be omitted."""

    outcomes: tuple[Outcome, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "outcomes", tuple((float(y), float(q)) for y, q in self.outcomes)
        )
        for y, q in self.outcomes:
            if not 0.0 <= q <= 1.0:
                raise ValueError(f"outcome probability {q} outside [0, 1]")
            if not math.isfinite(y):
                raise ValueError("outcome payoffs must be finite")
        if self.total_probability > 1.0 + 1e-12:
            raise ValueError(f"probabilities sum to {self.total_probability} > 1")

    @property
    def total_probability(self) -> float:
        return math.fsum(q for _, q in self.outcomes)

    @property
    def complete(self) -> bool:
        return bool(self.outcomes) and math.isclose(self.total_probability, 1.0, abs_tol=1e-12)


def value(params: ValueFunctionParams, y: float) -> float:
    if y >= 0:
        return y if params.eta == 1.0 else y**params.eta
    return -params.lam * ((-y) if params.beta == 1.0 else (-y) ** params.beta)


def value_slope(params: ValueFunctionParams, y: float) -> float:
    """Derivative of ``value`` away from the origin."""
    if y > 0:
        return 1.0 if params.eta == 1.0 else params.eta * y ** (params.eta - 1.0)
    if y < 0:
        b = params.beta
        return params.lam if b == 1.0 else params.lam * b * (-y) ** (b - 1.0)
    raise ValueError("value slope is undefined at the origin for concave exponents")


def _check_prob(q: float, what: str) -> None:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"{what} must lie in [0, 1], got {q!r}")


def weight(params: WeightFunctionParams, q: float) -> float:
    _check_prob(q, "probability")
    if params.identity:
        return q
    if q == 0.0:
        return 0.0
    if q == 1.0:
        return 1.0
    return math.exp(-((-math.log(q)) ** params.gamma))


def weight_slope(params: WeightFunctionParams, q: float) -> float:
    """d weight / dq on (0, 1)."""
    if params.identity:
        return 1.0
    if not 0.0 < q < 1.0:
        raise ValueError("weight slope only defined on the open unit interval")
    g = params.gamma
    log_term = -math.log(q)
    return g * math.exp(-(log_term**g)) * log_term ** (g - 1.0) / q


def weight_inverse(params: WeightFunctionParams, w: float) -> float:
    _check_prob(w, "decision weight")
    if params.identity:
        return w
    if w == 0.0:
        return 0.0
    if w == 1.0:
        return 1.0
    return math.exp(-((-math.log(w)) ** (1.0 / params.gamma)))


def prelec_inflection(params: WeightFunctionParams) -> float:
    """Probability at which the Prelec curve switches from concave to convex."""
    return 1.0 if params.identity else math.exp(-1.0)


def edit_prospect(p: DiscreteProspect) -> tuple[float, DiscreteProspect]:
    """Split a complete prospect into its riskless component and the residual.

    The riskless component is the outcome nearest zero when all outcomes
    share a sign; mixed-sign prospects have no common component (c = 0).
    """
    if not p.complete:
        raise ValueError(
            f"editing needs probabilities summing to 1, got {p.total_probability}"
        )
    ys = [y for y, _ in p.outcomes]
    if min(ys) >= 0:
        c = min(ys)
    elif max(ys) <= 0:
        c = max(ys)
    else:
        c = 0.0
    residual = DiscreteProspect(tuple((y - c, q) for y, q in p.outcomes))
    return c, residual


def _weighted_sum(vparams, wparams, outcomes: Sequence[Outcome]) -> float:
    return math.fsum(value(vparams, y) * weight(wparams, q) for y, q in outcomes)


def prospect_value(
    vparams: ValueFunctionParams, wparams: WeightFunctionParams, p: DiscreteProspect
) -> float:
    """Perceived value of a discrete prospect, sum of value(y) * weight(q).

    Complete prospects are edited first: the riskless component is valued
    on its own and only the residual is weighted.  Prospects with the null
    outcome omitted are summed as they stand.
    """
    if not p.outcomes:
        return 0.0
    if not p.complete:
        return _weighted_sum(vparams, wparams, p.outcomes)
    c, residual = edit_prospect(p)
    return value(vparams, c) + _weighted_sum(vparams, wparams, residual.outcomes)


def _pieces(lo: float, hi: float, cuts: Sequence[float]) -> list[tuple[float, float]]:
    pts = sorted({lo, hi, *(x for x in cuts if lo < x < hi)})
    return [(a, b) for a, b in zip(pts, pts[1:]) if b > a]


def _quad(f, lo: float, hi: float, cuts: Sequence[float]) -> float:
    total = 0.0
    for a, b in _pieces(lo, hi, cuts):
        val, _ = integrate.quad(f, a, b, epsabs=QUAD_ABS_TOL, epsrel=1e-10, limit=200)
        total += val
    return total


def cpt_value(
    vparams: ValueFunctionParams, wparams: WeightFunctionParams, dist: Distribution
) -> float:
    """Cumulative prospect value of a bounded random payoff.

    Losses are weighted through weight(F(y)), gains through weight(1 - F(y)).
    After integrating by parts both pieces become integrals of the smooth
    value slope against weighted tail probabilities, which stay finite even
    for point masses and atoms.
    """
    lo, hi = dist.lo, dist.hi
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("cumulative valuation needs a distribution with finite support")
    cuts = tuple(dist.breakpoints)
    total = 0.0
    if lo < 0:
        total -= _quad(
            lambda y: value_slope(vparams, y) * weight(wparams, dist.cdf(y)),
            lo, min(hi, 0.0), cuts,
        )
        if hi < 0:
            # F == 1 on [hi, 0]
            total += value(vparams, hi)
    if hi > 0:
        total += _quad(
            lambda y: value_slope(vparams, y) * weight(wparams, 1.0 - dist.cdf(y)),
            max(lo, 0.0), hi, cuts,
        )
        if lo > 0:
            # 1 - F == 1 on [0, lo]
            total += value(vparams, lo)
    return total
