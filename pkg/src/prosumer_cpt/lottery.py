"""Fixed-prize lottery incentive.

Each prosumer's winning chance is ``m * z`` for sell-back ``z``; the prize
``R`` is paid regardless of who wins, so only the prize size matters to the
retailer.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Sequence

from scipy import optimize

from .cpt_core import WeightFunctionParams, prelec_inflection, weight, weight_slope
from .prosumer import ProsumerProfile

ROOT_XTOL = 1e-12
ROOT_MAXITER = 200
_RTOL = 4 * sys.float_info.epsilon


class LotterySolveError(RuntimeError):
    """Root finder failed to converge inside a valid bracket."""


@dataclass(frozen=True)
class LotterySpec:
    prize: float
    scale: float

    def __post_init__(self) -> None:
        if not self.prize >= 0.0:
            raise ValueError(f"lottery prize must be nonnegative, got {self.prize}")
        if not self.scale > 0.0:
            raise ValueError(f"lottery scale m must be positive, got {self.scale}")

    def check_feasible(self, max_total_sellback: float) -> None:
        if self.scale * max_total_sellback > 1.0 + 1e-12:
            raise ValueError(
                f"infeasible lottery: m * max aggregate sell-back = "
                f"{self.scale * max_total_sellback:.6g} > 1"
            )


def lottery_utility(
    profile: ProsumerProfile, spec: LotterySpec, wparams: WeightFunctionParams, s: float, z: float
) -> float:
    """Quadratic convenience of the kept energy plus the weighted prize."""
    if not 0.0 <= z <= s:
        raise ValueError(f"sell-back {z} outside [0, {s}]")
    q = spec.scale * z
    if q > 1.0:
        raise ValueError(f"winning probability m*z = {q} exceeds 1")
    kept = s - z
    return profile.omega * kept - 0.5 * profile.alpha * kept * kept + spec.prize * weight(wparams, q)


def lottery_marginal(
    profile: ProsumerProfile, spec: LotterySpec, wparams: WeightFunctionParams, s: float, z: float
) -> float:
    """dU/dz for z in (0, s]."""
    slope = profile.alpha * (s - z) - profile.omega
    if spec.prize == 0.0:
        return slope
    return slope + spec.prize * spec.scale * weight_slope(wparams, spec.scale * z)


def optimal_lottery_sellback(
    profile: ProsumerProfile, spec: LotterySpec, wparams: WeightFunctionParams, s: float
) -> float:
    """Utility-maximising sell-back on ``[0, s]``.

    Within the concave part of the weighting curve the marginal utility
    falls from +inf at 0+ so its root is bracketed and unique.  If the
    convex part is reachable (m*s > inflection) its best point and the
    boundaries are compared against the interior root.
    """
    if s < 0:
        raise ValueError(f"generation must be nonnegative, got {s}")
    spec.check_feasible(s)
    if s == 0.0:
        return 0.0
    a, w = profile.alpha, profile.omega
    if spec.prize == 0.0:
        return min(max(s - w / a, 0.0), s)
    if wparams.identity:
        return min(max(s - (w - spec.prize * spec.scale) / a, 0.0), s)

    def utility(z: float) -> float:
        return lottery_utility(profile, spec, wparams, s, z)

    def marginal(z: float) -> float:
        return lottery_marginal(profile, spec, wparams, s, z)

    z_lo = 1e-12 * s
    z_c = min(s, prelec_inflection(wparams) / spec.scale)
    candidates = [0.0, s]

    g_lo = marginal(z_lo)
    g_c = marginal(z_c)
    if g_lo > 0.0 and g_c < 0.0:
        root, info = optimize.brentq(
            marginal, z_lo, z_c, xtol=ROOT_XTOL, rtol=_RTOL,
            maxiter=ROOT_MAXITER, full_output=True, disp=False,
        )
        if not info.converged:
            raise LotterySolveError(
                f"brentq did not converge on [{z_lo:.3e}, {z_c:.6g}] "
                f"(U'={g_lo:.3e}, {g_c:.3e}) after {info.iterations} iterations"
            )
        candidates.append(root)
    elif g_lo > 0.0 and g_c >= 0.0:
        # utility still rising at the inflection point
        candidates.append(z_c)
    else:
        # no sign change to bracket: maximise directly
        res = optimize.minimize_scalar(
            lambda z: -utility(z), bounds=(0.0, z_c), method="bounded",
            options={"xatol": ROOT_XTOL},
        )
        candidates.append(float(res.x))

    if z_c < s:
        res = optimize.minimize_scalar(
            lambda z: -utility(z), bounds=(z_c, s), method="bounded",
            options={"xatol": ROOT_XTOL},
        )
        candidates.append(float(res.x))

    return max(candidates, key=utility)


def winning_probabilities(sellbacks: Sequence[float], scale: float) -> tuple[list[float], float]:
    """Per-prosumer win chances and the probability that nobody wins."""
    if not scale > 0:
        raise ValueError(f"lottery scale m must be positive, got {scale}")
    if any(z < 0 for z in sellbacks):
        raise ValueError("sell-backs must be nonnegative")
    probs = [scale * z for z in sellbacks]
    total = math.fsum(probs)
    if total > 1.0 + 1e-12:
        raise ValueError(f"infeasible lottery: winning probabilities sum to {total} > 1")
    return probs, max(0.0, 1.0 - total)
