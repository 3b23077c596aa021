"""Bounded one-dimensional distributions used for generation and payoffs.

Every distribution exposes ``cdf``, ``quantile``, ``density`` and its
support ``(lo, hi)``.  ``breakpoints`` lists the points where the cdf is
not smooth so quadrature can split the domain there.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Protocol, Sequence, runtime_checkable


@runtime_checkable
class Distribution(Protocol):
    lo: float
    hi: float

    def cdf(self, x: float) -> float: ...

    def quantile(self, u: float) -> float: ...

    def density(self, x: float) -> float: ...

    @property
    def breakpoints(self) -> tuple[float, ...]: ...


def _check_unit(u: float) -> None:
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"quantile level must lie in [0, 1], got {u!r}")


@dataclass(frozen=True)
class Uniform:
    """Uniform distribution on ``[lo, hi]``; ``lo == hi`` is a point mass."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("uniform bounds must be finite")
        if self.hi < self.lo:
            raise ValueError(f"uniform bounds reversed: [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def degenerate(self) -> bool:
        return self.hi == self.lo

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self.lo, self.hi)

    def cdf(self, x: float) -> float:
        if x < self.lo:
            return 0.0
        if x >= self.hi:
            return 1.0
        return (x - self.lo) / (self.hi - self.lo)

    def quantile(self, u: float) -> float:
        _check_unit(u)
        if self.degenerate:
            return self.lo
        return self.lo + u * self.width

    def density(self, x: float) -> float:
        if self.degenerate or x < self.lo or x > self.hi:
            return 0.0
        return 1.0 / self.width

    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True)
class PointMass:
    at: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.at):
            raise ValueError("point mass location must be finite")

    @property
    def lo(self) -> float:
        return self.at

    @property
    def hi(self) -> float:
        return self.at

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self.at,)

    def cdf(self, x: float) -> float:
        return 1.0 if x >= self.at else 0.0

    def quantile(self, u: float) -> float:
        _check_unit(u)
        return self.at

    def density(self, x: float) -> float:
        # no Lebesgue density; callers integrate the cdf instead
        return 0.0

    def mean(self) -> float:
        return self.at


@dataclass(frozen=True)
class Discrete:
    """Finite distribution over ``values`` with the given ``probs``."""

    values: tuple[float, ...]
    probs: tuple[float, ...]
    _cum: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __init__(self, values: Sequence[float], probs: Sequence[float]):
        if len(values) != len(probs) or not values:
            raise ValueError("values and probs must be nonempty and equally long")
        if any(p < 0 for p in probs) or not math.isclose(sum(probs), 1.0, abs_tol=1e-12):
            raise ValueError("probabilities must be nonnegative and sum to 1")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("discrete support must be finite")
        pairs = sorted(zip(values, probs))
        object.__setattr__(self, "values", tuple(float(v) for v, _ in pairs))
        object.__setattr__(self, "probs", tuple(float(p) for _, p in pairs))
        cum, acc = [], 0.0
        for p in self.probs:
            acc += p
            cum.append(acc)
        cum[-1] = 1.0
        object.__setattr__(self, "_cum", tuple(cum))

    @property
    def lo(self) -> float:
        return self.values[0]

    @property
    def hi(self) -> float:
        return self.values[-1]

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return self.values

    def cdf(self, x: float) -> float:
        i = bisect.bisect_right(self.values, x)
        return 0.0 if i == 0 else self._cum[i - 1]

    def quantile(self, u: float) -> float:
        _check_unit(u)
        i = bisect.bisect_left(self._cum, u)
        return self.values[min(i, len(self.values) - 1)]

    def density(self, x: float) -> float:
        return 0.0

    def mean(self) -> float:
        return sum(v * p for v, p in zip(self.values, self.probs))
