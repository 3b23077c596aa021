"""Consumer and prosumer primitives: convenience, demand, generation."""

from __future__ import annotations

from dataclasses import dataclass

from .distributions import Uniform


@dataclass(frozen=True)
class GenerationModel:
    """Renewable output of one prosumer over a period, uniform on ``[s_min, s_max]``."""

    s_min: float
    s_max: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.s_min <= self.s_max:
            raise ValueError(
                f"generation bounds must satisfy 0 <= s_min <= s_max, got [{self.s_min}, {self.s_max}]"
            )

    @property
    def distribution(self) -> Uniform:
        return Uniform(self.s_min, self.s_max)


@dataclass(frozen=True)
class ProsumerProfile:
    omega: float
    generation: GenerationModel
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if not self.omega >= 0.0:
            raise ValueError(f"omega must be nonnegative, got {self.omega}")
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        # prosumers never buy in the studied period
        if self.generation.s_min < self.satiation - 1e-12:
            raise ValueError(
                f"generation floor {self.generation.s_min} below satiation {self.satiation}"
            )

    @property
    def satiation(self) -> float:
        """Consumption ω/α beyond which convenience stops growing."""
        return self.omega / self.alpha

    @classmethod
    def with_noise(cls, omega: float, alpha: float, noise_lo: float, noise_hi: float):
        """Generation ω/α + r with r uniform on ``[noise_lo, noise_hi]``."""
        base = omega / alpha
        return cls(omega, GenerationModel(base + noise_lo, base + noise_hi), alpha)


def convenience(omega: float, alpha: float, x: float) -> float:
    if x < 0:
        raise ValueError(f"consumption must be nonnegative, got {x}")
    if x >= omega / alpha:
        return omega * omega / (2.0 * alpha)
    return omega * x - 0.5 * alpha * x * x


def sellback_convenience(profile: ProsumerProfile, s: float, z: float) -> float:
    if not 0.0 <= z <= s:
        raise ValueError(f"sell-back {z} outside [0, {s}]")
    return convenience(profile.omega, profile.alpha, s - z)


def consumer_demand(omega: float, alpha: float, price: float) -> float:
    if price < 0:
        raise ValueError(f"retail price must be nonnegative, got {price}")
    return max(0.0, (omega - price) / alpha)


def consumer_payoff(omega: float, alpha: float, price: float, x: float) -> float:
    return convenience(omega, alpha, x) - price * x
