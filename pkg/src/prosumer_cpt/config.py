"""YAML run configuration: scenario keys, sweep grids, validation.

Every key is optional; omitted keys take the default community (7500
consumers, 2500 prosumers, retail price 1.5, Q(x) = x + 2e-5 x^2,
lambda = 2, gamma = 0.5).  Unknown keys are rejected.

Example::

    seed: 3
    n_prosumers: 2000
    contract: {p_s: 2.0, p_e: 3.5}
    cpt: {lambda: 2.25}
    grids:
      p_e: {start: 2.05, stop: 3.5, steps: 30}
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal, Optional

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .contract import ContractTerms
from .cpt_core import ValueFunctionParams, WeightFunctionParams
from .lottery import LotterySpec
from .market import MarketScenario, default_lottery_scale

SUBCOMMANDS = (
    "contract-compare",
    "penalty-sweep",
    "sellback-sweep",
    "lottery-sweep",
    "penetration-sweep",
    "single-prosumer",
)

# swept parameter names per subcommand, with the default grid
DEFAULT_GRIDS: dict[str, dict[str, tuple[float, float, int]]] = {
    "contract-compare": {"p_s": (0.5, 3.0, 6), "lambda": (1.0, 3.0, 5)},
    "penalty-sweep": {"p_e": (2.05, 3.5, 30)},
    "sellback-sweep": {"p_s": (0.5, 3.0, 26)},
    "lottery-sweep": {"prize": (0.0, 10000.0, 21)},
    "penetration-sweep": {"n_prosumers": (1000, 4000, 7)},
    "single-prosumer": {},
}

ALPHA_CAVEAT = (
    "alpha (convenience curvature) is not reported for the original experiments; "
    "alpha = 1 is assumed, so magnitudes are indicative and only signs/orderings are claims"
)


class ConfigError(ValueError):
    """Configuration text that cannot be turned into a run."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)


class GridSection(_Strict):
    start: float
    stop: float
    steps: int = Field(ge=2)

    def values(self) -> list[float]:
        return np.linspace(self.start, self.stop, self.steps).tolist()


class ContractSection(_Strict):
    p_s: float = 1.0
    p_e: float = 3.5

    @model_validator(mode="after")
    def _terms(self):
        ContractTerms(self.p_s, self.p_e)
        return self


class LotterySection(_Strict):
    prize: float = Field(default=5000.0, ge=0.0)
    # None means 0.1 / n_prosumers
    scale: Optional[float] = Field(default=None, gt=0.0)


class CptSection(_Strict):
    lam: float = Field(default=2.0, alias="lambda")
    eta: float = 1.0
    beta: float = 1.0
    gamma: float = 0.5
    weighting: Literal["prelec", "identity"] = "prelec"

    @model_validator(mode="after")
    def _params(self):
        self.value_params()
        self.weight_params()
        return self

    def value_params(self) -> ValueFunctionParams:
        return ValueFunctionParams(self.lam, self.eta, self.beta)

    def weight_params(self) -> WeightFunctionParams:
        return WeightFunctionParams(self.gamma, identity=self.weighting == "identity")


class ProsumerSection(_Strict):
    omega: float = Field(default=5.0, ge=0.0)
    # realised generation; None means the midpoint of the generation range
    generation: Optional[float] = Field(default=None, ge=0.0)


class ConfigModel(_Strict):
    seed: int = Field(default=0, ge=0)
    n_consumers: int = Field(default=7500, ge=0)
    n_prosumers: int = Field(default=2500, ge=0)
    consumer_omega_range: tuple[float, float] = (3.0, 7.0)
    prosumer_omega_range: tuple[float, float] = (4.0, 7.0)
    alpha: float = Field(default=1.0, gt=0.0)
    retail_price: float = Field(default=1.5, ge=0.0)
    generation_noise_range: tuple[float, float] = (0.0, 0.5)
    cost_a: float = Field(default=1.0, ge=0.0)
    cost_b: float = Field(default=2e-5, ge=0.0)
    contract: ContractSection = ContractSection()
    lottery: LotterySection = LotterySection()
    cpt: CptSection = CptSection()
    prosumer: ProsumerSection = ProsumerSection()
    grids: dict[str, GridSection] = {}
    workers: int = Field(default=1, ge=1)

    @field_validator("consumer_omega_range", "prosumer_omega_range", "generation_noise_range", mode="before")
    @classmethod
    def _pair(cls, v: Any) -> Any:
        if isinstance(v, (list, tuple)) and len(v) == 2:
            lo, hi = float(v[0]), float(v[1])
            if hi < lo:
                raise ValueError(f"range [{lo}, {hi}] is reversed")
            return (lo, hi)
        raise ValueError("expected a two-element [lo, hi] list")


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    out_dir: str
    config_path: Optional[str] = None
    seed: Optional[int] = None
    grids: dict[str, GridSection] = field(default_factory=dict)
    workers: Optional[int] = None

    def __post_init__(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")


def _format_errors(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        path = ".".join(str(p) for p in e["loc"]) or "<root>"
        msg = e["msg"]
        if e["type"] == "extra_forbidden":
            msg = "unknown key"
        lines.append(f"{path}: {msg}")
    return "; ".join(lines)


def parse_model(text: str) -> ConfigModel:
    try:
        raw = yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a mapping at the top level")
    try:
        return ConfigModel.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from None


def build_scenario(model: ConfigModel, mechanism: str = "contract") -> MarketScenario:
    """Scenario with the contract or lottery mechanism from ``model``."""
    try:
        if mechanism == "contract":
            mech = ContractTerms(model.contract.p_s, model.contract.p_e)
        else:
            scale = model.lottery.scale
            if scale is None:
                scale = default_lottery_scale(model.n_prosumers)
            mech = LotterySpec(model.lottery.prize, scale)
        return MarketScenario(
            n_consumers=model.n_consumers,
            n_prosumers=model.n_prosumers,
            consumer_omega_range=model.consumer_omega_range,
            prosumer_omega_range=model.prosumer_omega_range,
            alpha=model.alpha,
            retail_price=model.retail_price,
            generation_noise_range=model.generation_noise_range,
            cost_a=model.cost_a,
            cost_b=model.cost_b,
            mechanism=mech,
            value_params=model.cpt.value_params(),
            weight_params=model.cpt.weight_params(),
            seed=model.seed,
        )
    except ValueError as exc:
        raise ConfigError(f"{mechanism}: {exc}") from None


def parse_config(text: str) -> tuple[MarketScenario, ConfigModel]:
    """Validate configuration text and return the contract-mechanism scenario.

    The lottery variant is built on demand by :func:`build_scenario`, since
    a population without prosumers has no lottery scale.
    """
    model = parse_model(text)
    return build_scenario(model, "contract"), model


def parse_grid_flag(spec: str) -> tuple[str, GridSection]:
    """``name=start:stop:steps``."""
    try:
        name, rest = spec.split("=", 1)
        start, stop, steps = rest.split(":")
        return name.strip(), GridSection(start=float(start), stop=float(stop), steps=int(steps))
    except (ValueError, ValidationError) as exc:
        raise ConfigError(f"--grid {spec!r}: expected name=start:stop:steps with steps >= 2 ({exc})") from None


def resolve_grids(subcommand: str, model: ConfigModel, overrides: dict[str, GridSection]) -> dict[str, GridSection]:
    allowed = DEFAULT_GRIDS[subcommand]
    merged = {**model.grids, **overrides}
    for name in merged:
        if name not in allowed:
            raise ConfigError(
                f"grids.{name}: not a swept parameter of {subcommand} "
                f"(allowed: {', '.join(allowed) or 'none'})"
            )
    out = {}
    for name, (a, b, n) in allowed.items():
        out[name] = merged.get(name, GridSection(start=a, stop=b, steps=n))
    return out


def manifest_text(model: ConfigModel, subcommand: str) -> str:
    """Resolved configuration, loadable again with ``--config``."""
    data = model.model_dump(by_alias=True, mode="json")
    header = (
        f"# run manifest: prosumer-cpt {subcommand}\n"
        f"# caveat: {ALPHA_CAVEAT}\n"
    )
    return header + yaml.safe_dump(data, sort_keys=True, default_flow_style=False)
