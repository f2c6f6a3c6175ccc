"""Behavior policies for normal users and threat models A-F."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Role(str, enum.Enum):
    NORMAL = "normal"
    ATTACKER = "attacker"
    SPY = "spy"

    @property
    def malicious(self) -> bool:
        return self is not Role.NORMAL


class Quality(str, enum.Enum):
    GOOD = "good"
    DEFECTIVE = "defective"


@dataclass(frozen=True)
class ThreatModelSpec:
    """Attack probabilities per malicious role for one threat model.

    ``service_attack`` and ``rating_attack`` map ``Role.ATTACKER`` and
    ``Role.SPY`` to the probability of attacking a non-ally.
    """

    model_id: str
    service_attack: dict[Role, float]
    rating_attack: dict[Role, float]
    collusion: bool
    has_spies: bool

    def service_prob(self, role: Role) -> float:
        return self.service_attack.get(role, 0.0)

    def rating_prob(self, role: Role) -> float:
        return self.rating_attack.get(role, 0.0)

    def allied(self, a: Role, b: Role) -> bool:
        return self.collusion and a.malicious and b.malicious


THREAT_MODELS = ("A", "B", "C", "D", "E", "F")


def threat_model(model_id: str, c: float = 0.5, e: float = 0.5, f: float = 0.5) -> ThreatModelSpec:
    """Attack probabilities for ``model_id``; ``c``, ``e``, ``f`` are camouflage probabilities."""
    for name, value in (("c", c), ("e", e), ("f", f)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must be a probability, got {value}")
    A, S = Role.ATTACKER, Role.SPY
    m = model_id.upper()
    if m == "A":
        return ThreatModelSpec(m, {A: 1.0}, {A: 1.0}, collusion=False, has_spies=False)
    if m == "B":
        return ThreatModelSpec(m, {A: 1.0}, {A: 1.0}, collusion=True, has_spies=False)
    if m == "C":
        return ThreatModelSpec(m, {A: 1.0 - c}, {A: 0.0}, collusion=True, has_spies=False)
    if m == "D":
        return ThreatModelSpec(m, {A: 1.0, S: 0.0}, {A: 0.0, S: 1.0}, collusion=True, has_spies=True)
    if m == "E":
        return ThreatModelSpec(m, {A: 1.0 - c}, {A: 1.0 - e}, collusion=True, has_spies=False)
    if m == "F":
        return ThreatModelSpec(m, {A: 1.0, S: 0.0}, {A: 0.0, S: 1.0 - f}, collusion=True, has_spies=True)
    raise ValueError(f"unknown threat model {model_id!r}; expected one of {', '.join(THREAT_MODELS)}")


@dataclass
class BehaviorContext:
    tick: int
    incubation_period: int
    rng: np.random.Generator

    @property
    def attacking(self) -> bool:
        return self.tick >= self.incubation_period


def _draw(rng: np.random.Generator, prob: float) -> bool:
    # always consume one draw so the stream layout does not depend on prob
    return bool(rng.random() < prob)


def service_quality(seller: Role, buyer: Role, ctx: BehaviorContext, spec: ThreatModelSpec) -> Quality:
    if not seller.malicious or not ctx.attacking:
        return Quality.GOOD
    if spec.allied(seller, buyer):
        return Quality.GOOD
    return Quality.DEFECTIVE if _draw(ctx.rng, spec.service_prob(seller)) else Quality.GOOD


def buyer_rating(buyer: Role, seller: Role, quality: Quality, ctx: BehaviorContext, spec: ThreatModelSpec) -> bool:
    honest = quality is Quality.GOOD
    if not buyer.malicious or not ctx.attacking:
        return honest
    if spec.allied(buyer, seller):
        return True
    if _draw(ctx.rng, spec.rating_prob(buyer)):
        return False
    return honest


def seller_rating(
    seller: Role,
    buyer: Role,
    quality: Quality,
    buyer_rating_value: bool,
    ctx: BehaviorContext,
    spec: ThreatModelSpec,
) -> bool:
    """Satisfaction rating of the buyer; honest sellers punish unfair complaints."""
    honest = not (quality is Quality.GOOD and not buyer_rating_value)
    if not seller.malicious or not ctx.attacking:
        return honest
    if spec.allied(seller, buyer):
        return True
    if _draw(ctx.rng, spec.rating_prob(seller)):
        return False
    return honest
