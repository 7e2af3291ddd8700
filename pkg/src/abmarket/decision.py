"""Per-agent decision rules combining the neighborhood and momentum strategies.

The scalar functions here are the reference semantics. ``decide_all`` runs the
same rules for a whole population through the selected kernel backend.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError
from .signals import ACTION_ORDER, Action


class Profile(enum.IntEnum):
    IMITATOR = 0
    ANTI_IMITATOR = 1
    RANDOM_TRADER = 2

    @classmethod
    def parse(cls, value: str | int | Profile) -> Profile:
        if isinstance(value, str):
            key = value.strip().upper().replace("-", "_")
            aliases = {"IMITATOR": "IMITATOR", "IMIT": "IMITATOR", "ANTI": "ANTI_IMITATOR",
                       "ANTIIMITATOR": "ANTI_IMITATOR", "ANTI_IMITATOR": "ANTI_IMITATOR",
                       "RANDOM": "RANDOM_TRADER", "RANDOM_TRADER": "RANDOM_TRADER",
                       "RANDOMTRADER": "RANDOM_TRADER"}
            try:
                return cls[aliases[key]]
            except KeyError:
                raise InvalidParameterError(f"unknown profile {value!r}") from None
        return cls(int(value))

    @property
    def slug(self) -> str:
        return {0: "imitator", 1: "anti_imitator", 2: "random_trader"}[int(self)]


# rotation used by the periphery / hub swap experiment
ROTATION = {
    Profile.IMITATOR: Profile.ANTI_IMITATOR,
    Profile.ANTI_IMITATOR: Profile.RANDOM_TRADER,
    Profile.RANDOM_TRADER: Profile.IMITATOR,
}


class Algorithm(enum.IntEnum):
    COMPARE = 0
    COMBINED_INDEX = 1

    @classmethod
    def parse(cls, value: str | int | Algorithm) -> Algorithm:
        if isinstance(value, str):
            key = value.strip().lower().replace("-", "_")
            table = {"compare": cls.COMPARE, "combined_index": cls.COMBINED_INDEX,
                     "combinedindex": cls.COMBINED_INDEX, "index": cls.COMBINED_INDEX}
            if key not in table:
                raise InvalidParameterError(f"unknown algorithm {value!r}")
            return table[key]
        return cls(int(value))


@dataclass(frozen=True)
class NeighborhoodTally:
    buy_count: int
    hold_count: int
    sell_count: int

    @property
    def degree(self) -> int:
        return self.buy_count + self.hold_count + self.sell_count

    def counts(self) -> tuple[int, int, int]:
        return (self.buy_count, self.hold_count, self.sell_count)

    @classmethod
    def from_states(cls, states: Sequence[int]) -> NeighborhoodTally:
        s = np.asarray(states)
        return cls(int(np.sum(s == 1)), int(np.sum(s == 0)), int(np.sum(s == -1)))


@dataclass(frozen=True)
class DecisionConfig:
    follow_probability: float = 0.5
    case_id: int = 1
    algorithm: Algorithm = Algorithm.COMPARE
    random_noise: bool = True

    def __post_init__(self) -> None:
        if not 0.0 <= self.follow_probability <= 1.0:
            raise InvalidParameterError("follow_probability must lie in [0, 1]")
        if self.case_id not in (1, 2, 3, 4):
            raise InvalidParameterError("case_id must be 1..4")


def pick_index(u: float, k: int) -> int:
    """Uniform choice among ``k`` options from one uniform draw."""
    return min(int(u * k), k - 1)


def strategy1(profile: Profile, tally: NeighborhoodTally, prev_state: Action, rng) -> Action:
    """Neighborhood decision: majority for imitators, minority for anti-imitators."""
    if tally.degree == 0:
        return Action(prev_state)
    if profile == Profile.RANDOM_TRADER:
        return ACTION_ORDER[pick_index(rng.random(), 3)]
    counts = tally.counts()
    target = max(counts) if profile == Profile.IMITATOR else min(counts)
    tied = [a for a, c in zip(ACTION_ORDER, counts) if c == target]
    if len(tied) == 1:
        return tied[0]
    return tied[pick_index(rng.random(), len(tied))]


B, H, S = Action.BUY, Action.HOLD, Action.SELL

# (neighborhood, momentum) -> options; two options mean a fair coin, first one on u < 0.5
ANTI_MOMENTUM: dict[tuple[Action, Action], tuple[Action, Action]] = {
    (B, B): (S, S),
    (S, S): (B, B),
    (H, H): (B, S),
    (B, S): (B, B),
    (S, B): (S, S),
    (B, H): (B, S),
    (S, H): (B, S),
    (H, B): (H, S),
    (H, S): (H, B),
}


def anti_momentum(d1: Action, d2: Action, rng) -> Action:
    first, second = ANTI_MOMENTUM[(Action(d1), Action(d2))]
    if first == second:
        return first
    return first if rng.random() < 0.5 else second


def combine_compare(profile: Profile, d1: Action, d2: Action, p: float, rng) -> Action:
    """Choose between the neighborhood (``d1``) and momentum (``d2``) decisions.

    Imitators take ``d2`` with probability ``p`` when the two disagree.
    Anti-imitators, with probability ``p``, answer the momentum signal through
    :data:`ANTI_MOMENTUM`; otherwise they keep ``d1``. Random traders keep
    their own random draw.
    """
    d1, d2 = Action(d1), Action(d2)
    if profile == Profile.RANDOM_TRADER:
        return d1
    if profile == Profile.IMITATOR:
        if d1 == d2:
            return d1
        return d2 if rng.random() < p else d1
    if rng.random() < p:
        return anti_momentum(d1, d2, rng)
    return d1


def combined_score(
    profile: Profile, tally: NeighborhoodTally, probs: Sequence[float], rng, random_noise: bool = True
) -> float:
    deg = tally.degree
    w1 = (tally.buy_count - tally.sell_count) / deg if deg > 0 else 0.0
    w2 = probs[0] - probs[2]
    if profile == Profile.IMITATOR:
        return w1 + w2
    if profile == Profile.ANTI_IMITATOR:
        return -(w1 + w2)
    if deg > 0 and random_noise:
        return (rng.random() * 2.0 - 1.0) + w2
    return 0.0 + w2


def act_on_score(s: float, rng) -> Action:
    if s > 1.0:
        return Action.BUY
    if s < -1.0:
        return Action.SELL
    if s == 0.0:
        return Action.HOLD
    if rng.random() < abs(s):
        return Action.BUY if s > 0 else Action.SELL
    return Action.HOLD


def combine_index(
    profile: Profile, tally: NeighborhoodTally, probs: Sequence[float], rng, random_noise: bool = True
) -> Action:
    """Single-score rule: neighborhood balance plus momentum buy-minus-sell weight.

    Scores above 1 buy, below -1 sell; in between the agent trades in the
    score's direction with probability ``|s|`` and holds otherwise.
    """
    return act_on_score(combined_score(profile, tally, probs, rng, random_noise), rng)


def decide_all(world, config, t: int | None = None) -> np.ndarray:
    """Actions of every agent for step ``t`` (default: the next step), without executing them.

    All tallies read the previous step's states, so the result is independent
    of agent evaluation order.
    """
    from .market import decide_actions

    return decide_actions(world, config, t)
