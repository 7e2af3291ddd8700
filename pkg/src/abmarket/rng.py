"""Counter-based random streams.

Every agent owns a 64-bit key derived from the master seed. The uniform used
for a given purpose at a given step is a pure function of
``(key, step, slot)``, so results do not depend on the order in which agents
are evaluated, and both kernel backends reproduce the same draws.

The generator is SplitMix64 evaluated at counter ``step * N_SLOTS + slot + 1``.
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1

# per-step draw slots, one per stochastic purpose
SLOT_NEIGHBOR = 0  # strategy-1 tie break or random-trader pick
SLOT_MOMENTUM = 1  # sampling the momentum decision
SLOT_GATE = 2  # follow-probability gate
SLOT_COIN = 3  # anti-imitator ambiguity coin
SLOT_NOISE = 4  # random-trader neighborhood term (combined index)
SLOT_ACT = 5  # acting on a fractional combined score
N_SLOTS = 6

_INV_2_53 = 1.0 / 9007199254740992.0

# spawn keys of the master seed's children
STREAM_NETWORK = 0
STREAM_MARKET = 1
STREAM_AGENTS = 2


def child_seed(seed: int, stream: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=seed, spawn_key=(stream,))


def generator(seed: int, stream: int) -> np.random.Generator:
    """numpy Generator for one of the master seed's named substreams."""
    return np.random.Generator(np.random.PCG64(child_seed(seed, stream)))


def agent_keys(seed: int, n: int) -> np.ndarray:
    """One 64-bit stream key per agent.

    ``generate_state`` output is prefix-stable, so key ``i`` depends only on
    ``(seed, i)`` and not on ``n``.
    """
    return child_seed(seed, STREAM_AGENTS).generate_state(n, np.uint64)


def counter_offset(t: int, slot: int) -> int:
    return ((t * N_SLOTS + slot + 1) * GOLDEN) & MASK64


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def uniform(key: int, t: int, slot: int) -> float:
    """Scalar uniform in [0, 1) for one agent, step and slot."""
    z = mix64((int(key) + counter_offset(t, slot)) & MASK64)
    return (z >> 11) * _INV_2_53


def uniforms(keys: np.ndarray, t: int, slot: int) -> np.ndarray:
    """Vectorised :func:`uniform` over an array of agent keys."""
    z = keys + np.uint64(counter_offset(t, slot))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53


class AgentStream:
    """Sequential ``random()`` interface over a list of slots for one agent and step.

    Lets the scalar decision functions consume exactly the uniforms a kernel
    would use: ``AgentStream(key, t, [SLOT_GATE, SLOT_COIN]).random()`` yields
    the gate draw, then the coin draw.
    """

    def __init__(self, key: int, t: int, slots: list[int]) -> None:
        self._draws = [uniform(key, t, s) for s in slots]
        self._pos = 0

    def random(self) -> float:
        u = self._draws[self._pos]
        self._pos += 1
        return u
