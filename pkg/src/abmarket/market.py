"""Order execution, index dynamics and wealth accounting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import _kernels
from . import rng as rngmod
from .config import SimulationConfig
from .decision import ANTI_MOMENTUM, Profile
from .network import TrustNetwork, generate_ba, hub
from .signals import Action, ProbabilityTable, builtin_table, load_table, row_lookup

INITIAL_INDEX = 100.0


@dataclass
class Agent:
    """Snapshot of one investor."""

    id: int
    profile: Profile
    state: Action
    cash: float
    shares: int
    wealth_history: list[float] = field(default_factory=list)

    def wealth(self, index: float) -> float:
        return self.cash + self.shares * index


@dataclass
class MarketState:
    index: float
    history: np.ndarray
    t: int


@dataclass(frozen=True)
class ExecutionReport:
    executed_buys: int
    executed_sells: int
    holds: int
    forced_holds: int

    @property
    def net(self) -> int:
        return self.executed_buys - self.executed_sells


def _anti_array() -> np.ndarray:
    anti = np.zeros((3, 3, 2), dtype=np.int64)
    for (d1, d2), (a, b) in ANTI_MOMENTUM.items():
        anti[1 - d1, 1 - d2] = (a, b)
    return anti


_ANTI = _anti_array()
_LUT, _UNLISTED = row_lookup()
_UNLISTED = _UNLISTED.astype(np.int64)


def profile_counts(n: int, mix) -> list[int]:
    """Largest-remainder split of ``n`` agents over the profile mix."""
    raw = [n * w for w in mix]
    counts = [int(np.floor(x)) for x in raw]
    order = sorted(range(3), key=lambda j: (-(raw[j] - counts[j]), j))
    for j in order[: n - sum(counts)]:
        counts[j] += 1
    return counts


class World:
    """Mutable state of one simulation, stored as per-agent arrays."""

    def __init__(
        self,
        config: SimulationConfig,
        network: TrustNetwork,
        profile: np.ndarray,
        state: np.ndarray,
        tracked: np.ndarray,
        table: ProbabilityTable,
        backend=None,
    ) -> None:
        n = config.n_agents
        if network.n != n:
            raise ValueError(f"network has {network.n} nodes, config expects {n}")
        self.config = config
        self.network = network
        self.backend = backend or _kernels.backend
        self.table = table
        self._table_arr = np.ascontiguousarray(table.as_array())
        self.profile = np.ascontiguousarray(profile, dtype=np.int64)
        self.state = np.ascontiguousarray(state, dtype=np.int64)
        self.cash = np.full(n, float(config.init_cash))
        self.shares = np.full(n, int(config.init_shares), dtype=np.int64)
        self.keys = rngmod.agent_keys(config.seed, n)
        self.tracked = np.ascontiguousarray(tracked, dtype=np.int64)
        self.t = 0
        cap = max(config.total_steps, 16) + 1
        self.index = np.zeros(cap)
        self.index[0] = INITIAL_INDEX
        self.wealth_hist = np.zeros((cap, len(self.tracked)))
        self.prev_wealth = self.cash + self.shares * INITIAL_INDEX
        self.wealth_hist[0] = self.prev_wealth[self.tracked]
        self.initial_wealth = self.prev_wealth.copy()
        self.ret_sum = np.zeros(3)
        self.ret_sq = np.zeros(3)
        self.ret_n = np.zeros(3, dtype=np.int64)
        self.buys = np.zeros(cap, dtype=np.int64)
        self.sells = np.zeros(cap, dtype=np.int64)
        self.forced = np.zeros(cap, dtype=np.int64)
        self.total_shares = np.zeros(cap, dtype=np.int64)
        self.total_shares[0] = self.shares.sum()
        self.min_shares = np.zeros(cap, dtype=np.int64)
        self.min_shares[0] = self.shares.min(initial=0) if n else 0
        self.min_cash = np.zeros(cap)
        self.min_cash[0] = self.cash.min(initial=0.0) if n else 0.0
        self.diag = np.zeros(1, dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self.profile)

    @property
    def market_state(self) -> MarketState:
        return MarketState(float(self.index[self.t]), self.index[: self.t + 1].copy(), self.t)

    def wealth(self) -> np.ndarray:
        return self.cash + self.shares * self.index[self.t]

    def agent(self, i: int) -> Agent:
        hist: list[float] = []
        where = np.flatnonzero(self.tracked == i)
        if len(where):
            hist = self.wealth_hist[: self.t + 1, where[0]].tolist()
        return Agent(
            i, Profile(int(self.profile[i])), Action(int(self.state[i])),
            float(self.cash[i]), int(self.shares[i]), hist,
        )

    def _ensure_capacity(self, t: int) -> None:
        cap = len(self.index)
        if t < cap:
            return
        new = max(2 * cap, t + 1)
        for name in ("index", "buys", "sells", "forced", "total_shares", "min_shares", "min_cash"):
            old = getattr(self, name)
            grown = np.zeros(new, dtype=old.dtype)
            grown[:cap] = old
            setattr(self, name, grown)
        grown = np.zeros((new, self.wealth_hist.shape[1]))
        grown[:cap] = self.wealth_hist
        self.wealth_hist = grown

    def kernel_args(self) -> dict:
        c = self.config
        return dict(
            indptr=self.network.indptr, indices=self.network.indices, profile=self.profile,
            keys=self.keys, warmup=c.warmup, table=self._table_arr, lut=_LUT,
            unlisted=_UNLISTED, anti=_ANTI, p=float(c.follow_probability),
            algorithm=int(c.algorithm_id), random_noise=int(bool(c.random_noise)),
        )

    def advance(self, n_steps: int) -> None:
        """Run ``n_steps`` synchronous steps through the kernel."""
        if n_steps <= 0:
            return
        t1 = self.t + n_steps
        self._ensure_capacity(t1)
        a = self.kernel_args()
        self.backend.advance(
            a["indptr"], a["indices"], a["profile"], self.state, self.cash, self.shares, a["keys"],
            self.index, self.t, t1, a["warmup"], a["table"], a["lut"], a["unlisted"], a["anti"],
            a["p"], a["algorithm"], a["random_noise"], float(self.config.index_k),
            self.tracked, self.wealth_hist, self.prev_wealth, self.ret_sum, self.ret_sq, self.ret_n,
            self.buys, self.sells, self.forced, self.total_shares, self.min_shares, self.min_cash,
            self.diag,
        )
        self.t = t1


def _load_table(config: SimulationConfig) -> ProbabilityTable:
    if config.table_file:
        return load_table(config.table_file, config.case_id)
    return builtin_table(config.case_id)


def build_network(config: SimulationConfig) -> TrustNetwork:
    return generate_ba(
        config.n_agents, config.ba_m, rngmod.generator(config.seed, rngmod.STREAM_NETWORK),
        isolated_fraction=config.isolated_fraction,
    )


def build_world(
    config: SimulationConfig,
    network: TrustNetwork | None = None,
    profile_overrides: Mapping[int, Profile] | None = None,
    backend=None,
) -> World:
    """Network, profiles (shuffled thirds by default), random initial states and endowments.

    Everything is derived from ``config.seed``; the hub override and
    ``profile_overrides`` are applied last, so variants of one seed differ
    only in the overridden agents.
    """
    if network is None:
        network = build_network(config)
    n = config.n_agents
    gen = rngmod.generator(config.seed, rngmod.STREAM_MARKET)
    counts = profile_counts(n, config.profile_mix)
    profile = gen.permutation(np.repeat(np.arange(3, dtype=np.int64), counts))
    state = gen.integers(-1, 2, size=n).astype(np.int64)
    if config.track_agents == 0 or config.track_agents >= n:
        tracked = np.arange(n)
    else:
        tracked = np.sort(gen.choice(n, size=config.track_agents, replace=False))
    if config.hub_profile is not None:
        profile[hub(network)] = int(config.hub_profile)
    for agent_id, prof in (profile_overrides or {}).items():
        profile[int(agent_id)] = int(Profile.parse(prof))
    return World(config, network, profile, state, tracked, _load_table(config), backend)


def execute(world: World, actions: np.ndarray, index: float | None = None) -> ExecutionReport:
    """Apply one-share orders at ``index`` under the cash and inventory limits.

    Infeasible orders become forced holds; every agent's state is set to the
    action actually executed.
    """
    price = float(world.index[world.t] if index is None else index)
    actions = np.asarray(actions, dtype=np.int64)
    nb, ns, nf = _kernels._fallback.execute_orders(actions, world.cash, world.shares, world.state, price)
    return ExecutionReport(nb, ns, world.n - nb - ns, nf)


def update_index(index: float, net: int, n: int, k: float) -> float:
    """Multiplicative index move ``index * (1 + clamp(k * net / n, -0.5, 0.5))``."""
    return _kernels._fallback.next_index(float(index), int(net), int(n), float(k))


def decide_actions(world: World, config: SimulationConfig | None = None, t: int | None = None) -> np.ndarray:
    if config is not None and config is not world.config:
        raise ValueError("world was built from a different config")
    t = world.t + 1 if t is None else t
    a = world.kernel_args()
    out = np.empty(world.n, dtype=np.int64)
    world.backend.decide(
        a["indptr"], a["indices"], a["profile"], world.state, a["keys"], world.index, t,
        a["warmup"], a["table"], a["lut"], a["unlisted"], a["anti"], a["p"], a["algorithm"],
        a["random_noise"], out, world.diag,
    )
    return out


def step(world: World) -> ExecutionReport:
    """One synchronous step: decide, execute, move the index, book wealth."""
    world.advance(1)
    t = world.t
    nb, ns, nf = int(world.buys[t]), int(world.sells[t]), int(world.forced[t])
    return ExecutionReport(nb, ns, world.n - nb - ns, nf)


@dataclass
class SimulationOutput:
    config: SimulationConfig
    network: TrustNetwork
    hub: int
    index: np.ndarray
    profiles: np.ndarray
    degrees: np.ndarray
    cash: np.ndarray
    shares: np.ndarray
    states: np.ndarray
    wealth: np.ndarray
    initial_wealth: np.ndarray
    tracked: np.ndarray
    wealth_history: np.ndarray  # (steps + 1, len(tracked))
    buys: np.ndarray
    sells: np.ndarray
    forced_holds: np.ndarray
    total_shares: np.ndarray
    min_shares: np.ndarray
    min_cash: np.ndarray
    return_sum: np.ndarray
    return_sumsq: np.ndarray
    return_count: np.ndarray
    unlisted_patterns: int
    backend: str

    @property
    def steps_run(self) -> int:
        return len(self.index) - 1

    def return_moments(self) -> dict[Profile, tuple[float, float, int]]:
        """Pooled per-step wealth return (mean, sd, count) per profile, all agents, after warm-up."""
        out = {}
        for p in Profile:
            n = int(self.return_count[p])
            if n == 0:
                continue
            mean = self.return_sum[p] / n
            var = max(self.return_sumsq[p] / n - mean * mean, 0.0)
            out[p] = (float(mean), float(np.sqrt(var)), n)
        return out

    def tracked_returns(self, profile: Profile | None = None, post_warmup: bool = True) -> np.ndarray:
        """Per-step wealth returns of tracked agents, flattened (step-major)."""
        w = self.wealth_history
        start = min(self.config.warmup, self.steps_run) if post_warmup else 0
        prev, cur = w[start:-1], w[start + 1 :]
        cols = np.ones(len(self.tracked), dtype=bool)
        if profile is not None:
            cols = self.profiles[self.tracked] == int(profile)
        prev, cur = prev[:, cols], cur[:, cols]
        ok = prev > 0
        return ((cur[ok] - prev[ok]) / prev[ok]).ravel()


def run(
    config: SimulationConfig,
    network: TrustNetwork | None = None,
    profile_overrides: Mapping[int, Profile] | None = None,
    backend=None,
) -> SimulationOutput:
    """Build a world from ``config`` and run warm-up plus main phase."""
    world = build_world(config, network, profile_overrides, backend)
    world.advance(config.total_steps)
    T = world.t
    return SimulationOutput(
        config=config,
        network=world.network,
        hub=hub(world.network),
        index=world.index[: T + 1].copy(),
        profiles=world.profile.copy(),
        degrees=world.network.degrees.copy(),
        cash=world.cash.copy(),
        shares=world.shares.copy(),
        states=world.state.copy(),
        wealth=world.wealth(),
        initial_wealth=world.initial_wealth,
        tracked=world.tracked.copy(),
        wealth_history=world.wealth_hist[: T + 1].copy(),
        buys=world.buys[: T + 1].copy(),
        sells=world.sells[: T + 1].copy(),
        forced_holds=world.forced[: T + 1].copy(),
        total_shares=world.total_shares[: T + 1].copy(),
        min_shares=world.min_shares[: T + 1].copy(),
        min_cash=world.min_cash[: T + 1].copy(),
        return_sum=world.ret_sum.copy(),
        return_sumsq=world.ret_sq.copy(),
        return_count=world.ret_n.copy(),
        unlisted_patterns=int(world.diag[0]),
        backend=world.backend.NAME,
    )
