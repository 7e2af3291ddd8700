"""Scenario orchestration: probability / hub-profile sweeps and the hub-vs-periphery comparison."""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .analysis import hurst_rs, profile_wealth_stats
from .config import SimulationConfig
from .decision import ROTATION, Profile
from .errors import ABMarketError
from .market import SimulationOutput, build_network, run
from .network import TrustNetwork, hub, least_connected

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepRecord:
    seed: int
    p: float
    case_id: int
    hub_profile: Profile
    means: dict[Profile, float] = field(default_factory=dict)
    hub_wealth: float = float("nan")
    hurst: float = float("nan")
    network_checksum: str = ""
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def key(self) -> tuple:
        return (self.case_id, self.p, int(self.hub_profile), self.seed)


@dataclass
class SweepResult:
    records: list[SweepRecord]

    def __post_init__(self) -> None:
        self.records = sorted(self.records, key=SweepRecord.key)

    def failures(self) -> list[SweepRecord]:
        return [r for r in self.records if not r.ok]

    def grid_points(self) -> list[tuple[int, float, Profile]]:
        return sorted({(r.case_id, r.p, r.hub_profile) for r in self.records})

    def system_mean(self, profile: Profile, case_id: int | None = None, hub_profile: Profile | None = None):
        """(p, mean over seeds of the profile's mean wealth), sorted by p."""
        by_p: dict[float, list[float]] = {}
        for r in self.records:
            if not r.ok or (case_id is not None and r.case_id != case_id):
                continue
            if hub_profile is not None and r.hub_profile != hub_profile:
                continue
            by_p.setdefault(r.p, []).append(r.means[profile])
        return [(p, float(np.mean(v))) for p, v in sorted(by_p.items())]

    def rows(self) -> list[dict]:
        out = []
        for r in self.records:
            row = {"seed": r.seed, "case": r.case_id, "p": r.p, "hub_profile": r.hub_profile.slug}
            for prof in Profile:
                row[f"mean_{prof.slug}"] = r.means.get(prof, float("nan"))
            row.update(hub_wealth=r.hub_wealth, hurst=r.hurst, network=r.network_checksum[:16],
                       error=r.error or "")
            out.append(row)
        return out


def _sweep_point(args) -> SweepRecord:
    cfg, checksum_expected = args
    hub_prof = cfg.hub_profile
    try:
        net = build_network(cfg)
        checksum = net.checksum()
        if checksum_expected and checksum != checksum_expected:
            raise ABMarketError("network realization differs between grid points")
        out = run(cfg, net)
        stats = profile_wealth_stats(out.profiles, out.wealth)
        try:
            h = hurst_rs(out.index).h
        except ValueError:
            h = float("nan")
        return SweepRecord(
            cfg.seed, cfg.follow_probability, cfg.case_id, hub_prof,
            {p: s.mean for p, s in stats.items()}, float(out.wealth[out.hub]), h, checksum,
        )
    except Exception as exc:  # noqa: BLE001 - keep the rest of the sweep
        log.warning("sweep point %s failed: %s", (cfg.seed, cfg.follow_probability, hub_prof), exc)
        return SweepRecord(cfg.seed, cfg.follow_probability, cfg.case_id, hub_prof, error=repr(exc))


def run_sweep(
    base: SimulationConfig,
    ps: Sequence[float],
    hub_profiles: Sequence[Profile | str],
    seeds: Iterable[int],
    cases: Sequence[int] | None = None,
    workers: int = 1,
) -> SweepResult:
    """Run every (case, p, hub profile, seed) combination.

    Within one seed all grid points share the network and the profile
    assignment; only the hub's profile and the decision parameters change.
    Failed points are kept as records with ``error`` set.
    """
    hub_profiles = [Profile.parse(h) for h in hub_profiles]
    cases = list(cases) if cases else [base.case_id]
    seeds = list(seeds)
    checksums = {s: build_network(base.replace(seed=s)).checksum() for s in seeds}
    tasks = [
        (base.replace(seed=s, case_id=c, follow_probability=float(p), hub_profile_override=h.slug), checksums[s])
        for s, c, p, h in itertools.product(seeds, cases, ps, hub_profiles)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_sweep_point, tasks))
    else:
        records = [_sweep_point(t) for t in tasks]
    return SweepResult(records)


def wealth_distance(a: SimulationOutput, b: SimulationOutput) -> float:
    """Mean absolute difference of per-profile mean final wealth."""
    sa = profile_wealth_stats(a.profiles, a.wealth)
    sb = profile_wealth_stats(b.profiles, b.wealth)
    common = [p for p in Profile if p in sa and p in sb]
    return float(np.mean([abs(sa[p].mean - sb[p].mean) for p in common]))


@dataclass(frozen=True)
class HubPeripheryRecord:
    seed: int
    hub: int
    hub_degree: int
    periphery_max_degree: int
    baseline_means: dict[Profile, float]
    periphery_means: dict[Profile, float]
    hub_means: dict[Profile, float]
    periphery_distance: float
    hub_distance: float

    @property
    def hub_dominates(self) -> bool:
        return self.hub_distance > self.periphery_distance


@dataclass
class HubPeripheryReport:
    k: int
    records: list[HubPeripheryRecord]

    @property
    def hub_dominance_rate(self) -> float:
        if not self.records:
            return float("nan")
        return sum(r.hub_dominates for r in self.records) / len(self.records)


def rotated(profiles: np.ndarray, ids: Iterable[int]) -> dict[int, Profile]:
    return {int(i): ROTATION[Profile(int(profiles[i]))] for i in ids}


def hub_vs_periphery_seed(base: SimulationConfig, k: int, network: TrustNetwork | None = None,
                          baseline: SimulationOutput | None = None, rotate_hub: bool = True,
                          on_run: Callable[[SimulationOutput], None] | None = None) -> HubPeripheryRecord:
    """One seed of :func:`run_hub_vs_periphery`.

    ``network`` and ``baseline`` may be passed in to reuse earlier work;
    ``on_run`` sees every simulation output this function produces.
    """
    net = network if network is not None else build_network(base)
    periphery = least_connected(net, k)
    base_out = baseline if baseline is not None else run(base, net)
    h = hub(net)
    per_out = run(base, net, rotated(base_out.profiles, periphery))
    hub_out = run(base, net, rotated(base_out.profiles, [h] if rotate_hub else []))
    if on_run is not None:
        for o in ((per_out, hub_out) if baseline is not None else (base_out, per_out, hub_out)):
            on_run(o)

    def means(o):
        return {p: s.mean for p, s in profile_wealth_stats(o.profiles, o.wealth).items()}

    deg = net.degrees
    return HubPeripheryRecord(
        seed=base.seed, hub=h, hub_degree=int(deg[h]),
        periphery_max_degree=int(deg[periphery].max()) if periphery else 0,
        baseline_means=means(base_out), periphery_means=means(per_out), hub_means=means(hub_out),
        periphery_distance=wealth_distance(base_out, per_out),
        hub_distance=wealth_distance(base_out, hub_out),
    )


def run_hub_vs_periphery(base: SimulationConfig, k: int = 300, seeds: Iterable[int] = (0,),
                         rotate_hub: bool = True) -> HubPeripheryReport:
    """Per seed: baseline, ``k`` least-connected agents rotated, hub rotated.

    Rotation is imitator -> anti-imitator -> random trader -> imitator. All
    three runs of a seed share the network, the initial states and every
    agent's random stream.
    """
    return HubPeripheryReport(
        k, [hub_vs_periphery_seed(base.replace(seed=s), k, rotate_hub=rotate_hub) for s in seeds]
    )
