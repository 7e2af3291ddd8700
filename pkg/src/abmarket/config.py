"""Simulation configuration."""

from __future__ import annotations

import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .decision import Algorithm, Profile
from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

PAPER_PROBABILITIES = (0.01, 0.05, 0.30, 0.50, 0.70, 0.95, 0.99)


@dataclass(frozen=True)
class SimulationConfig:
    n_agents: int = 3969  # 63 x 63
    ba_m: int = 8
    isolated_fraction: float = 0.0
    steps: int = 10_000  # after warm-up; 0 builds the world without stepping
    warmup: int = 100
    case_id: int = 1
    follow_probability: float = 0.5
    algorithm: str = "compare"
    index_k: float = 0.1
    init_cash: float = 10_000.0
    init_shares: int = 100
    seed: int = 0
    hub_profile_override: str | None = None
    profile_mix: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)  # imitator, anti, random
    random_noise: bool = True  # random trader's neighborhood term in the combined index
    track_agents: int = 300  # agents with full wealth history; 0 tracks everyone
    table_file: str | None = None

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "profile_mix", tuple(float(x) for x in self.profile_mix))
        except (TypeError, ValueError):
            raise ConfigError("invalid configuration values", ["profile_mix"]) from None
        self.validate()

    def validate(self) -> None:
        bad: list[str] = []

        def check(key: str, test) -> None:
            try:
                ok = bool(test())
            except (TypeError, ValueError):
                ok = False
            if not ok:
                bad.append(key)

        def is_int(x: Any) -> bool:
            return isinstance(x, int) and not isinstance(x, bool)

        check("n_agents", lambda: is_int(self.n_agents) and self.n_agents > 1)
        check("ba_m", lambda: is_int(self.ba_m) and 1 <= self.ba_m < self.n_agents)
        check("isolated_fraction", lambda: 0.0 <= self.isolated_fraction < 1.0)
        check("steps", lambda: is_int(self.steps) and self.steps >= 0)
        check("warmup", lambda: is_int(self.warmup) and self.warmup >= 11)
        check("case_id", lambda: self.case_id in (1, 2, 3, 4))
        check("follow_probability", lambda: 0.0 <= self.follow_probability <= 1.0)
        check("algorithm", lambda: Algorithm.parse(self.algorithm) is not None)
        check("index_k", lambda: math.isfinite(self.index_k) and self.index_k >= 0.0)
        check("init_cash", lambda: math.isfinite(self.init_cash) and self.init_cash >= 0.0)
        check("init_shares", lambda: is_int(self.init_shares) and self.init_shares >= 0)
        check("seed", lambda: is_int(self.seed) and self.seed >= 0)
        check(
            "hub_profile_override",
            lambda: self.hub_profile_override is None or Profile.parse(self.hub_profile_override) is not None,
        )
        check(
            "profile_mix",
            lambda: len(self.profile_mix) == 3
            and all(x >= 0 for x in self.profile_mix)
            and abs(sum(self.profile_mix) - 1.0) < 1e-6,
        )
        check("random_noise", lambda: isinstance(self.random_noise, bool))
        check("track_agents", lambda: is_int(self.track_agents) and self.track_agents >= 0)
        if bad:
            raise ConfigError("invalid configuration values", bad)

    @property
    def total_steps(self) -> int:
        return 0 if self.steps == 0 else self.warmup + self.steps

    @property
    def algorithm_id(self) -> Algorithm:
        return Algorithm.parse(self.algorithm)

    @property
    def hub_profile(self) -> Profile | None:
        return None if self.hub_profile_override is None else Profile.parse(self.hub_profile_override)

    def replace(self, **changes: Any) -> SimulationConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["profile_mix"] = list(self.profile_mix)
        return d

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> SimulationConfig:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError("unknown configuration keys", unknown)
        kwargs = dict(data)
        if "profile_mix" in kwargs:
            kwargs["profile_mix"] = tuple(kwargs["profile_mix"])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_file(cls, path: str | Path, **overrides: Any) -> SimulationConfig:
        path = Path(path)
        text = path.read_text()
        if path.suffix == ".json":
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
        nested = [k for k, v in data.items() if isinstance(v, dict)]
        if nested:
            raise ConfigError("configuration must be flat key = value pairs", nested)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(data)

    def to_toml(self) -> str:
        lines = []
        for key, value in self.to_dict().items():
            if value is None:
                continue
            lines.append(f"{key} = {_toml_value(value)}")
        return "\n".join(lines) + "\n"


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    return repr(value)
