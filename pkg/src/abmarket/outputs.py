"""Run directories and the CSV / JSON output files."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from .analysis import hurst_rs, interdecile_range, profile_wealth_stats, return_histogram
from .decision import Profile
from .errors import ABMarketError, FitUndefinedError
from .market import SimulationOutput
from .network import degree_distribution

OUTPUT_ENV = "ABMARKET_OUTPUT_DIR"
DEFAULT_OUTPUT_ROOT = "runs"


def sig6(x: Any) -> Any:
    """Round floats to 6 significant digits; other values pass through."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        return float(f"{x:.6g}")
    return x


def fmt6(x: Any) -> str:
    """CSV cell text: floats as %.6g, everything else via str."""
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.6g}"
    return str(x)


def rounded(obj: Any) -> Any:
    if isinstance(obj, Mapping):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [rounded(v) for v in obj.tolist()]
    return sig6(obj)


def output_root(explicit: str | Path | None = None) -> Path:
    if explicit:
        return Path(explicit)
    return Path(os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT_ROOT)


def run_stamp(command: str, payload: Mapping[str, Any]) -> str:
    """Deterministic directory name: command plus a hash of the effective parameters."""
    digest = hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()
    return f"{command}-{digest[:12]}"


def make_run_dir(command: str, payload: Mapping[str, Any], root: str | Path | None = None) -> Path:
    path = output_root(root) / run_stamp(command, payload)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_json(path: Path, data: Mapping[str, Any]) -> None:
    path.write_text(json.dumps(rounded(data), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header: list[str], rows: Iterable[Iterable[Any]]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt6(v) for v in row])


def read_index_csv(path: str | Path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "index" not in reader.fieldnames:
            raise ABMarketError(f"{path}: expected an 'index' column")
        return np.array([float(r["index"]) for r in reader])


def read_returns_csv(path: str | Path) -> dict[Profile, np.ndarray]:
    by_profile: dict[Profile, list[float]] = {p: [] for p in Profile}
    with Path(path).open(newline="") as fh:
        for r in csv.DictReader(fh):
            by_profile[Profile.parse(r["profile"])].append(float(r["r"]))
    return {p: np.array(v) for p, v in by_profile.items() if v}


def read_agents_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    profiles, wealth = [], []
    with Path(path).open(newline="") as fh:
        for r in csv.DictReader(fh):
            profiles.append(int(Profile.parse(r["profile"])))
            wealth.append(float(r["wealth"]))
    return np.array(profiles), np.array(wealth)


def summarize(out: SimulationOutput) -> dict[str, Any]:
    """Everything summary.json holds; independent of the kernel backend."""
    cfg = out.config
    stats = profile_wealth_stats(out.profiles, out.wealth)
    moments = out.return_moments()
    try:
        dd = degree_distribution(out.network)
        fit = {"fitted_exponent": dd.fitted_exponent, "fit_r2": dd.fit_r2}
    except FitUndefinedError:
        fit = {"fitted_exponent": None, "fit_r2": None}
    try:
        hurst = hurst_rs(out.index)
        he = {"h": hurst.h, "stderr": hurst.stderr, "window_range": list(hurst.window_range)}
    except ValueError:
        he = None
    deg = out.degrees
    return {
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "steps_run": out.steps_run,
        "wealth": {p.slug: {"mean": s.mean, "sd": s.sd, "count": s.count} for p, s in stats.items()},
        "returns": {p.slug: {"mean": m, "sd": sd, "count": n} for p, (m, sd, n) in moments.items()},
        "network": {
            "n": out.network.n,
            "edges": out.network.n_edges,
            "max_degree": int(deg.max()) if len(deg) else 0,
            "median_degree": float(np.median(deg)) if len(deg) else 0.0,
            "checksum": out.network.checksum(),
            **fit,
        },
        "hub": {"id": out.hub, "degree": int(deg[out.hub]), "profile": Profile(int(out.profiles[out.hub])).slug,
                "wealth": float(out.wealth[out.hub])},
        "index": {"initial": float(out.index[0]), "final": float(out.index[-1]),
                  "min": float(out.index.min()), "max": float(out.index.max())},
        "hurst": he,
        "trades": {"buys": int(out.buys.sum()), "sells": int(out.sells.sum()),
                   "forced_holds": int(out.forced_holds.sum())},
        "unlisted_patterns": out.unlisted_patterns,
    }


def write_run(out: SimulationOutput, run_dir: Path) -> dict[str, Path]:
    """Write index.csv, agents.csv, returns.csv, summary.json and config.toml."""
    run_dir.mkdir(parents=True, exist_ok=True)
    paths = {name: run_dir / name for name in
             ("index.csv", "agents.csv", "returns.csv", "summary.json", "config.toml")}
    write_csv(paths["index.csv"], ["step", "index"], enumerate(out.index.tolist()))
    slugs = [p.slug for p in Profile]
    write_csv(
        paths["agents.csv"], ["id", "profile", "degree", "cash", "shares", "wealth"],
        ((i, slugs[out.profiles[i]], int(out.degrees[i]), float(out.cash[i]), int(out.shares[i]),
          float(out.wealth[i])) for i in range(len(out.profiles))),
    )
    write_csv(paths["returns.csv"], ["step", "agent_id", "profile", "r"], _return_rows(out, slugs))
    write_json(paths["summary.json"], summarize(out))
    paths["config.toml"].write_text(out.config.to_toml())
    return paths


def _return_rows(out: SimulationOutput, slugs: list[str]):
    w = out.wealth_history
    start = min(out.config.warmup, out.steps_run)
    for t in range(start + 1, len(w)):
        prev, cur = w[t - 1], w[t]
        for j, agent in enumerate(out.tracked.tolist()):
            if prev[j] > 0:
                yield t, agent, slugs[out.profiles[agent]], float((cur[j] - prev[j]) / prev[j])


def analyze_files(index_csv: str | Path, returns_csv: str | Path | None = None,
                  agents_csv: str | Path | None = None) -> dict[str, Any]:
    """Post-hoc analysis of written run files, as stored in analysis.json."""
    index = read_index_csv(index_csv)
    h = hurst_rs(index)
    result: dict[str, Any] = {
        "hurst": {"h": h.h, "stderr": h.stderr, "window_range": list(h.window_range),
                  "h_uncorrected": h.h_uncorrected, "two_slope_gain": h.two_slope_gain},
        "index_length": len(index),
    }
    if returns_csv:
        hist = {}
        pooled = []
        for p, r in read_returns_csv(returns_csv).items():
            pooled.append(r)
            try:
                s = return_histogram(r, p)
            except ValueError:
                continue
            hist[p.slug] = {"mean": s.mean, "sd": s.sd, "n": s.n, "gaussian_r2": s.gaussian_r2,
                            "fit_center": s.fit_center, "fit_width": s.fit_width,
                            "edges": s.edges, "counts": s.counts}
        result["returns"] = hist
        if pooled:
            result["returns_interdecile_range"] = interdecile_range(np.concatenate(pooled))
    if agents_csv:
        profiles, wealth = read_agents_csv(agents_csv)
        result["wealth"] = {p.slug: {"mean": s.mean, "sd": s.sd, "count": s.count}
                            for p, s in profile_wealth_stats(profiles, wealth).items()}
    return result
