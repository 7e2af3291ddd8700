"""Static SVG charts of a finished run directory."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .decision import Profile  # noqa: E402
from .outputs import read_agents_csv, read_index_csv, read_returns_csv  # noqa: E402

# fixed metadata keeps SVG output reproducible
_SVG_META = {"Date": None, "Creator": None}


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return path


def plot_index(index: np.ndarray, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(8, 3.5))
    ax.plot(np.arange(len(index)), index, lw=0.6)
    ax.set_xlabel("step")
    ax.set_ylabel("index")
    return _save(fig, path)


def plot_wealth(profiles: np.ndarray, wealth: np.ndarray, path: Path) -> Path:
    fig, axes = plt.subplots(1, 3, figsize=(10, 3.2), sharey=True)
    for ax, p in zip(axes, Profile):
        w = wealth[profiles == int(p)]
        if len(w):
            ax.hist(w, bins=30)
            ax.set_title(f"{p.slug}  mean {w.mean():.0f}")
        ax.set_xlabel("final wealth")
    axes[0].set_ylabel("agents")
    fig.tight_layout()
    return _save(fig, path)


def plot_returns(returns: dict[Profile, np.ndarray], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 3.5))
    for p, r in returns.items():
        ax.hist(r, bins=60, histtype="step", label=p.slug)
    ax.set_xlabel("per-step wealth return")
    ax.set_ylabel("count")
    ax.set_yscale("log")
    ax.legend()
    return _save(fig, path)


def plot_run_dir(run_dir: str | Path) -> list[Path]:
    """Render whatever charts the files in ``run_dir`` allow."""
    run_dir = Path(run_dir)
    written = []
    if (run_dir / "index.csv").exists():
        written.append(plot_index(read_index_csv(run_dir / "index.csv"), run_dir / "index.svg"))
    if (run_dir / "agents.csv").exists():
        profiles, wealth = read_agents_csv(run_dir / "agents.csv")
        written.append(plot_wealth(profiles, wealth, run_dir / "wealth.svg"))
    if (run_dir / "returns.csv").exists():
        returns = read_returns_csv(run_dir / "returns.csv")
        if returns:
            written.append(plot_returns(returns, run_dir / "returns.svg"))
    return written
