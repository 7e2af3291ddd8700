"""Time the Cython kernel against the numpy fallback and check they agree.

    python benchmarks/bench_backends.py [--n-agents 3969] [--steps 1000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from abmarket import SimulationConfig, build_network, run
from abmarket._kernels import available, get_backend


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n-agents", type=int, default=3969)
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    results = {}
    for algorithm in ("compare", "combined_index"):
        cfg = SimulationConfig(n_agents=args.n_agents, steps=args.steps, seed=args.seed,
                               follow_probability=0.99, algorithm=algorithm)
        net = build_network(cfg)
        for name in available():
            be = get_backend(name)
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                out = run(cfg, net, backend=be)
                best = min(best, time.perf_counter() - t0)
            results[(algorithm, name)] = out
            per_step = best / cfg.total_steps * 1e6
            print(f"{algorithm:15s} {name:7s} best of {args.repeat}: {best:8.3f} s  ({per_step:8.1f} us/step)")
        if len(available()) == 2:
            a, b = results[(algorithm, "cython")], results[(algorithm, "python")]
            same = np.array_equal(a.index, b.index) and np.array_equal(a.wealth, b.wealth)
            print(f"{algorithm:15s} backends identical: {same}")


if __name__ == "__main__":
    main()
