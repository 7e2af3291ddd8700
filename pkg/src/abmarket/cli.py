"""Command-line entry point: ``abmarket <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from . import outputs
from .config import PAPER_PROBABILITIES, SimulationConfig, tomllib
from .decision import Profile
from .errors import ABMarketError, ConfigError
from .experiments import run_hub_vs_periphery, run_sweep
from .market import build_network, run
from .network import degree_distribution, hub, write_network

log = logging.getLogger("abmarket")

# convenience flags and the config key each one sets
_FLAG_KEYS = {
    "n_agents": "n_agents",
    "ba_m": "ba_m",
    "steps": "steps",
    "warmup": "warmup",
    "case": "case_id",
    "algorithm": "algorithm",
    "index_k": "index_k",
    "isolated_fraction": "isolated_fraction",
    "track_agents": "track_agents",
    "hub_profile": "hub_profile_override",
}


def _parse_value(text: str) -> Any:
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def _parse_set(items: Sequence[str]) -> dict[str, Any]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        out[key.strip()] = _parse_value(value.strip())
    return out


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    """``0,3,5`` or ``0-9`` (inclusive) or a mix."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            lo, sep, hi = part.partition("-")
            if sep:
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers or ranges like 0-9, got {text!r}") from None
    return out


def _add_config_args(p: argparse.ArgumentParser, single_p: bool = True) -> None:
    p.add_argument("--config", type=Path, help="flat TOML or JSON configuration file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any configuration key (repeatable)")
    p.add_argument("--n-agents", type=int)
    p.add_argument("--ba-m", type=int)
    p.add_argument("--steps", type=int, help="steps after warm-up")
    p.add_argument("--warmup", type=int)
    p.add_argument("--case", type=int, choices=[1, 2, 3, 4])
    p.add_argument("--algorithm", choices=["compare", "combined_index"])
    p.add_argument("--index-k", type=float)
    p.add_argument("--isolated-fraction", type=float)
    p.add_argument("--track-agents", type=int)
    p.add_argument("--hub-profile", choices=[pr.slug for pr in Profile])
    if single_p:
        p.add_argument("--p", type=float, dest="follow_probability", help="follow probability")
    p.add_argument("--out-root", type=Path,
                   help=f"output root (default ${outputs.OUTPUT_ENV} or ./{outputs.DEFAULT_OUTPUT_ROOT})")


def _config_from_args(args: argparse.Namespace, **extra: Any) -> SimulationConfig:
    overrides: dict[str, Any] = {}
    for flag, key in _FLAG_KEYS.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "follow_probability", None) is not None:
        overrides["follow_probability"] = args.follow_probability
    overrides.update(_parse_set(args.set))
    overrides.update({k: v for k, v in extra.items() if v is not None})
    if args.config is not None:
        return SimulationConfig.from_file(args.config, **overrides)
    return SimulationConfig.from_mapping(overrides)


def _cmd_gen_net(args) -> int:
    cfg = _config_from_args(args, seed=args.seed)
    net = build_network(cfg)
    run_dir = outputs.make_run_dir("gen-net", cfg.to_dict(), args.out_root)
    write_network(net, run_dir / "network.txt")
    deg = net.degrees
    info = {"n": net.n, "edges": net.n_edges, "hub": hub(net), "hub_degree": int(deg[hub(net)]),
            "checksum": net.checksum(), "config": cfg.to_dict()}
    try:
        dd = degree_distribution(net)
        info.update(fitted_exponent=dd.fitted_exponent, fit_r2=dd.fit_r2)
    except ABMarketError:
        pass
    outputs.write_json(run_dir / "network.json", info)
    print(run_dir)
    return 0


def _cmd_run(args) -> int:
    cfg = _config_from_args(args, seed=args.seed)
    out = run(cfg)
    run_dir = outputs.make_run_dir("run", cfg.to_dict(), args.out_root)
    outputs.write_run(out, run_dir)
    if args.plots:
        from .plotting import plot_run_dir

        plot_run_dir(run_dir)
    summary = outputs.summarize(out)
    for slug, s in summary["wealth"].items():
        print(f"{slug:14s} mean wealth {s['mean']:.6g}  sd {s['sd']:.6g}  n {s['count']}")
    if summary["hurst"]:
        print(f"Hurst exponent {summary['hurst']['h']:.4f}")
    print(run_dir)
    return 0


def _cmd_sweep(args) -> int:
    base = _config_from_args(args)
    ps = args.p or list(PAPER_PROBABILITIES)
    hubs = [Profile.parse(h) for h in args.hub_profiles.split(",")]
    result = run_sweep(base, ps, hubs, args.seeds, cases=args.cases, workers=args.workers)
    payload = {"base": base.to_dict(), "p": ps, "hub_profiles": [h.slug for h in hubs],
               "seeds": args.seeds, "cases": args.cases}
    run_dir = outputs.make_run_dir("sweep", payload, args.out_root)
    rows = result.rows()
    outputs.write_csv(run_dir / "sweep.csv", list(rows[0]), (r.values() for r in rows))
    outputs.write_json(run_dir / "summary.json", {**payload, "records": rows,
                                                  "failures": len(result.failures())})
    for case_id, p, h in result.grid_points():
        pts = [r for r in result.records if (r.case_id, r.p, r.hub_profile) == (case_id, p, h) and r.ok]
        means = {pr.slug: sum(r.means[pr] for r in pts) / len(pts) for pr in Profile} if pts else {}
        cells = "  ".join(f"{k} {v:.6g}" for k, v in means.items())
        print(f"case {case_id} p {p:g} hub {h.slug:14s} {cells}")
    print(run_dir)
    return 1 if result.failures() else 0


def _cmd_hub(args) -> int:
    base = _config_from_args(args)
    report = run_hub_vs_periphery(base, args.k, args.seeds)
    records = [
        {"seed": r.seed, "hub": r.hub, "hub_degree": r.hub_degree, "periphery_max_degree": r.periphery_max_degree,
         "hub_distance": r.hub_distance, "periphery_distance": r.periphery_distance,
         "hub_dominates": r.hub_dominates,
         "baseline": {p.slug: v for p, v in r.baseline_means.items()},
         "hub_swap": {p.slug: v for p, v in r.hub_means.items()},
         "periphery_swap": {p.slug: v for p, v in r.periphery_means.items()}}
        for r in report.records
    ]
    payload = {"base": base.to_dict(), "k": args.k, "seeds": args.seeds}
    run_dir = outputs.make_run_dir("hub-experiment", payload, args.out_root)
    outputs.write_json(run_dir / "summary.json",
                       {**payload, "records": records, "hub_dominance_rate": report.hub_dominance_rate})
    for r in report.records:
        print(f"seed {r.seed}: hub distance {r.hub_distance:.6g}  periphery distance {r.periphery_distance:.6g}")
    print(f"hub dominates in {report.hub_dominance_rate:.0%} of seeds")
    print(run_dir)
    return 0


def _cmd_analyze(args) -> int:
    result = outputs.analyze_files(args.index_csv, args.returns, args.agents)
    target = args.out or Path(args.index_csv).with_name("analysis.json")
    outputs.write_json(target, result)
    h = result["hurst"]
    print(f"Hurst exponent {h['h']:.4f} +/- {h['stderr']:.4f} (windows {h['window_range'][0]}-{h['window_range'][1]})")
    return 0


def _cmd_plot(args) -> int:
    from .plotting import plot_run_dir

    written = plot_run_dir(args.run_dir)
    if not written:
        raise ABMarketError(f"nothing to plot in {args.run_dir}")
    for path in written:
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="abmarket", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-net", help="generate and save a trust network")
    _add_config_args(p)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_gen_net)

    p = sub.add_parser("run", help="run one simulation and write its outputs")
    _add_config_args(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--plots", action="store_true", help="also write SVG charts")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="grid over follow probability, hub profile and case")
    _add_config_args(p, single_p=False)
    p.add_argument("--p", type=_float_list, help="comma-separated follow probabilities")
    p.add_argument("--hub-profiles", default="imitator,anti_imitator,random_trader")
    p.add_argument("--cases", type=_int_list)
    p.add_argument("--seeds", type=_int_list, required=True, help="e.g. 0-9 or 1,4,7")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("hub-experiment", help="hub swap versus least-connected swap")
    _add_config_args(p)
    p.add_argument("--k", type=int, default=300, help="number of least-connected agents to rotate")
    p.add_argument("--seeds", type=_int_list, required=True)
    p.set_defaults(func=_cmd_hub)

    p = sub.add_parser("analyze", help="Hurst exponent and histograms from written files")
    p.add_argument("index_csv", type=Path)
    p.add_argument("--returns", type=Path)
    p.add_argument("--agents", type=Path)
    p.add_argument("--out", type=Path, help="analysis.json path (default: next to index.csv)")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("plot", help="SVG charts for a run directory")
    p.add_argument("run_dir", type=Path)
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"abmarket {args.command}: configuration error: {exc}", file=sys.stderr)
        return 2
    except (ABMarketError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"abmarket {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
