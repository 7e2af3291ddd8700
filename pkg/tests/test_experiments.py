import numpy as np
import pytest

from abmarket import Profile, build_network, run
from abmarket.analysis import profile_wealth_stats
from abmarket.errors import InsufficientNodesError
from abmarket.experiments import SweepResult, run_hub_vs_periphery, run_sweep, wealth_distance

from conftest import make_config

BASE = make_config(n_agents=200, steps=200, follow_probability=0.9)


def test_sweep_grid_and_pinning():
    res = run_sweep(BASE, [0.01, 0.5, 0.99], list(Profile), seeds=[0, 1])
    assert len(res.records) == 3 * 3 * 2 and not res.failures()
    for seed in (0, 1):
        sums = {r.network_checksum for r in res.records if r.seed == seed}
        assert len(sums) == 1
    assert len(res.grid_points()) == 9
    keys = [r.key() for r in res.records]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)


def test_single_point_equals_plain_run():
    res = run_sweep(BASE, [0.9], [Profile.IMITATOR], seeds=[4])
    rec = res.records[0]
    out = run(BASE.replace(seed=4, hub_profile_override="imitator"))
    stats = profile_wealth_stats(out.profiles, out.wealth)
    for p in Profile:
        assert rec.means[p] == stats[p].mean
    assert rec.hub_wealth == out.wealth[out.hub]


def test_sweep_order_independent_and_parallel():
    a = run_sweep(BASE, [0.99, 0.01], ["random", "anti"], seeds=[3, 2])
    b = run_sweep(BASE, [0.01, 0.99], ["anti", "random"], seeds=[2, 3], workers=2)
    assert [r.key() for r in a.records] == [r.key() for r in b.records]
    for x, y in zip(a.records, b.records):
        assert x.means == y.means and x.hub_wealth == y.hub_wealth


def test_sweep_keeps_failures(monkeypatch):
    import abmarket.experiments as ex

    real = ex.run

    def flaky(cfg, net=None, *a, **k):
        if cfg.follow_probability == 0.5:
            raise RuntimeError("boom")
        return real(cfg, net, *a, **k)

    monkeypatch.setattr(ex, "run", flaky)
    res = run_sweep(BASE, [0.1, 0.5], [Profile.IMITATOR], seeds=[0])
    assert len(res.records) == 2
    (bad,) = res.failures()
    assert bad.p == 0.5 and "boom" in bad.error
    assert res.system_mean(Profile.IMITATOR) == [(0.1, res.records[0].means[Profile.IMITATOR])]


def test_rows_have_all_columns():
    rows = SweepResult(run_sweep(BASE, [0.3], [Profile.IMITATOR], seeds=[0]).records).rows()
    assert {"seed", "case", "p", "hub_profile", "mean_imitator", "hurst", "error"} <= set(rows[0])


def test_hub_vs_periphery_zero_change():
    rep = run_hub_vs_periphery(BASE, k=0, seeds=[0], rotate_hub=False)
    r = rep.records[0]
    assert r.hub_distance == 0.0 and r.periphery_distance == 0.0


def test_hub_vs_periphery_reproducible():
    a = run_hub_vs_periphery(BASE, k=20, seeds=[1, 2])
    b = run_hub_vs_periphery(BASE, k=20, seeds=[1, 2])
    assert [(r.hub_distance, r.periphery_distance) for r in a.records] == \
           [(r.hub_distance, r.periphery_distance) for r in b.records]
    r = a.records[0]
    net = build_network(BASE.replace(seed=1))
    assert r.hub_degree == net.degrees.max()
    assert r.periphery_max_degree <= np.sort(net.degrees)[19]
    assert 0.0 <= a.hub_dominance_rate <= 1.0


def test_hub_vs_periphery_needs_nodes():
    with pytest.raises(InsufficientNodesError):
        run_hub_vs_periphery(BASE, k=500, seeds=[0])


def test_wealth_distance_self_is_zero():
    out = run(BASE)
    assert wealth_distance(out, out) == 0.0
