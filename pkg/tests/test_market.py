import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from abmarket import Profile, SimulationConfig, build_network, build_world, run, step
from abmarket.market import INITIAL_INDEX, decide_actions, execute, profile_counts, update_index

from conftest import check_invariants, make_config


def test_invariants_small_run(small_run):
    check_invariants(small_run)
    assert small_run.steps_run == small_run.config.total_steps


@pytest.mark.parametrize("algorithm", ["compare", "combined_index"])
@pytest.mark.parametrize("case_id", [1, 2, 3, 4])
def test_invariants_all_variants(algorithm, case_id):
    out = run(make_config(algorithm=algorithm, case_id=case_id, follow_probability=0.95,
                          isolated_fraction=0.05, seed=case_id))
    check_invariants(out)


def test_budget_pressure_keeps_invariants():
    out = run(make_config(init_cash=150.0, init_shares=1, follow_probability=0.99, seed=3, index_k=0.5))
    check_invariants(out)
    assert out.forced_holds.sum() > 0


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 1), st.sampled_from(["compare", "combined_index"]))
def test_invariants_property(seed, p, algorithm):
    out = run(make_config(n_agents=60, steps=60, seed=seed, follow_probability=p, algorithm=algorithm))
    check_invariants(out)


def test_reproducible(small_config, small_run):
    again = run(small_config)
    for name in ("index", "wealth", "cash", "shares", "states", "wealth_history", "return_sum"):
        np.testing.assert_array_equal(getattr(small_run, name), getattr(again, name))


def test_seed_changes_result(small_config, small_run):
    other = run(small_config.replace(seed=small_config.seed + 1))
    assert not np.array_equal(small_run.index, other.index)


def test_initial_state(small_config):
    w = build_world(small_config)
    assert w.t == 0 and w.index[0] == INITIAL_INDEX
    np.testing.assert_array_equal(w.wealth(), np.full(w.n, 20_000.0))
    assert set(np.unique(w.state)) <= {-1, 0, 1}


def test_profile_thirds():
    for n in (150, 151, 152, 3969):
        counts = profile_counts(n, (1 / 3, 1 / 3, 1 / 3))
        assert sum(counts) == n
        assert all(c in (n // 3, -(-n // 3)) for c in counts)
    w = build_world(make_config(n_agents=152))
    assert sorted(np.bincount(w.profile, minlength=3).tolist()) == [50, 51, 51]


def test_custom_profile_mix():
    assert profile_counts(10, (0.5, 0.5, 0.0)) == [5, 5, 0]


def test_overrides_only_touch_named_agents(small_config):
    net = build_network(small_config)
    base = build_world(small_config, net)
    hub_id = int(np.argmax(net.degrees))
    hubbed = build_world(small_config.replace(hub_profile_override="random"), net)
    diff = np.flatnonzero(base.profile != hubbed.profile)
    assert set(diff.tolist()) <= {hub_id}
    assert hubbed.profile[hub_id] == Profile.RANDOM_TRADER
    over = build_world(small_config, net, {3: Profile.ANTI_IMITATOR, 7: "imitator"})
    assert over.profile[3] == 1 and over.profile[7] == 0
    assert set(np.flatnonzero(base.profile != over.profile).tolist()) <= {3, 7}
    np.testing.assert_array_equal(base.state, over.state)
    np.testing.assert_array_equal(base.keys, over.keys)


def test_steps_zero_does_not_step():
    out = run(make_config(steps=0))
    assert out.steps_run == 0 and len(out.index) == 1
    np.testing.assert_array_equal(out.wealth, np.full(out.config.n_agents, 20_000.0))


def test_step_by_step_matches_run(small_config, small_run):
    w = build_world(small_config)
    for _ in range(small_config.total_steps):
        rep = step(w)
        assert rep.executed_buys + rep.executed_sells + rep.holds == w.n
    np.testing.assert_array_equal(w.index[: w.t + 1], small_run.index)
    np.testing.assert_array_equal(w.wealth(), small_run.wealth)


def test_decide_does_not_mutate(small_config):
    w = build_world(small_config)
    w.advance(120)
    before = (w.state.copy(), w.cash.copy(), w.shares.copy())
    a1 = decide_actions(w)
    a2 = decide_actions(w)
    np.testing.assert_array_equal(a1, a2)
    for x, y in zip(before, (w.state, w.cash, w.shares)):
        np.testing.assert_array_equal(x, y)


def test_execute_constraints(small_config):
    w = build_world(small_config)
    w.cash[:] = 50.0  # cannot afford 100
    w.shares[:4] = 0
    actions = np.zeros(w.n, dtype=np.int64)
    actions[:2] = -1  # no inventory: forced holds
    actions[2:10] = 1  # no cash: forced holds
    actions[10:15] = -1  # valid sells
    rep = execute(w, actions)
    assert (rep.executed_buys, rep.executed_sells, rep.forced_holds) == (0, 5, 10)
    assert rep.net == -5
    np.testing.assert_array_equal(w.state[:10], 0)
    np.testing.assert_array_equal(w.state[10:15], -1)
    np.testing.assert_array_equal(w.cash[10:15], 150.0)


def test_execute_buys(small_config):
    w = build_world(small_config)
    actions = np.ones(w.n, dtype=np.int64)
    rep = execute(w, actions, index=120.0)
    assert rep.executed_buys == w.n and rep.forced_holds == 0
    np.testing.assert_array_equal(w.cash, 10_000.0 - 120.0)
    np.testing.assert_array_equal(w.shares, 101)


def test_index_update_rule():
    assert update_index(100.0, 0, 100, 0.1) == 100.0
    assert update_index(100.0, 50, 100, 0.1) == pytest.approx(105.0)
    assert update_index(100.0, -100, 100, 0.1) == pytest.approx(90.0)
    assert update_index(100.0, 100, 100, 10.0) == pytest.approx(150.0)  # clamped
    assert update_index(100.0, -100, 100, 10.0) == pytest.approx(50.0)


def test_return_moments_match_tracked_history(small_run):
    # every agent tracked in the small fixture
    for prof, (mean, sd, n) in small_run.return_moments().items():
        r = small_run.tracked_returns(prof)
        assert len(r) == n
        assert mean == pytest.approx(r.mean(), rel=1e-9, abs=1e-15)
        assert sd == pytest.approx(r.std(), rel=1e-6)


def test_agent_snapshot(small_run, small_config):
    w = build_world(small_config)
    w.advance(small_config.total_steps)
    a = w.agent(5)
    assert a.wealth(float(w.index[w.t])) == pytest.approx(small_run.wealth[5])
    assert len(a.wealth_history) == w.t + 1


def test_isolated_agents_stay_put_during_warmup():
    cfg = make_config(isolated_fraction=0.2, steps=0)
    w = build_world(cfg)
    iso = np.flatnonzero(w.network.degrees == 0)
    start = w.state[iso].copy()
    for _ in range(cfg.warmup):
        a = decide_actions(w)
        np.testing.assert_array_equal(a[iso], w.state[iso])
        step(w)
        # executed state may differ only if the order was infeasible
        assert np.all((w.state[iso] == start) | (w.state[iso] == 0))
        start = w.state[iso].copy()


def test_world_rejects_mismatched_network(small_config):
    net = build_network(small_config.replace(n_agents=100))
    with pytest.raises(ValueError):
        build_world(small_config, net)
