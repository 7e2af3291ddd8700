import numpy as np
from hypothesis import given, strategies as st

from abmarket import rng as R


def test_scalar_and_vector_uniforms_agree():
    keys = R.agent_keys(3, 50)
    for t in (0, 1, 17, 10_099):
        for slot in range(R.N_SLOTS):
            vec = R.uniforms(keys, t, slot)
            scal = [R.uniform(int(k), t, slot) for k in keys]
            assert vec.tolist() == scal


def test_agent_keys_prefix_stable():
    assert np.array_equal(R.agent_keys(9, 40), R.agent_keys(9, 400)[:40])


def test_agent_keys_depend_on_seed():
    assert not np.array_equal(R.agent_keys(1, 10), R.agent_keys(2, 10))


def test_slots_are_distinct_streams():
    keys = R.agent_keys(0, 1000)
    draws = [R.uniforms(keys, 5, s) for s in range(R.N_SLOTS)]
    for i in range(R.N_SLOTS):
        for j in range(i + 1, R.N_SLOTS):
            assert abs(np.corrcoef(draws[i], draws[j])[0, 1]) < 0.15


def test_uniforms_look_uniform():
    u = np.concatenate([R.uniforms(R.agent_keys(4, 2000), t, 1) for t in range(50)])
    assert 0.0 <= u.min() and u.max() < 1.0
    counts, _ = np.histogram(u, bins=10, range=(0, 1))
    expected = len(u) / 10
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    assert chi2 < 27.9  # 99.9% quantile, 9 dof


@given(st.integers(0, 2**63), st.integers(0, 10**6), st.integers(0, R.N_SLOTS - 1))
def test_uniform_range(key, t, slot):
    u = R.uniform(key, t, slot)
    assert 0.0 <= u < 1.0


def test_agent_stream_consumes_slots_in_order():
    s = R.AgentStream(77, 12, [R.SLOT_GATE, R.SLOT_COIN])
    assert s.random() == R.uniform(77, 12, R.SLOT_GATE)
    assert s.random() == R.uniform(77, 12, R.SLOT_COIN)


def test_generators_per_stream_are_independent_and_reproducible():
    a = R.generator(5, R.STREAM_NETWORK).random(5)
    b = R.generator(5, R.STREAM_MARKET).random(5)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, R.generator(5, R.STREAM_NETWORK).random(5))
