import itertools

import numpy as np
import pytest

from abmarket.decision import (
    ANTI_MOMENTUM,
    Algorithm,
    DecisionConfig,
    NeighborhoodTally,
    Profile,
    act_on_score,
    combine_compare,
    combine_index,
    combined_score,
    strategy1,
)
from abmarket.errors import InvalidParameterError
from abmarket.signals import Action

B, H, S = Action.BUY, Action.HOLD, Action.SELL
IM, AN, RT = Profile.IMITATOR, Profile.ANTI_IMITATOR, Profile.RANDOM_TRADER
N_MC = 100_000


def within_3_sigma(count, n, p):
    return abs(count / n - p) <= 3 * np.sqrt(max(p * (1 - p), 1e-12) / n)


class Fixed:
    """rng stub returning a fixed uniform."""

    def __init__(self, u):
        self.u = u

    def random(self):
        return self.u


class Counting:
    def __init__(self, rng):
        self.rng, self.calls = rng, 0

    def random(self):
        self.calls += 1
        return self.rng.random()


# oracle: the anti-imitator answer set for every (neighborhood, momentum) pair
ANTI_ORACLE = {
    (B, B): {S},
    (S, S): {B},
    (H, H): {B, S},
    (B, S): {B},
    (S, B): {S},
    (B, H): {B, S},
    (S, H): {B, S},
    (H, B): {H, S},
    (H, S): {H, B},
}


def test_profile_parsing():
    assert Profile.parse("anti-imitator") is AN
    assert Profile.parse("random") is RT
    assert Profile.parse(0) is IM
    with pytest.raises(InvalidParameterError):
        Profile.parse("contrarian")
    assert len(Profile) == 3


def test_algorithm_parsing():
    assert Algorithm.parse("combined-index") is Algorithm.COMBINED_INDEX
    with pytest.raises(InvalidParameterError):
        Algorithm.parse("vote")


def test_decision_config_validation():
    DecisionConfig(0.37, 3, Algorithm.COMPARE)
    with pytest.raises(InvalidParameterError):
        DecisionConfig(1.5)
    with pytest.raises(InvalidParameterError):
        DecisionConfig(0.5, case_id=0)


def test_tally_from_states():
    t = NeighborhoodTally.from_states([1, 1, 0, -1, 1])
    assert t.counts() == (3, 1, 1) and t.degree == 5


# strategy 1


def test_imitator_follows_majority(rng):
    assert strategy1(IM, NeighborhoodTally(12, 1, 7), H, rng) == B


def test_anti_imitator_follows_minority(rng):
    assert strategy1(AN, NeighborhoodTally(12, 1, 7), H, rng) == H


def test_isolated_agent_is_stubborn(rng):
    for prof in Profile:
        assert strategy1(prof, NeighborhoodTally(0, 0, 0), S, rng) == S


@pytest.mark.parametrize(
    "profile,tally,tied",
    [(IM, (4, 4, 1), (B, H)), (IM, (2, 2, 2), (B, H, S)), (AN, (1, 5, 1), (B, S)), (AN, (0, 3, 0), (B, S))],
)
def test_ties_broken_uniformly(profile, tally, tied, rng):
    t = NeighborhoodTally(*tally)
    draws = [strategy1(profile, t, H, rng) for _ in range(30_000)]
    assert set(draws) == set(tied)
    for a in tied:
        assert within_3_sigma(draws.count(a), len(draws), 1 / len(tied))


def test_random_trader_uniform(rng):
    t = NeighborhoodTally(9, 0, 0)
    draws = [strategy1(RT, t, H, rng) for _ in range(30_000)]
    for a in (B, H, S):
        assert within_3_sigma(draws.count(a), len(draws), 1 / 3)


# compare algorithm


@pytest.mark.parametrize("d1,d2", list(itertools.product((B, H, S), repeat=2)))
def test_anti_mapping_all_pairs(d1, d2, rng):
    assert set(ANTI_MOMENTUM[(d1, d2)]) == ANTI_ORACLE[(d1, d2)]
    results = [combine_compare(AN, d1, d2, 1.0, rng) for _ in range(20_000)]
    assert set(results) == ANTI_ORACLE[(d1, d2)]
    if len(ANTI_ORACLE[(d1, d2)]) == 2:
        for a in ANTI_ORACLE[(d1, d2)]:
            assert within_3_sigma(results.count(a), len(results), 0.5)


def test_anti_never_repeats_a_shared_trade_signal(rng):
    for d in (B, S):
        assert all(combine_compare(AN, d, d, 1.0, rng) != d for _ in range(200))


def test_compare_examples(rng):
    assert combine_compare(AN, B, S, 1.0, rng) == B
    assert combine_compare(AN, B, B, 1.0, rng) == S
    for p in (0.0, 0.3, 1.0):
        assert combine_compare(IM, B, B, p, rng) == B


def test_imitator_follows_momentum_with_probability_p(rng):
    hits = sum(combine_compare(IM, B, S, 0.99, rng) == S for _ in range(N_MC))
    assert abs(hits / N_MC - 0.99) <= 0.005
    assert within_3_sigma(hits, N_MC, 0.99)


def test_anti_gate_probability(rng):
    # (B, S) -> B when engaged, else d1 = B too, so use (B, B): S when engaged
    hits = sum(combine_compare(AN, B, B, 0.3, rng) == S for _ in range(N_MC))
    assert within_3_sigma(hits, N_MC, 0.3)


def test_p_zero_is_pure_strategy1(rng):
    for prof, d1, d2 in itertools.product(Profile, (B, H, S), (B, H, S)):
        assert combine_compare(prof, d1, d2, 0.0, rng) == d1


def test_random_trader_keeps_its_own_draw(rng):
    for d1, d2 in itertools.product((B, H, S), repeat=2):
        assert combine_compare(RT, d1, d2, 1.0, rng) == d1


def test_imitator_draws_only_on_disagreement(rng):
    c = Counting(rng)
    combine_compare(IM, B, B, 0.5, c)
    assert c.calls == 0
    combine_compare(IM, B, S, 0.5, c)
    assert c.calls == 1


# combined index


def test_worked_example():
    tally = NeighborhoodTally(6, 3, 1)
    probs = (0.8, 0.1, 0.1)
    assert combined_score(IM, tally, probs, None) == pytest.approx(1.2)
    assert combine_index(IM, tally, probs, Fixed(0.99)) == B
    assert combined_score(AN, tally, probs, None) == pytest.approx(-1.2)
    assert combine_index(AN, tally, probs, Fixed(0.0)) == S


def test_zero_score_holds():
    tally = NeighborhoodTally(2, 0, 2)
    assert combine_index(IM, tally, (0.2, 0.6, 0.2), Fixed(0.0)) == H


def test_isolated_agent_uses_momentum_term_only():
    assert combined_score(IM, NeighborhoodTally(0, 0, 0), (0.6, 0.2, 0.2), None) == pytest.approx(0.4)
    assert combined_score(RT, NeighborhoodTally(0, 0, 0), (0.6, 0.2, 0.2), Fixed(0.9)) == pytest.approx(0.4)


def test_random_trader_noise_range(rng):
    tally = NeighborhoodTally(3, 3, 3)
    s = np.array([combined_score(RT, tally, (0.1, 0.1, 0.8), rng) for _ in range(20_000)])
    assert s.min() >= -1.7 and s.max() < 0.3
    assert abs(s.mean() + 0.7) < 0.02
    assert combined_score(RT, tally, (0.1, 0.1, 0.8), rng, random_noise=False) == pytest.approx(-0.7)


@pytest.mark.parametrize("s", [1.0001, 1.5, 2.0, -1.0001, -2.0])
def test_threshold_deterministic(s, rng):
    expected = B if s > 0 else S
    assert all(act_on_score(s, rng) == expected for _ in range(1000))


@pytest.mark.parametrize("s", [0.05, 0.3, 0.5, 0.75, -0.2, -0.9, 1.0, -1.0])
def test_fractional_score_frequencies(s, rng):
    draws = [act_on_score(s, rng) for _ in range(N_MC)]
    side = B if s > 0 else S
    assert set(draws) <= {side, H}
    assert within_3_sigma(draws.count(side), N_MC, abs(s))
