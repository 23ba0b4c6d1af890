import math

import numpy as np
import pytest

from drivesim.metrics import (
    EpisodeLog,
    cooperation_rate,
    equality,
    own_coin_rate,
    peace,
    social_welfare,
    sustainability,
)


def log_from_totals(totals, horizon=10):
    """Spread per-agent totals uniformly over the episode."""
    totals = np.asarray(totals, dtype=float)
    rewards = np.tile(totals / horizon, (horizon, 1))
    return EpisodeLog(rewards=rewards)


class TestSocialWelfare:
    def test_zero(self):
        assert social_welfare(EpisodeLog(rewards=np.zeros((5, 3)))) == 0.0

    def test_constant_rewards(self):
        assert social_welfare(EpisodeLog(rewards=np.ones((3, 2)))) == 6.0

    def test_ipd_all_cooperate(self):
        assert social_welfare(EpisodeLog(rewards=np.full((150, 2), -1.0))) == -300.0


class TestEquality:
    def test_identical_totals(self):
        assert equality(log_from_totals([3.0, 3.0, 3.0])) == 1.0

    def test_two_agents_one_earns_everything(self):
        assert equality(log_from_totals([5.0, 0.0])) == pytest.approx(0.5)

    def test_three_agents_one_empty(self):
        assert equality(log_from_totals([4.0, 4.0, 0.0])) == pytest.approx(2.0 / 3.0)

    def test_non_positive_total_is_undefined(self):
        assert math.isnan(equality(log_from_totals([0.0, 0.0])))
        assert math.isnan(equality(log_from_totals([-1.0, 0.5])))

    def test_range_for_non_negative_totals(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            totals = rng.uniform(0.0, 5.0, size=rng.integers(2, 6))
            if totals.sum() <= 0:
                continue
            value = equality(log_from_totals(totals))
            assert 0.0 <= value <= 1.0


class TestSustainability:
    def test_single_agent_two_events(self):
        rewards = np.zeros((30, 1))
        rewards[10, 0] = 1.0
        rewards[20, 0] = 1.0
        assert sustainability(EpisodeLog(rewards=rewards)) == 15.0

    def test_all_events_at_step_zero(self):
        rewards = np.zeros((5, 2))
        rewards[0] = 1.0
        assert sustainability(EpisodeLog(rewards=rewards)) == 0.0

    def test_two_agents_averaged(self):
        rewards = np.zeros((30, 2))
        rewards[15, 0] = 1.0
        rewards[5, 1] = 1.0
        assert sustainability(EpisodeLog(rewards=rewards)) == 10.0

    def test_agent_without_positive_rewards_contributes_zero(self):
        rewards = np.zeros((30, 2))
        rewards[20, 0] = 1.0
        rewards[:, 1] = -0.01
        assert sustainability(EpisodeLog(rewards=rewards)) == 10.0


class TestPeace:
    def test_no_tags(self):
        log = EpisodeLog(rewards=np.zeros((10, 4)), frozen=np.zeros((10, 4), dtype=bool))
        assert peace(log) == 4.0

    def test_one_agent_frozen_all_episode(self):
        frozen = np.zeros((10, 12), dtype=bool)
        frozen[:, 3] = True
        assert peace(EpisodeLog(rewards=np.zeros((10, 12)), frozen=frozen)) == 11.0

    def test_single_tag_fraction(self):
        frozen = np.zeros((250, 12), dtype=bool)
        frozen[:25, 0] = True
        log = EpisodeLog(rewards=np.zeros((250, 12)), frozen=frozen)
        assert peace(log) == pytest.approx(11.9)


class TestRates:
    def test_cooperation_rate_extremes(self):
        all_c = EpisodeLog(rewards=np.zeros((150, 2)), joint_actions=np.zeros((150, 2), dtype=int))
        all_d = EpisodeLog(rewards=np.zeros((150, 2)), joint_actions=np.ones((150, 2), dtype=int))
        assert cooperation_rate(all_c) == 1.0
        assert cooperation_rate(all_d) == 0.0

    def test_cooperation_rate_half(self):
        actions = np.ones((150, 2), dtype=int)
        actions[:75] = 0
        log = EpisodeLog(rewards=np.zeros((150, 2)), joint_actions=actions)
        assert cooperation_rate(log) == 0.5

    def test_own_coin_rate(self):
        own = np.zeros((10, 2), dtype=bool)
        other = np.zeros((10, 2), dtype=bool)
        own[:8, 0] = True
        other[8:, 1] = True
        log = EpisodeLog(rewards=np.zeros((10, 2)), collected_own=own, collected_other=other)
        assert own_coin_rate(log) == pytest.approx(0.8)

    def test_own_coin_rate_no_pickups_is_nan(self):
        log = EpisodeLog(
            rewards=np.zeros((10, 2)),
            collected_own=np.zeros((10, 2), dtype=bool),
            collected_other=np.zeros((10, 2), dtype=bool),
        )
        assert math.isnan(own_coin_rate(log))

    def test_scripted_own_only_policy_rate_is_one(self):
        own = np.zeros((10, 2), dtype=bool)
        own[::2, 0] = True
        log = EpisodeLog(
            rewards=np.zeros((10, 2)),
            collected_own=own,
            collected_other=np.zeros((10, 2), dtype=bool),
        )
        assert own_coin_rate(log) == 1.0
