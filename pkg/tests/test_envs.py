import numpy as np
import pytest

from drivesim.envs import CoinGame, HarvestCommons, IteratedPD
from drivesim.envs.harvest import TAG_FREEZE_STEPS, parse_map
from drivesim.envs.matrix_probe import coin2_expected_matrix, harvest2_expected_matrix
from drivesim.games import GameClass, classify


def rollout(env, actions_fn, seed=0, episodes=1):
    """Collect (rewards, flags) arrays for determinism comparisons."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(episodes):
        obs = env.reset(rng)
        for _ in range(env.horizon):
            step = env.step(actions_fn(rng), rng)
            out.append(step.rewards.copy())
    return np.array(out)


class TestIPD:
    def test_initial_observation_is_zero(self):
        env = IteratedPD()
        obs = env.reset(np.random.default_rng(0))
        assert np.all(obs == 0.0)

    def test_payoff_table(self):
        env = IteratedPD(horizon=10)
        rng = np.random.default_rng(0)
        env.reset(rng)
        assert env.step([0, 0], rng).rewards.tolist() == [-1.0, -1.0]
        assert env.step([1, 0], rng).rewards.tolist() == [0.0, -3.0]
        assert env.step([0, 1], rng).rewards.tolist() == [-3.0, 0.0]
        assert env.step([1, 1], rng).rewards.tolist() == [-2.0, -2.0]

    def test_observation_encodes_previous_joint_action(self):
        env = IteratedPD(horizon=5)
        rng = np.random.default_rng(0)
        env.reset(rng)
        step = env.step([1, 0], rng)
        assert step.observations[0].tolist() == [0, 1, 1, 0]  # own D, other C
        assert step.observations[1].tolist() == [1, 0, 0, 1]

    def test_neighborhood_is_other_agent(self):
        assert IteratedPD().neighborhoods() == [{1}, {0}]

    def test_episode_length_and_terminal(self):
        env = IteratedPD(horizon=3)
        rng = np.random.default_rng(0)
        env.reset(rng)
        flags = [env.step([0, 0], rng).terminal for _ in range(3)]
        assert flags == [False, False, True]
        with pytest.raises(RuntimeError):
            env.step([0, 0], rng)

    def test_action_range_checked(self):
        env = IteratedPD()
        rng = np.random.default_rng(0)
        env.reset(rng)
        with pytest.raises(ValueError):
            env.step([0, 2], rng)


class TestCoin:
    def test_reset_places_one_coin_off_agents(self):
        env = CoinGame(2)
        rng = np.random.default_rng(1)
        for _ in range(20):
            env.reset(rng)
            assert env.coin_color in (0, 1)
            for pos in env.positions:
                assert tuple(pos) != env.coin_pos

    def test_determinism(self):
        actions = lambda rng: rng.integers(0, 4, 2)
        a = rollout(CoinGame(2), actions, seed=7, episodes=3)
        b = rollout(CoinGame(2), actions, seed=7, episodes=3)
        assert np.array_equal(a, b)

    def test_per_step_total_reward_in_allowed_set(self):
        env = CoinGame(2)
        rng = np.random.default_rng(2)
        env.reset(rng)
        for _ in range(600):
            step = env.step(rng.integers(0, 4, 2), rng)
            assert step.rewards.sum() in (0.0, 1.0, -1.0)
            if step.terminal:
                env.reset(rng)

    def test_own_pickup_rewards_only_collector(self):
        env = CoinGame(2)
        rng = np.random.default_rng(3)
        env.reset(rng)
        # steer agent 0 onto the coin while it owns the coin color
        for _ in range(3000):
            if env.coin_color == 0:
                dr = env.coin_pos[0] - env.positions[0][0]
                dc = env.coin_pos[1] - env.positions[0][1]
                if abs(dr) + abs(dc) == 1:
                    a0 = 0 if dr == -1 else 1 if dr == 1 else 2 if dc == -1 else 3
                    step = env.step([a0, _opposite_move(env, 1)], rng)
                    if step.collected_own[0]:
                        assert step.rewards[0] == 1.0 and step.rewards[1] == 0.0
                        return
            step = env.step(rng.integers(0, 4, 2), rng)
            if step.terminal:
                env.reset(rng)
        pytest.fail("never observed an own-color pickup")

    def test_mismatch_penalizes_matching_agent(self):
        env = CoinGame(2)
        rng = np.random.default_rng(4)
        env.reset(rng)
        for _ in range(5000):
            step = env.step(rng.integers(0, 4, 2), rng)
            picked = step.collected_other
            if picked.any():
                collector = int(np.argmax(picked))
                assert step.rewards[collector] == pytest.approx(1.0)
                assert step.rewards[1 - collector] == pytest.approx(-2.0)
                return
            if step.terminal:
                env.reset(rng)
        pytest.fail("never observed a mismatched pickup")

    def test_coin4_penalizes_unique_matching_agent(self):
        env = CoinGame(4)
        rng = np.random.default_rng(5)
        env.reset(rng)
        for _ in range(20000):
            color_before = env.coin_color
            step = env.step(rng.integers(0, 4, 4), rng)
            if step.collected_other.any():
                collector = int(np.argmax(step.collected_other))
                victim = color_before
                assert victim != collector
                assert step.rewards[victim] == pytest.approx(-2.0)
                others = set(range(4)) - {victim, collector}
                assert all(step.rewards[j] == 0.0 for j in others)
                return
            if step.terminal:
                env.reset(rng)
        pytest.fail("never observed a mismatched pickup")

    def test_out_of_bounds_is_noop(self):
        env = CoinGame(2)
        rng = np.random.default_rng(6)
        env.reset(rng)
        env.positions[0] = (0, 0)
        before = env.positions[0].copy()
        env.step([0, 3], rng)  # agent 0 moves north off-grid
        assert np.array_equal(env.positions[0], before)

    def test_observation_encoding(self):
        env = CoinGame(2)
        rng = np.random.default_rng(7)
        obs = env.reset(rng)
        assert obs.shape == (2, 36)
        planes = obs[0].reshape(4, 9)
        assert planes[0].sum() == 1.0  # self
        assert planes[1].sum() == 1.0  # other agent
        same, other = planes[2].sum(), planes[3].sum()
        assert (same, other) in ((1.0, 0.0), (0.0, 1.0))

    def test_neighborhoods_full_complement(self):
        assert CoinGame(4).neighborhoods()[2] == {0, 1, 3}


def _opposite_move(env, agent):
    # any legal move away from the coin for the spoiler agent
    r, c = env.positions[agent]
    return 0 if r > 0 else 1


class TestHarvest:
    def test_map_parsing_rejects_bad_chars(self):
        with pytest.raises(ValueError):
            parse_map("..x\n...\n")
        with pytest.raises(ValueError):
            parse_map("..\n...\n")

    def test_determinism(self):
        actions = lambda rng: rng.integers(0, 9, 12)
        a = rollout(HarvestCommons(12, horizon=60), actions, seed=8)
        b = rollout(HarvestCommons(12, horizon=60), actions, seed=8)
        assert np.array_equal(a, b)

    def test_step_penalty_applies_to_everyone(self):
        env = HarvestCommons(3, horizon=10)
        rng = np.random.default_rng(9)
        env.reset(rng)
        step = env.step([0, 0, 0], rng)
        assert np.all(step.rewards <= -0.01 + 1.0 + 1e-12)
        assert np.all((step.rewards == -0.01) | (step.rewards == 0.99))

    def test_apples_never_return_after_depletion(self):
        env = HarvestCommons(2, horizon=400, map_text="@.\n..\n")
        rng = np.random.default_rng(10)
        env.reset(rng)
        seen_zero = False
        for _ in range(400):
            step = env.step(rng.integers(0, 9, 2), rng)
            if env.apple_count == 0:
                seen_zero = True
            if seen_zero:
                assert env.apple_count == 0
        assert seen_zero

    def test_tagged_agent_frozen_exactly_25_steps(self):
        env = HarvestCommons(2, horizon=60, map_text="....\n....\n....\n")
        rng = np.random.default_rng(11)
        env.reset(rng)
        env.positions[0] = (0, 0)
        env.positions[1] = (0, 2)  # inside the eastward beam of agent 0
        env.step([8, 0], rng)  # agent 0 tags east
        frozen_steps = 0
        for _ in range(30):
            before = env.positions[1].copy()
            step = env.step([0, 4], rng)  # agent 1 tries to move east
            if step.frozen[1]:
                assert np.array_equal(env.positions[1], before)
                frozen_steps += 1
            else:
                break
        assert frozen_steps == TAG_FREEZE_STEPS

    def test_tagging_yields_no_reward(self):
        env = HarvestCommons(2, horizon=10, map_text="....\n....\n....\n")
        rng = np.random.default_rng(12)
        env.reset(rng)
        env.positions[0] = (0, 0)
        env.positions[1] = (0, 2)
        step = env.step([8, 0], rng)
        assert step.rewards.tolist() == [-0.01, -0.01]

    def test_out_of_bounds_and_wall_moves_are_noop(self):
        env = HarvestCommons(2, horizon=10, map_text="#..\n...\n...\n")
        rng = np.random.default_rng(13)
        env.reset(rng)
        env.positions[0] = (0, 1)
        env.step([3, 0], rng)  # west into the wall
        assert tuple(env.positions[0]) == (0, 1)
        env.step([1, 0], rng)  # north off the map
        assert tuple(env.positions[0]) == (0, 1)

    def test_neighborhoods_are_symmetric_7x7(self):
        env = HarvestCommons(3, horizon=10)
        rng = np.random.default_rng(14)
        env.reset(rng)
        env.positions[0] = (0, 0)
        env.positions[1] = (0, 3)  # within Chebyshev distance 3
        env.positions[2] = (8, 17)  # far away
        nbrs = env.neighborhoods()
        assert 1 in nbrs[0] and 0 in nbrs[1]
        assert 2 not in nbrs[0] and 0 not in nbrs[2]

    def test_observation_shape_and_wall_padding(self):
        env = HarvestCommons(2, horizon=10, map_text="...\n...\n...\n")
        rng = np.random.default_rng(15)
        env.reset(rng)
        env.positions[0] = (0, 0)
        obs = env._observations()
        walls = obs[0][2 * 49 :].reshape(7, 7)
        assert walls[0, 0] == 1.0  # outside the map reads as wall
        assert walls[3, 3] == 0.0

    def test_regrowth_depends_on_local_density(self):
        env = HarvestCommons(2, horizon=10, map_text="@@@@@@\n@@@@@@\n......\n")
        rng = np.random.default_rng(16)
        env.reset(rng)
        # eat one apple in the middle of a dense field: it should often return
        env.apples[0, 2] = False
        regrew = 0
        for _ in range(2000):
            env._regrow(rng)
            if env.apples[0, 2]:
                regrew += 1
                env.apples[0, 2] = False
        assert regrew > 50  # k >= 6 neighbors -> p = 0.1 per step


@pytest.mark.slow
class TestExpectedMatrices:
    def test_coin2_matches_reference_values(self):
        m, pickups = coin2_expected_matrix(np.random.default_rng(0), min_pickups=100_000)
        assert pickups >= 100_000
        assert m.reward == pytest.approx(0.5, abs=0.05)
        assert m.punishment == pytest.approx(0.0, abs=0.05)
        assert m.temptation == pytest.approx(1.5, abs=0.05)
        assert m.sucker == pytest.approx(-0.5, abs=0.05)
        assert classify(m) is not GameClass.NOT_PD

    def test_harvest2_is_a_strict_dilemma(self):
        m = harvest2_expected_matrix(np.random.default_rng(1), episodes=20)
        assert classify(m) is not GameClass.NOT_PD
