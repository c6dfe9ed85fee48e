import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evoqrl import coin_game as cg
from evoqrl.coin_game import BLUE, RED, CoinGameState


def state(a0, a1, coin, color, active=0, step=0):
    return CoinGameState((a0, a1), coin, color, active, step)


def test_reset_is_deterministic():
    assert cg.reset(np.random.default_rng(5)) == cg.reset(np.random.default_rng(5))


def test_reset_layout_statistics():
    rng = np.random.default_rng(0)
    reds = 0
    for _ in range(10_000):
        s = cg.reset(rng)
        assert s.positions[0] != s.positions[1]
        assert s.coin_pos not in s.positions
        assert s.active_agent == 0 and s.step_count == 0
        reds += s.coin_color == RED
    assert abs(reds / 10_000 - 0.5) <= 0.02


def test_observe_encoding():
    obs = cg.observe(state((0, 0), (2, 2), (1, 1), RED))
    # planes: agent0 [0, 9), agent1 [9, 18), red coin [18, 27), blue coin [27, 36)
    assert sorted(np.flatnonzero(obs)) == [0, 17, 22]
    obs = cg.observe(state((1, 1), (1, 1), (0, 2), BLUE))
    assert sorted(np.flatnonzero(obs)) == [4, 13, 29]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_observation_always_three_hot(seed):
    rng = np.random.default_rng(seed)
    s = cg.reset(rng)
    while not s.done:
        obs = cg.observe(s)
        assert obs.sum() == 3 and set(np.unique(obs)) <= {0.0, 1.0}
        s, _ = cg.step(s, int(rng.choice(np.flatnonzero(cg.legal_mask(s)))), rng)


@pytest.mark.parametrize("pos,mask", [
    ((0, 0), [False, True, False, True]),
    ((1, 1), [True, True, True, True]),
    ((2, 1), [True, False, True, True]),
    ((0, 2), [False, True, True, False]),
])
def test_legal_mask(pos, mask):
    s = state(pos, (2, 2) if pos != (2, 2) else (0, 0), (1, 0) if pos != (1, 0) else (1, 2), RED)
    assert cg.legal_mask(s).tolist() == mask


def test_legal_mask_follows_active_agent():
    s = state((0, 0), (2, 2), (1, 1), RED, active=1, step=1)
    assert cg.legal_mask(s).tolist() == [True, False, True, False]


def test_own_coin_collection():
    s = state((1, 1), (0, 0), (1, 2), RED)
    nxt, out = cg.step(s, 3, np.random.default_rng(0))
    assert out.rewards == (1.0, 0.0)
    assert out.collected == cg.Collection(0, True)
    assert nxt.coin_pos not in nxt.positions
    assert nxt.active_agent == 1 and nxt.step_count == 1


def test_foreign_coin_collection():
    _, out = cg.step(state((1, 1), (0, 0), (1, 2), BLUE), 3, np.random.default_rng(0))
    assert out.rewards == (1.0, -2.0)
    assert out.collected == cg.Collection(0, False)
    _, out = cg.step(state((0, 0), (1, 1), (1, 2), RED, active=1, step=1), 3, np.random.default_rng(0))
    assert out.rewards == (-2.0, 1.0)


def test_empty_move():
    s = state((2, 2), (0, 1), (2, 0), RED, active=1, step=1)
    nxt, out = cg.step(s, 1, np.random.default_rng(0))
    assert out == cg.StepOutcome((0.0, 0.0), None)
    assert nxt.positions == ((2, 2), (1, 1))
    assert nxt.coin_pos == (2, 0)


def test_illegal_action_raises():
    with pytest.raises(cg.IllegalActionError):
        cg.step(state((0, 0), (2, 2), (1, 1), RED), 0, np.random.default_rng(0))
    with pytest.raises(cg.IllegalActionError):
        cg.step(state((1, 1), (2, 2), (0, 0), RED, step=50), 0, np.random.default_rng(0))


def test_co_location_allowed_and_respawn_avoids_both():
    rng = np.random.default_rng(3)
    for _ in range(200):
        s = state((1, 1), (1, 2), (1, 2), RED)
        nxt, out = cg.step(s, 3, rng)
        assert nxt.positions == ((1, 2), (1, 2))
        assert out.collected is not None
        assert nxt.coin_pos != (1, 2)


def random_episode(seed):
    rng = np.random.default_rng(seed)
    s = cg.reset(rng)
    outcomes, actors = [], []
    while not s.done:
        actors.append(s.active_agent)
        s, out = cg.step(s, int(rng.choice(np.flatnonzero(cg.legal_mask(s)))), rng)
        outcomes.append(out)
        for r, c in s.positions:
            assert 0 <= r < 3 and 0 <= c < 3
        assert s.coin_pos not in s.positions
    return outcomes, actors


def test_turns_alternate_25_each():
    _, actors = random_episode(0)
    assert len(actors) == 50
    assert actors == [i % 2 for i in range(50)]


def test_random_play_mean_score_is_zero():
    scores = []
    for seed in range(2000):
        outcomes, _ = random_episode(seed)
        total = sum(sum(o.rewards) for o in outcomes)
        n_coins = sum(o.collected is not None for o in outcomes)
        own = sum(o.collected is not None and o.collected.own_color for o in outcomes)
        assert total == 2 * own - n_coins
        scores.append(total)
    assert abs(np.mean(scores)) <= 0.3


def test_batch_replays_scalar_episodes():
    seeds = range(20)
    scalar = [np.random.default_rng(s) for s in seeds]
    batched = cg.CoinGameBatch([np.random.default_rng(s) for s in seeds])
    states = [cg.reset(r) for r in scalar]
    action_rng = np.random.default_rng(99)
    while not batched.done:
        obs = batched.observe()
        mask = batched.legal_mask()
        for i, s in enumerate(states):
            np.testing.assert_array_equal(obs[i], cg.observe(s))
            np.testing.assert_array_equal(mask[i], cg.legal_mask(s))
        actions = [int(action_rng.choice(np.flatnonzero(m))) for m in mask]
        rewards, collected, own = batched.step(actions)
        for i in range(len(states)):
            states[i], out = cg.step(states[i], actions[i], scalar[i])
            assert tuple(rewards[i]) == out.rewards
            assert collected[i] == (out.collected is not None)
            assert own[i] == (out.collected is not None and out.collected.own_color)
    assert all(s.done for s in states)


def test_batch_rejects_illegal_action():
    seed = 0
    while cg.CoinGameBatch([np.random.default_rng(seed)]).legal_mask().all():
        seed += 1
    env = cg.CoinGameBatch([np.random.default_rng(seed)])
    bad = int(np.flatnonzero(~env.legal_mask()[0])[0])
    with pytest.raises(cg.IllegalActionError):
        env.step([bad])


def test_trace_line_format():
    line = cg.format_step(3, 1, 2, cg.StepOutcome((-2.0, 1.0), cg.Collection(1, False)))
    assert line == "03 agent=1 action=2:west rewards=(-2,+1) coin:foreign"
    assert cg.format_step(0, 0, 0, cg.StepOutcome((0.0, 0.0))).endswith("rewards=(+0,+0) -")
