import math

import numpy as np
import pytest

from src.lipschitz.bob import (
    BoBPolicy, Exp3PState, batch_length, begin_batch, end_batch, exp3p_parameters, init_bob, reward_normaliser
)
from src.lipschitz.exception import PolicyStateError
from src.lipschitz.zooming import ZoomingPolicy


T = 50000
DELTA = 0.01


def base_factory(horizon: int = T):
    def make_base(budget):
        return ZoomingPolicy(horizon=horizon, delta=DELTA / 3, dim=1, budget=budget, grid_depth=4)
    return make_base


def test_init_for_default_horizon():
    state = init_bob(T, DELTA, 1)
    assert state.n_arms == 16
    assert state.budgets[0] == 2 and state.budgets[-1] == 2 ** 16
    assert state.batch == 659
    assert state.exp3p.probabilities == pytest.approx(np.full(16, 1 / 16))


def test_exp3p_parameters():
    alpha, gamma = exp3p_parameters(16, T, DELTA)
    assert alpha == pytest.approx(2 * math.sqrt(math.log(3 * 16 * T / DELTA)))
    assert gamma == pytest.approx(2 * math.sqrt(3 * 16 * math.log(16) / (5 * T)))
    assert exp3p_parameters(16, 10, DELTA)[1] == 0.6


def test_batch_length_minimum_one():
    assert batch_length(2, 1) == 1
    assert batch_length(T, 2) == int(math.floor(T ** (4 / 6)))


def test_reward_normaliser():
    assert reward_normaliser(659, T, DELTA) == pytest.approx(1440.68, abs=0.1)
    assert reward_normaliser(659, T, DELTA, sigma=0.1) == pytest.approx(1330.27, abs=0.1)


def test_horizon_too_short():
    with pytest.raises(PolicyStateError):
        init_bob(1, DELTA, 1)


def test_zero_reward_batch_gets_exploration_bonus(rng):
    state = init_bob(T, DELTA, 1)
    begin_batch(state, rng, base_factory())
    chosen = state.chosen
    before = state.exp3p.log_weights.copy()
    end_batch(state)
    changed = np.flatnonzero(state.exp3p.log_weights != before)
    assert changed.tolist() == [chosen]
    assert state.exp3p.log_weights[chosen] > before[chosen]


def test_simplex_and_locality_over_many_batches(rng):
    state = init_bob(T, DELTA, 1)
    gamma = state.exp3p.gamma
    for _ in range(200):
        begin_batch(state, rng, base_factory())
        before = state.exp3p.log_weights.copy()
        state.s = float(rng.uniform(0, 2 * state.batch))
        chosen = state.chosen
        end_batch(state)
        moved = state.exp3p.log_weights != before
        assert moved.sum() <= 1 and (not moved.any() or moved[chosen])
        probabilities = state.exp3p.probabilities
        assert probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(probabilities >= gamma / state.n_arms - 1e-15)


def test_exponent_is_clamped(rng):
    state = init_bob(T, DELTA, 1)
    begin_batch(state, rng, base_factory())
    state.s = 1e15
    chosen = state.chosen
    end_batch(state)
    assert state.exp3p.log_weights[chosen] == pytest.approx(50.0)


def test_uniform_draw_frequencies(rng):
    exp3p = Exp3PState(n_arms=16, alpha=1.0, gamma=0.1)
    draws = np.bincount([exp3p.draw(rng) for _ in range(100000)], minlength=16) / 100000
    sigma = math.sqrt((1 / 16) * (15 / 16) / 100000)
    assert np.all(np.abs(draws - 1 / 16) < 4 * sigma)


def test_restart_gives_fresh_base(rng):
    state = init_bob(T, DELTA, 1, restart_each_batch=True)
    begin_batch(state, rng, base_factory())
    first = state.current
    arm = first.select_arm()
    first.update(arm, 0.5)
    end_batch(state)
    begin_batch(state, rng, base_factory())
    assert state.current is not first
    assert not state.current.state.active.any()


def test_persistent_base_resumes(rng):
    state = init_bob(T, DELTA, 1, restart_each_batch=False)
    state.exp3p.log_weights[3] = 200.0
    state.exp3p.gamma = 0.0
    begin_batch(state, rng, base_factory())
    first = state.current
    arm = first.select_arm()
    first.update(arm, 0.5)
    end_batch(state)
    begin_batch(state, rng, base_factory())
    assert state.chosen == 3
    assert state.current is first
    assert state.current.state.active.any()


def test_policy_batch_accounting(rng):
    policy = BoBPolicy(horizon=100, delta=DELTA, dim=1, rng=rng, grid_depth=4)
    assert policy.state.batch == 15
    for _ in range(100):
        arm = policy.select_arm()
        assert policy.round_info()["budget"] in policy.state.budgets
        policy.update(arm, 0.5)
    assert policy.state.batches_started == math.ceil(100 / 15)
    assert policy.state.chosen is None


def test_end_batch_outside_batch_is_an_error():
    with pytest.raises(PolicyStateError):
        end_batch(init_bob(T, DELTA, 1))


def test_noise_scale_enlarges_the_master_step():
    steps = []
    for sigma in (1.0, 0.1):
        state = init_bob(T, DELTA, 1, sigma=sigma)
        state.chosen = 0
        state.chosen_probability = 1 / 16
        state.s = 0.8 * state.batch
        end_batch(state)
        steps.append(state.exp3p.log_weights[0])
    assert steps[1] > steps[0] > 0


def test_policy_carries_the_noise_scale(rng):
    policy = BoBPolicy(horizon=100, delta=DELTA, dim=1, rng=rng, sigma=0.1, grid_depth=4)
    assert policy.state.sigma == 0.1
    assert policy.select_arm() is not None
    assert policy.state.current.state.sigma == 0.1
