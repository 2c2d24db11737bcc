import math

import numpy as np
import pytest

from src.lipschitz.adversary import (
    Adversary, AttackSpec, BudgetLedger, default_lower_bound_epsilon, lower_bound_reference,
    make_lower_bound_instance, round_corruption_from_map, strong_attack, weak_attack
)
from src.lipschitz.environment import Environment, NoiseModel, TriangleReward
from src.lipschitz.exception import LipschitzBanditError
from src.lipschitz.metric_space import Arm, Metric
from src.utils.enums import AdversaryType, AttackKind


@pytest.fixture
def triangle_env() -> Environment:
    return Environment(reward=TriangleReward(), noise=NoiseModel(0.1), metric=Metric())


def oracle(adversary=AdversaryType.STRONG, fire_probability=1.0) -> AttackSpec:
    return AttackSpec(kind=AttackKind.ORACLE, adversary=adversary, fire_probability=fire_probability)


def test_ledger_rejects_oversized_charge():
    ledger = BudgetLedger(total=10)
    with pytest.raises(LipschitzBanditError):
        ledger.record(1.5)
    with pytest.raises(LipschitzBanditError):
        BudgetLedger(total=0.2).record(0.5)


def test_ledger_accumulates():
    ledger = BudgetLedger(total=2)
    ledger.record(0.5)
    ledger.record(0.0)
    assert ledger.spent == 0.5
    assert ledger.remaining == 1.5
    assert ledger.per_round_log == [0.5, 0.0]


def test_oracle_outside_benign_set_does_not_fire(triangle_env, rng):
    ledger = BudgetLedger(total=100)
    result = strong_attack(oracle(), triangle_env, Arm.of(0.9), 0.35, ledger, rng)
    assert not result.applies
    assert result.charge == 0
    assert result.corrupted_observation == 0.35
    assert ledger.per_round_log == [0.0]


def test_oracle_inside_benign_set_pushes_below_worst(triangle_env, rng):
    ledger = BudgetLedger(total=100)
    result = strong_attack(oracle(), triangle_env, Arm.of(1 / 3), 0.9, ledger, rng)
    assert result.applies
    assert 0 < result.charge <= 1
    assert result.corrupted_observation < 0.9
    assert ledger.spent == pytest.approx(result.charge)


def test_garcelon_leaves_target_alone(triangle_env, rng):
    spec = AttackSpec.for_dimension(AttackKind.GARCELON, AdversaryType.STRONG, 1, fire_probability=1.0)
    result = strong_attack(spec, triangle_env, Arm.of(0.7), 0.6, BudgetLedger(total=100), rng)
    assert not result.applies


def test_garcelon_replaces_reward_outside_target(triangle_env, rng):
    spec = AttackSpec.for_dimension(AttackKind.GARCELON, AdversaryType.STRONG, 1, fire_probability=1.0)
    result = strong_attack(spec, triangle_env, Arm.of(0.3), 0.88, BudgetLedger(total=100), rng)
    assert result.applies
    assert abs(result.corrupted_observation) <= 3 * 0.1 + 1e-12


def test_garcelon_has_no_default_target_in_three_dimensions():
    with pytest.raises(LipschitzBanditError):
        AttackSpec.for_dimension(AttackKind.GARCELON, AdversaryType.STRONG, 3)


def test_weak_oracle_map_and_charge(triangle_env, rng):
    ledger = BudgetLedger(total=100, mode=AdversaryType.WEAK)
    corruption_map, charge = weak_attack(oracle(AdversaryType.WEAK), triangle_env, ledger, rng)
    assert charge == pytest.approx(0.733333, abs=1e-5)
    assert corruption_map(Arm.of(1 / 3)) == pytest.approx(0.166667 - 0.9, abs=1e-5)
    assert corruption_map(Arm.of(0.9)) == 0.0
    assert ledger.spent == pytest.approx(charge)


def test_weak_no_fire_gives_zero_map(triangle_env, rng):
    ledger = BudgetLedger(total=100)
    corruption_map, charge = weak_attack(oracle(AdversaryType.WEAK, 0.0), triangle_env, ledger, rng)
    assert charge == 0
    assert corruption_map(Arm.of(1 / 3)) == 0.0
    assert ledger.per_round_log == [0.0]


def test_weak_attack_skipped_when_budget_short(triangle_env, rng):
    ledger = BudgetLedger(total=0.5)
    corruption_map, charge = weak_attack(oracle(AdversaryType.WEAK), triangle_env, ledger, rng)
    assert charge == 0
    assert not corruption_map.applies
    assert ledger.spent == 0


def test_weak_map_applied_to_pulled_arm(triangle_env, rng):
    ledger = BudgetLedger(total=100)
    corruption_map, _ = weak_attack(oracle(AdversaryType.WEAK), triangle_env, ledger, rng)
    result = round_corruption_from_map(corruption_map, Arm.of(0.4), 0.8)
    expected = 0.8 + (0.9 - 0.95 * 2 / 3 - 0.1) - triangle_env.mean(Arm.of(0.4))
    assert result.corrupted_observation == pytest.approx(expected)


def test_lower_bound_instances():
    reward, spec = make_lower_bound_instance(1, 0.5, 1)
    assert reward.cell_count == 2
    assert spec.kind is AttackKind.LOWER_BOUND
    reward2, _ = make_lower_bound_instance(2, 0.25, 3)
    assert reward2.cell_count == 16
    with pytest.raises(LipschitzBanditError):
        make_lower_bound_instance(1, 0.5, 3)


def test_weak_lower_bound_adversary_zeroes_every_arm(rng):
    reward, spec = make_lower_bound_instance(1, 0.25, 2, adversary=AdversaryType.WEAK)
    env = Environment(reward=reward, noise=NoiseModel(0.0), metric=Metric())
    ledger = BudgetLedger(total=10)
    corruption_map, charge = weak_attack(spec, env, ledger, rng)
    assert charge == pytest.approx(0.125)
    arm = Arm.of(0.4)
    assert env.mean(arm) + corruption_map(arm) == pytest.approx(0.0)


def test_strong_lower_bound_adversary_shifts_target_cell(rng):
    reward, spec = make_lower_bound_instance(1, 0.25, 2)
    env = Environment(reward=reward, noise=NoiseModel(0.0), metric=Metric())
    ledger = BudgetLedger(total=10)
    inside = strong_attack(spec, env, Arm.of(0.375), 0.125, ledger, rng)
    outside = strong_attack(spec, env, Arm.of(0.8), 0.0, ledger, rng)
    assert inside.corrupted_observation == pytest.approx(0.0)
    assert not outside.applies


def test_default_lower_bound_epsilon_and_reference():
    assert default_lower_bound_epsilon(1000, 50000, 1) == pytest.approx(math.sqrt(0.02))
    assert default_lower_bound_epsilon(0, 50000, 1) == 0.5
    assert lower_bound_reference(1000, 50000, 1) == pytest.approx(7071.07, abs=0.01)


def test_randomized_attacks_respect_budget(triangle_env):
    for seed in range(200):
        rng = np.random.default_rng(seed)
        budget = float(rng.integers(0, 30))
        adversary = Adversary(spec=oracle(), env=triangle_env, budget=budget)
        for _ in range(100):
            arm = Arm.of(rng.random())
            mu, raw = triangle_env.pull(arm, rng)
            adversary.corrupt(arm, raw, rng)
        log = np.array(adversary.ledger.per_round_log)
        assert len(log) == 100
        assert np.all(log <= 1.0)
        assert adversary.ledger.spent <= budget + 1e-9
        if budget == 0:
            assert np.all(log == 0)
