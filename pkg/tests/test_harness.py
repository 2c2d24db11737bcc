import numpy as np
import pytest

from src.experiment.results import RunManifest, emit_results
from src.lipschitz.adversary import Adversary, AttackSpec, RoundCorruption
from src.lipschitz.base_policy import BasePolicy
from src.lipschitz.environment import Environment, NoiseModel, TriangleReward
from src.lipschitz.exception import DimensionMismatchError
from src.lipschitz.harness import build_run, lower_bound_details, play, run_experiment, run_once
from src.lipschitz.metric_space import Arm, Metric
from src.lipschitz.regret_analysis import trace_points
from src.utils.enums import AdversaryType, AttackKind, PolicyKind
from src.utils.rng import RandomStreams


class FixedArmPolicy(BasePolicy):
    """ Always pulls the same arm and remembers what it observed """

    def __init__(self, arm: Arm, horizon: int, on_select=None):
        super(FixedArmPolicy, self).__init__(horizon=horizon, delta=0.01, dim=arm.dim)
        self.arm = arm
        self.observations = []
        self._on_select = on_select

    def select_arm(self) -> Arm:
        if self._on_select is not None:
            self._on_select(self)
        return self.arm

    def update(self, arm: Arm, observation: float) -> None:
        self.observations.append(observation)
        self.t += 1


class InflatingAdversary(Adversary):
    def corrupt(self, x_t, raw, rng):
        self.ledger.record(0.0)
        return RoundCorruption(applies=True, corrupted_observation=raw + 1000.0, charge=0.0)


def triangle_env(sigma: float = 0.1) -> Environment:
    return Environment(reward=TriangleReward(), noise=NoiseModel(sigma), metric=Metric())


def test_no_attack_equals_zero_budget_oracle(small_config):
    clean = run_once(small_config(attack="none"), seed=7)
    starved = run_once(small_config(attack="oracle", budget=0), seed=7)
    assert np.array_equal(clean.instantaneous, starved.instantaneous)
    assert starved.total_spent == 0


@pytest.mark.parametrize("algo", ["zooming", "robust-zooming", "rmel", "rmel-alt", "bob"])
def test_budget_never_exceeded(small_config, algo):
    trace = run_once(small_config(algo=algo, attack="oracle", budget=40, horizon=400), seed=3)
    assert trace.total_spent <= 40 + 1e-9
    assert np.all(np.diff(trace.budget_spent) <= 1.0 + 1e-12)
    assert np.all(np.diff(trace.cumulative) >= -1e-12)


def test_regret_uses_true_mean():
    env = triangle_env()
    adversary = InflatingAdversary(spec=AttackSpec(), env=env, budget=0)
    policy = FixedArmPolicy(Arm.of(0.0), horizon=50)
    trace = play(env, adversary, policy, RandomStreams.from_seed(0))
    assert min(policy.observations) > 900
    assert trace.final_regret == pytest.approx(50 * 0.95 / 3)


def test_weak_adversary_commits_before_the_pull():
    env = triangle_env()
    spec = AttackSpec(kind=AttackKind.ORACLE, adversary=AdversaryType.WEAK, fire_probability=1.0)
    adversary = Adversary(spec=spec, env=env, budget=10)
    seen = []

    def check(policy):
        seen.append(len(adversary.ledger.per_round_log) == policy.t + 1)

    policy = FixedArmPolicy(Arm.of(1 / 3), horizon=30, on_select=check)
    trace = play(env, adversary, policy, RandomStreams.from_seed(1))
    assert all(seen) and len(seen) == 30
    assert trace.total_spent <= 10
    # Thirteen full charges of 0.733333 fit into the budget, the fourteenth is skipped
    assert adversary.ledger.spent == pytest.approx(13 * 0.733333, abs=1e-4)


def test_dimension_mismatch_caught_before_round_one():
    env = triangle_env()
    policy = FixedArmPolicy(Arm.of(0.1, 0.1), horizon=5)
    with pytest.raises(DimensionMismatchError):
        play(env, Adversary(spec=AttackSpec(), env=env, budget=0), policy, RandomStreams.from_seed(0))
    assert policy.t == 0


def test_noise_free_zooming_is_sublinear(small_config):
    cfg = small_config(sigma=0, horizon=2000, grid_depth=None)
    cumulative = run_once(cfg, seed=0).cumulative
    assert cumulative[-1] / 2000 < cumulative[199] / 200


def test_single_rep_statistics(small_config):
    result = run_experiment(small_config(reps=1))
    assert result.reps == 1
    assert result.std_final_regret == 0
    assert result.mean_final_regret == result.traces[0].final_regret


def test_experiment_is_deterministic(small_config):
    cfg = small_config(reps=3, attack="garcelon", budget=20, seed=11)
    first = run_experiment(cfg)
    second = run_experiment(cfg)
    assert first.seeds == [11, 12, 13]
    assert first.trace_frame().equals(second.trace_frame())


def test_parallel_repetitions_match_sequential(small_config):
    cfg = small_config(reps=3, algo="rmel", attack="oracle", budget=20)
    sequential = run_experiment(cfg)
    parallel = run_experiment(small_config(reps=3, algo="rmel", attack="oracle", budget=20, workers=2))
    assert parallel.trace_frame().equals(sequential.trace_frame())


def test_parallel_trace_files_are_byte_identical(small_config, tmp_path):
    texts = []
    for name in ("first", "second"):
        cfg = small_config(reps=4, algo="bob", attack="garcelon", budget=30, workers=3)
        result = run_experiment(cfg)
        paths = emit_results(cfg, result, RunManifest.build(cfg, result, 0.0), tmp_path / name)
        texts.append(paths["trace"].read_bytes())
    assert texts[0] == texts[1]
    assert len(texts[0]) > 0


def test_trace_thinning_rows():
    assert trace_points(10, 1).tolist() == list(range(1, 11))
    assert trace_points(120, 50).tolist() == [50, 100, 120]


def test_trace_frame_shape(small_config):
    result = run_experiment(small_config(reps=2, horizon=95, stride=10))
    frame = result.trace_frame()
    assert list(frame.columns) == ["rep", "t", "cum_regret", "budget_spent"]
    assert len(frame) == 2 * 10


def test_round_log_records_every_round(small_config):
    trace = run_once(small_config(log_rounds=True, horizon=40, attack="oracle", budget=5), seed=2)
    assert len(trace.rounds) == 40
    assert {"t", "arm", "raw", "observed", "charge", "step"} <= set(trace.rounds[0])


def test_lower_bound_run_and_details(small_config):
    cfg = small_config(
        algo="robust-zooming", reward="lower-bound", attack="lower-bound", budget=50, horizon=500, lb_cell=2
    )
    details = lower_bound_details(cfg)
    assert details["cell_count"] == 3
    assert details["epsilon"] == pytest.approx(1 / 3)
    assert details["reference_regret"] == pytest.approx(np.sqrt(50 * 500))
    trace = run_once(cfg, seed=0)
    assert trace.total_spent <= 50


def test_build_run_wires_components(small_config):
    env, adversary, policy = build_run(small_config(algo="bob", attack="garcelon", budget=10), RandomStreams.from_seed(0))
    assert env.dim == policy.dim == 1
    assert adversary.ledger.total == 10


@pytest.mark.parametrize("algo,kind", [
    ("zooming", PolicyKind.ZOOMING),
    ("robust-zooming", PolicyKind.ROBUST_ZOOMING),
    ("rmel-alt", PolicyKind.RMEL_ALT),
])
def test_built_policy_reports_the_configured_kind(small_config, algo, kind):
    _, _, policy = build_run(small_config(algo=algo), RandomStreams.from_seed(0))
    assert policy.kind is kind


def test_rmel_noise_scale_follows_the_radius_switch(small_config):
    _, _, scaled = build_run(small_config(algo="rmel", sigma=0.1), RandomStreams.from_seed(0))
    _, _, unit = build_run(small_config(algo="rmel", sigma=0.1, sigma_radius=False), RandomStreams.from_seed(0))
    _, _, noise_free = build_run(small_config(algo="rmel", sigma=0.0), RandomStreams.from_seed(0))
    assert scaled.state.sigma == 0.1
    assert unit.state.sigma is None
    assert noise_free.state.sigma == 1.0
