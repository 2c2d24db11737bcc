"""
File:           harness.py
Author:         Dibyaranjan Sathua
Created on:     16/04/22, 12:17 pm

Simulation loop. Each round a weak adversary commits its corruption map, the policy
picks an arm, the environment draws the raw reward, the observation is corrupted
and handed back to the policy. Regret always uses the true expected reward.
"""
from typing import Any, Dict, List, Optional, Tuple
import time

from multiprocess import Pool

from src.experiment.config import ExperimentConfig
from src.lipschitz.adversary import (
    Adversary, AttackSpec, default_lower_bound_epsilon, lower_bound_reference, round_corruption_from_map
)
from src.lipschitz.base_policy import BasePolicy
from src.lipschitz.bob import BoBPolicy
from src.lipschitz.environment import Environment, LowerBoundReward, NoiseModel, make_reward
from src.lipschitz.exception import DimensionMismatchError
from src.lipschitz.metric_space import Metric
from src.lipschitz.regret_analysis import AggregateResult, RegretTrace
from src.lipschitz.rmel import RMELPolicy
from src.lipschitz.zooming import ZoomingPolicy
from src.utils.enums import AttackKind, PolicyKind, RewardKind
from src.utils.logger import LogFacade
from src.utils.rng import RandomStreams


logger: LogFacade = LogFacade.get_logger("harness")


def lower_bound_epsilon(cfg: ExperimentConfig) -> float:
    if cfg.lb_epsilon is not None:
        return cfg.lb_epsilon
    return default_lower_bound_epsilon(cfg.budget, cfg.horizon, cfg.dim)


def build_environment(cfg: ExperimentConfig) -> Environment:
    epsilon = lower_bound_epsilon(cfg) if cfg.reward is RewardKind.LOWER_BOUND else None
    reward = make_reward(cfg.reward, dim=cfg.dim, epsilon=epsilon, k=cfg.lb_cell)
    return Environment(reward=reward, noise=NoiseModel(sigma=cfg.sigma), metric=Metric(kind=cfg.metric))


def build_adversary(cfg: ExperimentConfig, env: Environment) -> Adversary:
    params: Dict[str, Any] = dict()
    if cfg.attack is AttackKind.LOWER_BOUND:
        params = dict(lb_epsilon=env.reward.epsilon, lb_cell=cfg.lb_cell)
    spec = AttackSpec.for_dimension(cfg.attack, cfg.adversary, env.dim, **params)
    budget = 0.0 if cfg.attack is AttackKind.NONE else cfg.budget
    return Adversary(spec=spec, env=env, budget=budget)


def radius_sigma(cfg: ExperimentConfig) -> float:
    """ Scale of the stochastic radius term. Noise-free runs keep the unit scale """
    if cfg.sigma_radius and cfg.sigma > 0:
        return cfg.sigma
    return 1.0


def build_policy(cfg: ExperimentConfig, streams: RandomStreams) -> BasePolicy:
    metric = Metric(kind=cfg.metric)
    if cfg.algo in (PolicyKind.ZOOMING, PolicyKind.ROBUST_ZOOMING):
        return ZoomingPolicy(
            horizon=cfg.horizon,
            delta=cfg.delta,
            dim=cfg.dim,
            budget=cfg.effective_known_budget,
            capped=cfg.capped,
            sigma=radius_sigma(cfg),
            metric=metric,
            grid_depth=cfg.grid_depth,
            kind=cfg.algo,
        )
    if cfg.algo in (PolicyKind.RMEL, PolicyKind.RMEL_ALT):
        return RMELPolicy(
            horizon=cfg.horizon,
            delta=cfg.delta,
            dim=cfg.dim,
            rng=streams.policy,
            sampling_rng=streams.sampling,
            base=cfg.B,
            variant=cfg.effective_rmel_variant,
            sample_mode=cfg.sample_mode,
            region_cap=cfg.region_cap,
            sigma=radius_sigma(cfg) if cfg.sigma_radius else None,
            kind=cfg.algo,
        )
    return BoBPolicy(
        horizon=cfg.horizon,
        delta=cfg.delta,
        dim=cfg.dim,
        rng=streams.policy,
        restart_each_batch=cfg.bob_restart,
        capped=cfg.capped,
        sigma=radius_sigma(cfg),
        metric=metric,
        grid_depth=cfg.grid_depth,
    )


def build_run(cfg: ExperimentConfig, streams: RandomStreams) -> Tuple[Environment, Adversary, BasePolicy]:
    env = build_environment(cfg)
    adversary = build_adversary(cfg, env)
    policy = build_policy(cfg, streams)
    if policy.dim != env.dim:
        raise DimensionMismatchError(f"Policy works on d={policy.dim}, environment on d={env.dim}")
    return env, adversary, policy


def play(
        env: Environment,
        adversary: Adversary,
        policy: BasePolicy,
        streams: RandomStreams,
        seed: int = 0,
        log_rounds: bool = False
) -> RegretTrace:
    """ T rounds of the corrupted bandit protocol """
    if policy.dim != env.dim:
        raise DimensionMismatchError(f"Policy works on d={policy.dim}, environment on d={env.dim}")
    trace = RegretTrace(
        seed=seed, horizon=policy.horizon, mu_star=env.optimum.mu_star, rounds=[] if log_rounds else None
    )
    for _ in range(policy.horizon):
        corruption_map = adversary.precommit(streams.adversary) if adversary.is_weak else None
        arm = policy.select_arm()
        info = policy.round_info() if log_rounds else None
        mu, raw = env.pull(arm, streams.noise)
        if corruption_map is not None:
            result = round_corruption_from_map(corruption_map, arm, raw)
        else:
            result = adversary.corrupt(arm, raw, streams.adversary)
        policy.update(arm, result.corrupted_observation)
        if info is not None:
            info = {
                **info,
                "arm": str(arm),
                "raw": raw,
                "observed": result.corrupted_observation,
                "charge": result.charge,
            }
        trace.record(mu, adversary.ledger.spent, info)
    return trace


def run_once(cfg: ExperimentConfig, seed: int) -> RegretTrace:
    """ One repetition with all randomness derived from `seed` """
    started = time.perf_counter()
    streams = RandomStreams.from_seed(seed)
    env, adversary, policy = build_run(cfg, streams)
    logger.info(f"Run {cfg.label} seed={seed} started: {policy!r}")
    trace = play(env, adversary, policy, streams, seed=seed, log_rounds=cfg.log_rounds)
    logger.info(
        f"Run {cfg.label} seed={seed} finished in {time.perf_counter() - started:.2f}s: "
        f"regret={trace.final_regret:.2f}, spent={adversary.ledger.spent:.2f}"
    )
    return trace


def run_experiment(cfg: ExperimentConfig) -> AggregateResult:
    """ cfg.reps repetitions with seeds seed..seed+reps-1, in parallel when workers > 1 """
    seeds = [cfg.seed + rep for rep in range(cfg.reps)]
    if cfg.workers > 1 and cfg.reps > 1:
        with Pool(min(cfg.workers, cfg.reps)) as pool:
            traces: List[RegretTrace] = pool.starmap(run_once, [(cfg, seed) for seed in seeds])
    else:
        traces = [run_once(cfg, seed) for seed in seeds]
    result = AggregateResult(traces=traces, stride=cfg.stride)
    logger.info(
        f"Experiment {cfg.label}: mean final regret {result.mean_final_regret:.2f} "
        f"(std {result.std_final_regret:.2f}) over {result.reps} reps"
    )
    return result


def lower_bound_details(cfg: ExperimentConfig) -> Optional[Dict[str, Any]]:
    """ Epsilon actually used, the cell layout and the C^(1/(d+1)) T^(d/(d+1)) reference """
    if cfg.reward is not RewardKind.LOWER_BOUND:
        return None
    reward = build_environment(cfg).reward
    assert isinstance(reward, LowerBoundReward)
    return {
        "requested_epsilon": reward.requested_epsilon,
        "epsilon": reward.epsilon,
        "cell_count": reward.cell_count,
        "target_cell": reward.k,
        "reference_regret": lower_bound_reference(cfg.budget, cfg.horizon, cfg.dim),
    }
