"""
File:           adversary.py
Author:         Dibyaranjan Sathua
Created on:     31/07/22, 6:20 pm

Reward-corruption adversaries. A weak adversary commits a corruption map over all arms
before the agent pulls; a strong adversary sees the pulled arm and its raw reward.
Every fired attack is charged against a BudgetLedger. An attack whose full charge does
not fit into the remaining budget is skipped.
"""
from typing import List, Optional, Tuple
from dataclasses import dataclass, field

import numpy as np

from src.lipschitz.constant import Corruption, GarcelonAttack, OracleAttack
from src.lipschitz.environment import Environment, LowerBoundReward, RewardFunction
from src.lipschitz.exception import LipschitzBanditError
from src.lipschitz.metric_space import Arm
from src.utils.enums import AdversaryType, AttackKind
from src.utils.logger import LogFacade


logger: LogFacade = LogFacade.get_logger("adversary")


@dataclass
class BudgetLedger:
    total: float
    mode: AdversaryType = AdversaryType.STRONG
    spent: float = 0.0
    per_round_log: List[float] = field(default_factory=list)

    def __post_init__(self):
        if self.total < 0:
            raise ValueError(f"Corruption budget must be >= 0, got {self.total}")

    @property
    def remaining(self) -> float:
        return self.total - self.spent

    def can_afford(self, charge: float) -> bool:
        return charge <= self.remaining

    def record(self, charge: float) -> None:
        """ Log the charge of one round (0 when nothing fired) """
        if not 0.0 <= charge <= Corruption.PER_ROUND_CAP:
            raise LipschitzBanditError(f"Per-round charge {charge} outside [0, 1]")
        if charge > self.remaining:
            raise LipschitzBanditError(f"Charge {charge} exceeds remaining budget {self.remaining}")
        self.per_round_log.append(charge)
        self.spent += charge


@dataclass(frozen=True)
class AttackSpec:
    kind: AttackKind = AttackKind.NONE
    adversary: AdversaryType = AdversaryType.STRONG
    benign_radius: float = OracleAttack.BENIGN_RADIUS
    margin: float = OracleAttack.MARGIN
    fire_probability: float = OracleAttack.FIRE_PROBABILITY
    # Closed box [target_lo, target_hi] left untouched by the Garcelon attack
    target_lo: Optional[Tuple[float, ...]] = None
    target_hi: Optional[Tuple[float, ...]] = None
    garcelon_sigma: float = GarcelonAttack.NOISE_SIGMA
    clip_sigmas: float = GarcelonAttack.CLIP_SIGMAS
    lb_epsilon: Optional[float] = None
    lb_cell: int = 1

    def __post_init__(self):
        if not 0.0 <= self.fire_probability <= 1.0:
            raise ValueError(f"Fire probability {self.fire_probability} outside [0, 1]")
        if self.benign_radius < 0 or self.margin < 0:
            raise ValueError("Benign radius and margin must be >= 0")
        if self.kind is AttackKind.GARCELON and (self.target_lo is None or self.target_hi is None):
            raise ValueError("The Garcelon attack needs a target region")

    @classmethod
    def for_dimension(cls, kind: AttackKind, adversary: AdversaryType, d: int, **params) -> "AttackSpec":
        """ Attack spec with the default Garcelon target region of the arm dimension """
        if kind is AttackKind.GARCELON and "target_lo" not in params:
            targets = {1: GarcelonAttack.TARGET_1D, 2: GarcelonAttack.TARGET_2D}
            if d not in targets:
                raise LipschitzBanditError(f"No default Garcelon target region for d={d}")
            params["target_lo"], params["target_hi"] = targets[d]
        return cls(kind=kind, adversary=adversary, **params)

    def in_target(self, arm: Arm) -> bool:
        return all(lo <= x <= hi for lo, x, hi in zip(self.target_lo, arm.coords, self.target_hi))

    def replacement_noise(self, rng: np.random.Generator) -> float:
        """ Gaussian replacement reward, clipped at clip_sigmas standard deviations """
        bound = self.clip_sigmas * self.garcelon_sigma
        return float(np.clip(self.garcelon_sigma * rng.standard_normal(), -bound, bound))


@dataclass(frozen=True)
class RoundCorruption:
    applies: bool
    corrupted_observation: float
    charge: float
    description: str = ""

    @classmethod
    def untouched(cls, raw: float, description: str = "no attack") -> "RoundCorruption":
        return cls(applies=False, corrupted_observation=raw, charge=0.0, description=description)


@dataclass(frozen=True)
class CorruptionMap:
    """ Precommitted c_t(.) of a weak adversary. Built without knowledge of x_t """
    spec: AttackSpec
    env: Environment = field(repr=False)
    applies: bool = False
    # Oracle: pushed mean. Garcelon: replacement reward
    level: float = 0.0
    charge: float = 0.0

    @classmethod
    def zero(cls, spec: AttackSpec, env: Environment) -> "CorruptionMap":
        return cls(spec=spec, env=env)

    def __call__(self, arm: Arm) -> float:
        if not self.applies:
            return 0.0
        kind = self.spec.kind
        if kind is AttackKind.ORACLE:
            if not _is_benign(self.spec, self.env, arm):
                return 0.0
            return _cap(self.level - self.env.mean(arm))
        if kind is AttackKind.GARCELON:
            if self.spec.in_target(arm):
                return 0.0
            return _cap(self.level - self.env.mean(arm))
        if kind is AttackKind.LOWER_BOUND:
            return _cap(-self.env.mean(arm))
        return 0.0


def _cap(value: float) -> float:
    return float(np.clip(value, -Corruption.PER_ROUND_CAP, Corruption.PER_ROUND_CAP))


def _is_benign(spec: AttackSpec, env: Environment, arm: Arm) -> bool:
    return env.metric.distance(arm, env.optimum.arm_star) <= spec.benign_radius


def _fires(spec: AttackSpec, rng: np.random.Generator) -> bool:
    return rng.random() < spec.fire_probability


def _settle(raw: float, corruption: float, ledger: BudgetLedger, description: str) -> RoundCorruption:
    charge = abs(corruption)
    if not ledger.can_afford(charge):
        ledger.record(0.0)
        return RoundCorruption.untouched(raw, "skipped: budget exhausted")
    ledger.record(charge)
    return RoundCorruption(
        applies=True, corrupted_observation=raw + corruption, charge=charge, description=description
    )


def strong_attack(
        spec: AttackSpec,
        env: Environment,
        x_t: Arm,
        raw: float,
        ledger: BudgetLedger,
        rng: np.random.Generator
) -> RoundCorruption:
    """ Corrupt the observation of the pulled arm x_t. Records exactly one ledger entry """
    kind = spec.kind
    if kind is AttackKind.ORACLE and _is_benign(spec, env, x_t) and _fires(spec, rng):
        target = env.worst - spec.margin + env.noise.draw(rng)
        return _settle(raw, _cap(target - raw), ledger, "oracle: pushed below the worst arm")
    if kind is AttackKind.GARCELON and not spec.in_target(x_t) and _fires(spec, rng):
        target = spec.replacement_noise(rng)
        return _settle(raw, _cap(target - raw), ledger, "garcelon: replaced by gaussian noise")
    if kind is AttackKind.LOWER_BOUND and isinstance(env.reward, LowerBoundReward):
        if env.reward.in_target_cell(np.asarray([x_t.coords]))[0]:
            return _settle(raw, _cap(-env.mean(x_t)), ledger, "lower-bound: shifted to zero")
    ledger.record(0.0)
    return RoundCorruption.untouched(raw)


def weak_attack(
        spec: AttackSpec,
        env: Environment,
        ledger: BudgetLedger,
        rng: np.random.Generator
) -> Tuple[CorruptionMap, float]:
    """
    Precommit c_t(.) before the agent acts. The charge is sup_x |c_t(x)|, computed in
    closed form from oracle quantities of the environment.
    """
    kind = spec.kind
    level = 0.0
    charge = 0.0
    fired = False
    if kind is AttackKind.ORACLE and _fires(spec, rng):
        level = env.worst - spec.margin
        # mu >= worst > level, so the sup sits at the optimum
        charge = min(Corruption.PER_ROUND_CAP, env.optimum.mu_star - level)
        fired = True
    elif kind is AttackKind.GARCELON and _fires(spec, rng):
        level = spec.replacement_noise(rng)
        low, high = env.extremes_outside(spec.target_lo, spec.target_hi)
        charge = min(Corruption.PER_ROUND_CAP, max(abs(level - low), abs(level - high)))
        fired = True
    elif kind is AttackKind.LOWER_BOUND:
        charge = min(Corruption.PER_ROUND_CAP, max(env.optimum.mu_star, 0.0))
        fired = True
    if not fired or not ledger.can_afford(charge):
        ledger.record(0.0)
        return CorruptionMap.zero(spec, env), 0.0
    ledger.record(charge)
    return CorruptionMap(spec=spec, env=env, applies=True, level=level, charge=charge), charge


def make_lower_bound_instance(
        d: int,
        epsilon: float,
        k: int,
        adversary: AdversaryType = AdversaryType.STRONG
) -> Tuple[RewardFunction, AttackSpec]:
    """ Reward f_k of the hard instance and the adversary zeroing rewards in cell k """
    reward = LowerBoundReward(dim=d, epsilon=epsilon, k=k)
    spec = AttackSpec(kind=AttackKind.LOWER_BOUND, adversary=adversary, lb_epsilon=epsilon, lb_cell=k)
    return reward, spec


def default_lower_bound_epsilon(budget: float, horizon: int, d: int) -> float:
    """ eps = (C / T)^(1 / (d + 1)), at most 1/2 """
    if budget <= 0:
        return 0.5
    return min(0.5, (budget / horizon) ** (1.0 / (d + 1)))


def lower_bound_reference(budget: float, horizon: int, d: int) -> float:
    """ C^(1/(d+1)) * T^(d/(d+1)) """
    return budget ** (1.0 / (d + 1)) * horizon ** (d / (d + 1))


class Adversary:
    """ Binds an attack spec to one run's environment and ledger """

    def __init__(self, spec: AttackSpec, env: Environment, budget: float):
        self.spec: AttackSpec = spec
        self.env: Environment = env
        self.ledger: BudgetLedger = BudgetLedger(total=budget, mode=spec.adversary)
        self._exhaustion_logged: bool = False

    @property
    def is_weak(self) -> bool:
        return self.spec.adversary is AdversaryType.WEAK and self.spec.kind is not AttackKind.NONE

    def precommit(self, rng: np.random.Generator) -> CorruptionMap:
        corruption_map, _ = weak_attack(self.spec, self.env, self.ledger, rng)
        self._log_exhaustion()
        return corruption_map

    def corrupt(self, x_t: Arm, raw: float, rng: np.random.Generator) -> RoundCorruption:
        if self.spec.kind is AttackKind.NONE:
            self.ledger.record(0.0)
            return RoundCorruption.untouched(raw)
        result = strong_attack(self.spec, self.env, x_t, raw, self.ledger, rng)
        self._log_exhaustion()
        return result

    def _log_exhaustion(self) -> None:
        if not self._exhaustion_logged and self.ledger.total > 0 and self.ledger.remaining < 1e-9:
            self._exhaustion_logged = True
            logger.info(
                f"Corruption budget {self.ledger.total} exhausted after "
                f"{len(self.ledger.per_round_log)} rounds"
            )


def round_corruption_from_map(corruption_map: CorruptionMap, x_t: Arm, raw: float) -> RoundCorruption:
    """ Observation of the pulled arm under a precommitted map. Charge was paid at commit time """
    value = corruption_map(x_t)
    if not corruption_map.applies:
        return RoundCorruption.untouched(raw)
    return RoundCorruption(
        applies=True,
        corrupted_observation=raw + value,
        charge=corruption_map.charge,
        description=f"weak {corruption_map.spec.kind.value} map",
    )
