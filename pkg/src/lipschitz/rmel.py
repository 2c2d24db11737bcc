"""
File:           rmel.py
Author:         Dibyaranjan Sathua
Created on:     07/08/22, 4:02 pm

Robust multi-layer elimination. Layer l tolerates corruption v_l = ln(4T/delta) B^(l-1)
and is sampled with probability 1/v_l. Each layer runs epochs over dyadic regions:
every region is pulled to a quota, bad regions are eliminated (also from the lower,
less tolerant layers) and the survivors are halved along every axis.
"""
from typing import Dict, List, Optional, Tuple
from dataclasses import dataclass, field
import math

import numpy as np

from src.lipschitz.base_policy import BasePolicy
from src.lipschitz.constant import Covering as CoveringConstant, RMELDefaults
from src.lipschitz.exception import ConfigFileError, PolicyStateError, RegionCapError
from src.lipschitz.metric_space import (
    Arm, Region, refine_region, region_contains, sample_arm_in_region, uniform_grid_covering
)
from src.utils.enums import PolicyKind, RMELVariant, SampleMode
from src.utils.logger import LogFacade


logger: LogFacade = LogFacade.get_logger("rmel")


@dataclass
class LayerState:
    index: int
    tolerance: float
    epoch: int = 1
    pulls: int = 0
    regions: List[Region] = field(default_factory=list)
    counts: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    means: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=float))

    def reset(self, regions: List[Region]) -> None:
        """ Reload the region set sorted by id and clear all statistics """
        self.regions = sorted(regions, key=lambda region: region.id)
        self.counts = np.zeros(len(self.regions), dtype=np.int64)
        self.means = np.zeros(len(self.regions), dtype=float)
        self.pulls = 0

    def keep(self, mask: np.ndarray) -> None:
        """ Keep the regions flagged in mask together with their statistics """
        self.regions = [region for region, kept in zip(self.regions, mask) if kept]
        self.counts = self.counts[mask]
        self.means = self.means[mask]
        self.pulls = int(self.counts.sum())

    @property
    def is_empty(self) -> bool:
        return len(self.regions) == 0

    @property
    def depth(self) -> int:
        return self.epoch


def log_factor(horizon: int, delta: float) -> float:
    return math.log(4.0 * horizon / delta)


def layer_count(horizon: int, delta: float, base: float) -> int:
    """ l* = min { l : ln(4T/delta) B^(l-1) >= T } """
    factor = log_factor(horizon, delta)
    layers = 1
    while factor * base ** (layers - 1) < horizon:
        layers += 1
    return layers


def epoch_quota(horizon: int, delta: float, epoch: int, sigma: Optional[float] = None) -> int:
    """
    Per-region pulls closing an epoch: ceil(6 ln(4T/delta) 4^m). With a noise scale sigma
    the quota is ceil(QUOTA_SCALE sigma^2 ln(4T/delta) 4^m), at least one pull.
    """
    if sigma is None:
        return int(math.ceil(6.0 * log_factor(horizon, delta) * 4 ** epoch))
    scaled = RMELDefaults.QUOTA_SCALE * sigma ** 2 * log_factor(horizon, delta) * 4 ** epoch
    return max(1, int(math.ceil(scaled)))


def _scaled_threshold(epoch: int, sigma: float, count: int) -> float:
    return RMELDefaults.BIAS / 2 ** epoch + RMELDefaults.CONFIDENCE * sigma / math.sqrt(count)


def epoch_elimination_threshold(horizon: int, delta: float, epoch: int, sigma: Optional[float] = None) -> float:
    """ 4/2^m, or the noise-scaled threshold evaluated at the epoch quota """
    if sigma is None:
        return 4.0 / 2 ** epoch
    return _scaled_threshold(epoch, sigma, epoch_quota(horizon, delta, epoch, sigma))


def round_elimination_threshold(
        horizon: int,
        delta: float,
        epoch: int,
        min_count: int,
        sigma: Optional[float] = None
) -> float:
    """ 2/2^m + sqrt(8 ln(4T^2/delta) / n*) + 2 ln(4T/delta) / n*, infinite while n* = 0 """
    if min_count <= 0:
        return math.inf
    if sigma is not None:
        return _scaled_threshold(epoch, sigma, min_count)
    return (
        2.0 / 2 ** epoch
        + math.sqrt(8.0 * math.log(4.0 * horizon ** 2 / delta) / min_count)
        + 2.0 * log_factor(horizon, delta) / min_count
    )


@dataclass
class RMELState:
    layers: List[LayerState]
    variant: RMELVariant
    horizon: int
    delta: float
    base: float
    dim: int
    probabilities: np.ndarray
    region_cap: int = CoveringConstant.REGION_CAP
    # None keeps the unit-noise quota and thresholds
    sigma: Optional[float] = None

    @property
    def top(self) -> LayerState:
        return self.layers[-1]


def init_rmel(
        horizon: int,
        delta: float,
        base: float,
        dim: int,
        variant: RMELVariant = RMELVariant.EPOCH_ELIM,
        region_cap: int = CoveringConstant.REGION_CAP,
        sigma: Optional[float] = None
) -> RMELState:
    """ l* layers, each on the depth-1 covering with epoch 1 and zero counters """
    if base <= 1.0:
        raise ConfigFileError(f"RMEL base B must exceed 1, got {base}")
    if not 0.0 < delta < 1.0:
        raise ConfigFileError(f"delta must lie in (0, 1), got {delta}")
    if horizon < 1:
        raise ConfigFileError(f"Horizon must be >= 1, got {horizon}")
    if sigma is not None and sigma <= 0:
        raise ConfigFileError(f"RMEL noise scale must be positive, got {sigma}")
    factor = log_factor(horizon, delta)
    count = layer_count(horizon, delta, base)
    covering = uniform_grid_covering(dim, 1, region_cap=region_cap)
    layers = []
    for l in range(1, count + 1):
        layer = LayerState(index=l, tolerance=factor * base ** (l - 1))
        layer.reset(list(covering.regions))
        layers.append(layer)
    upper = np.array([1.0 / layer.tolerance for layer in layers[1:]])
    first = 1.0 - upper.sum()
    if first < 0:
        raise ConfigFileError(f"Layer probabilities infeasible: p(1) = {first:.4f} < 0")
    probabilities = np.concatenate([[first], upper])
    logger.info(
        f"RMEL initialised with {count} layers, B={base}, ln(4T/delta)={factor:.4f}, p(1)={first:.4f}, "
        f"noise scale {sigma}"
    )
    return RMELState(
        layers=layers,
        variant=variant,
        horizon=horizon,
        delta=delta,
        base=base,
        dim=dim,
        probabilities=probabilities,
        region_cap=region_cap,
        sigma=sigma,
    )


def sample_layer(state: RMELState, rng: np.random.Generator) -> int:
    """ Draw l with probability 1/v_l (rest on l = 1), return the first nonempty layer >= l """
    cumulative = np.cumsum(state.probabilities)
    drawn = int(np.searchsorted(cumulative, rng.random(), side="right"))
    drawn = min(drawn, len(state.layers) - 1)
    for position in range(drawn, len(state.layers)):
        if not state.layers[position].is_empty:
            return position + 1
    raise PolicyStateError("Top layer is empty")


def choose_region(state: RMELState, layer_index: int) -> Tuple[int, Region]:
    """ Region with the fewest pulls in the layer, ties to the smallest id """
    layer = state.layers[layer_index - 1]
    if layer.is_empty:
        raise PolicyStateError(f"Layer {layer_index} has no active region")
    position = int(np.argmin(layer.counts))
    return position, layer.regions[position]


def cross_layer_eliminate(state: RMELState, region: Region, layer_index: int) -> int:
    """ Remove every region contained in `region` from all layers below `layer_index` """
    dropped = 0
    for layer in state.layers[:layer_index - 1]:
        if layer.is_empty:
            continue
        mask = np.array([not region_contains(region, other) for other in layer.regions], dtype=bool)
        if not mask.all():
            dropped += int((~mask).sum())
            layer.keep(mask)
    return dropped


def _eliminate(state: RMELState, layer: LayerState, doomed: np.ndarray) -> None:
    eliminated = [region for region, flag in zip(layer.regions, doomed) if flag]
    layer.keep(~doomed)
    for region in eliminated:
        dropped = cross_layer_eliminate(state, region, layer.index)
        if logger.is_debug():
            logger.debug(
                f"Layer {layer.index} epoch {layer.epoch}: eliminated {region}, "
                f"{dropped} lower-layer regions dropped"
            )


def _advance_epoch(state: RMELState, layer: LayerState) -> None:
    children = [child for region in layer.regions for child in refine_region(region)]
    if len(children) > state.region_cap:
        raise RegionCapError(f"Layer {layer.index} refinement needs {len(children)} regions")
    layer.reset(children)
    layer.epoch += 1
    if logger.is_debug():
        logger.debug(f"Layer {layer.index} advanced to epoch {layer.epoch} with {len(children)} regions")


def record_and_maybe_eliminate(state: RMELState, layer_index: int, position: int, y: float) -> None:
    """ Running-mean update of the pulled region, then the variant's elimination rule """
    layer = state.layers[layer_index - 1]
    if not 0 <= position < len(layer.regions):
        raise PolicyStateError(f"Region position {position} not in layer {layer_index}")
    layer.pulls += 1
    layer.counts[position] += 1
    count = layer.counts[position]
    layer.means[position] = (layer.means[position] * (count - 1) + y) / count
    quota = epoch_quota(state.horizon, state.delta, layer.epoch, state.sigma)
    if state.variant is RMELVariant.ROUND_ELIM:
        threshold = round_elimination_threshold(
            state.horizon, state.delta, layer.epoch, int(layer.counts.min()), state.sigma
        )
        best = layer.means.max()
        doomed = best - layer.means > threshold
        if doomed.any():
            _eliminate(state, layer, doomed)
        if layer.counts.min() >= quota:
            _advance_epoch(state, layer)
        return
    if layer.counts.min() < quota:
        return
    best = layer.means.max()
    threshold = epoch_elimination_threshold(state.horizon, state.delta, layer.epoch, state.sigma)
    doomed = best - layer.means > threshold
    if doomed.any():
        _eliminate(state, layer, doomed)
    _advance_epoch(state, layer)


class RMELPolicy(BasePolicy):
    POLICY_KIND = PolicyKind.RMEL

    def __init__(
            self,
            horizon: int,
            delta: float,
            dim: int,
            rng: np.random.Generator,
            sampling_rng: np.random.Generator,
            base: float = RMELDefaults.B,
            variant: RMELVariant = RMELVariant.EPOCH_ELIM,
            sample_mode: SampleMode = SampleMode.UNIFORM,
            region_cap: int = CoveringConstant.REGION_CAP,
            sigma: Optional[float] = None,
            kind: Optional[PolicyKind] = None
    ):
        super(RMELPolicy, self).__init__(horizon=horizon, delta=delta, dim=dim, kind=kind)
        self.state: RMELState = init_rmel(horizon, delta, base, dim, variant, region_cap, sigma)
        self.sample_mode: SampleMode = sample_mode
        self._rng: np.random.Generator = rng
        self._sampling_rng: np.random.Generator = sampling_rng
        self._pending: Optional[Tuple[int, int, Arm]] = None

    def select_arm(self) -> Arm:
        layer_index = sample_layer(self.state, self._rng)
        position, region = choose_region(self.state, layer_index)
        arm = sample_arm_in_region(region, self._sampling_rng, self.sample_mode)
        self._pending = (layer_index, position, arm)
        return arm

    def update(self, arm: Arm, observation: float) -> None:
        if self._pending is None or self._pending[2] != arm:
            raise PolicyStateError(f"Arm {arm} was not selected this round")
        layer_index, position, _ = self._pending
        record_and_maybe_eliminate(self.state, layer_index, position, observation)
        self._pending = None
        self.t += 1

    def round_info(self) -> Dict[str, object]:
        if self._pending is None:
            return {}
        layer_index, position, _ = self._pending
        layer = self.state.layers[layer_index - 1]
        return {"layer": layer_index, "region": str(layer.regions[position]), "epoch": layer.epoch}
