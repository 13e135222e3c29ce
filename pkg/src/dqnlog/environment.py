"""Sampling environment over the labeled and unlabeled training states."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import ConfigError, ContractError
from .corpus import Label
from .embedding import EpisodeState, Origin, stack_states

NORMAL_ACTION, ANOMALY_ACTION = 0, 1
TRANSITIONS = ("cosine", "euclidean", "random")


@dataclass(frozen=True)
class RewardConfig:
    r1: float = 1.0
    r2: float = 0.1
    r3: float = 0.4
    r4: float = 1.5
    delta: float = 0.5
    unlabeled_anomaly_penalty: float = -1.0

    def __post_init__(self):
        if min(self.r1, self.r2, self.r3, self.r4) <= 0:
            raise ConfigError("r1..r4 must be positive")
        if not self.r1 > self.r2:
            raise ConfigError("true-positive reward r1 must exceed true-negative reward r2")
        if not self.r4 > self.r3:
            raise ConfigError("false-negative penalty r4 must exceed false-positive penalty r3")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")


@dataclass(frozen=True)
class EnvConfig:
    p: float = 0.5
    subset_size: int = 1000
    transition: str = "cosine"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"p must lie in [0, 1], got {self.p}")
        if self.subset_size < 1:
            raise ConfigError("subset_size must be positive")
        if self.transition not in TRANSITIONS:
            raise ConfigError(f"transition must be one of {TRANSITIONS}, got {self.transition!r}")


def external_reward(state: EpisodeState, action: int, cfg: RewardConfig = RewardConfig()) -> float:
    if state.origin is Origin.UNLABELED:
        return cfg.unlabeled_anomaly_penalty if action == ANOMALY_ACTION else 0.0
    if state.label is None:
        raise ContractError(f"labeled state {state.seq_id} carries no label")
    if state.label is Label.ANOMALY:
        return cfg.r1 if action == ANOMALY_ACTION else -cfg.r4
    return -cfg.r3 if action == ANOMALY_ACTION else cfg.r2


def intrinsic_reward(rob_p: float, delta: float = 0.5) -> float:
    """Novelty bonus from the oracle's normal-class probability.

    Note the jump at ``rob_p == delta``: just below it the bonus is near 0,
    at it the bonus is -1.
    """
    if rob_p < delta:
        return 1.0 - rob_p / delta
    return (rob_p - delta) / (1.0 - delta) - 1.0


def joint_reward(r_ext: float, r_int: float) -> float:
    return r_ext + r_int


class Environment:
    """Next-state sampler plus joint reward.

    With probability ``p`` the next state is a uniform draw from the labeled
    set regardless of the action. Otherwise a fresh uniform subset of the
    unlabeled set is drawn and the member most similar to the current state
    is returned after an anomaly action, the least similar after a normal
    one. Ties go to the lowest ``seq_id``.
    """

    def __init__(self, labeled: Sequence[EpisodeState], unlabeled: Sequence[EpisodeState], oracle=None,
                 reward: RewardConfig = RewardConfig(), config: EnvConfig = EnvConfig(),
                 rng: np.random.Generator | None = None):
        if not labeled or not unlabeled:
            raise ConfigError("environment needs non-empty labeled and unlabeled sets")
        if config.subset_size > len(unlabeled):
            raise ConfigError(f"subset_size {config.subset_size} exceeds unlabeled set size {len(unlabeled)}")
        if any(s.origin is not Origin.LABELED for s in labeled):
            raise ContractError("labeled set contains unlabeled states")
        if any(s.origin is not Origin.UNLABELED for s in unlabeled):
            raise ContractError("unlabeled set contains labeled states")
        self.labeled = list(labeled)
        self.unlabeled = list(unlabeled)
        self.reward_cfg = reward
        self.config = config
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.pooled = np.stack([s.pooled for s in self.unlabeled])
        self.norms = np.linalg.norm(self.pooled, axis=1)
        order = sorted(range(len(self.unlabeled)), key=lambda i: self.unlabeled[i].seq_id)
        self.id_rank = np.empty(len(order), dtype=np.int64)
        self.id_rank[order] = np.arange(len(order))
        self.last_subset: np.ndarray | None = None
        self._rob_p: dict[int, float] = {}
        if oracle is not None:
            for group in (self.labeled, self.unlabeled):
                X, lengths = stack_states(group)
                for s, p in zip(group, oracle.prob_normal(X, lengths)):
                    self._rob_p[id(s)] = float(p)

    def similarities(self, state: EpisodeState, subset: np.ndarray) -> np.ndarray:
        v = state.pooled
        if self.config.transition == "euclidean":
            return -np.linalg.norm(self.pooled[subset] - v, axis=1)
        nv = np.linalg.norm(v)
        denom = self.norms[subset] * nv
        raw = self.pooled[subset] @ v
        with np.errstate(invalid="ignore", divide="ignore"):
            sims = np.where(denom > 0, raw / np.where(denom > 0, denom, 1.0), 0.0)
        return np.clip(sims, -1.0, 1.0)

    def next_state(self, state: EpisodeState, action: int) -> EpisodeState:
        if self.rng.random() < self.config.p:
            self.last_subset = None
            return self.labeled[int(self.rng.integers(len(self.labeled)))]
        subset = self.rng.choice(len(self.unlabeled), size=self.config.subset_size, replace=False)
        self.last_subset = subset
        if self.config.transition == "random":
            return self.unlabeled[int(subset[self.rng.integers(len(subset))])]
        sims = self.similarities(state, subset)
        target = sims.max() if action == ANOMALY_ACTION else sims.min()
        ties = subset[sims == target]
        return self.unlabeled[int(ties[np.argmin(self.id_rank[ties])])]

    def rob_p(self, state: EpisodeState) -> float:
        try:
            return self._rob_p[id(state)]
        except KeyError:
            raise ContractError(f"no oracle score for state {state.seq_id}") from None

    def reward(self, state: EpisodeState, action: int) -> float:
        r_ext = external_reward(state, action, self.reward_cfg)
        r_int = intrinsic_reward(self.rob_p(state), self.reward_cfg.delta)
        return joint_reward(r_ext, r_int)
