"""Supervised attention Bi-LSTM classifier that scores how normal a state looks.

Its normal-class probability drives the intrinsic reward. The network is the
same architecture as the agent, read as two class logits (normal, anomaly).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import ConfigError
from .corpus import Label
from .embedding import EpisodeState, stack_states
from .neural import Adam, QNetwork, softmax_binary
from .seeding import derive_seed, rng_for


@dataclass(frozen=True)
class OracleConfig:
    epochs: int = 30
    lr: float = 1e-3
    batch: int = 32
    hidden: int = 128
    seed: int = 0


@dataclass
class OracleModel:
    net: QNetwork
    config: OracleConfig
    loss_history: list[float] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.loss_history[-1] if self.loss_history else float("nan")

    def prob_normal(self, X: np.ndarray, lengths) -> np.ndarray:
        return 1.0 - softmax_binary(self.net.q_values(X, lengths))


def _cross_entropy(logits: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross-entropy and its gradient w.r.t. the logits."""
    m = logits.max(axis=1, keepdims=True)
    logp = logits - m - np.log(np.exp(logits - m).sum(axis=1, keepdims=True))
    n = len(y)
    loss = -logp[np.arange(n), y].mean()
    grad = np.exp(logp)
    grad[np.arange(n), y] -= 1.0
    return float(loss), grad / n


def dataset_loss(model: OracleModel, X, lengths, y) -> float:
    loss, _ = _cross_entropy(model.net.q_values(X, lengths), y)
    return loss


def train_oracle(labeled: Sequence[EpisodeState], cfg: OracleConfig = OracleConfig()) -> OracleModel:
    y = np.array([s.label is Label.ANOMALY for s in labeled], dtype=np.int64)
    if len(labeled) == 0 or y.min() == y.max():
        raise ConfigError("oracle training needs both normal and anomalous labeled sequences")
    d = labeled[0].vectors.shape[1]
    net = QNetwork(d, cfg.hidden, seed=derive_seed(cfg.seed, "oracle", "init"))
    model = OracleModel(net, cfg)
    if cfg.epochs <= 0:
        return model
    X, lengths = stack_states(labeled)
    opt = Adam(net, lr=cfg.lr)
    rng = rng_for(cfg.seed, "oracle", "shuffle")
    for _ in range(cfg.epochs):
        order = rng.permutation(len(y))
        for i in range(0, len(order), cfg.batch):
            idx = order[i:i + cfg.batch]
            lens = lengths[idx]
            logits, trace = net.forward(X[idx, : lens.max()], lens)
            _, grad = _cross_entropy(logits, y[idx])
            opt.step(net, net.backward(trace, grad))
        model.loss_history.append(dataset_loss(model, X, lengths, y))
    return model


def rob_p(model: OracleModel, state: EpisodeState) -> float:
    """Oracle probability that ``state`` is normal."""
    X, lengths = stack_states([state])
    return float(model.prob_normal(X, lengths)[0])
