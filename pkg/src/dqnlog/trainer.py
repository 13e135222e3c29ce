"""DQN training with replay, a delayed target network and a label regularizer."""

from __future__ import annotations

import csv
import logging
import math
from collections import deque
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import ConfigError, ContractError
from .corpus import Label
from .embedding import EpisodeState, stack_states
from .environment import ANOMALY_ACTION, NORMAL_ACTION, Environment
from .neural import Adam, QNetwork, save_checkpoint, softmax_binary
from .seeding import derive_seed, rng_for

log = logging.getLogger(__name__)

BCE_CLAMP = 1e-12
METRICS_HEADER = ["episode", "mean_reward", "loss1", "loss2", "epsilon",
                  "test_precision", "test_recall", "test_f1"]


@dataclass
class TrainConfig:
    n_episodes: int = 10
    n_steps: int = 2000
    warmup_episodes: int = 5
    target_sync_steps: int | None = None  # None -> 5 * n_steps
    gamma: float = 0.99
    lr: float = 1e-3
    replay_batch: int = 32
    reg_batch: int = 32
    lam: float = 1.0
    epsilon_start: float = 1.0
    epsilon_end: float = 0.1
    anneal_rate: float | None = None  # None -> reach epsilon_end halfway through training
    memory_capacity: int = 100_000
    hidden: int = 128
    context: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.target_sync_steps is None:
            self.target_sync_steps = 5 * self.n_steps
        if self.anneal_rate is None:
            total = self.n_episodes * self.n_steps
            self.anneal_rate = (self.epsilon_start - self.epsilon_end) / (0.5 * total) if total else 0.0
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.epsilon_end > self.epsilon_start:
            raise ConfigError("epsilon_end must not exceed epsilon_start")
        for name in ("n_episodes", "n_steps", "target_sync_steps", "replay_batch", "memory_capacity", "hidden"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.warmup_episodes < 0 or self.lam < 0 or self.anneal_rate < 0:
            raise ConfigError("warmup_episodes, lam and anneal_rate must be non-negative")
        if self.lam > 0 and (self.reg_batch < 2 or self.reg_batch % 2):
            raise ConfigError("reg_batch must be a positive even number")


@dataclass
class Transition:
    state: EpisodeState
    action: int
    reward: float
    next_state: EpisodeState
    terminal: bool


class ReplayMemory:
    """Fixed-capacity FIFO of transitions with uniform sampling."""

    def __init__(self, capacity: int = 100_000):
        if capacity < 1:
            raise ConfigError("replay capacity must be positive")
        self.capacity = capacity
        self._items: deque = deque(maxlen=capacity)

    def __len__(self) -> int:
        return len(self._items)

    def push(self, item) -> None:
        self._items.append(item)

    def items(self) -> list:
        return list(self._items)

    def sample(self, n: int, rng: np.random.Generator) -> list:
        if not self._items:
            raise ContractError("cannot sample from an empty replay memory")
        idx = rng.integers(len(self._items), size=n)
        return [self._items[i] for i in idx]


def epsilon_at(step: int, cfg: TrainConfig) -> float:
    return max(cfg.epsilon_end, cfg.epsilon_start - step * cfg.anneal_rate)


def select_action(q_values, epsilon: float, rng: np.random.Generator) -> int:
    if rng.random() < epsilon:
        return int(rng.integers(2))
    return ANOMALY_ACTION if q_values[1] > q_values[0] else NORMAL_ACTION


def td_target(reward: float, terminal: bool, next_q: np.ndarray | None, gamma: float) -> float:
    if terminal:
        return float(reward)
    return float(reward + gamma * np.max(next_q))


def total_loss(l1: float, l2: float, lam: float) -> float:
    return l1 + lam * l2


# ---------------------------------------------------------------------------
# losses

@dataclass
class LossResult:
    total: float
    loss1: float
    loss2: float
    grads: dict[str, np.ndarray]


def _td_targets(transitions: Sequence[Transition], target: QNetwork, gamma: float) -> np.ndarray:
    rewards = np.array([t.reward for t in transitions])
    terminal = np.array([t.terminal for t in transitions])
    y = rewards.copy()
    live = np.flatnonzero(~terminal)
    if len(live) and gamma != 0.0:
        X, lengths = stack_states([transitions[i].next_state for i in live])
        next_q, _ = target.forward(X, lengths)
        y[live] += gamma * next_q.max(axis=1)
    return y


def _bce_terms(q: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    p = softmax_binary(q)
    pc = np.clip(p, BCE_CLAMP, 1.0 - BCE_CLAMP)
    loss = float(-(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc)).mean())
    # d/dq1 of BCE through the softmax is p - y; zero where the clamp is active
    g = np.where(p == pc, p - y, 0.0) / len(y)
    return loss, np.stack([-g, g], axis=1)


def regularized_loss(net: QNetwork, target: QNetwork, transitions: Sequence[Transition],
                     reg_states: Sequence[EpisodeState], gamma: float, lam: float) -> LossResult:
    """TD mean squared error plus ``lam`` times label cross-entropy, with gradients.

    The TD targets come from ``target`` and are treated as constants. Both
    terms share one forward/backward pass through ``net``.
    """
    n1 = len(transitions)
    use_reg = lam != 0.0 and len(reg_states) > 0
    states = [t.state for t in transitions] + (list(reg_states) if use_reg else [])
    if not states:
        raise ContractError("empty loss batch")
    X, lengths = stack_states(states)
    q, trace = net.forward(X, lengths)
    dq = np.zeros_like(q)
    loss1 = 0.0
    if n1:
        y = _td_targets(transitions, target, gamma)
        actions = np.array([t.action for t in transitions])
        err = q[np.arange(n1), actions] - y
        loss1 = float(np.mean(err * err))
        dq[np.arange(n1), actions] = 2.0 * err / n1
    loss2 = 0.0
    if use_reg:
        labels = np.array([s.label is Label.ANOMALY for s in reg_states], dtype=np.float64)
        loss2, g2 = _bce_terms(q[n1:], labels)
        dq[n1:] = lam * g2
    return LossResult(total_loss(loss1, loss2, lam), loss1, loss2, net.backward(trace, dq))


def loss1(transitions, net, target, gamma) -> LossResult:
    return regularized_loss(net, target, transitions, [], gamma, 0.0)


def loss2(reg_states, net) -> LossResult:
    counts = {lab: sum(s.label is lab for s in reg_states) for lab in (Label.NORMAL, Label.ANOMALY)}
    if counts[Label.NORMAL] != counts[Label.ANOMALY] or counts[Label.NORMAL] + counts[Label.ANOMALY] != len(reg_states):
        raise ContractError(f"regularizer batch must be class-balanced, got {counts}")
    res = regularized_loss(net, net, [], reg_states, 0.0, 1.0)
    return LossResult(res.loss2, 0.0, res.loss2, res.grads)


# ---------------------------------------------------------------------------
# scoring

def anomaly_scores(net: QNetwork, states: Sequence[EpisodeState]) -> np.ndarray:
    """Q(s, anomaly) for each state."""
    X, lengths = stack_states(states)
    return net.q_values(X, lengths)[:, ANOMALY_ACTION]


def anomaly_score(net: QNetwork, state: EpisodeState) -> float:
    return float(anomaly_scores(net, [state])[0])


def classify_q(q: np.ndarray) -> np.ndarray:
    """True where the anomaly action has strictly the larger Q-value."""
    return q[:, ANOMALY_ACTION] > q[:, NORMAL_ACTION]


def predict(net: QNetwork, states: Sequence[EpisodeState]) -> list[Label]:
    X, lengths = stack_states(states)
    return [Label.ANOMALY if a else Label.NORMAL for a in classify_q(net.q_values(X, lengths))]


# ---------------------------------------------------------------------------
# training loop

@dataclass
class TrainResult:
    net: QNetwork
    target: QNetwork
    history: list[dict] = field(default_factory=list)
    updates: int = 0


def _sample_reg_batch(labeled_by_class, m: int, rng: np.random.Generator) -> list[EpisodeState]:
    out = []
    for group in labeled_by_class:
        replace = len(group) < m // 2
        idx = rng.choice(len(group), size=m // 2, replace=replace)
        out.extend(group[i] for i in idx)
    return out


def _fmt(x) -> str:
    return "nan" if x is None or (isinstance(x, float) and math.isnan(x)) else repr(float(x))


def train(env: Environment, cfg: TrainConfig, eval_states: Sequence[EpisodeState] | None = None,
          eval_truth: Sequence[Label] | None = None, out_dir: str | Path | None = None,
          t_max: int = 50) -> TrainResult:
    """Run ``n_episodes`` x ``n_steps`` interaction steps and return the trained network.

    Gradient updates start after ``warmup_episodes``. The target network is
    synced every ``target_sync_steps`` global steps and the last step of each
    episode is terminal. With ``out_dir`` set, a metrics CSV is appended
    after every episode and ``agent.ckpt`` is rewritten.
    """
    from .evaluation import confusion, prf1

    d = env.labeled[0].vectors.shape[1]
    net = QNetwork(d, cfg.hidden, cfg.context, seed=derive_seed(cfg.seed, "agent", "init"))
    target = net.copy()
    opt = Adam(net, lr=cfg.lr)
    memory = ReplayMemory(cfg.memory_capacity)
    rng_start = rng_for(cfg.seed, "trainer", "start")
    rng_act = rng_for(cfg.seed, "trainer", "act")
    rng_replay = rng_for(cfg.seed, "trainer", "replay")
    rng_reg = rng_for(cfg.seed, "trainer", "reg")

    by_class = [[s for s in env.labeled if s.label is Label.NORMAL],
                [s for s in env.labeled if s.label is Label.ANOMALY]]
    if cfg.lam > 0 and (not by_class[0] or not by_class[1]):
        raise ConfigError("regularizer needs both classes in the labeled set")

    eval_X = eval_len = None
    if eval_states:
        eval_X, eval_len = stack_states(eval_states)

    metrics_path = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        metrics_path = out_dir / "metrics.csv"
        with open(metrics_path, "w", newline="") as fh:
            csv.writer(fh).writerow(METRICS_HEADER)

    result = TrainResult(net, target)
    step = 0
    for episode in range(cfg.n_episodes):
        state = env.unlabeled[int(rng_start.integers(len(env.unlabeled)))]
        rewards, l1s, l2s = [], [], []
        learning = episode >= cfg.warmup_episodes
        for t in range(cfg.n_steps):
            eps = epsilon_at(step, cfg)
            X, lengths = stack_states([state])
            q, _ = net.forward(X, lengths)
            action = select_action(q[0], eps, rng_act)
            nxt = env.next_state(state, action)
            reward = env.reward(state, action)
            memory.push(Transition(state, action, reward, nxt, t == cfg.n_steps - 1))
            rewards.append(reward)
            if learning:
                batch = memory.sample(cfg.replay_batch, rng_replay)
                reg = _sample_reg_batch(by_class, cfg.reg_batch, rng_reg) if cfg.lam > 0 else []
                res = regularized_loss(net, target, batch, reg, cfg.gamma, cfg.lam)
                if not math.isfinite(res.total):
                    raise FloatingPointError(
                        f"non-finite loss at episode {episode} step {t}: loss1={res.loss1} loss2={res.loss2}")
                opt.step(net, res.grads)
                l1s.append(res.loss1)
                l2s.append(res.loss2)
                result.updates += 1
            step += 1
            if step % cfg.target_sync_steps == 0:
                target.load_from(net)
            state = nxt

        row = {
            "episode": episode,
            "mean_reward": float(np.mean(rewards)),
            "loss1": float(np.mean(l1s)) if l1s else float("nan"),
            "loss2": float(np.mean(l2s)) if l2s else float("nan"),
            "epsilon": epsilon_at(step, cfg),
            "test_precision": float("nan"), "test_recall": float("nan"), "test_f1": float("nan"),
        }
        if eval_X is not None and eval_truth is not None:
            preds = [Label.ANOMALY if a else Label.NORMAL for a in classify_q(net.q_values(eval_X, eval_len))]
            row["test_precision"], row["test_recall"], row["test_f1"] = prf1(confusion(preds, eval_truth))
        result.history.append(row)
        log.info("episode %d: reward=%.4f loss1=%.4f loss2=%.4f eps=%.3f f1=%.4f", episode,
                 row["mean_reward"], row["loss1"], row["loss2"], row["epsilon"], row["test_f1"])
        if metrics_path is not None:
            with open(metrics_path, "a", newline="") as fh:
                csv.writer(fh).writerow([episode] + [_fmt(row[k]) for k in METRICS_HEADER[1:]])
            save_checkpoint(net, out_dir / "agent.ckpt", "agent", cfg.seed, t_max)
    return result


def config_dict(cfg: TrainConfig) -> dict:
    return asdict(cfg)
