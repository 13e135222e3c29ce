"""Confusion metrics, ablation variants and hyperparameter sweeps."""

from __future__ import annotations

import csv
import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import ConfigError, ContractError
from .corpus import Label
from .embedding import EpisodeState
from .environment import EnvConfig, Environment, RewardConfig
from .oracle import OracleModel
from .seeding import derive_seed, rng_for


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def _is_anomaly(x) -> bool:
    if isinstance(x, Label):
        if x is Label.UNKNOWN:
            raise ContractError("evaluation needs fully labeled truth")
        return x is Label.ANOMALY
    return bool(x)


def confusion(predictions: Sequence, truth: Sequence) -> ConfusionCounts:
    """Count outcomes with the anomaly class as positive.

    Accepts :class:`Label` values or booleans (True = anomaly).
    """
    if len(predictions) != len(truth):
        raise ContractError(f"{len(predictions)} predictions for {len(truth)} truth labels")
    tp = tn = fp = fn = 0
    for p, t in zip(predictions, truth):
        p, t = _is_anomaly(p), _is_anomaly(t)
        if p and t:
            tp += 1
        elif p:
            fp += 1
        elif t:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp, tn, fp, fn)


def prf1(counts: ConfusionCounts) -> tuple[float, float, float]:
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


# ---------------------------------------------------------------------------
# experiments

@dataclass
class ExperimentData:
    """Everything a training run consumes, prepared once and shared across runs."""

    labeled: list[EpisodeState]
    unlabeled: list[EpisodeState]
    test: list[EpisodeState]
    test_truth: list[Label]
    oracle: OracleModel
    unlabeled_truth: list[Label] | None = None  # held out from training; analysis only
    t_max: int = 50


VARIANTS = ("full", "no_cross", "random_env", "euc_env")


def variant_configs(variant: str, train_cfg, env_cfg: EnvConfig):
    if variant not in VARIANTS:
        raise ConfigError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if variant == "no_cross":
        train_cfg = replace(train_cfg, lam=0.0)
    elif variant == "random_env":
        env_cfg = replace(env_cfg, transition="random")
    elif variant == "euc_env":
        env_cfg = replace(env_cfg, transition="euclidean")
    return train_cfg, env_cfg


@dataclass
class VariantResult:
    name: str
    history: list[dict]
    precision: float
    recall: float
    f1: float
    runtime_s: float
    train_result: object = None


def run_variant(variant: str, data: ExperimentData, train_cfg, reward_cfg: RewardConfig = RewardConfig(),
                env_cfg: EnvConfig = EnvConfig(), out_dir: str | Path | None = None) -> VariantResult:
    from .trainer import train

    train_cfg, env_cfg = variant_configs(variant, train_cfg, env_cfg)
    start = time.perf_counter()
    env = Environment(data.labeled, data.unlabeled, data.oracle, reward_cfg, env_cfg,
                      rng=rng_for(train_cfg.seed, "env"))
    res = train(env, train_cfg, data.test, data.test_truth, out_dir=out_dir, t_max=data.t_max)
    last = res.history[-1]
    return VariantResult(variant, res.history, last["test_precision"], last["test_recall"], last["test_f1"],
                         time.perf_counter() - start, res)


REPORT_HEADER = ["variant_or_gridpoint", "precision", "recall", "f1", "runtime_s"]


def write_report(rows: Sequence[VariantResult], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(REPORT_HEADER)
        for r in rows:
            w.writerow([r.name, repr(r.precision), repr(r.recall), repr(r.f1), f"{r.runtime_s:.3f}"])


SWEEP_KEYS = {"lambda", "r1", "r2", "r3", "r4", "delta", "p", "subset_size"}


def expand_grid(grid: Mapping[str, Sequence[float]]) -> list[dict[str, float]]:
    if not grid or any(len(v) == 0 for v in grid.values()):
        raise ConfigError("sweep grid must be non-empty")
    unknown = set(grid) - SWEEP_KEYS
    if unknown:
        raise ConfigError(f"unknown sweep keys {sorted(unknown)}; allowed {sorted(SWEEP_KEYS)}")
    keys = list(grid)
    return [dict(zip(keys, values)) for values in itertools.product(*(grid[k] for k in keys))]


def point_name(point: Mapping[str, float]) -> str:
    return ";".join(f"{k}={v:g}" for k, v in point.items())


def apply_point(point: Mapping[str, float], train_cfg, reward_cfg: RewardConfig, env_cfg: EnvConfig):
    """Overlay a grid point on the base configs; the run seed derives from the point itself."""
    t_kw, r_kw, e_kw = {}, {}, {}
    for k, v in point.items():
        if k == "lambda":
            t_kw["lam"] = float(v)
        elif k in ("r1", "r2", "r3", "r4", "delta"):
            r_kw[k] = float(v)
        elif k == "subset_size":
            e_kw[k] = int(v)
        else:
            e_kw[k] = float(v)
    t_kw["seed"] = derive_seed(train_cfg.seed, "sweep", point_name(point))
    return replace(train_cfg, **t_kw), replace(reward_cfg, **r_kw), replace(env_cfg, **e_kw)


def _sweep_point(args):
    point, data, train_cfg, reward_cfg, env_cfg, out_dir = args
    t, r, e = apply_point(point, train_cfg, reward_cfg, env_cfg)
    res = run_variant("full", data, t, r, e, out_dir=out_dir)
    res.name = point_name(point)
    res.train_result = None
    return res


def sweep(grid: Mapping[str, Sequence[float]], data: ExperimentData, train_cfg,
          reward_cfg: RewardConfig = RewardConfig(), env_cfg: EnvConfig = EnvConfig(),
          jobs: int = 1, out_dir: str | Path | None = None) -> list[VariantResult]:
    """One full training run per grid point (cartesian product of the grid)."""
    points = expand_grid(grid)
    tasks = []
    for i, point in enumerate(points):
        sub = Path(out_dir) / f"point_{i:03d}" if out_dir is not None else None
        tasks.append((point, data, train_cfg, reward_cfg, env_cfg, sub))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_point, tasks))
    return [_sweep_point(t) for t in tasks]


def random_classifier_f1(contamination: float, flag_rate: float = 0.5) -> float:
    """F1 from the expected precision and recall of a classifier that flags at random.

    Precision equals the contamination and recall equals ``flag_rate``.
    """
    c, q = float(contamination), float(flag_rate)
    return 2 * c * q / (c + q) if c + q else 0.0


def group_mean_scores(scores: np.ndarray, groups: Sequence[str]) -> dict[str, float]:
    out: dict[str, list[float]] = {}
    for s, g in zip(scores, groups):
        out.setdefault(g, []).append(float(s))
    return {g: float(np.mean(v)) for g, v in out.items()}
