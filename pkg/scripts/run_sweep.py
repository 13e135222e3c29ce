"""Hyperparameter sweep on the synthetic corpus, one training run per grid point.

The default grid crosses the false-positive and false-negative penalties.
With r3 fixed, recall should not drop as r4 grows; that trend is printed as
a diagnostic, not enforced.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from dqnlog.cli import parse_grid
from dqnlog.evaluation import sweep, write_report
from dqnlog.pipeline import synthetic_experiment
from dqnlog.trainer import TrainConfig


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Grid sweep over reward and loss weights")
    parser.add_argument("--grid", default="r3=0.4;r4=1,1.5,2")
    parser.add_argument("--out", type=Path, default=Path("results/sweep"))
    parser.add_argument("--n-sessions", type=int, default=10_000)
    parser.add_argument("--episodes", type=int, default=10)
    parser.add_argument("--steps", type=int, default=500)
    parser.add_argument("--hidden", type=int, default=32)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    data, _ = synthetic_experiment(n_sessions=args.n_sessions, seed=args.seed, t_max=20)
    cfg = TrainConfig(n_episodes=args.episodes, n_steps=args.steps, hidden=args.hidden, seed=args.seed)
    rows = sweep(parse_grid(args.grid), data, cfg, jobs=args.jobs, out_dir=args.out)
    for r in rows:
        print(f"{r.name:24s} P={r.precision:.4f} R={r.recall:.4f} F1={r.f1:.4f}")
    write_report(rows, args.out / "report.csv")

    r4_rows = [r for r in rows if "r4=" in r.name]
    if len(r4_rows) > 1:
        recalls = [r.recall for r in r4_rows]
        trend = "non-decreasing" if all(b >= a for a, b in zip(recalls, recalls[1:])) else "not monotone"
        print(f"recall vs r4 (grid order): {['%.3f' % x for x in recalls]} -> {trend}")


if __name__ == "__main__":
    main()
