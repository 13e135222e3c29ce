"""Ablation variants on the desk-scale synthetic corpus.

Builds the data once (generation, parsing, split, embedding, oracle) and then
trains each variant with the same seed.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from dqnlog.environment import EnvConfig
from dqnlog.evaluation import VARIANTS, run_variant, write_report
from dqnlog.pipeline import synthetic_experiment
from dqnlog.trainer import TrainConfig


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Run the ablation variants")
    parser.add_argument("--out", type=Path, default=Path("results/ablation"))
    parser.add_argument("--variants", nargs="+", default=list(VARIANTS), choices=VARIANTS)
    parser.add_argument("--n-sessions", type=int, default=10_000)
    parser.add_argument("--episodes", type=int, default=10)
    parser.add_argument("--steps", type=int, default=500)
    parser.add_argument("--hidden", type=int, default=32)
    parser.add_argument("--t-max", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    data, _ = synthetic_experiment(n_sessions=args.n_sessions, seed=args.seed, t_max=args.t_max)
    cfg = TrainConfig(n_episodes=args.episodes, n_steps=args.steps, hidden=args.hidden, seed=args.seed)
    rows = []
    for v in args.variants:
        res = run_variant(v, data, cfg, env_cfg=EnvConfig(), out_dir=args.out / v)
        print(f"{v:12s} P={res.precision:.4f} R={res.recall:.4f} F1={res.f1:.4f} ({res.runtime_s:.0f}s)")
        rows.append(res)
    write_report(rows, args.out / "report.csv")
    print(f"report: {args.out / 'report.csv'}")


if __name__ == "__main__":
    main()
