"""Run every stage end to end into one directory and print the final report."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from dqnlog.cli import StageError, end_to_end, read_config_file


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="End-to-end pipeline run")
    parser.add_argument("run_dir", type=Path)
    parser.add_argument("--config", type=Path, help="key = value file shared by all stages")
    parser.add_argument("--input", help="raw log file; a synthetic corpus is generated when omitted")
    parser.add_argument("--labels", help="session_key,label file for --input")
    parser.add_argument("--seed", type=int, default=0)
    return parser.parse_args()


def _coerce(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return None if value in ("", "none", "None") else value


def main() -> int:
    args = parse_args()
    config = {k: _coerce(v) for k, v in read_config_file(args.config).items()} if args.config else {}
    config.setdefault("seed", args.seed)
    if args.input:
        config["input"] = args.input
        config["labels"] = args.labels
    try:
        report = end_to_end(args.run_dir, config)
    except StageError as exc:
        print(exc, file=sys.stderr)
        return 2
    print(report.read_text(), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
