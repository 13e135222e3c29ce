"""Group template-id streams into labeled log sequences and split them."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import ConfigError, ContractError
from .corpus import Label, LogRecord


@dataclass
class LogSequence:
    seq_id: str
    template_ids: list[int]
    label: Label = Label.UNKNOWN


def combine_labels(labels) -> Label:
    """Anomaly if any member is; otherwise Unknown if any member is; else Normal."""
    unknown = False
    for lab in labels:
        if lab is Label.ANOMALY:
            return Label.ANOMALY
        if lab is Label.UNKNOWN:
            unknown = True
    return Label.UNKNOWN if unknown else Label.NORMAL


def group_by_session(records: Sequence[LogRecord], template_ids: Sequence[int]) -> list[LogSequence]:
    if len(records) != len(template_ids):
        raise ContractError("records and template_ids must have equal length")
    ids: dict[str, list[int]] = {}
    labels: dict[str, list[Label]] = {}
    for rec, tid in zip(records, template_ids):
        if rec.session_key is None:
            raise ContractError(f"record at line {rec.line_no} has no session key")
        ids.setdefault(rec.session_key, []).append(int(tid))
        labels.setdefault(rec.session_key, []).append(rec.label)
    return [LogSequence(key, ids[key], combine_labels(labels[key])) for key in ids]


def sliding_windows(
    records: Sequence[LogRecord], template_ids: Sequence[int], size: int = 20, stride: int = 20
) -> list[LogSequence]:
    if size < 1 or stride < 1:
        raise ConfigError("window size and stride must be >= 1")
    if len(records) != len(template_ids):
        raise ContractError("records and template_ids must have equal length")
    n = len(records)
    if n == 0:
        return []
    if n < size:
        starts = [0]
        size = n
    else:
        starts = range(0, n - size + 1, stride)
    return [
        LogSequence(
            f"win_{start}",
            [int(t) for t in template_ids[start:start + size]],
            combine_labels(r.label for r in records[start:start + size]),
        )
        for start in starts
    ]


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.8
    labeled_fraction: float = 0.3
    seed: int = 0


def split_train_test(sequences: Sequence[LogSequence], cfg: SplitConfig = SplitConfig()):
    """Stratified split into (labeled train, unlabeled train, test).

    Each class is shuffled independently and cut by the two fractions, so all
    three parts keep the corpus contamination up to rounding. The unlabeled
    part keeps its labels here; hiding them is the embedding layer's job.
    """
    for name in ("train_fraction", "labeled_fraction"):
        v = getattr(cfg, name)
        if not 0.0 < v < 1.0:
            raise ConfigError(f"{name} must lie in (0, 1), got {v}")
    by_class: dict[Label, list[LogSequence]] = {Label.NORMAL: [], Label.ANOMALY: []}
    for seq in sequences:
        if seq.label is Label.UNKNOWN:
            raise ConfigError(f"sequence {seq.seq_id} has no label; cannot stratify")
        by_class[seq.label].append(seq)

    rng = np.random.default_rng(cfg.seed)
    parts: tuple[list, list, list] = ([], [], [])
    for label in (Label.NORMAL, Label.ANOMALY):
        group = by_class[label]
        order = rng.permutation(len(group))
        n_train = round(len(group) * cfg.train_fraction)
        n_lab = round(n_train * cfg.labeled_fraction)
        cuts = (order[:n_lab], order[n_lab:n_train], order[n_train:])
        counts = [len(c) for c in cuts]
        if min(counts) == 0:
            raise ConfigError(
                f"too few {label.value} sequences ({len(group)}) to stratify: "
                f"labeled/unlabeled/test would get {counts}"
            )
        for part, idx in zip(parts, cuts):
            part.extend(group[i] for i in sorted(idx))
    return parts


def write_sequences(sequences: Sequence[LogSequence], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for seq in sequences:
            fh.write(f"{seq.seq_id}\t{seq.label.value}\t{','.join(map(str, seq.template_ids))}\n")


def read_sequences(path: str | Path) -> list[LogSequence]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3 or not parts[2]:
                raise ValueError(f"{path}:{line_no}: expected 'seq_id<TAB>label<TAB>ids'")
            out.append(LogSequence(parts[0], [int(x) for x in parts[2].split(",")], Label(parts[1])))
    return out
