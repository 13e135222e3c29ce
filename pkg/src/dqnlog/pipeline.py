"""Stage wiring shared by the CLI and the experiment scripts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import Label, LogRecord, SyntheticConfig, generate_synthetic, label_records
from .embedding import Origin, embed_sequences, embed_templates
from .evaluation import ExperimentData
from .oracle import OracleConfig, train_oracle
from .parser import DrainTree, ParserConfig
from .seeding import derive_seed
from .windowing import LogSequence, SplitConfig, group_by_session, split_train_test


@dataclass
class Corpus:
    records: list[LogRecord]
    tree: DrainTree
    template_ids: list[int]
    sequences: list[LogSequence]


def parse_and_group(records: Sequence[LogRecord], parser_cfg: ParserConfig = ParserConfig()) -> Corpus:
    tree = DrainTree(parser_cfg)
    ids = tree.parse_all(r.content for r in records)
    return Corpus(list(records), tree, ids, group_by_session(records, ids))


def build_experiment(dl: Sequence[LogSequence], du: Sequence[LogSequence], test: Sequence[LogSequence],
                     vectors: Mapping[int, np.ndarray], t_max: int, oracle_cfg: OracleConfig) -> ExperimentData:
    labeled = embed_sequences(dl, vectors, t_max, Origin.LABELED)
    unlabeled = embed_sequences(du, vectors, t_max, Origin.UNLABELED)
    test_states = embed_sequences(test, vectors, t_max, Origin.UNLABELED)
    oracle = train_oracle(labeled, oracle_cfg)
    return ExperimentData(labeled, unlabeled, test_states, [s.label for s in test], oracle,
                          [s.label for s in du], t_max)


def synthetic_experiment(n_sessions: int = 10_000, templates_k: int = 60, contamination: float = 0.03,
                         seed: int = 0, d: int = 64, t_max: int = 20, train_fraction: float = 0.8,
                         labeled_fraction: float = 0.3, oracle_epochs: int = 30,
                         oracle_hidden: int = 32) -> tuple[ExperimentData, Corpus]:
    """Generate, parse, group, split, embed and fit the oracle for one synthetic corpus."""
    records, labels = generate_synthetic(
        SyntheticConfig(n_sessions, templates_k, contamination, derive_seed(seed, "synth")))
    corpus = parse_and_group(label_records(records, labels))
    dl, du, test = split_train_test(
        corpus.sequences, SplitConfig(train_fraction, labeled_fraction, derive_seed(seed, "split")))
    vectors = embed_templates(corpus.tree.templates, d, seed=0)
    oracle_cfg = OracleConfig(epochs=oracle_epochs, hidden=oracle_hidden, seed=derive_seed(seed, "oracle"))
    return build_experiment(dl, du, test, vectors, t_max, oracle_cfg), corpus


def score_groups(data: ExperimentData) -> list[str]:
    """Group tags for labeled + unlabeled states, in that order."""
    tags = ["labeled_anomaly" if s.label is Label.ANOMALY else "labeled_normal" for s in data.labeled]
    tags += ["unlabeled_anomaly" if t is Label.ANOMALY else "unlabeled_normal" for t in data.unlabeled_truth]
    return tags
