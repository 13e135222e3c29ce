"""Template and sequence embeddings.

The built-in embedder is a signed feature-hashing TF-IDF over template
tokens. Vectors produced offline by any language model can be imported
instead through :func:`load_external_embeddings`.
"""

from __future__ import annotations

import enum
import hashlib
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import ConfigError, ContractError
from .corpus import Label
from .parser import WILDCARD, Template
from .windowing import LogSequence


class Origin(str, enum.Enum):
    LABELED = "Labeled"
    UNLABELED = "Unlabeled"


@dataclass
class TermStats:
    n_templates: int
    df: dict[str, int]

    @classmethod
    def from_templates(cls, templates: Sequence[Template]) -> "TermStats":
        df: Counter[str] = Counter()
        for tpl in templates:
            df.update({t for t in tpl.tokens if t != WILDCARD})
        return cls(len(templates), dict(df))

    def idf(self, token: str) -> float:
        df = self.df.get(token, 0)
        if df == 0:
            return math.log(1.0 + self.n_templates)
        return math.log(1.0 + self.n_templates / df)


def _bucket(token: str, d: int, seed: int) -> tuple[int, float]:
    h = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=seed.to_bytes(8, "little")).digest()
    v = int.from_bytes(h, "little")
    return v % d, (1.0 if (v >> 63) & 1 else -1.0)


def embed_template(template: Template | Sequence[str], stats: TermStats, d: int = 64, seed: int = 0) -> np.ndarray:
    if d < 8:
        raise ConfigError(f"embedding dimension must be >= 8, got {d}")
    tokens = template.tokens if isinstance(template, Template) else list(template)
    vec = np.zeros(d)
    for tok, count in Counter(t for t in tokens if t != WILDCARD).items():
        idx, sign = _bucket(tok, d, seed)
        vec[idx] += sign * count * stats.idf(tok)
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


def embed_templates(templates: Sequence[Template], d: int = 64, seed: int = 0) -> dict[int, np.ndarray]:
    stats = TermStats.from_templates(templates)
    return {tpl.id: embed_template(tpl, stats, d, seed) for tpl in templates}


def write_embeddings(vectors: Mapping[int, np.ndarray], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tid in sorted(vectors):
            fh.write(f"{tid}\t{','.join(repr(float(x)) for x in vectors[tid])}\n")


def load_external_embeddings(path: str | Path, catalog_ids: Sequence[int] | None = None) -> dict[int, np.ndarray]:
    out: dict[int, np.ndarray] = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                tid_s, values = line.split("\t")
                vec = np.array([float(x) for x in values.split(",")])
                tid = int(tid_s)
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: malformed embedding row ({exc})") from None
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise ValueError(f"{path}:{line_no}: template {tid} has {len(vec)} values, expected {dim}")
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"{path}:{line_no}: non-finite value")
            out[tid] = vec
    if catalog_ids is not None:
        missing = sorted(set(catalog_ids) - set(out))
        if missing:
            raise ValueError(f"{path}: no vector for template ids {missing}")
    return out


@dataclass(eq=False)
class EpisodeState:
    """A padded semantic vector sequence presented to the agent.

    ``label`` is set only for labeled states; unlabeled states never carry
    one, so nothing downstream of the environment can read it.
    """

    vectors: np.ndarray  # (t_max, d), rows past ``length`` are zero
    length: int
    origin: Origin
    seq_id: str
    label: Label | None = None

    def __post_init__(self):
        if self.origin is Origin.LABELED:
            if self.label not in (Label.NORMAL, Label.ANOMALY):
                raise ContractError(f"labeled state {self.seq_id} needs a Normal/Anomaly label")
        elif self.label is not None:
            raise ContractError(f"unlabeled state {self.seq_id} must not carry a label")
        self._pooled = None

    @property
    def pooled(self) -> np.ndarray:
        if self._pooled is None:
            self._pooled = self.vectors[: self.length].mean(axis=0)
        return self._pooled


def embed_sequence(seq: LogSequence, vectors: Mapping[int, np.ndarray], t_max: int = 50,
                   origin: Origin = Origin.LABELED) -> EpisodeState:
    missing = [t for t in seq.template_ids if t not in vectors]
    if missing:
        raise KeyError(f"sequence {seq.seq_id}: no embedding for template ids {sorted(set(missing))}")
    ids = seq.template_ids[-t_max:]
    d = len(next(iter(vectors.values())))
    mat = np.zeros((t_max, d))
    for i, tid in enumerate(ids):
        mat[i] = vectors[tid]
    label = seq.label if origin is Origin.LABELED else None
    return EpisodeState(mat, len(ids), origin, seq.seq_id, label)


def embed_sequences(seqs: Sequence[LogSequence], vectors: Mapping[int, np.ndarray], t_max: int = 50,
                    origin: Origin = Origin.LABELED) -> list[EpisodeState]:
    return [embed_sequence(s, vectors, t_max, origin) for s in seqs]


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def state_similarity(a: EpisodeState, b: EpisodeState) -> float:
    if a.vectors.shape[1] != b.vectors.shape[1]:
        raise ContractError("states have different embedding dimensions")
    return cosine(a.pooled, b.pooled)


def stack_states(states: Sequence[EpisodeState]) -> tuple[np.ndarray, np.ndarray]:
    """Batch states into an (n, T, d) array cut to the longest true length."""
    lengths = np.array([s.length for s in states], dtype=np.int64)
    t = int(lengths.max())
    return np.stack([s.vectors[:t] for s in states]), lengths
