"""Raw log ingestion, label attachment and synthetic corpora."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import ConfigError


class Label(str, enum.Enum):
    NORMAL = "Normal"
    ANOMALY = "Anomaly"
    UNKNOWN = "Unknown"


@dataclass
class LogRecord:
    line_no: int
    content: list[str]
    session_key: str | None = None
    timestamp: str | None = None
    label: Label = Label.UNKNOWN


@dataclass
class CorpusManifest:
    record_count: int
    anomaly_fraction: float
    adapter_name: str
    seed: int | None = None

    @classmethod
    def from_records(cls, records: list[LogRecord], adapter_name: str, seed: int | None = None):
        known = [r for r in records if r.label is not Label.UNKNOWN]
        n_anom = sum(r.label is Label.ANOMALY for r in known)
        frac = n_anom / len(known) if known else 0.0
        return cls(len(records), frac, adapter_name, seed)


BLOCK_ID = re.compile(r"blk_-?\d+")
_HDFS_HEADER = re.compile(r"^(\d{6} \d{6}) \d+ \w+ \S+: (.*)$")


def _hdfs(line_no: int, line: str) -> LogRecord:
    m = _HDFS_HEADER.match(line)
    if m:
        timestamp, body = m.group(1), m.group(2)
    else:
        timestamp, body = None, line
    tokens = body.split() or line.split()
    key = None
    for tok in tokens:
        found = BLOCK_ID.search(tok)
        if found:
            key = found.group(0)
            break
    return LogRecord(line_no, tokens, key, timestamp)


def _bgl(line_no: int, line: str) -> LogRecord:
    # label, unix ts, date, node, time, node repeat, type, component, level, message...
    fields = line.split()
    label = Label.NORMAL if fields[0] == "-" else Label.ANOMALY
    if len(fields) > 9:
        return LogRecord(line_no, fields[9:], fields[3], fields[1], label)
    content = fields[1:] or fields
    ts = fields[1] if len(fields) > 1 else None
    node = fields[3] if len(fields) > 3 else None
    return LogRecord(line_no, content, node, ts, label)


def _generic(line_no: int, line: str) -> LogRecord:
    return LogRecord(line_no, line.split())


ADAPTERS = {"hdfs": _hdfs, "bgl": _bgl, "generic": _generic}


def parse_lines(lines: Iterable[str], adapter: str = "generic") -> Iterator[LogRecord]:
    try:
        parse_line = ADAPTERS[adapter]
    except KeyError:
        raise ConfigError(f"unknown adapter {adapter!r}; expected one of {sorted(ADAPTERS)}") from None
    for line_no, line in enumerate(lines):
        if not line.strip():
            continue
        yield parse_line(line_no, line.rstrip("\n"))


def read_raw(path: str | Path, adapter: str = "generic") -> Iterator[LogRecord]:
    """Yield one record per non-empty line of ``path``.

    Line numbers are zero-based positions in the file, blank lines included,
    so a record can always be traced back to its source line.
    """
    if adapter not in ADAPTERS:
        raise ConfigError(f"unknown adapter {adapter!r}; expected one of {sorted(ADAPTERS)}")
    with open(path, encoding="utf-8", errors="replace") as fh:
        yield from parse_lines(fh, adapter)


class LabelFileError(ValueError):
    pass


def read_label_file(path: str | Path) -> dict[str, Label]:
    labels: dict[str, Label] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            # tolerate the "BlockId,Label" header shipped with the HDFS labels
            if line_no == 1 and len(parts) == 2 and parts[1].lower() == "label":
                continue
            if len(parts) != 2 or parts[1] not in (Label.NORMAL.value, Label.ANOMALY.value):
                raise LabelFileError(f"{path}:{line_no}: malformed label line {line!r}")
            key, value = parts[0], Label(parts[1])
            if key in labels and labels[key] is not value:
                raise LabelFileError(f"{path}:{line_no}: conflicting labels for {key!r}")
            labels[key] = value
    return labels


def write_label_file(labels: Mapping[str, Label], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, label in labels.items():
            fh.write(f"{key},{Label(label).value}\n")


def label_records(records: Iterable[LogRecord], labels: Mapping[str, Label]) -> list[LogRecord]:
    out = []
    for rec in records:
        if rec.session_key is not None and rec.session_key in labels:
            rec.label = Label(labels[rec.session_key])
        out.append(rec)
    return out


def attach_labels(records: Iterable[LogRecord], label_file: str | Path) -> list[LogRecord]:
    return label_records(records, read_label_file(label_file))


def dump_records(records: Iterable[LogRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(f"{r.line_no}\t{r.session_key or ''}\t{r.label.value}\t{' '.join(r.content)}\n")


def load_records(path: str | Path) -> list[LogRecord]:
    """Read a file written by :func:`dump_records`. Timestamps are not kept."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split("\t", 3)
            if len(parts) != 4:
                raise ValueError(f"{path}:{line_no}: expected 4 tab-separated fields")
            try:
                out.append(LogRecord(int(parts[0]), parts[3].split(), parts[1] or None, label=Label(parts[2])))
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: {exc}") from None
    return out


# ---------------------------------------------------------------------------
# synthetic corpora

_SYLLABLES = [
    "ka", "lo", "mi", "ne", "pu", "ra", "si", "to", "vu", "ze", "bo", "da",
    "fe", "gi", "ho", "ju", "ly", "mo", "nu", "po", "qe", "ri", "su", "ty",
]


@dataclass
class SyntheticConfig:
    n_sessions: int = 1000
    templates_k: int = 60
    contamination: float = 0.03
    seed: int = 0
    n_workflows: int = 4
    n_rare: int = 8
    order_violation_share: float = 0.4

    def validate(self) -> None:
        if not 0.0 < self.contamination < 0.5:
            raise ConfigError(f"contamination must lie in (0, 0.5), got {self.contamination}")
        if self.templates_k < 5:
            raise ConfigError(f"templates_k must be >= 5, got {self.templates_k}")
        if self.n_sessions < 1:
            raise ConfigError("n_sessions must be positive")


FAULT_WORDS = ["error", "exception", "failed", "timeout", "corrupt", "refused", "abort", "fatal"]


def _make_templates(k: int, rng: np.random.Generator) -> list[list[str]]:
    """Build ``k`` letter-only token templates with a ``{}`` parameter slot.

    Constant words never repeat across templates, so the parser cannot merge
    two of them.
    """
    seen: set[str] = set()

    def word() -> str:
        while True:
            n = int(rng.integers(2, 4))
            w = "".join(_SYLLABLES[i] for i in rng.integers(0, len(_SYLLABLES), n))
            if w not in seen:
                seen.add(w)
                return w

    out = []
    for _ in range(k):
        n_const = int(rng.integers(3, 7))
        words = [word() for _ in range(n_const)]
        slot = int(rng.integers(1, n_const + 1))
        words.insert(slot, "{}")
        out.append(words)
    return out


def generate_synthetic(cfg: SyntheticConfig) -> tuple[list[LogRecord], dict[str, Label]]:
    """Generate a session-keyed corpus plus its ground-truth session labels.

    Normal sessions walk one of ``n_workflows`` fixed template chains with
    occasional repeated steps and benign filler events. Anomalous sessions
    either inject a template that never occurs in normal traffic or reverse
    the chain. Records are returned unlabeled; apply the labels with
    :func:`label_records`.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n_rare = min(cfg.n_rare, max(1, cfg.templates_k // 5))
    templates = _make_templates(cfg.templates_k, rng)
    rare_ids = list(range(cfg.templates_k - n_rare, cfg.templates_k))
    for tid in rare_ids:
        # fault templates share failure vocabulary, like real error messages do
        for w in rng.choice(FAULT_WORDS, size=2, replace=False):
            templates[tid].insert(int(rng.integers(1, len(templates[tid]) + 1)), str(w))
    normal_ids = list(range(cfg.templates_k - n_rare))

    n_workflows = max(1, min(cfg.n_workflows, len(normal_ids) // 3))
    chain_len = max(3, min(8, len(normal_ids) // (n_workflows + 1)))
    perm = rng.permutation(normal_ids)
    chains = [list(perm[i * chain_len:(i + 1) * chain_len]) for i in range(n_workflows)]
    fillers = [int(t) for t in perm[n_workflows * chain_len:]] or [int(perm[0])]

    n_anom = round(cfg.n_sessions * cfg.contamination)
    anomalous = set(rng.choice(cfg.n_sessions, size=n_anom, replace=False).tolist())

    records: list[LogRecord] = []
    labels: dict[str, Label] = {}
    block_base = 10**17
    for s in range(cfg.n_sessions):
        key = f"blk_{block_base + s * 7919}"
        chain = chains[int(rng.integers(n_workflows))]
        events: list[int] = []
        for step in chain:
            events.extend([int(step)] * int(rng.integers(1, 3)))
            if rng.random() < 0.3:
                events.append(int(rng.choice(fillers)))
        if s in anomalous:
            labels[key] = Label.ANOMALY
            if rng.random() < cfg.order_violation_share:
                events = events[::-1]
            else:
                pos = int(rng.integers(0, len(events) + 1))
                events.insert(pos, int(rng.choice(rare_ids)))
        else:
            labels[key] = Label.NORMAL
        for tid in events:
            content = [key if w == "{}" else w for w in templates[tid]]
            records.append(LogRecord(len(records), content, key, f"{s:06d}"))
    return records, labels


def write_raw(records: Iterable[LogRecord], path: str | Path) -> None:
    """Write records as HDFS-style raw lines readable by the ``hdfs`` adapter."""
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            ts = r.timestamp or "000000"
            fh.write(f"081109 {ts} {r.line_no % 1000} INFO dfs.Synth: {' '.join(r.content)}\n")
