"""Fixed-depth prefix-tree template miner (Drain)."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import ConfigError, ContractError

WILDCARD = "<*>"


@dataclass
class Template:
    id: int
    tokens: list[str]
    count: int = 1


@dataclass(frozen=True)
class ParserConfig:
    tree_depth: int = 4
    sim_threshold: float = 0.4
    max_children: int = 100

    def __post_init__(self):
        if self.tree_depth < 3:
            raise ConfigError(f"tree_depth must be >= 3, got {self.tree_depth}")
        if not 0.0 < self.sim_threshold < 1.0:
            raise ConfigError(f"sim_threshold must lie in (0, 1), got {self.sim_threshold}")
        if self.max_children < 2:
            raise ConfigError(f"max_children must be >= 2, got {self.max_children}")


def preprocess(tokens: Sequence[str]) -> list[str]:
    return [WILDCARD if any(ch.isdigit() for ch in tok) else tok for tok in tokens]


def sim_seq(template: Sequence[str], tokens: Sequence[str]) -> float:
    if len(template) != len(tokens):
        raise ContractError(f"length mismatch: template {len(template)} vs log {len(tokens)}")
    if not tokens:
        return 1.0
    same = sum(1 for t, w in zip(template, tokens) if t == w or t == WILDCARD)
    return same / len(tokens)


@dataclass
class _Node:
    children: dict[str, "_Node"] = field(default_factory=dict)
    template_ids: list[int] = field(default_factory=list)


class DrainTree:
    """Mutable parse tree. Template ids are dense and assigned in discovery order."""

    def __init__(self, config: ParserConfig | None = None):
        self.config = config or ParserConfig()
        self.root = _Node()
        self.templates: list[Template] = []

    def __len__(self) -> int:
        return len(self.templates)

    def _leaf(self, tokens: list[str]) -> _Node:
        node = self.root.children.setdefault(str(len(tokens)), _Node())
        for tok in tokens[: self.config.tree_depth - 2]:
            if tok in node.children:
                node = node.children[tok]
            elif len(node.children) < self.config.max_children:
                node = node.children.setdefault(tok, _Node())
            else:
                node = node.children.setdefault(WILDCARD, _Node())
        return node

    def parse(self, content: Sequence[str]) -> int:
        tokens = preprocess(content)
        leaf = self._leaf(tokens)
        best_id, best_sim = None, -1.0
        for tid in leaf.template_ids:
            s = sim_seq(self.templates[tid].tokens, tokens)
            if s > best_sim:
                best_id, best_sim = tid, s
        if best_id is not None and best_sim >= self.config.sim_threshold:
            tpl = self.templates[best_id]
            tpl.tokens = [t if t == w else WILDCARD for t, w in zip(tpl.tokens, tokens)]
            tpl.count += 1
            return best_id
        tpl = Template(len(self.templates), list(tokens))
        self.templates.append(tpl)
        leaf.template_ids.append(tpl.id)
        return tpl.id

    def parse_all(self, contents: Iterable[Sequence[str]]) -> list[int]:
        return [self.parse(c) for c in contents]


def parse(record, tree: DrainTree) -> int:
    return tree.parse(record.content)


def dump_templates(tree_or_templates, path: str | Path) -> None:
    templates = tree_or_templates.templates if isinstance(tree_or_templates, DrainTree) else tree_or_templates
    with open(path, "w", encoding="utf-8") as fh:
        for tpl in sorted(templates, key=lambda t: t.id):
            fh.write(f"{tpl.id}\t{tpl.count}\t{' '.join(tpl.tokens)}\n")


def load_templates(path: str | Path) -> list[Template]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{line_no}: expected 'id<TAB>count<TAB>tokens'")
            out.append(Template(int(parts[0]), parts[2].split(" "), int(parts[1])))
    return sorted(out, key=lambda t: t.id)
