"""Command-line entry point, one subcommand per pipeline stage.

Every option can also come from a ``key = value`` config file given with
``--config``; flags override the file, which overrides built-in defaults.
Each output directory receives a ``manifest.json`` before anything else is
written to it.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import ConfigError, __version__
from .corpus import (
    CorpusManifest, Label, SyntheticConfig, attach_labels, dump_records, generate_synthetic, load_records,
    read_raw, write_label_file, write_raw,
)
from .embedding import Origin, embed_sequences, embed_templates, load_external_embeddings, write_embeddings
from .environment import EnvConfig, RewardConfig
from .evaluation import (
    REPORT_HEADER, VARIANTS, ExperimentData, VariantResult, confusion, expand_grid, point_name, prf1,
    run_variant, sweep, write_report,
)
from .neural import load_checkpoint, save_checkpoint
from .oracle import OracleConfig, OracleModel, train_oracle
from .parser import DrainTree, ParserConfig, dump_templates, load_templates
from .seeding import derive_seed
from .trainer import TrainConfig, anomaly_scores, classify_q, config_dict, predict
from .windowing import SplitConfig, group_by_session, read_sequences, sliding_windows, split_train_test, write_sequences

log = logging.getLogger("dqnlog")

LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
MANIFEST = "manifest.json"


class UsageError(Exception):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage} failed: {cause}")
        self.stage, self.cause = stage, cause


# ---------------------------------------------------------------------------
# option tables

@dataclass(frozen=True)
class Opt:
    name: str
    type: Callable = str
    default: Any = None
    help: str = ""
    required: bool = False


def _opt_int(v):
    return None if v in (None, "", "none", "None") else int(v)


def _opt_float(v):
    return None if v in (None, "", "none", "None") else float(v)


OUT = Opt("out", str, None, "output directory", required=True)
SEED = Opt("seed", int, 0, "base seed; every stage derives its own sub-seed from it")

TRAIN_OPTS = [
    Opt("dl", str, None, "labeled training sequences", required=True),
    Opt("du", str, None, "unlabeled training sequences", required=True),
    Opt("oracle", str, None, "oracle checkpoint", required=True),
    Opt("test", str, None, "test sequences scored after every episode"),
    Opt("embeddings", str, None, "template vectors (default: embeddings.tsv next to --dl)"),
    Opt("n_episodes", int, 10), Opt("n_steps", int, 2000), Opt("warmup_episodes", int, 5),
    Opt("target_sync_steps", _opt_int, None, "default 5 * n_steps"),
    Opt("gamma", float, 0.99), Opt("lr", float, 1e-3), Opt("replay_batch", int, 32), Opt("reg_batch", int, 32),
    Opt("lambda", float, 1.0, "weight of the label regularizer"),
    Opt("epsilon_start", float, 1.0), Opt("epsilon_end", float, 0.1),
    Opt("anneal_rate", _opt_float, None, "default: reach epsilon_end halfway through training"),
    Opt("memory_capacity", int, 100_000), Opt("hidden", int, 128), Opt("context", _opt_int, None),
    Opt("r1", float, 1.0), Opt("r2", float, 0.1), Opt("r3", float, 0.4), Opt("r4", float, 1.5),
    Opt("delta", float, 0.5), Opt("unlabeled_anomaly_penalty", float, -1.0),
    Opt("p", float, 0.5), Opt("subset_size", int, 1000), Opt("transition", str, "cosine"),
    SEED,
]

COMMANDS: dict[str, tuple[str, list[Opt]]] = {
    "synth": ("generate a labeled synthetic corpus", [
        Opt("n_sessions", int, 1000), Opt("templates", int, 60), Opt("contamination", float, 0.03), SEED, OUT,
    ]),
    "parse": ("mine templates from a raw log file", [
        Opt("input", str, None, "raw log file", required=True),
        Opt("adapter", str, "hdfs", "hdfs, bgl or generic"),
        Opt("labels", str, None, "session_key,label file"),
        Opt("tree_depth", int, 4), Opt("sim_threshold", float, 0.4), Opt("max_children", int, 100), OUT,
    ]),
    "group": ("group parsed records into sequences and split them", [
        Opt("records", str, None, "records.tsv from parse", required=True),
        Opt("events", str, None, "events.tsv from parse (default: next to --records)"),
        Opt("mode", str, "session", "session or window"),
        Opt("window_size", int, 20), Opt("stride", int, 20),
        Opt("train_fraction", float, 0.8), Opt("labeled_fraction", float, 0.3), SEED, OUT,
    ]),
    "embed": ("embed the template catalog", [
        Opt("templates", str, None, "templates.tsv from parse", required=True),
        Opt("dim", int, 64), Opt("hash_seed", int, 0),
        Opt("external", str, None, "precomputed vectors to validate and import instead"), OUT,
    ]),
    "train-oracle": ("fit the normality classifier on the labeled set", [
        Opt("dl", str, None, "labeled training sequences", required=True),
        Opt("embeddings", str, None, "template vectors (default: embeddings.tsv next to --dl)"),
        Opt("t_max", int, 50), Opt("epochs", int, 30), Opt("lr", float, 1e-3), Opt("batch", int, 32),
        Opt("hidden", int, 128), SEED, OUT,
    ]),
    "train": ("train the agent", TRAIN_OPTS + [OUT]),
    "eval": ("score a test set with a trained agent", [
        Opt("model", str, None, "agent checkpoint", required=True),
        Opt("test", str, None, "test sequences", required=True),
        Opt("embeddings", str, None, "template vectors (default: embeddings.tsv next to --test)"),
        Opt("out", str, None, "optional directory for per-sequence scores"),
    ]),
    "ablate": ("run the ablation variants on one dataset", [
        o if o.name != "test" else Opt("test", str, None, "test sequences", required=True) for o in TRAIN_OPTS
    ] + [Opt("variants", str, ",".join(VARIANTS)), OUT]),
    "sweep": ("one training run per hyperparameter grid point", [
        o if o.name != "test" else Opt("test", str, None, "test sequences", required=True) for o in TRAIN_OPTS
    ] + [Opt("grid", str, None, "e.g. 'lambda=0.5,1,2;r3=0.2,0.4'", required=True), Opt("jobs", int, 1), OUT]),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dqnlog", description="Semi-supervised log anomaly detection with a deep Q-network")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (desc, opts) in COMMANDS.items():
        p = sub.add_parser(name, help=desc, description=desc, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="key = value file; flags override it")
        for o in opts:
            default = "required" if o.required else f"default {o.default}"
            p.add_argument("--" + o.name.replace("_", "-"), dest=o.name, type=o.type,
                           help=f"{o.help} ({default})".strip())
    return parser


def read_config_file(path: str | Path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{line_no}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def resolve_config(command: str, flags: dict[str, Any]) -> dict[str, Any]:
    """Merge defaults, the optional config file and explicit flags, in that order."""
    opts = {o.name: o for o in COMMANDS[command][1]}
    cfg = {name: o.default for name, o in opts.items()}
    if flags.get("config"):
        try:
            file_values = read_config_file(flags["config"])
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        unknown = sorted(set(file_values) - set(opts))
        if unknown:
            raise UsageError(f"{flags['config']}: unknown keys for {command}: {unknown}")
        for key, value in file_values.items():
            try:
                cfg[key] = opts[key].type(value)
            except ValueError:
                raise UsageError(f"{flags['config']}: bad value for {key}: {value!r}") from None
    cfg.update({k: v for k, v in flags.items() if k in opts})
    missing = [f"--{o.name.replace('_', '-')}" for o in opts.values() if o.required and cfg[o.name] is None]
    if missing:
        raise UsageError(f"{command}: missing required options {', '.join(missing)}")
    return cfg


# ---------------------------------------------------------------------------
# manifests

def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: dict[str, dict[str, str]]
    seed: int | None
    version: str = __version__
    started_utc: str = field(default_factory=lambda: time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()))
    finished_utc: str | None = None

    def write(self, out_dir: str | Path) -> None:
        Path(out_dir, MANIFEST).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


def start_run(command: str, cfg: dict, inputs: dict[str, str | None], out_dir: str | Path) -> RunManifest:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    digests = {k: {"path": str(v), "sha256": sha256_file(v)} for k, v in inputs.items() if v is not None}
    manifest = RunManifest(command, dict(cfg), digests, cfg.get("seed"))
    manifest.write(out)
    return manifest


def finish_run(manifest: RunManifest, out_dir: str | Path) -> None:
    manifest.finished_utc = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    manifest.write(out_dir)


# ---------------------------------------------------------------------------
# subcommands

def _sibling(path: str, name: str) -> str:
    return str(Path(path).parent / name)


def cmd_synth(cfg: dict) -> None:
    syn = SyntheticConfig(cfg["n_sessions"], cfg["templates"], cfg["contamination"], derive_seed(cfg["seed"], "synth"))
    syn.validate()
    out = Path(cfg["out"])
    m = start_run("synth", cfg, {}, out)
    records, labels = generate_synthetic(syn)
    write_raw(records, out / "synth.log")
    write_label_file(labels, out / "labels.csv")
    finish_run(m, out)
    log.info("wrote %d records in %d sessions to %s", len(records), len(labels), out)


def cmd_parse(cfg: dict) -> None:
    out = Path(cfg["out"])
    pcfg = ParserConfig(cfg["tree_depth"], cfg["sim_threshold"], cfg["max_children"])
    m = start_run("parse", cfg, {"input": cfg["input"], "labels": cfg["labels"]}, out)
    records = list(read_raw(cfg["input"], cfg["adapter"]))
    if cfg["labels"]:
        records = attach_labels(records, cfg["labels"])
    tree = DrainTree(pcfg)
    ids = tree.parse_all(r.content for r in records)
    dump_templates(tree, out / "templates.tsv")
    dump_records(records, out / "records.tsv")
    with open(out / "events.tsv", "w") as fh:
        fh.writelines(f"{r.line_no}\t{tid}\n" for r, tid in zip(records, ids))
    stats = CorpusManifest.from_records(records, cfg["adapter"])
    Path(out / "corpus.json").write_text(json.dumps(asdict(stats), indent=2) + "\n")
    finish_run(m, out)
    log.info("parsed %d records into %d templates", len(records), len(tree))


def _read_events(path: str) -> list[int]:
    with open(path) as fh:
        return [int(line.split("\t")[1]) for line in fh if line.strip()]


def cmd_group(cfg: dict) -> None:
    if cfg["mode"] not in ("session", "window"):
        raise ConfigError(f"mode must be session or window, got {cfg['mode']!r}")
    split = SplitConfig(cfg["train_fraction"], cfg["labeled_fraction"], derive_seed(cfg["seed"], "split"))
    events = cfg["events"] or _sibling(cfg["records"], "events.tsv")
    out = Path(cfg["out"])
    m = start_run("group", cfg, {"records": cfg["records"], "events": events}, out)
    records = load_records(cfg["records"])
    ids = _read_events(events)
    if cfg["mode"] == "session":
        seqs = group_by_session(records, ids)
    else:
        seqs = sliding_windows(records, ids, cfg["window_size"], cfg["stride"])
    dl, du, test = split_train_test(seqs, split)
    write_sequences(seqs, out / "all.seq")
    for name, part in (("dl", dl), ("du", du), ("test", test)):
        write_sequences(part, out / f"{name}.seq")
    finish_run(m, out)
    log.info("%d sequences: dl=%d du=%d test=%d", len(seqs), len(dl), len(du), len(test))


def cmd_embed(cfg: dict) -> None:
    out = Path(cfg["out"])
    m = start_run("embed", cfg, {"templates": cfg["templates"], "external": cfg["external"]}, out)
    templates = load_templates(cfg["templates"])
    if cfg["external"]:
        vectors = load_external_embeddings(cfg["external"], [t.id for t in templates])
    else:
        vectors = embed_templates(templates, cfg["dim"], cfg["hash_seed"])
    write_embeddings(vectors, out / "embeddings.tsv")
    finish_run(m, out)


def _vectors(cfg: dict, anchor: str) -> tuple[str, dict]:
    path = cfg["embeddings"] or _sibling(cfg[anchor], "embeddings.tsv")
    return path, load_external_embeddings(path)


def cmd_train_oracle(cfg: dict) -> None:
    out = Path(cfg["out"])
    emb_path = cfg["embeddings"] or _sibling(cfg["dl"], "embeddings.tsv")
    ocfg = OracleConfig(cfg["epochs"], cfg["lr"], cfg["batch"], cfg["hidden"], derive_seed(cfg["seed"], "oracle"))
    m = start_run("train-oracle", cfg, {"dl": cfg["dl"], "embeddings": emb_path}, out)
    _, vectors = _vectors(cfg, "dl")
    labeled = embed_sequences(read_sequences(cfg["dl"]), vectors, cfg["t_max"], Origin.LABELED)
    model = train_oracle(labeled, ocfg)
    save_checkpoint(model.net, out / "oracle.ckpt", "oracle", cfg["seed"], cfg["t_max"])
    with open(out / "oracle_loss.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "loss"])
        w.writerows([i, repr(v)] for i, v in enumerate(model.loss_history))
    finish_run(m, out)
    log.info("oracle final loss %.6f", model.final_loss)


def _train_configs(cfg: dict) -> tuple[TrainConfig, RewardConfig, EnvConfig]:
    t = TrainConfig(
        cfg["n_episodes"], cfg["n_steps"], cfg["warmup_episodes"], cfg["target_sync_steps"], cfg["gamma"],
        cfg["lr"], cfg["replay_batch"], cfg["reg_batch"], cfg["lambda"], cfg["epsilon_start"],
        cfg["epsilon_end"], cfg["anneal_rate"], cfg["memory_capacity"], cfg["hidden"], cfg["context"],
        cfg["seed"])
    r = RewardConfig(cfg["r1"], cfg["r2"], cfg["r3"], cfg["r4"], cfg["delta"], cfg["unlabeled_anomaly_penalty"])
    e = EnvConfig(cfg["p"], cfg["subset_size"], cfg["transition"])
    return t, r, e


def _train_inputs(cfg: dict) -> dict[str, str | None]:
    return {"dl": cfg["dl"], "du": cfg["du"], "oracle": cfg["oracle"], "test": cfg["test"],
            "embeddings": cfg["embeddings"] or _sibling(cfg["dl"], "embeddings.tsv")}


def _experiment(cfg: dict) -> ExperimentData:
    net, meta = load_checkpoint(cfg["oracle"], "oracle")
    t_max = meta["t_max"]
    _, vectors = _vectors(cfg, "dl")
    labeled = embed_sequences(read_sequences(cfg["dl"]), vectors, t_max, Origin.LABELED)
    du = read_sequences(cfg["du"])
    unlabeled = embed_sequences(du, vectors, t_max, Origin.UNLABELED)
    test_seqs = read_sequences(cfg["test"]) if cfg["test"] else []
    test = embed_sequences(test_seqs, vectors, t_max, Origin.UNLABELED)
    oracle = OracleModel(net, OracleConfig(hidden=net.hidden))
    return ExperimentData(labeled, unlabeled, test, [s.label for s in test_seqs], oracle,
                          [s.label for s in du], t_max)


def cmd_train(cfg: dict) -> None:
    t, r, e = _train_configs(cfg)
    out = Path(cfg["out"])
    m = start_run("train", cfg, _train_inputs(cfg), out)
    m.config["resolved"] = config_dict(t)
    m.write(out)
    data = _experiment(cfg)
    res = run_variant("full", data, t, r, e, out_dir=out)
    finish_run(m, out)
    log.info("trained: test P=%.4f R=%.4f F1=%.4f", res.precision, res.recall, res.f1)


def cmd_eval(cfg: dict) -> tuple[float, float, float]:
    out = cfg["out"]
    m = None
    if out:
        inputs = {"model": cfg["model"], "test": cfg["test"],
                  "embeddings": cfg["embeddings"] or _sibling(cfg["test"], "embeddings.tsv")}
        m = start_run("eval", cfg, inputs, out)
    net, meta = load_checkpoint(cfg["model"], "agent")
    _, vectors = _vectors(cfg, "test")
    seqs = read_sequences(cfg["test"])
    states = embed_sequences(seqs, vectors, meta["t_max"], Origin.UNLABELED)
    preds = predict(net, states)
    p, r, f1 = prf1(confusion(preds, [s.label for s in seqs]))
    if m is not None:
        scores = anomaly_scores(net, states)
        with open(Path(out) / "scores.tsv", "w") as fh:
            for s, sc, pr in zip(seqs, scores, preds):
                fh.write(f"{s.seq_id}\t{sc!r}\t{pr.value}\t{s.label.value}\n")
        finish_run(m, out)
    print(f"{p:.6f} {r:.6f} {f1:.6f}")
    return p, r, f1


def cmd_ablate(cfg: dict) -> None:
    variants = [v.strip() for v in cfg["variants"].split(",") if v.strip()]
    for v in variants:
        if v not in VARIANTS:
            raise ConfigError(f"unknown variant {v!r}; expected some of {VARIANTS}")
    t, r, e = _train_configs(cfg)
    out = Path(cfg["out"])
    m = start_run("ablate", cfg, _train_inputs(cfg), out)
    data = _experiment(cfg)
    rows: list[VariantResult] = []
    for v in variants:
        sub = out / v
        sm = start_run("ablate", {**cfg, "variant": v}, _train_inputs(cfg), sub)
        rows.append(run_variant(v, data, t, r, e, out_dir=sub))
        finish_run(sm, sub)
        log.info("%s: P=%.4f R=%.4f F1=%.4f", v, rows[-1].precision, rows[-1].recall, rows[-1].f1)
    write_report(rows, out / "report.csv")
    finish_run(m, out)


def parse_grid(text: str) -> dict[str, list[float]]:
    grid = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise ConfigError(f"bad grid entry {part!r}; expected key=v1,v2,...")
        key, values = part.split("=", 1)
        try:
            grid[key.strip()] = [float(v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"bad grid values for {key.strip()!r}: {values!r}") from None
    return grid


def cmd_sweep(cfg: dict) -> None:
    grid = parse_grid(cfg["grid"])
    points = expand_grid(grid)
    if cfg["jobs"] < 1:
        raise ConfigError("jobs must be >= 1")
    t, r, e = _train_configs(cfg)
    out = Path(cfg["out"])
    m = start_run("sweep", cfg, _train_inputs(cfg), out)
    for i, point in enumerate(points):
        start_run("sweep", {**cfg, "point": point_name(point)}, _train_inputs(cfg), out / f"point_{i:03d}")
    data = _experiment(cfg)
    rows = sweep(grid, data, t, r, e, jobs=cfg["jobs"], out_dir=out)
    write_report(rows, out / "report.csv")
    for i in range(len(points)):
        sub = out / f"point_{i:03d}"
        sm = RunManifest(**json.loads((sub / MANIFEST).read_text()))
        finish_run(sm, sub)
    finish_run(m, out)


HANDLERS = {
    "synth": cmd_synth, "parse": cmd_parse, "group": cmd_group, "embed": cmd_embed,
    "train-oracle": cmd_train_oracle, "train": cmd_train, "eval": cmd_eval, "ablate": cmd_ablate,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# end to end

def stage_config(command: str, **values) -> dict:
    cfg = {o.name: o.default for o in COMMANDS[command][1]}
    unknown = set(values) - set(cfg)
    if unknown:
        raise ConfigError(f"unknown keys for {command}: {sorted(unknown)}")
    cfg.update(values)
    return cfg


def end_to_end(run_dir: str | Path, config: dict | None = None) -> Path:
    """Run every stage into ``run_dir/<stage>`` and write ``run_dir/report.csv``.

    ``config`` holds stage options by name; a key applies to every stage that
    accepts it. Without an ``input`` key a synthetic corpus is generated first.
    """
    config = dict(config or {})
    run = Path(run_dir)
    top = start_run("end-to-end", config, {}, run)
    began = time.perf_counter()

    def stage(name: str, command: str, **fixed):
        opts = {o.name for o in COMMANDS[command][1]}
        values = {k: v for k, v in config.items() if k in opts}
        values.update(fixed)
        cfg = stage_config(command, out=str(run / name), **values)
        try:
            return HANDLERS[command](cfg)
        except Exception as exc:
            raise StageError(name, exc) from exc

    if "input" in config:
        raw, labels = config["input"], config.get("labels")
    else:
        stage("synth", "synth")
        raw, labels = str(run / "synth" / "synth.log"), str(run / "synth" / "labels.csv")
    stage("parse", "parse", input=raw, labels=labels)
    stage("group", "group", records=str(run / "parse" / "records.tsv"))
    stage("embed", "embed", templates=str(run / "parse" / "templates.tsv"))
    seqs = {k: str(run / "group" / f"{k}.seq") for k in ("dl", "du", "test")}
    emb = str(run / "embed" / "embeddings.tsv")
    stage("oracle", "train-oracle", dl=seqs["dl"], embeddings=emb)
    oracle = str(run / "oracle" / "oracle.ckpt")
    stage("train", "train", embeddings=emb, oracle=oracle, **seqs)
    p, r, f1 = stage("eval", "eval", model=str(run / "train" / "agent.ckpt"), test=seqs["test"], embeddings=emb)
    report = run / "report.csv"
    write_report([VariantResult("full", [], p, r, f1, time.perf_counter() - began)], report)
    finish_run(top, run)
    return report


# ---------------------------------------------------------------------------

def setup_logging() -> None:
    level = os.environ.get("LOGDQN_LOG_LEVEL", "warn").lower()
    if level not in LOG_LEVELS:
        raise UsageError(f"LOGDQN_LOG_LEVEL must be one of {sorted(LOG_LEVELS)}, got {level!r}")
    logging.basicConfig(level=LOG_LEVELS[level], format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger().setLevel(LOG_LEVELS[level])


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        setup_logging()
        ns = parser.parse_args(argv)
        if ns.command is None:
            raise UsageError(parser.format_usage() + "dqnlog: error: a subcommand is required")
        flags = {k: v for k, v in vars(ns).items() if k != "command"}
        cfg = resolve_config(ns.command, flags)
        HANDLERS[ns.command](cfg)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"dqnlog: configuration error: {exc}", file=sys.stderr)
        return 1
    except StageError as exc:
        print(f"dqnlog: {exc}", file=sys.stderr)
        return 1 if isinstance(exc.cause, ConfigError) else 2
    except (OSError, ValueError, KeyError, RuntimeError, FloatingPointError) as exc:
        print(f"dqnlog: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
