"""Acceptance gate: one test per criterion, each at its stated tolerance and time budget.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from dqnlog.corpus import Label
from dqnlog.embedding import EpisodeState, Origin, state_similarity
from dqnlog.environment import (
    ANOMALY_ACTION, NORMAL_ACTION, EnvConfig, Environment, external_reward, intrinsic_reward,
)
from dqnlog.evaluation import (
    ConfusionCounts, group_mean_scores, prf1, random_classifier_f1, run_variant,
)
from dqnlog.parser import DrainTree
from dqnlog.pipeline import score_groups, synthetic_experiment
from dqnlog.trainer import ReplayMemory, TrainConfig, anomaly_scores, train
import dqnlog.trainer as trainer_mod

from .fixtures import TWELVE_PATTERNS, twelve_pattern_corpus
from .gradcheck import check_total_loss, random_states

CRITERIA = {
    "test_reward_exactness": "reward exactness",
    "test_transition_oracle": "transition oracle",
    "test_gradient_check": "gradient check",
    "test_schedule_and_replay": "schedule/replay exactness",
    "test_ablation_identity": "ablation identity",
    "test_synthetic_end_to_end": "synthetic end-to-end",
    "test_score_ordering": "score ordering",
    "test_parser_fixture": "parser determinism/fixtures",
    "test_metric_identities": "metric identities",
    "test_reproducibility": "reproducibility",
}
DETAILS: dict[str, str] = {}

SEED = 0  # pinned before any result was seen


def _note(name, text):
    DETAILS[name] = text


# ---------------------------------------------------------------------------

def test_reward_exactness():
    t0 = time.perf_counter()
    mk = lambda o, lab=None: EpisodeState(np.ones((1, 2)), 1, o, "s", lab)  # noqa: E731
    la, ln, un = mk(Origin.LABELED, Label.ANOMALY), mk(Origin.LABELED, Label.NORMAL), mk(Origin.UNLABELED)
    got = [external_reward(la, ANOMALY_ACTION), external_reward(ln, NORMAL_ACTION),
           external_reward(ln, ANOMALY_ACTION), external_reward(la, NORMAL_ACTION),
           external_reward(un, NORMAL_ACTION), external_reward(un, ANOMALY_ACTION)]
    assert got == [1.0, 0.1, -0.4, -1.5, 0.0, -1.0]

    delta = 0.5

    def direct(p):
        return 1 - p / delta if p < delta else (p - delta) / (1 - delta) - 1

    points = [0.0, 0.25, delta - 1e-9, delta, 0.75, 1.0]
    err = max(abs(intrinsic_reward(p, delta) - direct(p)) for p in points)
    elapsed = time.perf_counter() - t0
    _note("test_reward_exactness", f"(max intrinsic error {err:.1e}, {elapsed:.3f}s)")
    assert err <= 1e-12
    assert elapsed < 1.0


def test_transition_oracle():
    t0 = time.perf_counter()
    pool_rng = np.random.default_rng(123)
    unlabeled = random_states(pool_rng, 400, 8, 6)
    labeled = random_states(pool_rng, 4, 8, 6, Origin.LABELED, [Label.NORMAL, Label.ANOMALY] * 2)
    mismatches = 0
    for trial in range(1000):
        env = Environment(labeled, unlabeled, None, config=EnvConfig(p=0.0, subset_size=100),
                          rng=np.random.default_rng(trial))
        s = unlabeled[trial % len(unlabeled)]
        for action in (ANOMALY_ACTION, NORMAL_ACTION):
            got = env.next_state(s, action)
            members = [unlabeled[i] for i in env.last_subset]
            sims = [state_similarity(s, m) for m in members]
            best = max(sims) if action == ANOMALY_ACTION else min(sims)
            expect = min((m for m, v in zip(members, sims) if v == best), key=lambda m: m.seq_id)
            mismatches += got is not expect
    elapsed = time.perf_counter() - t0
    _note("test_transition_oracle", f"({mismatches} mismatches in 2000 choices, {elapsed:.1f}s)")
    assert mismatches == 0
    assert elapsed < 30


def test_gradient_check():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(10):
        worst = max(worst, max(check_total_loss(seed).values()))
    elapsed = time.perf_counter() - t0
    _note("test_gradient_check", f"(max relative error {worst:.2e} over 10 seeds, {elapsed:.1f}s)")
    assert worst <= 1e-3
    assert elapsed < 120


def test_schedule_and_replay(monkeypatch):
    t0 = time.perf_counter()
    seen = []
    real = trainer_mod.select_action

    def spy(q, eps, rng):
        seen.append(eps)
        return real(q, eps, rng)

    monkeypatch.setattr(trainer_mod, "select_action", spy)
    rng = np.random.default_rng(0)
    labeled = random_states(rng, 4, 6, 3, Origin.LABELED, [Label.NORMAL, Label.ANOMALY] * 2)
    unlabeled = random_states(rng, 20, 6, 3)
    env = Environment(labeled, unlabeled, None, config=EnvConfig(subset_size=5), rng=rng)
    env.reward = lambda s, a: 0.0
    cfg = TrainConfig(n_episodes=10, n_steps=1000, warmup_episodes=10, hidden=2, seed=1)
    train(env, cfg)
    rate = 0.9 / (0.5 * 10_000)
    closed = [max(0.1, 1.0 - t * rate) for t in range(10_000)]
    sched_ok = len(seen) == 10_000 and all(a == b for a, b in zip(seen, closed))

    mem = ReplayMemory(1000)
    for i in range(1100):
        mem.push(i)
    fifo_ok = mem.items() == list(range(100, 1100))
    elapsed = time.perf_counter() - t0
    _note("test_schedule_and_replay", f"(schedule {'exact' if sched_ok else 'WRONG'}, "
          f"FIFO {'exact' if fifo_ok else 'WRONG'}, {elapsed:.1f}s)")
    assert sched_ok and fifo_ok
    assert elapsed < 10


def test_ablation_identity(tmp_path):
    t0 = time.perf_counter()
    data, _ = synthetic_experiment(n_sessions=2000, seed=SEED, t_max=20, oracle_epochs=5)
    cfg = TrainConfig(n_episodes=2, n_steps=200, warmup_episodes=1, hidden=32, lam=0.0, seed=SEED)
    run_variant("full", data, cfg, out_dir=tmp_path / "full")
    run_variant("no_cross", data, cfg, out_dir=tmp_path / "no_cross")
    same = (tmp_path / "full" / "agent.ckpt").read_bytes() == (tmp_path / "no_cross" / "agent.ckpt").read_bytes()
    elapsed = time.perf_counter() - t0
    _note("test_ablation_identity", f"(checkpoints {'identical' if same else 'DIFFER'}, {elapsed:.1f}s)")
    assert same
    assert elapsed < 300


# ---------------------------------------------------------------------------
# the synthetic run shared by the end-to-end, ordering and reproducibility checks

TRAIN = dict(n_episodes=10, n_steps=500, hidden=32, seed=SEED)


def _full_run(out_dir):
    t0 = time.perf_counter()
    data, corpus = synthetic_experiment(n_sessions=10_000, templates_k=60, contamination=0.03, seed=SEED,
                                        t_max=20, train_fraction=0.8, labeled_fraction=0.3)
    res = run_variant("full", data, TrainConfig(**TRAIN), out_dir=out_dir)
    return data, corpus, res, time.perf_counter() - t0, out_dir


@pytest.fixture(scope="module")
def synthetic_run(tmp_path_factory):
    return _full_run(tmp_path_factory.mktemp("run_a"))


def test_synthetic_end_to_end(synthetic_run):
    data, corpus, res, elapsed, _ = synthetic_run
    baseline = random_classifier_f1(0.03)
    shape = (len(corpus.sequences), len(data.labeled), len(data.unlabeled), len(data.test))
    contamination = sum(s.label is Label.ANOMALY for s in corpus.sequences) / len(corpus.sequences)
    _note("test_synthetic_end_to_end",
          f"(P={res.precision:.4f} R={res.recall:.4f} F1={res.f1:.4f}; random F1={baseline:.4f}; "
          f"{len(corpus.tree)} templates; {elapsed:.0f}s)")
    assert shape == (10_000, 2400, 5600, 2000)
    assert len(corpus.tree) >= 50
    assert contamination == 0.03
    assert res.f1 >= 0.80
    assert res.f1 > 0.0 and res.f1 > baseline
    assert elapsed < 15 * 60


def test_score_ordering(synthetic_run):
    data, _, res, _, _ = synthetic_run
    scores = anomaly_scores(res.train_result.net, data.labeled + data.unlabeled)
    g = group_mean_scores(scores, score_groups(data))
    chain = [g["labeled_anomaly"], g["unlabeled_anomaly"], g["unlabeled_normal"], g["labeled_normal"]]
    gaps = [a - b for a, b in zip(chain, chain[1:])]
    _note("test_score_ordering", "(means la={:.4f} ua={:.4f} un={:.4f} ln={:.4f}; gaps {})".format(
        *chain, ", ".join(f"{x:+.4f}" for x in gaps)))
    assert all(x > 0 for x in gaps)


def test_reproducibility(synthetic_run, tmp_path):
    *_, elapsed_a, out_a = synthetic_run
    *_, elapsed_b, out_b = _full_run(tmp_path / "run_b")
    same = {f: (out_a / f).read_bytes() == (out_b / f).read_bytes() for f in ("metrics.csv", "agent.ckpt")}
    _note("test_reproducibility", f"(metrics.csv {'identical' if same['metrics.csv'] else 'DIFFERS'}, "
          f"agent.ckpt {'identical' if same['agent.ckpt'] else 'DIFFERS'}, {elapsed_a + elapsed_b:.0f}s)")
    assert all(same.values())
    assert elapsed_b < 15 * 60


# ---------------------------------------------------------------------------

def test_parser_fixture():
    t0 = time.perf_counter()
    corpus = twelve_pattern_corpus()
    tree = DrainTree()
    ids = tree.parse_all(corpus)
    again = DrainTree()
    ids2 = again.parse_all(corpus)
    lengths_ok = all(len(tree.templates[t].tokens) == len(line) for t, line in zip(ids, corpus))
    # feeding the corpus a second time through the same tree changes nothing
    ids3 = tree.parse_all(corpus)
    elapsed = time.perf_counter() - t0
    _note("test_parser_fixture", f"({len(tree)} templates, {elapsed:.3f}s)")
    assert len(tree) == len(TWELVE_PATTERNS) == 12
    assert ids == ids2 == ids3
    assert [t.tokens for t in tree.templates] == [t.tokens for t in again.templates]
    assert lengths_ok
    assert elapsed < 5


# 20 tables (tp, fp, fn, tn) with precision, recall and F1 worked out by hand
HAND_TABLES = [
    ((9, 1, 3, 0), Fraction(9, 10), Fraction(3, 4), Fraction(9, 11)),
    ((1, 0, 0, 0), Fraction(1), Fraction(1), Fraction(1)),
    ((0, 0, 0, 5), Fraction(0), Fraction(0), Fraction(0)),
    ((0, 3, 0, 5), Fraction(0), Fraction(0), Fraction(0)),
    ((0, 0, 4, 5), Fraction(0), Fraction(0), Fraction(0)),
    ((1, 1, 1, 1), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)),
    ((2, 2, 0, 0), Fraction(1, 2), Fraction(1), Fraction(2, 3)),
    ((2, 0, 2, 0), Fraction(1), Fraction(1, 2), Fraction(2, 3)),
    ((3, 1, 1, 10), Fraction(3, 4), Fraction(3, 4), Fraction(3, 4)),
    ((5, 5, 0, 90), Fraction(1, 2), Fraction(1), Fraction(2, 3)),
    ((4, 1, 4, 2), Fraction(4, 5), Fraction(1, 2), Fraction(8, 13)),
    ((10, 0, 10, 0), Fraction(1), Fraction(1, 2), Fraction(2, 3)),
    ((6, 2, 3, 1), Fraction(3, 4), Fraction(2, 3), Fraction(12, 17)),
    ((7, 3, 7, 0), Fraction(7, 10), Fraction(1, 2), Fraction(7, 12)),
    ((1, 9, 0, 0), Fraction(1, 10), Fraction(1), Fraction(2, 11)),
    ((1, 0, 9, 0), Fraction(1), Fraction(1, 10), Fraction(2, 11)),
    ((60, 0, 0, 1940), Fraction(1), Fraction(1), Fraction(1)),
    ((30, 30, 30, 0), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)),
    ((2, 1, 3, 4), Fraction(2, 3), Fraction(2, 5), Fraction(1, 2)),
    ((8, 2, 2, 8), Fraction(4, 5), Fraction(4, 5), Fraction(4, 5)),
]


def test_metric_identities():
    t0 = time.perf_counter()
    bad = 0
    for (tp, fp, fn, tn), p, r, f in HAND_TABLES:
        got = prf1(ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn))
        bad += any(abs(g - float(e)) > 1e-12 for g, e in zip(got, (p, r, f)))
    rng = np.random.default_rng(0)
    violations = 0
    for tp, fp, fn in rng.integers(0, 1000, size=(10_000, 3)):
        p, r, f = prf1(ConfusionCounts(tp=int(tp), fp=int(fp), fn=int(fn)))
        if p > 0 and r > 0:
            violations += not (min(p, r) - 1e-12 <= f <= max(p, r) + 1e-12)
    elapsed = time.perf_counter() - t0
    _note("test_metric_identities", f"({bad} hand mismatches, {violations} bound violations, {elapsed:.2f}s)")
    assert bad == 0 and violations == 0
    assert elapsed < 5
