"""Shared hand-built fixtures."""

# Twelve masked patterns. Every pair either differs in token count or in the
# first two tokens (the tree routes on those), and pairs that share a route
# overlap on fewer than 40% of positions, so none of them can merge.
TWELVE_PATTERNS = [
    "Receiving block {} src {} dest {}",
    "Received block {} of size {} from {}",
    "PacketResponder {} for block {} terminating",
    "Deleting block {} file {}",
    "Verification succeeded for {}",
    "BLOCK* NameSystem.addStoredBlock: blockMap updated: {} is added to {} size {}",
    "BLOCK* NameSystem.allocateBlock: {} {}",
    "writeBlock {} received exception {}",
    "Starting thread to transfer block {} to {}",
    "Served block {} to {}",
    "Got exception while serving {} to {}",
    "Unexpected error trying to delete block {} BlockInfo not found in volumeMap",
]


def twelve_pattern_corpus(copies: int = 3) -> list[list[str]]:
    out = []
    for c in range(copies):
        for i, pattern in enumerate(TWELVE_PATTERNS):
            n = pattern.count("{}")
            params = [f"blk_{1000 * i + c}{j}" if j == 0 else f"10.0.{c}.{j}" for j in range(n)]
            out.append(pattern.format(*params).split())
    return out


def separable_states(n_per_class: int = 40, d: int = 8, t_max: int = 5, seed: int = 0):
    """Labeled states whose events come from disjoint template vectors per class."""
    import numpy as np

    from dqnlog.corpus import Label
    from dqnlog.embedding import Origin, embed_sequence
    from dqnlog.windowing import LogSequence

    eye = np.eye(d)
    vectors = {i: eye[i] for i in range(d)}
    rng = np.random.default_rng(seed)
    out = []
    for k in range(2 * n_per_class):
        anomalous = k % 2 == 1
        pool = range(d // 2, d) if anomalous else range(d // 2)
        ids = [int(x) for x in rng.choice(list(pool), size=int(rng.integers(2, t_max + 1)))]
        label = Label.ANOMALY if anomalous else Label.NORMAL
        out.append(embed_sequence(LogSequence(f"q{k}", ids, label), vectors, t_max, Origin.LABELED))
    return out
