import hashlib

import numpy as np


def derive_seed(seed: int, *names) -> int:
    """Stable 63-bit sub-seed for a named stage of a run."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(seed)).encode())
    for name in names:
        h.update(b"/" + str(name).encode())
    return int.from_bytes(h.digest(), "little") >> 1


def rng_for(seed: int, *names) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *names))
