"""
Seed derivation helpers.

Every house gets its own seed derived from the dataset root seed and the
house index. Within a house each generation stage draws from its own numpy
stream keyed by (house seed, attempt, stage tag), so extra draws in one stage
never shift the numbers another stage sees.
"""

import zlib
from typing import Sequence

import numpy as np

STAGES = ("spec", "layout", "connect", "dressing", "furnish", "appearance", "states")


def _tag(tag: str) -> int:
    # crc32, never the builtin hash() (randomized per process)
    return zlib.crc32(tag.encode("utf-8")) & 0xFFFFFFFF


def derive_seed(root_seed: int, index: int) -> int:
    """Seed for house `index` of a dataset rooted at `root_seed`"""
    seq = np.random.SeedSequence([int(root_seed) & 0xFFFFFFFF, int(index)])
    return int(seq.generate_state(1, dtype=np.uint32)[0])


def stream(seed: int, *keys: object) -> np.random.Generator:
    """Independent generator for `seed` and a tuple of int/str keys"""
    entropy: list = [int(seed) & 0xFFFFFFFF]
    for key in keys:
        entropy.append(_tag(key) if isinstance(key, str) else int(key))
    return np.random.default_rng(np.random.SeedSequence(entropy))


def stage_streams(seed: int, attempt: int, stages: Sequence[str] = STAGES) -> dict:
    """One generator per pipeline stage for a single generation attempt"""
    return {name: stream(seed, attempt, name) for name in stages}
