"""Counter-based random streams keyed by ``(seed, purpose tag, index...)``.

Every draw site asks for its own stream, so adding a new site never shifts
the numbers an existing site sees, and results do not depend on the order in
which independent pieces of work are evaluated.
"""

import zlib

import numpy as np


def _tag_id(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def keyed_rng(seed: int, tag: str, *index: int) -> np.random.Generator:
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF, _tag_id(tag), *(int(i) for i in index)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))
