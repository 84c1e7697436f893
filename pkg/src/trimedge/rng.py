"""Counter-based random streams for reproducible, order-independent replication.

Each (base_seed, stream_index) pair keys an independent Philox substream, so
replicate results never depend on scheduling or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_UINT64 = np.uint64


@dataclass(frozen=True)
class RngStream:
    """One substream of a counter-based generator family."""

    base_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.base_seed < 2**64:
            raise ValueError("base_seed must fit in 64 bits")
        if not 0 <= self.stream_index < 2**64:
            raise ValueError("stream_index must be a nonnegative 64-bit integer")

    def generator(self) -> np.random.Generator:
        key = np.array([self.base_seed, self.stream_index], dtype=_UINT64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, offset: int) -> "RngStream":
        return RngStream(self.base_seed, self.stream_index + offset)


def replicate_stream_index(n: int, replicate: int) -> int:
    """Stream index for one replicate of a size-n study.

    Sizes get disjoint 2**32 blocks so adding a sample size to a study never
    perturbs the results already computed for other sizes.
    """
    if replicate >= 2**32:
        raise ValueError("replicate index exceeds the per-size block")
    return (n << 32) | replicate
