"""Named, keyed random substreams.

Every consumer of randomness asks for ``seed_substream(seed, "module", "stage",
attempt)`` and owns the returned generator; streams are never shared between
threads, and the same label path always reproduces the same draws.
"""
from __future__ import annotations

import hashlib
import random

SEED_BITS = 64


def _digest(seed: int, labels) -> bytes:
    h = hashlib.blake2b(digest_size=32, person=b"hx-substream")
    h.update(int(seed).to_bytes(16, "little", signed=True))
    for label in labels:
        data = str(label).encode()
        h.update(len(data).to_bytes(4, "little"))
        h.update(data)
    return h.digest()


def seed_substream(seed: int, *labels) -> random.Random:
    if not labels:
        raise ValueError("seed_substream needs at least one label")
    return random.Random(int.from_bytes(_digest(seed, labels), "little"))


def keyed_uniform(seed: int, *labels) -> float:
    """A single uniform draw in [0, 1) determined by ``(seed, labels)`` alone."""
    return int.from_bytes(_digest(seed, labels)[:8], "little") / 2.0**64


def derive_seed(seed: int, *labels) -> int:
    """A 64-bit integer seed for a child stage, keyed like :func:`seed_substream`."""
    return int.from_bytes(_digest(seed, labels)[:8], "little")
