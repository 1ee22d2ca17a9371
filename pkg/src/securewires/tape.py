"""Random tapes.

Every random field element a party draws comes from a tape. A
:class:`SeededTape` derives independent streams per sub-protocol path: the
stream for path ``("R", 2, 1)`` under seed ``s`` is a ``random.Random``
seeded with the first 8 bytes of ``sha256(f"{s}/R/2/1")``. Sibling paths
never share state, so adding draws to one branch leaves the others
byte-stable.

A :class:`ListTape` replays a fixed vector of values in draw order; the
verification and attack searches enumerate those vectors.
"""
from __future__ import annotations

import hashlib
import random


def stream_seed(seed: int, path: tuple) -> int:
    label = "/".join([str(seed)] + [str(p) for p in path])
    return int.from_bytes(hashlib.sha256(label.encode()).digest()[:8], "big")


class SeededTape:
    def __init__(self, seed: int, p: int, path: tuple = ()):
        self.seed = seed
        self.p = p
        self.path = tuple(path)
        self._rng = random.Random(stream_seed(seed, self.path))

    def draw(self) -> int:
        return self._rng.randrange(self.p)

    def draws(self, k: int) -> list:
        return [self._rng.randrange(self.p) for _ in range(k)]

    def child(self, label) -> "SeededTape":
        return SeededTape(self.seed, self.p, self.path + (label,))


class TapeExhausted(IndexError):
    pass


class ListTape:
    """Replays ``values`` in order; children share the parent's cursor."""

    def __init__(self, values, p: int):
        self.values = list(values)
        self.p = p
        self._pos = [0]

    def draw(self) -> int:
        pos = self._pos[0]
        if pos >= len(self.values):
            raise TapeExhausted(f"tape of length {len(self.values)} exhausted")
        self._pos[0] = pos + 1
        return self.values[pos] % self.p

    def draws(self, k: int) -> list:
        return [self.draw() for _ in range(k)]

    def child(self, label) -> "ListTape":
        c = ListTape.__new__(ListTape)
        c.values = self.values
        c.p = self.p
        c._pos = self._pos
        return c

    @property
    def consumed(self) -> int:
        return self._pos[0]


class CountingTape:
    """Draws zeros and counts them; used to learn a protocol's tape length."""

    def __init__(self, p: int):
        self.p = p
        self._n = [0]

    def draw(self) -> int:
        self._n[0] += 1
        return 0

    def draws(self, k: int) -> list:
        return [self.draw() for _ in range(k)]

    def child(self, label) -> "CountingTape":
        c = CountingTape.__new__(CountingTape)
        c.p = self.p
        c._n = self._n
        return c

    @property
    def consumed(self) -> int:
        return self._n[0]
