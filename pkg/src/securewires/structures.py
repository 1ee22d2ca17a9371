"""Wire sets, fully generalised adversary structures and their JSON form.

Wires are 0-based bit positions internally and 1-based everywhere a human
or a file sees them.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

MAX_WIRES = 16


class StructureError(ValueError):
    pass


class Mode(enum.Enum):
    OBLIVIOUS = "oblivious"
    COMPLETELY_OBLIVIOUS = "completely_oblivious"
    NON_OBLIVIOUS = "non_oblivious"


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(wires: Iterable[int]) -> int:
    """Bitmask from 1-based wire numbers."""
    m = 0
    for w in wires:
        if w < 1:
            raise StructureError(f"wire numbers are 1-based, got {w}")
        m |= 1 << (w - 1)
    return m


def wires_of(mask: int) -> list:
    """1-based wire numbers in a bitmask, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i + 1)
        mask >>= 1
        i += 1
    return out


@dataclass(frozen=True)
class WireSet:
    mask: int
    n: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.n:
            raise StructureError(f"wire set {wires_of(self.mask)} exceeds n={self.n}")

    @classmethod
    def of(cls, wires: Iterable[int], n: int) -> "WireSet":
        return cls(mask_of(wires), n)

    @classmethod
    def empty(cls, n: int) -> "WireSet":
        return cls(0, n)

    @property
    def wires(self) -> list:
        return wires_of(self.mask)

    def __contains__(self, wire: int) -> bool:
        return bool(self.mask >> (wire - 1) & 1)

    def __iter__(self):
        return iter(self.wires)

    def __len__(self):
        return bin(self.mask).count("1")

    def _check(self, other: "WireSet"):
        if other.n != self.n:
            raise StructureError(f"wire count mismatch: {self.n} vs {other.n}")

    def __or__(self, other: "WireSet") -> "WireSet":
        self._check(other)
        return WireSet(self.mask | other.mask, self.n)

    def __and__(self, other: "WireSet") -> "WireSet":
        self._check(other)
        return WireSet(self.mask & other.mask, self.n)

    def __sub__(self, other: "WireSet") -> "WireSet":
        self._check(other)
        return WireSet(self.mask & ~other.mask, self.n)

    def complement(self) -> "WireSet":
        return WireSet(full_mask(self.n) & ~self.mask, self.n)

    def __repr__(self):
        return "{" + ",".join(map(str, self.wires)) + "}"


@dataclass(frozen=True)
class AdversaryPair:
    disrupt: WireSet
    listen: WireSet

    def __repr__(self):
        return f"({self.disrupt!r}, {self.listen!r})"


@dataclass(frozen=True)
class AdversaryStructure:
    n: int
    pairs: tuple = ()
    mode: Mode = Mode.OBLIVIOUS

    def __post_init__(self):
        if not 1 <= self.n <= MAX_WIRES:
            raise StructureError(f"wire count must be in 1..{MAX_WIRES}, got {self.n}")
        object.__setattr__(self, "pairs", tuple(self.pairs))
        for pr in self.pairs:
            if pr.disrupt.n != self.n or pr.listen.n != self.n:
                raise StructureError("pair defined over a different wire count")

    @classmethod
    def from_lists(cls, n: int, pairs: Sequence, mode: Mode = Mode.OBLIVIOUS):
        """Build from ``[(disrupt_wires, listen_wires), ...]`` with 1-based wires."""
        return cls(
            n,
            tuple(AdversaryPair(WireSet.of(d, n), WireSet.of(l, n)) for d, l in pairs),
            mode,
        )

    def __len__(self):
        return len(self.pairs)

    @property
    def masks(self) -> list:
        """``[(D_mask, L_mask), ...]`` for the hot loops."""
        return [(pr.disrupt.mask, pr.listen.mask) for pr in self.pairs]

    def with_pairs(self, pairs) -> "AdversaryStructure":
        return AdversaryStructure(self.n, tuple(pairs), self.mode)

    def padded(self, size: int = 3) -> "AdversaryStructure":
        """Pad with (empty, empty) pairs up to ``size`` entries."""
        extra = max(0, size - len(self.pairs))
        empty = AdversaryPair(WireSet.empty(self.n), WireSet.empty(self.n))
        return self.with_pairs(self.pairs + (empty,) * extra)

    def to_dict(self) -> dict:
        return {
            "wires": self.n,
            "mode": self.mode.value,
            "pairs": [
                {"disrupt": pr.disrupt.wires, "listen": pr.listen.wires}
                for pr in self.pairs
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, doc) -> "AdversaryStructure":
        if not isinstance(doc, dict):
            raise StructureError("structure document must be a JSON object")
        for key in ("wires", "pairs"):
            if key not in doc:
                raise StructureError(f"missing field '{key}'")
        n = doc["wires"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise StructureError("field 'wires' must be an integer")
        mode_name = doc.get("mode", Mode.OBLIVIOUS.value)
        try:
            mode = Mode(mode_name)
        except ValueError:
            raise StructureError(f"field 'mode': unknown mode {mode_name!r}") from None
        if not isinstance(doc["pairs"], list):
            raise StructureError("field 'pairs' must be a list")
        pairs = []
        for i, entry in enumerate(doc["pairs"]):
            if not isinstance(entry, dict):
                raise StructureError(f"pairs[{i}] must be an object")
            sets = []
            for key in ("disrupt", "listen"):
                ws = entry.get(key, [])
                if not isinstance(ws, list) or not all(
                    isinstance(w, int) and not isinstance(w, bool) for w in ws
                ):
                    raise StructureError(f"pairs[{i}].{key} must be a list of integers")
                bad = [w for w in ws if not 1 <= w <= n]
                if bad:
                    raise StructureError(f"pairs[{i}].{key}: wires {bad} outside 1..{n}")
                sets.append(ws)
            pairs.append(sets)
        return cls.from_lists(n, pairs, mode)

    @classmethod
    def from_json(cls, text: str) -> "AdversaryStructure":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        body = ", ".join(map(repr, self.pairs))
        return f"AdversaryStructure(n={self.n}, [{body}], {self.mode.value})"


def covers(sets: Iterable, n: int) -> bool:
    """True iff the union of ``sets`` (WireSets or masks) is every wire."""
    m = 0
    for s in sets:
        m |= s.mask if isinstance(s, WireSet) else s
    return m & full_mask(n) == full_mask(n)


def _check_n(n: int):
    if not 1 <= n <= MAX_WIRES:
        raise StructureError(f"wire count must be in 1..{MAX_WIRES}, got {n}")


def threshold_structure(n: int, k: int, mode: Mode = Mode.OBLIVIOUS) -> AdversaryStructure:
    _check_n(n)
    if not 0 <= k <= n:
        raise StructureError(f"need 0 <= k <= n, got k={k}, n={n}")
    sets = [WireSet.of(c, n) for c in combinations(range(1, n + 1), k)]
    return AdversaryStructure(n, tuple(AdversaryPair(s, s) for s in sets), mode)


def dl_structure(n: int, d: int, l: int, mode: Mode = Mode.OBLIVIOUS) -> AdversaryStructure:
    _check_n(n)
    if not (0 <= d <= n and 0 <= l <= n):
        raise StructureError(f"need 0 <= d, l <= n, got d={d}, l={l}, n={n}")
    ds = [WireSet.of(c, n) for c in combinations(range(1, n + 1), d)]
    ls = [WireSet.of(c, n) for c in combinations(range(1, n + 1), l)]
    return AdversaryStructure(
        n, tuple(AdversaryPair(a, b) for a in ds for b in ls), mode
    )


def general_structure(n: int, sets: Iterable, mode: Mode = Mode.OBLIVIOUS) -> AdversaryStructure:
    _check_n(n)
    ws = [s if isinstance(s, WireSet) else WireSet.of(s, n) for s in sets]
    return AdversaryStructure(n, tuple(AdversaryPair(s, s) for s in ws), mode)


def strengthen(structure: AdversaryStructure) -> AdversaryStructure:
    """Fold each disrupt set into its listen set; the result is insensitive
    to obliviousness, tagged completely oblivious."""
    pairs = tuple(
        AdversaryPair(pr.disrupt, pr.listen | pr.disrupt) for pr in structure.pairs
    )
    return AdversaryStructure(structure.n, pairs, Mode.COMPLETELY_OBLIVIOUS)
