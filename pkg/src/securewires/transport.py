"""Simulated wire layer.

A round is one half-duplex phase: every value in it travels in the same
direction. Each wire carries a vector of slotted values; the adversary may
replace any slot on a wire it disrupts and observes slots according to its
obliviousness mode.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .structures import Mode

S_TO_R = "S->R"
R_TO_S = "R->S"

# Strategy return value meaning "replace with fresh uniform noise".
NOISE = object()


class SlotId(NamedTuple):
    path: tuple
    tag: str

    def label(self) -> str:
        return ".".join(map(str, self.path)) + ":" + self.tag


class HarnessFault(AssertionError):
    """A strategy broke the rules of its pair or mode."""


class IllegalDisruption(HarnessFault):
    pass


class PublicChannelFault(HarnessFault):
    """Three public copies with no majority; the adversary is outside the
    structure the wires were chosen for."""


@dataclass(frozen=True)
class Transmission:
    round: int
    direction: str
    wire: int  # 0-based
    slot: SlotId
    sent: int
    delivered: int
    written: bool = False  # the adversary wrote this slot (maybe with the same value)

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "dir": self.direction,
            "wire": self.wire + 1,
            "slot": self.slot.label(),
            "sent": self.sent,
            "delivered": self.delivered,
            "disrupted": self.written,
        }


def visibility(mode: Mode, disrupt: int, listen: int) -> tuple:
    """(sent_mask, delivered_mask): wires whose original / delivered values
    the adversary always observes. Under the oblivious (not completely
    oblivious) mode it additionally hears the values it writes itself; see
    :func:`hears_own_writes`."""
    if mode is Mode.NON_OBLIVIOUS:
        return listen | disrupt, disrupt | listen
    return listen, listen


def hears_own_writes(mode: Mode) -> bool:
    return mode is not Mode.COMPLETELY_OBLIVIOUS


def delivered_visible(mode: Mode, disrupt: int, deliv_mask: int, wire: int, written: bool) -> bool:
    """Does the view get a ``delivered`` entry for this slot?"""
    if not disrupt >> wire & 1:
        return False
    return bool(deliv_mask >> wire & 1) or (written and hears_own_writes(mode))


@dataclass
class Transcript:
    transmissions: list = field(default_factory=list)
    pair_index: Optional[int] = None
    mode: Mode = Mode.OBLIVIOUS
    view: list = field(default_factory=list)

    def rounds(self) -> list:
        seen = []
        for t in self.transmissions:
            key = (t.round, t.direction)
            if key not in seen:
                seen.append(key)
        return seen

    def received(self, direction: str) -> list:
        """Everything delivered in ``direction``: the receiving party's input
        stream, in transmission order."""
        return [
            (t.round, t.wire + 1, t.slot.label(), t.delivered)
            for t in self.transmissions
            if t.direction == direction
        ]

    def to_dict(self) -> dict:
        return {
            "transmissions": [t.to_dict() for t in self.transmissions],
            "adversary": {
                "pair_index": None if self.pair_index is None else self.pair_index + 1,
                "mode": self.mode.value,
            },
            "view": [
                {"round": r, "wire": w + 1, "slot": s.label(), "kind": k, "value": v}
                for (r, w, s, k, v) in self.view
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def view_from_transcript(transcript: Transcript, disrupt: int, listen: int, mode: Mode) -> list:
    """Recompute the adversary view from the transcript alone."""
    sent_mask, deliv_mask = visibility(mode, disrupt, listen)
    view = []
    by_round = {}
    for t in transcript.transmissions:
        by_round.setdefault(t.round, []).append(t)
    for r in sorted(by_round):
        ts = by_round[r]
        for t in ts:
            if sent_mask >> t.wire & 1:
                view.append((r, t.wire, t.slot, "sent", t.sent))
        for t in ts:
            if delivered_visible(mode, disrupt, deliv_mask, t.wire, t.written):
                view.append((r, t.wire, t.slot, "delivered", t.delivered))
    return view


class RoundContext(NamedTuple):
    round: int
    direction: str
    # [(wire, slot, sent-or-None)] for slots on disrupted wires; the sent
    # value is present only where the mode lets the adversary hear it
    disruptable: list
    view: list


class Adversary:
    """The adversary's chosen pair plus behaviour, with the harness checks."""

    def __init__(self, disrupt: int, listen: int, mode: Mode, behavior, pair_index=None,
                 noise_tape=None):
        self.disrupt = disrupt
        self.listen = listen
        self.mode = mode
        self.behavior = behavior
        self.pair_index = pair_index
        self.noise_tape = noise_tape
        self.view = []
        self._sent_mask, self._deliv_mask = visibility(mode, disrupt, listen)

    @classmethod
    def for_structure(cls, structure, pair_index, behavior, noise_tape=None, mode=None):
        d, l = structure.masks[pair_index]
        return cls(d, l, mode or structure.mode, behavior, pair_index, noise_tape)

    def observe_sent(self, rnd, outgoing):
        for wire, slot, value in outgoing:
            if self._sent_mask >> wire & 1:
                self.view.append((rnd, wire, slot, "sent", value))

    def disrupt_round(self, rnd, direction, outgoing) -> dict:
        disruptable = [
            (wire, slot, value if self._sent_mask >> wire & 1 else None)
            for wire, slot, value in outgoing
            if self.disrupt >> wire & 1
        ]
        if not disruptable or self.behavior is None:
            return {}
        ctx = RoundContext(rnd, direction, disruptable, list(self.view))
        writes = self.behavior.plan_round(ctx) or {}
        legal = {(w, s) for w, s, _ in disruptable}
        out = {}
        for key in sorted(writes, key=lambda k: (k[0], k[1])):
            if key not in legal:
                raise IllegalDisruption(f"write to {key} outside the disrupt set")
            v = writes[key]
            if v is NOISE:
                if self.noise_tape is None:
                    raise HarnessFault("noise requested but no noise tape supplied")
                v = self.noise_tape.draw()
            out[key] = v
        return out

    def observe_delivered(self, rnd, transmissions):
        for t in transmissions:
            if delivered_visible(self.mode, self.disrupt, self._deliv_mask, t.wire, t.written):
                self.view.append((rnd, t.wire, t.slot, "delivered", t.delivered))


def exchange_round(outgoing, adversary: Optional[Adversary], rnd: int, direction: str,
                   transcript: Transcript, p: int) -> dict:
    """Push one round through the wires; returns ``{(wire, slot): delivered}``."""
    seen = set()
    for wire, slot, _ in outgoing:
        if (wire, slot) in seen:
            raise HarnessFault(f"duplicate (wire, slot) {(wire, slot)} in round {rnd}")
        seen.add((wire, slot))
    writes = {}
    if adversary is not None:
        adversary.observe_sent(rnd, outgoing)
        writes = adversary.disrupt_round(rnd, direction, outgoing)
    delivered = {}
    batch = []
    for wire, slot, value in outgoing:
        value %= p
        got = writes.get((wire, slot), value) % p
        delivered[(wire, slot)] = got
        batch.append(Transmission(rnd, direction, wire, slot, value, got, (wire, slot) in writes))
    transcript.transmissions.extend(batch)
    if adversary is not None:
        adversary.observe_delivered(rnd, batch)
        transcript.view = list(adversary.view)
    return delivered


def majority(copies):
    """Value held by at least two of three copies."""
    counts = Counter(copies)
    value, c = counts.most_common(1)[0]
    if c * 2 <= len(copies):
        raise PublicChannelFault(f"no majority among {list(copies)}")
    return value


def public_send(values, wires, path: tuple, tag: str) -> list:
    """Outgoing slots broadcasting each value on each of the three wires."""
    out = []
    for pos, v in enumerate(values):
        for copy, w in enumerate(wires):
            out.append((w, SlotId(path, f"{tag}{pos}.{copy}"), v))
    return out


def public_receive(delivered: dict, wires, path: tuple, tag: str, count: int) -> list:
    out = []
    for pos in range(count):
        copies = [delivered[(w, SlotId(path, f"{tag}{pos}.{copy}"))] for copy, w in enumerate(wires)]
        out.append(majority(copies))
    return out
