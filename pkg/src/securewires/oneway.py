"""One-way protocols: the threshold polynomial protocol and the recursive
protocol for arbitrary (D, L) structures.

Both expose ``sender_round(m, tape)``, ``decode(delivered)`` and
``reachable(sent, disrupt_mask, alphabet)``. The last one returns every
output the receiver can be driven to when the slots on disrupted wires take
any value from ``alphabet(sent_value)``; it folds over the same node
functions as ``decode`` but treats independent slot groups separately, which
keeps exhaustive sweeps tractable.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import product

from .feasibility import feasible_oneway
from .field import NoDecode, decode_ints, horner
from .planning import DecodeFailure, InfeasibleStructure, choose_wire, line_decode, split_for_induction
from .structures import AdversaryStructure
from .transport import S_TO_R, SlotId

MAX_PAIRS = 7


def majority_value(values):
    """Value seen at least twice among three, else ``None``."""
    a, b, c = values
    if a is not None and (a == b or a == c):
        return a
    if b is not None and b == c:
        return b
    return None


def _assignments(slots, sent, alphabet):
    """All value assignments for the disrupted slots of one group."""
    choices = [sorted(set(alphabet(sent[s]))) for s in slots]
    return product(*choices)


@dataclass(frozen=True)
class BaseNode:
    """Three additive sharings; sharing k is exposed to pair k only."""

    path: tuple
    wires: tuple  # wires[k][t], 0-based, k = sharing, t = share

    def slots(self):
        for k in range(3):
            for t in range(3):
                yield self.wires[k][t], SlotId(self.path, f"s{k + 1}.{t + 1}")

    def send(self, m, tape, p, out):
        for k in range(3):
            r1, r2 = tape.draw(), tape.draw()
            shares = (r1, r2, (m - r1 - r2) % p)
            for t in range(3):
                out.append((self.wires[k][t], SlotId(self.path, f"s{k + 1}.{t + 1}"), shares[t]))

    def _sharing(self, k):
        return [(self.wires[k][t], SlotId(self.path, f"s{k + 1}.{t + 1}")) for t in range(3)]

    def decode(self, delivered, p):
        sums = [sum(delivered[key] for key in self._sharing(k)) % p for k in range(3)]
        return majority_value(sums)

    def reachable(self, sent, dis, alphabet, p):
        per_sharing = []
        for k in range(3):
            keys = self._sharing(k)
            fixed = sum(sent[key] for key in keys if not dis >> key[0] & 1)
            hit = [key for key in keys if dis >> key[0] & 1]
            sums = {(fixed + sum(vals)) % p for vals in _assignments(hit, sent, alphabet)}
            per_sharing.append(sums)
        return {majority_value(c) for c in product(*per_sharing)}

    def leaves(self):
        yield self


@dataclass(frozen=True)
class InductiveNode:
    path: tuple
    children: tuple

    def slots(self):
        for c in self.children:
            yield from c.slots()

    def send(self, m, tape, p, out):
        r = tape.draw()
        for j, child in enumerate(self.children):
            child.send((m + (j + 1) * r) % p, tape.child(j + 1), p, out)

    def decode(self, delivered, p):
        return line_decode([c.decode(delivered, p) for c in self.children], p)

    def reachable(self, sent, dis, alphabet, p):
        sets = [c.reachable(sent, dis, alphabet, p) for c in self.children]
        return {line_decode(list(c), p) for c in product(*sets)}

    def leaves(self):
        for c in self.children:
            yield from c.leaves()


def _build(structure: AdversaryStructure, path, force):
    if len(structure.pairs) > 3:
        return InductiveNode(
            path,
            tuple(_build(sub, path + (j + 1,), force)
                  for j, sub in enumerate(split_for_induction(structure))),
        )
    masks = structure.padded(3).masks
    wires = []
    for k in range(3):
        others = [masks[a][0] for a in range(3) if a != k]
        wires.append(tuple(
            choose_wire(structure.n, others + [masks[t][1]], force, strict=masks[t][1])
            for t in range(3)
        ))
    return BaseNode(path, tuple(wires))


@dataclass(frozen=True)
class OneWayPlan:
    structure: AdversaryStructure
    root: object

    @property
    def depth(self):
        d, node = 0, self.root
        while isinstance(node, InductiveNode):
            d, node = d + 1, node.children[0]
        return d

    def leaves(self):
        return list(self.root.leaves())

    def slot_count(self):
        return sum(1 for _ in self.root.slots())


def plan_oneway(structure: AdversaryStructure, force: bool = False,
                max_pairs: int = MAX_PAIRS) -> OneWayPlan:
    """Recursion tree for ``structure``; refuses infeasible structures unless
    ``force`` (used to aim attacks at the protocol)."""
    if not force:
        report = feasible_oneway(structure)
        if not report.feasible:
            raise InfeasibleStructure(report, structure)
    if len(structure.pairs) > max_pairs:
        raise ValueError(
            f"{len(structure.pairs)} pairs would need 4^{len(structure.pairs) - 3} "
            f"leaves; cap is {max_pairs}"
        )
    return OneWayPlan(structure, _build(structure, (), force))


class OneWayProtocol:
    """Recursive one-way protocol bound to a field."""

    rounds = (S_TO_R,)
    kind = "oneway"

    def __init__(self, plan: OneWayPlan, p: int):
        self.plan = plan
        self.p = p
        self.n = plan.structure.n

    def sender_round(self, m, tape):
        out = []
        self.plan.root.send(m % self.p, tape, self.p, out)
        return out

    def decode(self, delivered):
        return self.plan.root.decode(delivered, self.p)

    def receive(self, delivered):
        v = self.decode(delivered)
        if v is None:
            raise DecodeFailure("no majority or consistent line among candidates")
        return v

    def reachable(self, sent_out, disrupt_mask, alphabet):
        sent = {(w, s): v for w, s, v in sent_out}
        return self.plan.root.reachable(sent, disrupt_mask, alphabet, self.p)

    def run(self, m, s_tape, r_tape, channel):
        delivered = channel(self.sender_round(m, s_tape), S_TO_R)
        return self.decode(delivered)


def send_oneway(plan: OneWayPlan, m, tape, p):
    """``[(wire, slot, value)]`` for message ``m`` (one round, sender to receiver)."""
    return OneWayProtocol(plan, p).sender_round(m, tape)


def receive_oneway(plan: OneWayPlan, delivered, p):
    return OneWayProtocol(plan, p).receive(delivered)


class ThresholdProtocol:
    """Degree-k polynomial with p(0) = m; share x goes on wire x for
    x = 1..3k+1, decoded with up to k errors."""

    rounds = (S_TO_R,)
    kind = "threshold_oneway"

    def __init__(self, n: int, k: int, p: int):
        if n <= 3 * k:
            raise ValueError(f"threshold protocol needs n > 3k, got n={n}, k={k}")
        if p <= 3 * k + 1:
            raise ValueError(f"field too small for {3 * k + 1} distinct points")
        self.n, self.k, self.p = n, k, p
        self.used = 3 * k + 1

    def sender_round(self, m, tape):
        coeffs = [m % self.p] + tape.draws(self.k)
        return [(x - 1, SlotId((), f"x{x}"), horner(coeffs, x, self.p))
                for x in range(1, self.used + 1)]

    def decode(self, delivered):
        pts = [(x, delivered[(x - 1, SlotId((), f"x{x}"))]) for x in range(1, self.used + 1)]
        res = decode_ints(pts, self.k, self.k, self.p)
        if isinstance(res, NoDecode):
            return None
        coeffs, _ = res
        return coeffs[0] if coeffs else 0

    def receive(self, delivered):
        v = self.decode(delivered)
        if v is None:
            raise DecodeFailure("no polynomial within k errors")
        return v

    def reachable(self, sent_out, disrupt_mask, alphabet):
        sent = {(w, s): v for w, s, v in sent_out}
        hit = [key for key in sent if disrupt_mask >> key[0] & 1]
        out = set()
        for vals in _assignments(hit, sent, alphabet):
            d = dict(sent)
            d.update(zip(hit, vals))
            out.add(self.decode(d))
        return out

    def run(self, m, s_tape, r_tape, channel):
        return self.decode(channel(self.sender_round(m, s_tape), S_TO_R))
