"""Two-round protocol for completely oblivious adversaries.

Round 1 (receiver to sender): for each of four random lines p_1..p_4 the
receiver additively shares p_i(1), p_i(2), p_i(3) and broadcasts p_i(4).
Round 2 (sender to receiver): the sender inspects what arrived and sends a
public payload that lets the receiver unmask ``m``. Structures with more
than three pairs are handled by four parallel copies, each missing one pair,
carrying ``m + j*r``; every copy shares the same two global rounds.

The sender side is split into stages that the verification code reuses:
:func:`aggregate` -> :func:`classify` -> :func:`select_case` ->
:func:`build_payload`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional

from .feasibility import feasible_twoway_completely_oblivious, feasible_tworound_non_completely_oblivious
from .field import collinear, line_through
from .planning import DecodeFailure, InfeasibleStructure, choose_wire, line_decode, split_for_induction
from .structures import AdversaryStructure, strengthen
from .transport import R_TO_S, S_TO_R, SlotId, public_receive, public_send
from .oneway import majority_value, MAX_PAIRS

TAG_A, TAG_B, TAG_C, TAG_FAIL = 0, 1, 2, 3
PAYLOAD_LEN = {TAG_A: 3, TAG_B: 9, TAG_C: 8, TAG_FAIL: 1}


class PolyClass(NamedTuple):
    """Sender's verdict on one received line.

    ``kind`` is "A" (all four points on a line), "B" (no line through p(4)
    and two others), "C" (exactly one position ``excluded``) or "X"
    (the broadcast p(4) had no majority).
    """

    kind: str
    excluded: int = 0


class Selection(NamedTuple):
    tag: int
    first: int = 0  # i (A, B) or i1 (C); 1-based
    second: int = 0  # j (B) or i2 (C)
    excluded: int = 0  # shared position in case C


def classify(summary) -> PolyClass:
    """``summary`` = (v1, v2, v3, v4) received for one line, v4 by majority."""
    v1, v2, v3, v4 = summary
    if v4 is None:
        return PolyClass("X")
    p = _P[0]
    pts = ((1, v1), (2, v2), (3, v3), (4, v4))
    if collinear(pts, p):
        return PolyClass("A")
    hits = [e for e in (1, 2, 3)
            if collinear([pt for pt in pts if pt[0] != e], p)]
    if not hits:
        return PolyClass("B")
    return PolyClass("C", hits[0])


# classify() is called in tight loops with the field fixed per run; the
# modulus lives here instead of being threaded through every call.
_P = [5]


def set_field(p: int):
    _P[0] = p


def select_case(classes) -> Selection:
    """Case choice: A first, then B, then C; lowest indices win.

    In case B the partner line is the lowest other index whose p(4)
    arrived intact (always the lowest other index inside the structure).
    """
    for i, c in enumerate(classes):
        if c.kind == "A":
            return Selection(TAG_A, i + 1)
    for i, c in enumerate(classes):
        if c.kind == "B":
            for j, cj in enumerate(classes):
                if j != i and cj.kind != "X":
                    return Selection(TAG_B, i + 1, j + 1)
            return Selection(TAG_FAIL)
    if all(c.kind == "C" for c in classes):
        for a in range(len(classes)):
            for b in range(a + 1, len(classes)):
                if classes[a].excluded == classes[b].excluded:
                    return Selection(TAG_C, a + 1, b + 1, classes[a].excluded)
    return Selection(TAG_FAIL)


def _intercept(x1, y1, x2, y2, p):
    return line_through(x1, y1, x2, y2, p)[0]


def payload_parts(sel: Selection, summaries, m: int, p: int) -> list:
    """The payload as ``[(line, positions, values)]``; ``line`` 0 marks the
    header, otherwise the part is computed from that line's summary (and
    ``m``) alone."""
    if sel.tag == TAG_A:
        v = summaries[sel.first - 1]
        return [(0, (0, 1), (TAG_A, sel.first)),
                (sel.first, (2,), ((m + _intercept(1, v[0], 4, v[3], p)) % p,))]
    if sel.tag == TAG_B:
        vi = summaries[sel.first - 1]
        vj = summaries[sel.second - 1]
        cands = tuple((m + _intercept(u, vj[u - 1], 4, vj[3], p)) % p for u in (1, 2, 3))
        return [(0, (0, 1, 5), (TAG_B, sel.first, sel.second)),
                (sel.first, (2, 3, 4), tuple(vi[:3])),
                (sel.second, (6, 7, 8), cands)]
    if sel.tag == TAG_C:
        e = sel.excluded
        v1 = summaries[sel.first - 1]
        v2 = summaries[sel.second - 1]
        keep = [u for u in (1, 2, 3) if u != e][0]
        cand_a = (m + _intercept(keep, v2[keep - 1], 4, v2[3], p)) % p
        cand_b = (m + _intercept(e, v2[e - 1], 4, v2[3], p)) % p
        return [(0, (0, 1, 5), (TAG_C, sel.first, sel.second)),
                (sel.first, (2, 3, 4), tuple(v1[:3])),
                (sel.second, (6, 7), (cand_a, cand_b))]
    return [(0, (0,), (TAG_FAIL,))]


def build_payload(sel: Selection, summaries, m: int, p: int) -> list:
    """Public field values for the selected case; only the summaries of the
    selected lines are read."""
    out = [0] * PAYLOAD_LEN[sel.tag]
    for _, positions, values in payload_parts(sel, summaries, m, p):
        for pos, v in zip(positions, values):
            out[pos] = v
    return out


def sender_respond(summaries, m: int, p: int) -> list:
    set_field(p)
    classes = [classify(s) for s in summaries]
    return build_payload(select_case(classes), summaries, m, p)


def unmask(payload, lines, p) -> Optional[int]:
    """Receiver's last step. ``lines[i]`` = (intercept, slope) of p_{i+1}."""
    def at(i, x):
        c0, c1 = lines[i - 1]
        return (c0 + c1 * x) % p

    tag = payload[0]
    if tag == TAG_A:
        i, v = payload[1], payload[2]
        if not 1 <= i <= 4:
            return None
        return (v - at(i, 0)) % p
    if tag == TAG_B:
        i, seen, j, cands = payload[1], payload[2:5], payload[5], payload[6:9]
        if not (1 <= i <= 4 and 1 <= j <= 4):
            return None
        agree = [u for u in (1, 2, 3) if seen[u - 1] == at(i, u)]
        if len(agree) != 1:
            return None
        return (cands[agree[0] - 1] - at(j, 0)) % p
    if tag == TAG_C:
        i1, seen, i2, cand_a, cand_b = payload[1], payload[2:5], payload[5], payload[6], payload[7]
        if not (1 <= i1 <= 4 and 1 <= i2 <= 4):
            return None
        cls = classify_against(seen, lines[i1 - 1], p)
        if cls is None:
            return None
        return ((cand_a if cls == "a" else cand_b) - at(i2, 0)) % p
    return None


def classify_against(seen, line, p):
    """Case C, receiver side: which excluded position does the broadcast
    line exhibit, and was that position disrupted ("a") or not ("b")."""
    c0, c1 = line
    true = [(c0 + c1 * u) % p for u in (1, 2, 3)]
    set_field(p)
    four = (c0 + 4 * c1) % p
    cls = classify((seen[0], seen[1], seen[2], four))
    if cls.kind != "C":
        return None
    e = cls.excluded
    return "b" if seen[e - 1] == true[e - 1] else "a"


@dataclass(frozen=True)
class BaseNode:
    path: tuple
    share_wires: tuple  # share_wires[j][k]: wire for share k of p_i(j+1)
    public_wires: tuple  # w_{4,1..3}

    @cached_property
    def share_keys(self):
        """keys[i-1][j-1] = the three (wire, slot) keys sharing p_i(j)."""
        return tuple(
            tuple(tuple(share_slot(self, i, j, k) for k in (1, 2, 3)) for j in (1, 2, 3))
            for i in range(1, 5)
        )

    @cached_property
    def public_keys(self):
        return tuple(tuple(public_slot(self, i, c) for c in (1, 2, 3)) for i in range(1, 5))

    def round1(self, tape, p, out, state):
        lines = []
        for i in range(4):
            c0, c1 = tape.draw(), tape.draw()
            lines.append((c0, c1))
            for j in range(3):
                r1, r2 = tape.draw(), tape.draw()
                v = (c0 + c1 * (j + 1)) % p
                k1, k2, k3 = self.share_keys[i][j]
                out.append((k1[0], k1[1], r1))
                out.append((k2[0], k2[1], r2))
                out.append((k3[0], k3[1], (v - r1 - r2) % p))
            v4 = (c0 + 4 * c1) % p
            for w, slot in self.public_keys[i]:
                out.append((w, slot, v4))
        state[self.path] = lines

    def aggregate(self, delivered, p):
        return aggregate(self, delivered, p)

    def round2(self, delivered, m, tape, p, out):
        payload = sender_respond(self.aggregate(delivered, p), m, p)
        out.extend(public_send(payload, self.public_wires, self.path, "pub"))

    def finish(self, state, delivered, p):
        try:
            tag = public_receive(delivered, self.public_wires, self.path, "pub", 1)[0]
            if tag not in PAYLOAD_LEN:
                return None
            payload = public_receive(delivered, self.public_wires, self.path, "pub", PAYLOAD_LEN[tag])
        except (KeyError, AssertionError):
            return None
        return unmask(payload, state[self.path], p)

    def leaves(self):
        yield self


def share_slot(node, i, j, k):
    return node.share_wires[j - 1][k - 1], SlotId(node.path, f"p{i}.{j}.{k}")


def public_slot(node, i, c):
    return node.public_wires[c - 1], SlotId(node.path, f"p{i}.4.{c}")


def aggregate(node, delivered, p):
    """Per line: sums of the three shares for x = 1, 2, 3 and the majority
    of the three copies of p(4)."""
    out = []
    for groups, pub in zip(node.share_keys, node.public_keys):
        a, b, c = [(delivered[k1] + delivered[k2] + delivered[k3]) % p for k1, k2, k3 in groups]
        out.append((a, b, c, majority_value([delivered[k] for k in pub])))
    return out


@dataclass(frozen=True)
class InductiveNode:
    path: tuple
    children: tuple

    def round1(self, tape, p, out, state):
        for j, c in enumerate(self.children):
            c.round1(tape.child(j + 1), p, out, state)

    def round2(self, delivered, m, tape, p, out):
        r = tape.draw()
        for j, c in enumerate(self.children):
            c.round2(delivered, (m + (j + 1) * r) % p, tape.child(j + 1), p, out)

    def finish(self, state, delivered, p):
        return line_decode([c.finish(state, delivered, p) for c in self.children], p)

    def leaves(self):
        for c in self.children:
            yield from c.leaves()


def _build(structure, path, force):
    if len(structure.pairs) > 3:
        return InductiveNode(path, tuple(
            _build(sub, path + (j + 1,), force)
            for j, sub in enumerate(split_for_induction(structure))
        ))
    masks = structure.padded(3).masks
    n = structure.n
    share = tuple(
        tuple(choose_wire(n, [masks[j][0], masks[k][1]], force, strict=masks[k][1])
              for k in range(3))
        for j in range(3)
    )
    public = tuple(
        choose_wire(n, [masks[a][0], masks[b][0]], force)
        for a, b in ((0, 1), (0, 2), (1, 2))
    )
    return BaseNode(path, share, public)


@dataclass(frozen=True)
class TwoWayPlan:
    structure: AdversaryStructure
    root: object

    def leaves(self):
        return list(self.root.leaves())


def plan_twoway(structure: AdversaryStructure, force: bool = False,
                max_pairs: int = MAX_PAIRS) -> TwoWayPlan:
    if not force:
        report = feasible_twoway_completely_oblivious(structure)
        if not report.feasible:
            raise InfeasibleStructure(report, structure)
    if len(structure.pairs) > max_pairs:
        raise ValueError(f"{len(structure.pairs)} pairs exceeds the cap of {max_pairs}")
    return TwoWayPlan(structure, _build(structure, (), force))


class TwoWayProtocol:
    rounds = (R_TO_S, S_TO_R)
    kind = "twoway"

    def __init__(self, plan: TwoWayPlan, p: int):
        if p < 5:
            raise ValueError("the two-way protocol evaluates at x = 0..4 and needs p >= 5")
        self.plan = plan
        self.p = p
        self.n = plan.structure.n

    def round1_receiver(self, tape):
        out, state = [], {}
        self.plan.root.round1(tape, self.p, out, state)
        return out, state

    def round2_sender(self, delivered, m, tape):
        out = []
        self.plan.root.round2(delivered, m % self.p, tape, self.p, out)
        return out

    def round2_receiver(self, state, delivered):
        return self.plan.root.finish(state, delivered, self.p)

    def run(self, m, s_tape, r_tape, channel):
        out1, state = self.round1_receiver(r_tape)
        got1 = channel(out1, R_TO_S)
        out2 = self.round2_sender(got1, m, s_tape)
        got2 = channel(out2, S_TO_R)
        return self.round2_receiver(state, got2)


def round1_receiver(plan, tape, p):
    return TwoWayProtocol(plan, p).round1_receiver(tape)


def round2_sender(plan, delivered, m, tape, p):
    return TwoWayProtocol(plan, p).round2_sender(delivered, m, tape)


def round2_receiver(plan, state, delivered, p):
    v = TwoWayProtocol(plan, p).round2_receiver(state, delivered)
    if v is None:
        raise DecodeFailure("payload inconsistent with the receiver's lines")
    return v


def compose_inductive_twoway(candidates, p):
    """``m`` from four child outputs ``m + j*r``; at most one may be wrong."""
    v = line_decode(list(candidates), p)
    if v is None:
        raise DecodeFailure("no line through three of the four candidates")
    return v


def plan_non_completely_oblivious(structure: AdversaryStructure, force: bool = False) -> TwoWayPlan:
    """Two-round plan for an adversary that hears what it writes: the
    completely oblivious protocol run against the strengthened structure."""
    if not force:
        report = feasible_tworound_non_completely_oblivious(structure)
        if not report.feasible:
            raise InfeasibleStructure(report, structure)
    return plan_twoway(strengthen(structure), force=force)
