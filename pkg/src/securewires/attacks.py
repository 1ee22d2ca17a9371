"""Impossibility demonstrations against our own protocols.

Each attack takes a structure whose covering condition fails, aims the
matching protocol at the pairs involved (planned with ``force=True``), and
searches the parties' tapes for two executions that the receiver cannot tell
apart although the messages differ. Witnesses are checked by re-running both
executions through the wire layer.

Tape searches are depth-first in lexicographic order. A partial tape is cut
as soon as a transmission it has already produced on a listened wire differs
from the target. When a complete tape passes the first-round test but fails
the second-round one, the search backs up to the deepest tape position that
can change the second-round transmissions on its own.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .execution import run_protocol
from .oneway import OneWayProtocol, ThresholdProtocol, plan_oneway
from .strategies import Scripted
from .structures import AdversaryStructure, full_mask, wires_of
from .tape import ListTape, TapeExhausted
from .transport import Adversary, R_TO_S, S_TO_R
from .twoway import TwoWayProtocol, plan_non_completely_oblivious, plan_twoway

DEFAULT_BOUND = 200_000


class SearchExhausted(RuntimeError):
    """No witness within the node bound (or none exists for this protocol).

    ``complete`` is true only when the whole tape space was ruled out by
    exact pruning, which makes the failure a proof rather than a give-up."""

    def __init__(self, message, complete=False, nodes=0):
        super().__init__(message)
        self.complete = complete
        self.nodes = nodes


class AttackRefused(ValueError):
    """The structure does not satisfy the attack's covering condition."""


def _covers(mask, n):
    return mask & full_mask(n) == full_mask(n)


def sub_structure(structure: AdversaryStructure, indices) -> AdversaryStructure:
    """The pairs at ``indices`` (duplicates dropped, order kept)."""
    seen = []
    for i in indices:
        if i not in seen:
            seen.append(i)
    return structure.with_pairs([structure.pairs[i] for i in seen])


# --------------------------------------------------------------- search

class TapeSearch:
    def __init__(self, p: int, bound: int = DEFAULT_BOUND):
        self.p = p
        self.bound = bound
        self.nodes = 0

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.bound:
            raise SearchExhausted(f"tape search exceeded {self.bound} nodes", nodes=self.nodes)

    def run(self, emit, prefix_ok, leaf_ok=None, leaf_key=None):
        """First tape (lexicographic) whose emitted transmissions pass
        ``prefix_ok`` and, once complete, ``leaf_ok``.

        ``emit(values) -> (outputs, complete)`` runs the party on a partial
        tape and returns what it transmitted before the tape ran out."""
        found, _ = self._dfs([], emit, prefix_ok, leaf_ok, leaf_key)
        if found is None:
            # backjumps after a second-round miss are a heuristic, so only a
            # search without a leaf test has covered every tape
            raise SearchExhausted(f"tape space exhausted after {self.nodes} nodes",
                                  complete=leaf_ok is None, nodes=self.nodes)
        return found

    def _dfs(self, prefix, emit, prefix_ok, leaf_ok, leaf_key):
        self._tick()
        outs, complete = emit(prefix)
        depth = len(prefix)
        if not prefix_ok(outs):
            return None, depth - 1
        if complete:
            if leaf_ok is None or leaf_ok(prefix):
                return list(prefix), depth
            return None, self._relevant(prefix, emit, leaf_key)
        for v in range(self.p):
            found, level = self._dfs(prefix + [v], emit, prefix_ok, leaf_ok, leaf_key)
            if found is not None:
                return found, level
            if level < depth:
                return None, level
        return None, depth - 1

    def _relevant(self, tape, emit, leaf_key):
        """Deepest position whose value alone changes ``leaf_key``."""
        base = leaf_key(tape)
        for t in range(len(tape) - 1, -1, -1):
            for v in range(self.p):
                if v == tape[t]:
                    continue
                trial = tape[:t] + [v] + tape[t + 1:]
                self._tick()
                if emit(trial)[1] and leaf_key(trial) != base:
                    return t
        return -1


def _emitter(run):
    def emit(values):
        out = []
        try:
            run(ListTape(values, 10 ** 18), out)
        except TapeExhausted:
            return out, False
        return out, True
    return emit


def _tape_len(run, p):
    from .tape import CountingTape
    t = CountingTape(p)
    run(t, [])
    return t.consumed


def _matches(target):
    def ok(outs):
        return all(target[(w, s)] == v for w, s, v in outs if (w, s) in target)
    return ok


def _on(outputs, mask):
    return {(w, s): v for w, s, v in outputs if mask >> w & 1}


# --------------------------------------------------------------- witness

@dataclass
class ExecutionSpec:
    """Everything needed to replay one execution."""

    message: int
    s_tape: list
    r_tape: list
    pair_index: int | None
    script: dict = field(default_factory=dict)  # (round, wire, slot) -> value

    def to_dict(self):
        return {
            "message": self.message,
            "sender_tape": list(self.s_tape),
            "receiver_tape": list(self.r_tape),
            "pair": None if self.pair_index is None else self.pair_index + 1,
            "script": [
                {"round": r, "wire": w + 1, "slot": s.label(), "value": v}
                for (r, w, s), v in sorted(self.script.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2].label()))
            ],
        }


@dataclass
class AttackWitness:
    attack: str
    structure: AdversaryStructure
    pairs: tuple
    specs: tuple
    executions: tuple
    protocol: object
    search_nodes: int = 0
    note: str = ""
    # "ambiguity": two executions the receiver cannot tell apart.
    # "leak": one execution whose listened transmissions no run of the other
    # message reproduces (exhaustive search), so a listener learns m.
    kind: str = "ambiguity"
    other_message: int | None = None
    recheck: object = field(default=None, repr=False, compare=False)

    @property
    def messages(self):
        if self.kind == "leak":
            return (self.specs[0].message, self.other_message)
        return tuple(s.message for s in self.specs)

    def receiver_inputs(self, k):
        spec, ex = self.specs[k], self.executions[k]
        return list(spec.r_tape), ex.transcript.received(S_TO_R)

    @property
    def indistinguishable(self) -> bool:
        if self.kind == "leak":
            return False
        return self.receiver_inputs(0) == self.receiver_inputs(1)

    def to_dict(self) -> dict:
        return {
            "attack": self.attack,
            "kind": self.kind,
            "structure": self.structure.to_dict(),
            "pairs": [i + 1 for i in self.pairs],
            "messages": list(self.messages),
            "receiver_inputs_identical": self.indistinguishable,
            "decoded": [ex.decoded for ex in self.executions],
            "search_nodes": self.search_nodes,
            "note": self.note,
            "executions": [
                dict(spec.to_dict(), outcome=ex.to_dict())
                for spec, ex in zip(self.specs, self.executions)
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _execute(protocol, structure, spec: ExecutionSpec):
    adv = None
    if spec.pair_index is not None:
        adv = Adversary.for_structure(structure, spec.pair_index, Scripted(dict(spec.script)))
    return run_protocol(protocol, spec.message, ListTape(spec.s_tape, protocol.p),
                        ListTape(spec.r_tape, protocol.p), adv)


def _witness(attack, structure, pairs, protocol, specs, nodes, note=""):
    execs = tuple(_execute(protocol, structure, s) for s in specs)
    w = AttackWitness(attack, structure, tuple(pairs), tuple(specs), execs, protocol, nodes, note)
    if not w.indistinguishable:
        raise AssertionError(f"{attack}: constructed executions differ at the receiver")
    return w


def verify_witness(w: AttackWitness) -> bool:
    """Re-simulate both executions; the receiver inputs must coincide, the
    messages must differ and the replays must reproduce the stored
    transcripts. A leak witness instead repeats its exhaustive search."""
    again = [_execute(w.protocol, w.structure, s) for s in w.specs]
    same_runs = all(a.transcript.to_json() == e.transcript.to_json()
                    for a, e in zip(again, w.executions))
    if w.kind == "leak":
        return same_runs and w.messages[0] != w.messages[1] and bool(w.recheck and w.recheck())
    r0 = (list(w.specs[0].r_tape), again[0].transcript.received(S_TO_R))
    r1 = (list(w.specs[1].r_tape), again[1].transcript.received(S_TO_R))
    return same_runs and r0 == r1 and w.specs[0].message != w.specs[1].message


def _script(rnd, outputs, mask, values):
    return {(rnd, w, s): values[(w, s)] for w, s, _ in outputs if mask >> w & 1}


def _trivial(attack, structure, pairs, protocol, m):
    n_s = _tape_len(_sender_runner(protocol, m), protocol.p) if protocol.kind != "twoway" else \
        _tape_len(lambda t, out: _s_round2(protocol, {}, m, t, out, lenient=True), protocol.p)
    n_r = _tape_len(lambda t, out: _r_round1(protocol, t, out), protocol.p) if protocol.kind == "twoway" else 0
    spec = ExecutionSpec(m, [0] * n_s, [0] * n_r, None)
    ex = _execute(protocol, structure, spec)
    return AttackWitness(attack, structure, tuple(pairs), (spec, spec), (ex, ex), protocol, 0,
                         "identical messages: the two executions coincide")


# --------------------------------------------------------------- one-way

def _sender_runner(protocol, m):
    if isinstance(protocol, OneWayProtocol):
        return lambda tape, out: protocol.plan.root.send(m % protocol.p, tape, protocol.p, out)
    return lambda tape, out: out.extend(protocol.sender_round(m, tape))


def attack_oneway_ambiguity(structure, i, j, k, protocol=None, m1=0, m2=1, p=5,
                            bound=DEFAULT_BOUND) -> AttackWitness:
    """Possibility A: pair ``i`` makes D_i look like (m1, C1) while m2 is
    sent with C2. Possibility B: pair ``j`` makes D_j minus D_i look like
    (m2, C2) while m1 is sent with C1. C2 is found so that L_k carries the
    same values under both tapes."""
    masks = structure.masks
    (di, _), (dj, _), (_, lk) = masks[i], masks[j], masks[k]
    if not _covers(di | dj | lk, structure.n):
        raise AttackRefused("D_i, D_j and L_k do not cover every wire")
    if protocol is None:
        protocol = OneWayProtocol(plan_oneway(sub_structure(structure, (i, j, k)), force=True), p)
    p = protocol.p
    if m1 % p == m2 % p:
        return _trivial("oneway_ambiguity", structure, (i, j, k), protocol, m1)
    n_s = _tape_len(_sender_runner(protocol, m1), p)
    c1 = [0] * n_s
    sent1 = protocol.sender_round(m1, ListTape(c1, p))
    search = TapeSearch(p, bound)
    c2 = search.run(_emitter(_sender_runner(protocol, m2)), _matches(_on(sent1, lk)))
    sent2 = protocol.sender_round(m2, ListTape(c2, p))
    v1 = {(w, s): v for w, s, v in sent1}
    v2 = {(w, s): v for w, s, v in sent2}
    spec_a = ExecutionSpec(m2 % p, c2, [], i, _script(1, sent2, di, v1))
    spec_b = ExecutionSpec(m1 % p, c1, [], j, _script(1, sent1, dj & ~di, v2))
    return _witness("oneway_ambiguity", structure, (i, j, k), protocol, (spec_a, spec_b),
                    search.nodes)


# --------------------------------------------------------------- two-way

def _r_round1(protocol, tape, out):
    protocol.plan.root.round1(tape, protocol.p, out, {})


def _s_round2(protocol, delivered, m, tape, out, lenient=False):
    if lenient:
        # tape length probe: the sender's draws do not depend on what arrived
        from collections import defaultdict
        delivered = defaultdict(int)
    protocol.plan.root.round2(delivered, m % protocol.p, tape, protocol.p, out)


def _s_len(protocol):
    return _tape_len(lambda t, out: _s_round2(protocol, {}, 0, t, out, lenient=True), protocol.p)


def _r_len(protocol):
    return _tape_len(lambda t, out: _r_round1(protocol, t, out), protocol.p)


def _round1(protocol, r_tape):
    out = []
    _r_round1(protocol, ListTape(r_tape, protocol.p), out)
    return out


def _round2(protocol, delivered, m, s_tape):
    out = []
    _s_round2(protocol, delivered, m, ListTape(s_tape, protocol.p), out)
    return out


def _as_delivered(outputs):
    return {(w, s): v for w, s, v in outputs}


def attack_twoway_swap(structure, i, j, protocol=None, m1=0, m2=1, p=5, round_cap=2,
                       bound=DEFAULT_BOUND) -> AttackWitness:
    """D_i and D_j cover every wire: in each sender round pair ``i`` rewrites
    D_i with what m2 would send, or pair ``j`` rewrites D_j minus D_i with
    what m1 would send. The receiver sees the same thing in both cases in
    every round up to ``round_cap``."""
    masks = structure.masks
    di, dj = masks[i][0], masks[j][0]
    if not _covers(di | dj, structure.n):
        raise AttackRefused("D_i and D_j do not cover every wire")
    if protocol is None:
        protocol = TwoWayProtocol(plan_twoway(sub_structure(structure, (i, j)), force=True), p)
    p = protocol.p
    if round_cap < len(protocol.rounds):
        raise ValueError(f"round cap {round_cap} is below the protocol's {len(protocol.rounds)} rounds")
    if m1 % p == m2 % p:
        return _trivial("twoway_swap", structure, (i, j), protocol, m1)
    r_tape = [0] * _r_len(protocol)
    s_tape = [0] * _s_len(protocol)
    got1 = _as_delivered(_round1(protocol, r_tape))
    alpha = _round2(protocol, got1, m1, s_tape)
    beta = _round2(protocol, got1, m2, s_tape)
    va, vb = _as_delivered(alpha), _as_delivered(beta)
    spec_a = ExecutionSpec(m1 % p, s_tape, r_tape, i, _script(2, alpha, di, vb))
    spec_b = ExecutionSpec(m2 % p, s_tape, r_tape, j, _script(2, beta, dj & ~di, va))
    return _witness("twoway_swap", structure, (i, j), protocol, (spec_a, spec_b), 1,
                    f"receiver inputs agree in every round up to the cap of {round_cap}")


def _world_search(protocol, m_prime, round1_target, listen, deliver1, round2_target, bound):
    """Tapes (R', S') for ``m_prime`` whose listened transmissions hit the
    targets. ``deliver1`` maps R's round-1 outputs to what S receives."""
    p = protocol.p
    n_s = _s_len(protocol)
    s_tapes = [list(t) for t in _odometer(p, n_s)]
    search = TapeSearch(p, bound)
    chosen = {}

    def round2_key(r_tape, s_tape):
        out1 = _round1(protocol, r_tape)
        return _on(_round2(protocol, deliver1(out1), m_prime, s_tape), listen)

    def leaf_ok(r_tape):
        for s_tape in s_tapes:
            search._tick()
            if round2_key(r_tape, s_tape) == round2_target:
                chosen["s"] = s_tape
                return True
        return False

    r_tape = search.run(_emitter(lambda t, out: _r_round1(protocol, t, out)),
                        _matches(round1_target), leaf_ok,
                        lambda t: round2_key(t, s_tapes[0]))
    return r_tape, chosen["s"], search.nodes


def _odometer(p, length):
    from itertools import product
    return product(range(p), repeat=length)


def attack_twoway_replay(structure, i, j, protocol=None, m=0, m_prime=1, p=5,
                         bound=DEFAULT_BOUND) -> AttackWitness:
    """D_i and L_j cover every wire. World alpha (m, zero tapes) and world
    beta (m', tapes found by search) agree on L_j in both rounds. Running m
    with the receiver's beta tape, pair ``i`` feeds the sender alpha and the
    receiver beta on D_i; the receiver decodes m'."""
    masks = structure.masks
    di, lj = masks[i][0], masks[j][1]
    if not _covers(di | lj, structure.n):
        raise AttackRefused("D_i and L_j do not cover every wire")
    if protocol is None:
        protocol = TwoWayProtocol(plan_twoway(sub_structure(structure, (i, j)), force=True), p)
    p = protocol.p
    if m % p == m_prime % p:
        return _trivial("twoway_replay", structure, (i, j), protocol, m)
    r_a = [0] * _r_len(protocol)
    s_a = [0] * _s_len(protocol)
    a1 = _round1(protocol, r_a)
    a2 = _round2(protocol, _as_delivered(a1), m, s_a)
    r_b, s_b, nodes = _world_search(protocol, m_prime, _on(a1, lj), lj, _as_delivered,
                                    _on(a2, lj), bound)
    b1 = _round1(protocol, r_b)
    b2 = _round2(protocol, _as_delivered(b1), m_prime, s_b)
    va1, vb2 = _as_delivered(a1), _as_delivered(b2)
    attack = ExecutionSpec(m % p, s_a, r_b, i,
                           {**_script(1, b1, di, va1), **_script(2, a2, di, vb2)})
    reference = ExecutionSpec(m_prime % p, s_b, r_b, None)
    return _witness("twoway_replay", structure, (i, j), protocol, (attack, reference), nodes,
                    "the attacked execution sends m but the receiver's inputs equal an "
                    "undisturbed run of m'")


def attack_tworound_noncompletely(structure, i, j, protocol=None, m=0, m_prime=1, p=5,
                                  bound=DEFAULT_BOUND) -> AttackWitness:
    """D_i, D_j and L_j cover every wire. Wires split into a = D_i - L_j,
    b = D_j - (D_i | L_j) and g = L_j. Pair ``i`` rewrites a in both rounds
    while m' is sent; pair ``j`` rewrites b in round 2 while m is sent."""
    masks = structure.masks
    di, dj, lj = masks[i][0], masks[j][0], masks[j][1]
    if not _covers(di | dj | lj, structure.n):
        raise AttackRefused("D_i, D_j and L_j do not cover every wire")
    if protocol is not None:
        candidates = [(protocol, "")]
    else:
        sub = sub_structure(structure, (i, j))
        # The strengthened plan may leak outright (its listener hears a whole
        # line plus the payload), in which case no matching world exists;
        # the plain two-way plan is tried next.
        candidates = [
            (TwoWayProtocol(plan_non_completely_oblivious(sub, force=True), p), "strengthened plan"),
            (TwoWayProtocol(plan_twoway(sub, force=True), p), "plain two-way plan"),
        ]
    last = None
    for proto, label in candidates:
        try:
            w = _nco_attack(structure, i, j, proto, m, m_prime, bound)
        except SearchExhausted as exc:
            last = exc
            continue
        w.note = f"protocol: {label}" if label else w.note
        return w
    raise last


def _nco_attack(structure, i, j, protocol, m, m_prime, bound):
    masks = structure.masks
    di, dj, lj = masks[i][0], masks[j][0], masks[j][1]
    p = protocol.p
    if m % p == m_prime % p:
        return _trivial("tworound_noncompletely", structure, (i, j), protocol, m)
    a_w = di & ~lj
    b_w = dj & ~(di | lj)
    r0 = [0] * _r_len(protocol)
    s0 = [0] * _s_len(protocol)
    r1 = _round1(protocol, r0)
    v_r1 = _as_delivered(r1)
    s2 = _round2(protocol, v_r1, m, s0)

    def deliver(out1):
        got = _as_delivered(out1)
        for key in got:
            if b_w >> key[0] & 1:
                got[key] = v_r1[key]
        return got

    r_p, s_p, nodes = _world_search(protocol, m_prime, _on(r1, lj), lj, deliver, _on(s2, lj), bound)
    r1p = _as_delivered(_round1(protocol, r_p))
    s2p_out = _round2(protocol, deliver(_round1(protocol, r_p)), m_prime, s_p)
    v_s2, v_s2p = _as_delivered(s2), _as_delivered(s2p_out)
    poss_a = ExecutionSpec(m_prime % p, s_p, r0, i,
                           {**_script(1, r1, a_w, r1p), **_script(2, s2, a_w, v_s2)})
    poss_b = ExecutionSpec(m % p, s0, r0, j, _script(2, s2, b_w, v_s2p))
    return _witness("tworound_noncompletely", structure, (i, j), protocol, (poss_a, poss_b), nodes)


# ---------------------------------------------------------- eavesdropping

def attack_eavesdrop(structure, j, setting="oneway", protocol=None, m1=0, m2=1, p=5,
                     bound=DEFAULT_BOUND) -> AttackWitness:
    """L_j is every wire, so pair ``j`` hears all the receiver hears. Either
    some run of ``m2`` reproduces the whole transcript of a run of ``m1``
    (then the receiver is fooled with no disruption at all), or none does
    and the listener reads ``m`` off the wires."""
    masks = structure.masks
    if not _covers(masks[j][1], structure.n):
        raise AttackRefused("L_j does not cover every wire")
    sub = sub_structure(structure, (j,))
    if protocol is None:
        if setting == "oneway":
            protocol = OneWayProtocol(plan_oneway(sub, force=True), p)
        elif setting == "tworound_nco":
            protocol = TwoWayProtocol(plan_non_completely_oblivious(sub, force=True), p)
        else:
            protocol = TwoWayProtocol(plan_twoway(sub, force=True), p)
    p = protocol.p
    if m1 % p == m2 % p:
        return _trivial("eavesdrop", structure, (j,), protocol, m1)
    twoway = protocol.kind == "twoway"
    r = [0] * (_r_len(protocol) if twoway else 0)
    if twoway:
        got1 = _as_delivered(_round1(protocol, r))
        s1 = [0] * _s_len(protocol)
        target = {(w, s): v for w, s, v in _round2(protocol, got1, m1, s1)}
        runner = lambda t, out: _s_round2(protocol, got1, m2, t, out)  # noqa: E731
    else:
        s1 = [0] * _tape_len(_sender_runner(protocol, m1), p)
        target = {(w, s): v for w, s, v in protocol.sender_round(m1, ListTape(s1, p))}
        runner = _sender_runner(protocol, m2)

    def search():
        return TapeSearch(p, bound).run(_emitter(runner), _matches(target))

    first = ExecutionSpec(m1 % p, s1, r, None)
    try:
        s2 = search()
    except SearchExhausted as exc:
        if not exc.complete:
            raise

        def recheck():
            try:
                search()
            except SearchExhausted as again:
                return again.complete
            return False

        ex = _execute(protocol, structure, first)
        return AttackWitness("eavesdrop", structure, (j,), (first,), (ex,), protocol, exc.nodes,
                             "no tape sends the other message with the same transmissions; "
                             "the listener on every wire learns the message",
                             kind="leak", other_message=m2 % p, recheck=recheck)
    second = ExecutionSpec(m2 % p, s2, r, None)
    return _witness("eavesdrop", structure, (j,), protocol, (first, second), 0,
                    "both messages produce the same transcript with no disruption")


ATTACKS = {
    "oneway": attack_oneway_ambiguity,
    "twoway_swap": attack_twoway_swap,
    "twoway_replay": attack_twoway_replay,
    "tworound_nco": attack_tworound_noncompletely,
    "eavesdrop": attack_eavesdrop,
}


def attack_for(structure, setting, m1=0, m2=1, p=5, bound=DEFAULT_BOUND, threshold=None):
    """Pick the attack matching the structure's feasibility witness."""
    from .feasibility import check
    report = check(structure, setting)
    if report.feasible:
        raise AttackRefused(f"structure is feasible for {setting}")
    idx = report.witness
    listener = idx[-1]
    if report.witness_roles[-1] == "L" and _covers(structure.masks[listener][1], structure.n):
        return attack_eavesdrop(structure, listener, setting, m1=m1, m2=m2, p=p, bound=bound)
    if setting == "oneway":
        proto = None
        if threshold is not None:
            proto = ThresholdProtocol(structure.n, threshold, p) if structure.n > 3 * threshold else None
        return attack_oneway_ambiguity(structure, *idx, protocol=proto, m1=m1, m2=m2, p=p, bound=bound)
    if setting == "twoway":
        if report.witness_roles == ("D", "D"):
            return attack_twoway_swap(structure, *idx, m1=m1, m2=m2, p=p, bound=bound)
        return attack_twoway_replay(structure, *idx, m=m1, m_prime=m2, p=p, bound=bound)
    return attack_tworound_noncompletely(structure, idx[0], idx[1], m=m1, m_prime=m2, p=p, bound=bound)
