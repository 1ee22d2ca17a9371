"""Exhaustive reliability and privacy oracles, and feasibility
cross-validation.

Reliability sweeps enumerate every value assignment for the slots on the
adversary's disrupted wires. They do so group by group: slots that feed the
receiver through disjoint computations are enumerated separately and their
reachable results combined, which covers the same cross product without
materialising it.

Privacy verdicts are exact multiset comparisons of adversary views over
complete tape enumerations; nothing is sampled. Budgets turn into a
:class:`BudgetExceeded` refusal rather than a partial answer.
"""
from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple

from . import twoway
from .feasibility import (
    feasible_classic,
    feasible_oneway,
    feasible_tworound_non_completely_oblivious,
    feasible_twoway_completely_oblivious,
)
from .oneway import BaseNode as OneWayBase, OneWayProtocol, ThresholdProtocol, majority_value
from .strategies import Constant, Passive, RandomNoise, Shift
from .structures import AdversaryStructure, Mode, dl_structure, general_structure, threshold_structure
from .tape import CountingTape, ListTape, SeededTape
from .transport import (NOISE, R_TO_S, S_TO_R, Adversary, RoundContext, SlotId,
                        delivered_visible, hears_own_writes, visibility)

DEFAULT_PRIVACY_BUDGET = 2_000_000
MAX_FAILURES = 1000


class BudgetExceeded(RuntimeError):
    """The requested exhaustive check is larger than the allowed budget."""


@dataclass
class ReliabilityReport:
    trials: int = 0
    failures: list = field(default_factory=list)
    exhaustive: bool = False
    # size of the cross product the sweep covered (messages x pairs x
    # tapes x disruption assignments)
    assignments: int = 0
    # set when the sweep stopped early after collecting enough failures
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "trials": self.trials,
            "exhaustive": self.exhaustive,
            "assignments": self.assignments,
            "failures": self.failures[:20],
            "failure_count": len(self.failures),
            "truncated": self.truncated,
        }


@dataclass
class PrivacyReport:
    # (pair_index, strategy name) -> verdict entry
    checks: dict = field(default_factory=dict)
    first_violation: tuple | None = None
    tapes: int = 0

    @property
    def ok(self) -> bool:
        return self.first_violation is None

    def record(self, pair_index, strategy, views_by_message):
        """Compare per-message view multisets (or any exact summary of them)."""
        msgs = sorted(views_by_message)
        ref = views_by_message[msgs[0]]
        differing = None
        for m in msgs[1:]:
            if views_by_message[m] != ref:
                differing = (msgs[0], m)
                break
        self.record_verdict(pair_index, strategy, differing,
                            len(ref) if isinstance(ref, Counter) else None)

    def record_verdict(self, pair_index, strategy, differing, distinct_views=None):
        self.checks[(pair_index, strategy)] = {
            "equal": differing is None,
            "distinct_views": distinct_views,
            "differs_at": differing,
        }
        if differing is not None and self.first_violation is None:
            self.first_violation = (pair_index, strategy) + tuple(differing)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "tapes": self.tapes,
            "first_violation": None if self.first_violation is None else {
                "pair": self.first_violation[0] + 1,
                "strategy": self.first_violation[1],
                "messages": list(self.first_violation[2:]),
            },
            "checks": [
                {"pair": k[0] + 1, "strategy": k[1], **v}
                for k, v in sorted(self.checks.items(), key=lambda kv: (kv[0][0], kv[0][1]))
            ],
        }


def default_alphabet(p: int):
    """Replacement values tried on each disrupted slot: the whole field for
    p <= 5, else {0, 1, sent + 1}."""
    if p <= 5:
        full = tuple(range(p))
        return lambda sent: full
    return lambda sent: (0, 1, (sent + 1) % p)


def _messages(p, messages):
    return list(range(p)) if messages is None else [m % p for m in messages]


# ---------------------------------------------------------------- one-way

def verify_reliability_oneway(protocol, structure, messages=None, tape_seeds=(0, 1, 2),
                              alphabet=None) -> ReliabilityReport:
    """Every message x pair x tape x disruption assignment (exhaustive)."""
    p = protocol.p
    alphabet = alphabet or default_alphabet(p)
    report = ReliabilityReport(exhaustive=True)
    masks = structure.masks or [(0, 0)]
    for m in _messages(p, messages):
        for seed in tape_seeds:
            sent = protocol.sender_round(m, SeededTape(seed, p, ("S",)))
            for pi, (d, _) in enumerate(masks):
                size = 1
                for w, s, v in sent:
                    if d >> w & 1:
                        size *= len(set(alphabet(v)))
                report.assignments += size
                report.trials += 1
                outs = protocol.reachable(sent, d, alphabet)
                if outs != {m}:
                    report.failures.append(
                        {"message": m, "seed": seed, "pair": pi + 1,
                         "outputs": sorted((("fail" if o is None else o) for o in outs), key=str)}
                    )
    return report


def brute_force_reliability_oneway(protocol, structure, m, seed, alphabet=None) -> set:
    """Receiver outputs over the full, unfactored cross product; an
    independent check on :meth:`reachable` for small cases."""
    p = protocol.p
    alphabet = alphabet or default_alphabet(p)
    sent = protocol.sender_round(m, SeededTape(seed, p, ("S",)))
    outs = set()
    for d, _ in structure.masks or [(0, 0)]:
        hit = [(w, s) for w, s, v in sent if d >> w & 1]
        sent_map = {(w, s): v for w, s, v in sent}
        for vals in product(*[alphabet(sent_map[k]) for k in hit]):
            delivered = dict(sent_map)
            delivered.update(zip(hit, vals))
            outs.add(protocol.decode(delivered))
    return outs


def tape_length(protocol, party="S") -> int:
    t = CountingTape(protocol.p)
    if protocol.kind == "twoway":
        if party == "R":
            protocol.round1_receiver(t)
        else:
            out, state = protocol.round1_receiver(CountingTape(protocol.p))
            delivered = {(w, s): v for w, s, v in out}
            protocol.round2_sender(delivered, 0, t)
    else:
        protocol.sender_round(0, t)
    return t.consumed


def default_battery_oneway():
    return [Passive(), Constant(0), Shift(1)]


def _round_view(adversary, rnd, direction, outgoing, p):
    """View entries one round adds, using the same rules as the wire layer."""
    adversary.view = []
    adversary.observe_sent(rnd, outgoing)
    writes = adversary.disrupt_round(rnd, direction, outgoing)
    for w, s, v in outgoing:
        if delivered_visible(adversary.mode, adversary.disrupt, adversary._deliv_mask, w,
                             (w, s) in writes):
            adversary.view.append((rnd, w, s, "delivered", writes.get((w, s), v) % p))
    return tuple(adversary.view)


def verify_privacy_oneway(protocol, structure, messages=None, battery=None,
                          budget=DEFAULT_PRIVACY_BUDGET, mode=None) -> PrivacyReport:
    """Enumerate the sender's whole tape for every message; compare the
    multiset of views per (pair, strategy)."""
    p = protocol.p
    length = tape_length(protocol, "S")
    battery = battery or default_battery_oneway()
    masks = structure.masks or [(0, 0)]
    n_msgs = p if messages is None else len(messages)
    cost = p ** length * n_msgs * len(masks) * len(battery)
    if cost > budget:
        raise BudgetExceeded(f"{cost} executions exceed the privacy budget of {budget}")
    msgs = _messages(p, messages)
    mode = mode or structure.mode
    report = PrivacyReport(tapes=p ** length)
    sends = {m: [protocol.sender_round(m, ListTape(t, p)) for t in product(range(p), repeat=length)]
             for m in msgs}
    for pi, (d, l) in enumerate(masks):
        for beh in battery:
            adv = Adversary(d, l, mode, beh, pi)
            views = {m: Counter(_round_view(adv, 1, S_TO_R, out, p) for out in sends[m])
                     for m in msgs}
            report.record(pi, beh.name, views)
    return report


# ---------------------------------------------------------------- two-way

def _base_node(protocol):
    root = protocol.plan.root
    if not isinstance(root, twoway.BaseNode):
        raise ValueError("exhaustive two-way checks need a plan without induction (|A| <= 3)")
    return root


def _reachable_majority(sent_vals, hit, alphabet):
    choices = [tuple(set(alphabet(v))) if h else (v,) for v, h in zip(sent_vals, hit)]
    return {majority_value(c) for c in product(*choices)}


def _line_reachable(node, i, sent, d, alphabet, p):
    """Every (s1, s2, s3, p4-majority) the adversary can make the sender see
    for line ``i`` (0-based)."""
    parts = []
    for keys in node.share_keys[i]:
        fixed = sum(sent[k] for k in keys if not d >> k[0] & 1)
        hit = [k for k in keys if d >> k[0] & 1]
        choices = [tuple(set(alphabet(sent[k]))) for k in hit]
        parts.append({(fixed + sum(vals)) % p for vals in product(*choices)})
    pub = node.public_keys[i]
    parts.append(_reachable_majority([sent[k] for k in pub], [d >> k[0] & 1 for k in pub], alphabet))
    size = 1
    for keys in node.share_keys[i] + (pub,):
        for k in keys:
            if d >> k[0] & 1:
                size *= len(set(alphabet(sent[k])))
    return set(product(*parts)), size


def verify_reliability_twoway(protocol, structure, messages=None, tape_seeds=(0, 1, 2),
                              alphabet=None, max_failures=MAX_FAILURES) -> ReliabilityReport:
    """Exhaustive sweep for a base (three-pair) plan.

    Lines are independent in round 1, so the sender's possible inputs are the
    product of per-line reachable summaries. The payload only reads the
    selected lines, so for each class vector only those lines' summaries are
    enumerated; round-2 disruptions are enumerated per payload field. The
    sweep stops once ``max_failures`` failures are on record.
    """
    node = _base_node(protocol)
    p = protocol.p
    twoway.set_field(p)
    alphabet = alphabet or default_alphabet(p)
    report = ReliabilityReport(exhaustive=True)
    msgs = _messages(p, messages)
    masks = structure.masks or [(0, 0)]
    for seed in tape_seeds:
        out1, state = protocol.round1_receiver(SeededTape(seed, p, ("R",)))
        sent = {(w, s): v for w, s, v in out1}
        for pi, (d, _) in enumerate(masks):
            by_class = []
            r1_size = 1
            for i in range(4):
                summaries, size = _line_reachable(node, i, sent, d, alphabet, p)
                r1_size *= size
                groups = {}
                for s in summaries:
                    groups.setdefault(twoway.classify(s), []).append(s)
                by_class.append(groups)
            pub_hit = [d >> w & 1 for w in node.public_wires]
            done = set()
            for cv in product(*[sorted(g) for g in by_class]):
                sel = twoway.select_case(cv)
                inv = tuple(x - 1 for x in (sel.first, sel.second) if x)
                key = (sel,) + tuple(cv[i] for i in inv)
                if key in done:
                    continue
                done.add(key)
                for combo in product(*[by_class[i][cv[i]] for i in inv]):
                    summaries = [None] * 4
                    for i, s in zip(inv, combo):
                        summaries[i] = s
                    for m in msgs:
                        payload = twoway.build_payload(sel, summaries, m, p)
                        report.trials += 1
                        for got in _payload_reachable(payload, pub_hit, alphabet):
                            out = _finish(node, state, got, p)
                            if out != m:
                                report.failures.append({
                                    "message": m, "seed": seed, "pair": pi + 1,
                                    "summaries": [list(s) if s else None for s in summaries],
                                    "payload": list(payload),
                                    "delivered_payload": list(got),
                                    "output": "fail" if out is None else out,
                                })
                                if len(report.failures) >= max_failures:
                                    report.truncated = True
                                    return report
            report.assignments += r1_size * len(msgs)
    return report


def _payload_reachable(payload, pub_hit, alphabet):
    fields = []
    for v in payload:
        fields.append(_reachable_majority([v] * 3, pub_hit, alphabet))
    if all(len(f) == 1 for f in fields):
        yield list(payload)
        return
    # a majority of copies is disrupted: the receiver is at the adversary's
    # mercy; enumerate the delivered tag and the fields that tag implies
    for tag in sorted(fields[0], key=lambda x: (x is None, x)):
        if tag not in twoway.PAYLOAD_LEN:
            yield [tag]
            continue
        length = twoway.PAYLOAD_LEN[tag]
        rest = [fields[k] if k < len(fields) else {None} for k in range(1, length)]
        for vals in product(*rest):
            yield [tag] + list(vals)


def _finish(node, state, payload, p):
    if any(v is None for v in payload) or payload[0] not in twoway.PAYLOAD_LEN:
        return None
    return twoway.unmask(payload, state[node.path], p)


# ------------------------------------------------ randomized reliability

def default_battery_random():
    def round_only(r):
        return lambda rnd, w, s: rnd == r
    return [
        RandomNoise(),
        Constant(0),
        Shift(1),
        RandomNoise(select=round_only(1), name="noise_round1"),
        RandomNoise(select=round_only(2), name="noise_round2"),
        Passive(),
    ]


def fast_channel(adversary_d, behavior, noise_tape, p, counter):
    """Wire channel without transcript bookkeeping. Only for behaviours that
    ignore the accumulated view (every battery member above)."""
    def channel(outgoing, direction):
        counter[0] += 1
        disruptable = [(w, s, None) for w, s, _ in outgoing if adversary_d >> w & 1]
        writes = {}
        if disruptable:
            writes = behavior.plan_round(RoundContext(counter[0], direction, disruptable, [])) or {}
        delivered = {}
        for w, s, v in outgoing:
            x = writes.get((w, s))
            if x is None:
                delivered[(w, s)] = v % p
            elif x is NOISE:
                delivered[(w, s)] = noise_tape.draw()
            else:
                delivered[(w, s)] = x % p
        return delivered
    return channel


def randomized_reliability(protocol, structure, trials: int, seed: int = 0,
                           battery=None) -> ReliabilityReport:
    """Seeded trials cycling through pairs and behaviours.

    Shift sees ``None`` for every slot here (it writes ``delta``), which is
    a lawful behaviour for any listening set.
    """
    p = protocol.p
    battery = battery or default_battery_random()
    masks = structure.masks or [(0, 0)]
    report = ReliabilityReport(exhaustive=False)
    master = SeededTape(seed, p, ("trials",))
    for t in range(trials):
        pi = t % len(masks)
        beh = battery[(t // len(masks)) % len(battery)]
        m = master.draw()
        counter = [0]
        chan = fast_channel(masks[pi][0], beh, SeededTape(seed, p, ("ADV", t)), p, counter)
        out = protocol.run(m, SeededTape(seed, p, ("S", t)), SeededTape(seed, p, ("R", t)), chan)
        report.trials += 1
        if out != m or counter[0] != len(protocol.rounds):
            report.failures.append({"trial": t, "pair": pi + 1, "behavior": beh.name,
                                    "message": m, "output": out, "rounds": counter[0]})
    return report


def verify_reliability(protocol, structure, p=None, budget=None, messages=None,
                       trials: int = 2000, seed: int = 0) -> ReliabilityReport:
    """Exhaustive when the plan allows it (one-way: always; two-way: base
    plans), seeded random trials otherwise."""
    if protocol.kind == "twoway":
        if isinstance(protocol.plan.root, twoway.BaseNode):
            return verify_reliability_twoway(protocol, structure, messages)
        return randomized_reliability(protocol, structure, trials, seed)
    return verify_reliability_oneway(protocol, structure, messages)


# --------------------------------------------------- two-way privacy

SLOT_LOCAL = (Passive, RandomNoise, Constant, Shift)


class Sight(NamedTuple):
    """What one pair touches and sees: disrupt mask, wires whose sent values
    it hears, wires whose delivered values it hears, and whether it hears
    its own writes."""

    disrupt: int
    sent: int
    delivered: int
    own: bool

    @classmethod
    def of(cls, mode, d, l):
        smask, dmask = visibility(mode, d, l)
        return cls(d, smask, dmask, hears_own_writes(mode))


def _writer(behavior, rnd, direction):
    """Per-slot decision of a slot-local behaviour."""
    def write(w, s, heard):
        ctx = RoundContext(rnd, direction, [(w, s, heard)], [])
        return (behavior.plan_round(ctx) or {}).get((w, s))
    return write


def _slot_options(keys, values, sight, write, p, noise_token=False):
    """Per slot: the (view entries, delivered value) alternatives, one per
    noise value when the behaviour asks for noise."""
    d, smask, dmask, own = sight
    per_slot = []
    for idx, ((w, s), v) in enumerate(zip(keys, values)):
        heard = v if smask >> w & 1 else None
        seen = () if heard is None else (("s", idx, v),)
        if not d >> w & 1:
            per_slot.append(((seen, v),))
            continue
        x = write(w, s, heard)
        if x is None:
            outs = (v,)
        elif x is NOISE:
            outs = ("N",) if noise_token else tuple(range(p))
        else:
            outs = (x % p,)
        show = dmask >> w & 1 or (own and x is not None)
        per_slot.append(tuple((seen + ((("d", idx, o),) if show else ()), o) for o in outs))
    return per_slot


def _group_outcomes(keys, values, sight, write, p):
    for combo in product(*_slot_options(keys, values, sight, write, p)):
        view = tuple(e for entries, _ in combo for e in entries)
        yield view, tuple(o for _, o in combo)


def share_group_table(keys, sight, write, p):
    """``{v: Counter((view, sum))}`` over the two sharing coins and any noise."""
    table = {}
    for v in range(p):
        c = Counter()
        for r1 in range(p):
            for r2 in range(p):
                vals = (r1, r2, (v - r1 - r2) % p)
                for view, got in _group_outcomes(keys, vals, sight, write, p):
                    c[(view, sum(got) % p)] += 1
        table[v] = c
    return table


def lump_views(table):
    """Relabel the views of one slot group by their normalised signature.

    A view's signature is its column ``(v, result) -> count`` scaled down by
    the gcd. Views with equal signatures have proportional joint laws with
    everything else in the execution (the group's coins are fresh), so
    merging them multiplies both sides of any per-message comparison by the
    same constants: equality of view multisets is preserved in both
    directions. When a single signature remains, the view carries no
    information and is dropped altogether."""
    columns = {}
    for v, c in table.items():
        for (view, s), k in c.items():
            columns.setdefault(view, []).append((v, s, k))
    sigs = {}
    for view, col in columns.items():
        g = 0
        for _, _, k in col:
            g = math.gcd(g, k)
        sigs[view] = tuple(sorted((v, s, k // g) for v, s, k in col))
    labels = {sig: i for i, sig in enumerate(sorted(set(sigs.values())))}
    single = len(labels) == 1
    out = {}
    for v, c in table.items():
        new = Counter()
        for (view, s), k in c.items():
            new[((() if single else labels[sigs[view]]), s)] += k
        out[v] = new
    return out, len(labels)


def public_group_table(keys, sight, write, p):
    table = {}
    for v in range(p):
        c = Counter()
        for view, got in _group_outcomes(keys, (v, v, v), sight, write, p):
            c[(view, majority_value(got))] += 1
        table[v] = c
    return table


@dataclass(frozen=True)
class LineKey:
    views: tuple  # kept share-group views, p4 view
    summary: tuple


def line_table(node, i, sight, write, p, stats=None) -> Counter:
    """``Counter(LineKey)`` for line ``i`` (0-based) over its two
    coefficients, six sharing coins and any round-1 noise."""
    groups = []
    for keys in node.share_keys[i]:
        lumped, n_labels = lump_views(share_group_table(keys, sight, write, p))
        if stats is not None:
            stats["groups"] += 1
            stats["silent"] += n_labels == 1
        groups.append(lumped)
    pub, _ = lump_views(public_group_table(node.public_keys[i], sight, write, p))
    out = Counter()
    for c0 in range(p):
        for c1 in range(p):
            vals = [(c0 + c1 * x) % p for x in (1, 2, 3, 4)]
            tables = [groups[j][vals[j]] for j in range(3)] + [pub[vals[3]]]
            for combo in product(*[t.items() for t in tables]):
                weight = 1
                for _, k in combo:
                    weight *= k
                views = tuple(key[0] for key, _ in combo)
                summary = tuple(key[1] for key, _ in combo)
                out[LineKey(views, summary)] += weight
    return out


def _tag_selector(pred):
    """Select slots by their parsed tag: ``pred(round, line, position)``;
    position 4 is the broadcast p(4), 0 the round-2 payload."""
    def select(rnd, w, slot):
        tag = slot.tag
        if tag.startswith("pub"):
            return pred(rnd, 0, 0)
        line, pos = tag[1:].split(".")[:2]
        return pred(rnd, int(line), int(pos))
    return select


def battery_twoway(node, d, lawful_deterministic: bool):
    """Behaviours for one pair: passive; noise on one share position across
    all lines, alone or with a second position on line 1; noise on the
    broadcast copies; noise everywhere. When the adversary lawfully knows
    what it writes, constant and shift writers join."""
    positions = [j + 1 for j in range(3)
                 if any(d >> w & 1 for w, _ in node.share_keys[0][j])]
    out = [Passive()]
    for x in positions:
        out.append(RandomNoise(_tag_selector(lambda r, i, j, x=x: r == 1 and j == x),
                               name=f"noise_pos{x}"))
        for y in positions:
            if y != x:
                out.append(RandomNoise(
                    _tag_selector(lambda r, i, j, x=x, y=y: r == 1 and (j == x or (i == 1 and j == y))),
                    name=f"noise_pos{x}_line1_pos{y}"))
    if any(d >> w & 1 for w in node.public_wires):
        out.append(RandomNoise(_tag_selector(lambda r, i, j: j in (0, 4)), name="noise_public"))
    out.append(RandomNoise(name="noise_all"))
    if lawful_deterministic:
        out.append(Constant(0, name="constant0"))
        out.append(Shift(1, name="shift1"))
        for x in positions:
            out.append(Constant(1, _tag_selector(lambda r, i, j, x=x: r == 1 and j == x),
                                name=f"constant1_pos{x}"))
    return out


def deterministic_lawful(structure) -> bool:
    """Value-choosing writers are lawful when every disrupted wire is also
    heard (D within L), the setting the strengthened structure produces."""
    return all(d & ~l == 0 for d, l in structure.masks)


def _part_view(positions, values, node, sight, write2, p):
    entries = []
    for pos, v in zip(positions, values):
        keys = [(w, SlotId(node.path, f"pub{pos}.{c}")) for c, w in enumerate(node.public_wires)]
        for opts in _slot_options(keys, (v, v, v), sight, write2, p, noise_token=True):
            (seen, _), = opts
            entries.append((pos,) + seen)
    return tuple(entries)


class TwoWayViews:
    """Exact view distribution of a base two-way node, kept factored.

    Per message the distribution is a sum over class vectors of products of
    per-line factors: each line contributes its round-1 view and, when the
    selection reads it, the payload fields computed from it. Components of
    the view that are independent of everything else (share groups whose
    view factors, payload noise) are dropped identically for every message.
    """

    def __init__(self, node, d, l, mode, behavior, messages, p, budget):
        twoway.set_field(p)
        self.node, self.p, self.messages, self.budget = node, p, list(messages), budget
        self.sight = Sight.of(mode, d, l)
        write1 = _writer(behavior, 1, R_TO_S)
        self.write2 = _writer(behavior, 2, S_TO_R)
        self.stats = Counter()
        self.by_class = []
        for i in range(4):
            t = line_table(node, i, self.sight, write1, p, self.stats)
            g = {}
            for key, k in t.items():
                g.setdefault(twoway.classify(key.summary), Counter())[key] += k
            self.by_class.append(g)
        self.reduced = [{c: _reduce(cnt) for c, cnt in g.items()} for g in self.by_class]
        self._views = {}
        self._factors = {}
        self._weights = {}
        self.terms = []
        for cv in product(*[sorted(g) for g in self.by_class]):
            sel = twoway.select_case(cv)
            self.terms.append((cv, sel))

    def part_view(self, positions, values):
        key = (positions, values)
        if key not in self._views:
            self._views[key] = _part_view(positions, values, self.node, self.sight, self.write2,
                                          self.p)
        return self._views[key]

    def header(self, sel):
        _, positions, values = twoway.payload_parts(sel, [(0, 0, 0, 0)] * 4, 0, self.p)[0]
        return self.part_view(positions, values)

    def factor(self, i, c, sel, m):
        """Counter over (round-1 view, payload view) of involved line ``i``."""
        key = (i, c, sel, m)
        if key not in self._factors:
            out = Counter()
            for lk, k in self.by_class[i][c].items():
                summaries = [None] * 4
                summaries[i] = lk.summary
                other = sel.second if sel.first == i + 1 else sel.first
                if other:
                    summaries[other - 1] = lk.summary
                pv = ()
                for line, positions, values in twoway.payload_parts(sel, summaries, m, self.p):
                    if line == i + 1:
                        pv = self.part_view(positions, values)
                out[(lk.views, pv)] += k
                self.stats["work"] += 1
            self._factors[key] = out
        return self._factors[key]

    def components(self, cv, sel, m):
        inv = {x - 1 for x in (sel.first, sel.second) if x}
        return [self.factor(i, cv[i], sel, m) if i in inv else self.reduced[i][cv[i]]
                for i in range(4)]

    def termwise_equal(self):
        """Sufficient test: every class-vector term agrees across messages."""
        for cv, sel in self.terms:
            ref = self.components(cv, sel, self.messages[0])
            for m in self.messages[1:]:
                if self.components(cv, sel, m) != ref:
                    return False
        return True

    def fingerprint(self, m, salt=0):
        """Evaluate the view distribution of ``m`` under a hashed
        product functional mod a 61-bit prime. Equal distributions always
        give equal values, so two different values prove a difference."""
        prime = (1 << 61) - 1
        weights = self._weights.setdefault(salt, {})

        def h(key):
            if key not in weights:
                digest = hashlib.blake2b(repr((salt, key)).encode(), digest_size=16).digest()
                weights[key] = int.from_bytes(digest, "big") % prime
            return weights[key]

        total = 0
        for cv, sel in self.terms:
            term = h(("head", self.header(sel)))
            for i, comp in enumerate(self.components(cv, sel, m)):
                term = term * sum(k * h((i, v)) for v, k in comp.items()) % prime
            total = (total + term) % prime
        return total

    def expand(self):
        """Full per-message multisets; only within budget."""
        size = 0
        for cv, sel in self.terms:
            n = 1
            for comp in self.components(cv, sel, self.messages[0]):
                n *= len(comp)
            size += n * len(self.messages)
        if size > self.budget:
            raise BudgetExceeded(f"expanding {size} view combinations exceeds budget {self.budget}")
        full = {m: Counter() for m in self.messages}
        for cv, sel in self.terms:
            head = self.header(sel)
            for m in self.messages:
                for combo in product(*[c.items() for c in self.components(cv, sel, m)]):
                    weight = 1
                    for _, k in combo:
                        weight *= k
                    full[m][(head, tuple(v for v, _ in combo))] += weight
        return full

    def compare(self):
        """``None`` when the view multisets agree for every message, else the
        first differing pair. Equality is proved term by term or by full
        expansion; a difference is proved by full expansion or by distinct
        fingerprints. Anything else is refused."""
        if self.termwise_equal():
            return None
        ms = self.messages
        for salt in range(2):
            prints = {}
            for m in ms:
                prints.setdefault(self.fingerprint(m, salt), m)
            if len(prints) > 1:
                first = self.fingerprint(ms[0], salt)
                for m in ms[1:]:
                    if self.fingerprint(m, salt) != first:
                        return (ms[0], m)
        full = self.expand()
        for m in ms[1:]:
            if full[m] != full[ms[0]]:
                return (ms[0], m)
        return None


def _reduce(counter):
    out = Counter()
    for key, k in counter.items():
        out[key.views] += k
    return out


def verify_privacy_twoway(protocol, structure, messages=None, battery=None,
                          budget=DEFAULT_PRIVACY_BUDGET, mode=None) -> PrivacyReport:
    """Exact privacy check for a base two-way plan.

    Refuses (``BudgetExceeded``) for fields where per-line enumeration is out
    of reach; behaviours must be slot-local (their write to a slot depends
    only on that slot)."""
    node = _base_node(protocol)
    p = protocol.p
    if p ** 5 > budget:
        raise BudgetExceeded(f"p={p}: per-line enumeration of p^5 outcomes exceeds budget {budget}")
    msgs = _messages(p, messages)
    mode = mode or structure.mode
    report = PrivacyReport(tapes=p ** tape_length(protocol, "R"))
    lawful = mode is not Mode.COMPLETELY_OBLIVIOUS or deterministic_lawful(structure)
    for pi, (d, l) in enumerate(structure.masks or [(0, 0)]):
        beh_list = battery if battery is not None else battery_twoway(node, d, lawful)
        for beh in beh_list:
            if not isinstance(beh, SLOT_LOCAL):
                raise ValueError(f"behaviour {beh.name!r} is not slot-local")
            tv = TwoWayViews(node, d, l, mode, beh, msgs, p, budget)
            report.record_verdict(pi, beh.name, tv.compare())
    return report


def verify_privacy(protocol, structure, p=None, budget=DEFAULT_PRIVACY_BUDGET,
                   messages=None, battery=None, mode=None) -> PrivacyReport:
    if protocol.kind == "twoway":
        return verify_privacy_twoway(protocol, structure, messages, battery, budget, mode)
    return verify_privacy_oneway(protocol, structure, messages, battery, budget, mode)


# ------------------------------------------------ feasibility cross-check

@dataclass
class CrossValidation:
    checked: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.checked > 0 and not self.mismatches

    def to_dict(self) -> dict:
        return {"checked": self.checked, "ok": self.ok, "mismatches": self.mismatches}


_PREDICATES = {
    "oneway": feasible_oneway,
    "twoway": feasible_twoway_completely_oblivious,
}


def crossvalidate_feasibility(max_threshold_n: int = 6, max_dl_n: int = 5) -> CrossValidation:
    """General predicates against the closed forms on every threshold and
    (d, l) structure in range, for both settings."""
    out = CrossValidation()

    def compare(setting, structure, expected, label):
        got = _PREDICATES[setting](structure).feasible
        out.checked += 1
        if got != expected:
            out.mismatches.append({"setting": setting, "structure": label,
                                   "predicate": got, "closed_form": expected})

    for n in range(1, max_threshold_n + 1):
        for k in range(0, n + 1):
            s = threshold_structure(n, k)
            for setting in _PREDICATES:
                compare(setting, s, feasible_classic(f"threshold_{setting}", n, k=k),
                        f"threshold n={n} k={k}")
    for n in range(1, max_dl_n + 1):
        for d in range(0, n + 1):
            for l in range(0, n + 1):
                s = dl_structure(n, d, l)
                for setting in _PREDICATES:
                    compare(setting, s, feasible_classic(f"dl_{setting}", n, d=d, l=l),
                            f"dl n={n} d={d} l={l}")
    return out


# ------------------------------------------------------ negative controls

def _most_disrupted_wire(structure) -> int:
    counts = [sum(d >> w & 1 for d, _ in structure.masks) for w in range(structure.n)]
    return max(range(structure.n), key=lambda w: (counts[w], -w))


def _rewire(node, w):
    from dataclasses import replace
    if hasattr(node, "children"):
        return replace(node, children=tuple(_rewire(c, w) for c in node.children))
    if isinstance(node, twoway.BaseNode):
        return replace(node, share_wires=tuple((w,) * 3 for _ in node.share_wires),
                       public_wires=(w,) * len(node.public_wires))
    return replace(node, wires=tuple((w,) * 3 for _ in node.wires))


def inject_fault(protocol):
    """Copy of a plan-driven protocol with every wire moved onto the wire
    most pairs can disrupt. Any reliability oracle worth trusting must flag it."""
    from dataclasses import replace
    w = _most_disrupted_wire(protocol.plan.structure)
    plan = replace(protocol.plan, root=_rewire(protocol.plan.root, w))
    return type(protocol)(plan, protocol.p)


class CleartextProtocol:
    """Sends ``m`` in the clear on every wire; the receiver takes a majority.
    Reliable against minority disruption, private against nobody who listens."""

    rounds = (S_TO_R,)
    kind = "cleartext"

    def __init__(self, n: int, p: int):
        self.n, self.p = n, p

    def sender_round(self, m, tape):
        return [(w, SlotId((), "m"), m % self.p) for w in range(self.n)]

    def decode(self, delivered):
        value, count = Counter(delivered[(w, SlotId((), "m"))] for w in range(self.n)).most_common(1)[0]
        return value if 2 * count > self.n else None

    def receive(self, delivered):
        return self.decode(delivered)

    def reachable(self, sent_out, disrupt_mask, alphabet):
        sent = {(w, s): v for w, s, v in sent_out}
        hit = [k for k in sent if disrupt_mask >> k[0] & 1]
        out = set()
        for vals in product(*(tuple(set(alphabet(sent[k]))) for k in hit)):
            d = dict(sent)
            d.update(zip(hit, vals))
            out.add(self.decode(d))
        return out

    def run(self, m, s_tape, r_tape, channel):
        return self.decode(channel(self.sender_round(m, s_tape), S_TO_R))
