from collections import Counter
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from securewires import twoway
from securewires.corpus import twoway_feasible
from securewires.execution import simulate
from securewires.planning import DecodeFailure, InfeasibleStructure
from securewires.strategies import Constant, Passive, RandomNoise, Shift, StrategyHandle
from securewires.structures import AdversaryStructure, Mode, general_structure, threshold_structure
from securewires.tape import ListTape, SeededTape
from securewires.transport import NOISE, R_TO_S, S_TO_R, Adversary, Transcript, exchange_round
from securewires.twoway import (TAG_A, BaseNode, InductiveNode, PolyClass, Selection, TwoWayProtocol,
                                classify, compose_inductive_twoway, plan_non_completely_oblivious,
                                plan_twoway, select_case, set_field, unmask)
from securewires.verification import (Sight, _line_reachable, _writer, default_alphabet,
                                      public_group_table, share_group_table)

CO = Mode.COMPLETELY_OBLIVIOUS


def test_plan_shapes():
    s3 = threshold_structure(3, 1, CO)
    root = plan_twoway(s3).root
    assert isinstance(root, BaseNode)
    assert sum(len(r) for r in root.share_wires) + len(root.public_wires) == 12
    s4 = threshold_structure(5, 1, CO).with_pairs(threshold_structure(5, 1).pairs[:4])
    root4 = plan_twoway(s4).root
    assert isinstance(root4, InductiveNode) and len(root4.children) == 4
    one = AdversaryStructure.from_lists(3, [([1], [2])], CO)
    assert isinstance(plan_twoway(one).root, BaseNode)


def test_wire_avoidance():
    for s in twoway_feasible():
        masks = s.padded(3).masks
        node = plan_twoway(s).root
        for j in range(3):
            for k in range(3):
                w = node.share_wires[j][k]
                assert not (masks[j][0] | masks[k][1]) >> w & 1
        for c, (a, b) in enumerate([(0, 1), (0, 2), (1, 2)]):
            assert not (masks[a][0] | masks[b][0]) >> node.public_wires[c] & 1


def test_round_one_shape_and_sharing_identity():
    proto = TwoWayProtocol(plan_twoway(threshold_structure(3, 1, CO)), 11)
    out, state = proto.round1_receiver(SeededTape(4, 11))
    assert len(out) == 48
    sent = {(w, s): v for w, s, v in out}
    node = proto.plan.root
    for i in range(4):
        c0, c1 = state[()][i]
        for j in range(3):
            assert sum(sent[k] for k in node.share_keys[i][j]) % 11 == (c0 + c1 * (j + 1)) % 11
        assert {sent[k] for k in node.public_keys[i]} == {(c0 + 4 * c1) % 11}


def test_classification_examples():
    set_field(11)
    assert classify((2, 9, 4, 5)) == PolyClass("C", 2)
    assert classify((0, 1, 0, 5)) == PolyClass("B")
    assert classify((2, 3, 4, 5)) == PolyClass("A")
    assert classify((2, 3, 4, None)) == PolyClass("X")


def test_case_priority():
    A, B, C = PolyClass("A"), PolyClass("B"), PolyClass("C", 1)
    assert select_case([B, A, A, C]) == Selection(TAG_A, 2)
    assert select_case([C, B, C, C]).tag == twoway.TAG_B
    assert select_case([B, C, C, C]) == Selection(twoway.TAG_B, 1, 2)
    assert select_case([C, PolyClass("C", 2), C, C]) == Selection(twoway.TAG_C, 1, 3, 1)


def test_undisturbed_run_uses_case_a_on_line_one():
    proto = TwoWayProtocol(plan_twoway(threshold_structure(3, 1, CO)), 11)
    out, state = proto.round1_receiver(SeededTape(0, 11))
    payload = proto.round2_sender({(w, s): v for w, s, v in out}, 4, SeededTape(1, 11))
    values = [v for _, s, v in payload if s.tag.endswith(".0")]
    c0 = state[()][0][0]
    assert values == [TAG_A, 1, (4 + c0) % 11]


def test_unmask_case_a():
    lines = [(6, 3), (0, 0), (0, 0), (0, 0)]
    assert unmask([TAG_A, 1, (4 + 6) % 11], lines, 11) == 4


def test_compose_inductive():
    assert compose_inductive_twoway([7, 9, 0, 2], 11) == 5
    assert compose_inductive_twoway([7, 3, 0, 2], 11) == 5
    with pytest.raises(DecodeFailure):
        compose_inductive_twoway([7, 3, 1, 2], 11)


def test_strengthened_plan():
    s = AdversaryStructure.from_lists(4, [([1], [2])])
    plan = plan_non_completely_oblivious(s)
    pr = plan.structure.pairs[0]
    assert pr.disrupt.wires == [1] and pr.listen.wires == [1, 2]
    already = AdversaryStructure.from_lists(4, [([1], [1, 2]), ([3], [3])], CO)
    assert plan_non_completely_oblivious(already).root == plan_twoway(already).root
    with pytest.raises(InfeasibleStructure):
        plan_non_completely_oblivious(AdversaryStructure.from_lists(2, [([1], [2])]))


@pytest.mark.parametrize("size", [1, 2, 3, 4, 5])
def test_exactly_two_phases(size):
    s = threshold_structure(6, 1, CO).with_pairs(threshold_structure(6, 1).pairs[:size])
    proto = TwoWayProtocol(plan_twoway(s), 7)
    for pair in range(size):
        out = simulate(proto, 5, seed=pair, handle=StrategyHandle(pair, RandomNoise()), structure=s)
        assert out.rounds == 2 and out.decoded == 5
        assert out.transcript.rounds() == [(1, R_TO_S), (2, S_TO_R)]


def test_d_equals_l_specialisation_runs_in_two_rounds():
    s = general_structure(5, [[1, 2], [3], [4]], CO)
    proto = TwoWayProtocol(plan_twoway(s), 5)
    for pair in range(3):
        out = simulate(proto, 3, seed=11, handle=StrategyHandle(pair, Shift(2)), structure=s)
        assert out.rounds == 2 and out.decoded == 3


@settings(max_examples=40)
@given(st.integers(0, 4), st.integers(0, 10 ** 6), st.sampled_from(["noise", "constant", "shift"]))
def test_random_disruption_never_breaks_decoding(m, seed, kind):
    s = twoway_feasible()[seed % 10]
    proto = TwoWayProtocol(plan_twoway(s), 5)
    beh = {"noise": RandomNoise(), "constant": Constant(seed % 5), "shift": Shift(1 + seed % 4)}[kind]
    out = simulate(proto, m, seed, StrategyHandle(seed % len(s.pairs), beh), s)
    assert out.decoded == m


def _line_oracle(node, i, sent, d, alphabet, p):
    keys = [k for g in node.share_keys[i] for k in g] + list(node.public_keys[i])
    hit = [k for k in keys if d >> k[0] & 1]
    out = set()
    for vals in product(*[alphabet(sent[k]) for k in hit]):
        delivered = dict(sent)
        delivered.update(zip(hit, vals))
        out.add(twoway.aggregate(node, delivered, p)[i])
    return out


def test_line_reachability_matches_direct_enumeration():
    p = 5
    alphabet = default_alphabet(p)
    for s in twoway_feasible()[:5]:
        proto = TwoWayProtocol(plan_twoway(s), p)
        node = proto.plan.root
        out, _ = proto.round1_receiver(SeededTape(0, p))
        sent = {(w, slot): v for w, slot, v in out}
        for d, _ in s.masks:
            for i in range(4):
                hits = sum(d >> k[0] & 1 for g in node.share_keys[i] for k in g)
                hits += sum(d >> k[0] & 1 for k in node.public_keys[i])
                if hits > 6:
                    continue
                fast, _ = _line_reachable(node, i, sent, d, alphabet, p)
                assert fast == _line_oracle(node, i, sent, d, alphabet, p)


# -------- the privacy engine's per-group view model against the real harness

KEYS = [(0, twoway.SlotId((), "a")), (1, twoway.SlotId((), "b")), (2, twoway.SlotId((), "c"))]
BEHAVIOURS = [Passive(), RandomNoise(), Constant(2), Shift(1)]


def _harness_group(values, d, l, mode, beh, p, reduce):
    """Counter((view, result)) by pushing the slots through exchange_round,
    enumerating every noise value the adversary could draw."""
    n_noise = sum(1 for w, _ in KEYS if d >> w & 1) if isinstance(beh, RandomNoise) else 0
    c = Counter()
    for noise in product(range(p), repeat=n_noise):
        adv = Adversary(d, l, mode, beh, 0, ListTape(noise, p))
        got = exchange_round([(w, s, v) for (w, s), v in zip(KEYS, values)], adv, 1, R_TO_S,
                             Transcript(), p)
        index = {w: idx for idx, (w, _) in enumerate(KEYS)}
        view = frozenset((kind[0], index[w], v) for _, w, _, kind, v in adv.view)
        c[(view, reduce([got[k] for k in KEYS]))] += 1
    return c


def _engine(table):
    return Counter({(frozenset(view), res): k for (view, res), k in table.items()})


@settings(max_examples=30)
@given(st.integers(0, 7), st.integers(0, 7), st.sampled_from(list(Mode)), st.sampled_from(BEHAVIOURS))
def test_share_group_view_model_matches_harness(d, l, mode, beh):
    p = 5
    sight = Sight.of(mode, d, l)
    table = share_group_table(KEYS, sight, _writer(beh, 1, R_TO_S), p)
    for v in range(p):
        expected = Counter()
        for r1, r2 in product(range(p), repeat=2):
            expected += _harness_group((r1, r2, (v - r1 - r2) % p), d, l, mode, beh, p,
                                       lambda xs: sum(xs) % p)
        assert _engine(table[v]) == expected


@settings(max_examples=30)
@given(st.integers(0, 7), st.integers(0, 7), st.sampled_from(list(Mode)), st.sampled_from(BEHAVIOURS))
def test_public_group_view_model_matches_harness(d, l, mode, beh):
    p = 5
    sight = Sight.of(mode, d, l)
    table = public_group_table(KEYS, sight, _writer(beh, 1, R_TO_S), p)
    from securewires.oneway import majority_value
    for v in range(p):
        assert _engine(table[v]) == _harness_group((v, v, v), d, l, mode, beh, p, majority_value)
