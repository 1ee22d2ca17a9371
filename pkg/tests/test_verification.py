from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from securewires.corpus import oneway_feasible, twoway_feasible
from securewires.oneway import OneWayProtocol, plan_oneway
from securewires.structures import AdversaryStructure, Mode, threshold_structure
from securewires.twoway import TwoWayProtocol, plan_twoway
from securewires.verification import (BudgetExceeded, CleartextProtocol, crossvalidate_feasibility,
                                      inject_fault, lump_views, randomized_reliability,
                                      verify_privacy, verify_reliability)

CO = Mode.COMPLETELY_OBLIVIOUS


def test_closed_forms_agree_with_predicates():
    cv = crossvalidate_feasibility()
    assert cv.ok and cv.checked > 200


def test_reliability_sweep_passes_and_counts_assignments():
    s = oneway_feasible()[0]
    rep = verify_reliability(OneWayProtocol(plan_oneway(s), 5), s)
    assert rep.ok and rep.exhaustive and rep.assignments > rep.trials


def test_injected_fault_is_caught_oneway():
    s = oneway_feasible()[0]
    rep = verify_reliability(inject_fault(OneWayProtocol(plan_oneway(s), 5)), s)
    assert not rep.ok


def test_injected_fault_is_caught_twoway():
    s = twoway_feasible()[0]
    rep = verify_reliability(inject_fault(TwoWayProtocol(plan_twoway(s), 5)), s)
    assert not rep.ok and rep.truncated


def test_injected_fault_is_caught_by_random_trials():
    s = threshold_structure(5, 1, CO)
    proto = inject_fault(TwoWayProtocol(plan_twoway(s), 5))
    assert not randomized_reliability(proto, s, trials=200).ok


def test_cleartext_leaks():
    s = AdversaryStructure.from_lists(3, [([1], [2])])
    rep = verify_privacy(CleartextProtocol(3, 5), s)
    assert not rep.ok and rep.first_violation[0] == 0


def test_cleartext_is_private_against_a_deaf_adversary():
    s = AdversaryStructure.from_lists(3, [([1], [])])
    assert verify_privacy(CleartextProtocol(3, 5), s).ok


def test_privacy_budget_refusal():
    s = oneway_feasible()[0]
    with pytest.raises(BudgetExceeded):
        verify_privacy(OneWayProtocol(plan_oneway(s), 2 ** 31 - 1), s)
    t = twoway_feasible()[0]
    with pytest.raises(BudgetExceeded):
        verify_privacy(TwoWayProtocol(plan_twoway(t), 2 ** 31 - 1), t)
    with pytest.raises(BudgetExceeded):
        verify_privacy(OneWayProtocol(plan_oneway(s), 5), s, budget=10)


def test_oneway_privacy_on_a_corpus_structure():
    s = oneway_feasible()[0]
    assert verify_privacy(OneWayProtocol(plan_oneway(s), 5), s).ok


def test_twoway_privacy_on_a_corpus_structure():
    s = twoway_feasible()[0]
    rep = verify_privacy(TwoWayProtocol(plan_twoway(s), 5), s)
    assert rep.ok and len(rep.checks) >= len(s.pairs)


# ---- lumping: merging proportional view columns keeps every linear comparison

def _combine(table, coeffs):
    out = Counter()
    for v, a in coeffs.items():
        for key, k in table[v].items():
            out[key] += a * k
    return +out


@st.composite
def tables(draw):
    p = draw(st.integers(2, 3))
    base = draw(st.lists(st.lists(st.integers(0, 3), min_size=p * 2, max_size=p * 2),
                         min_size=1, max_size=3))
    copies = draw(st.lists(st.tuples(st.integers(0, len(base) - 1), st.integers(1, 3)),
                           max_size=4))
    columns = [(f"v{i}", col) for i, col in enumerate(base)]
    columns += [(f"c{i}", [k * x for x in base[b]]) for i, (b, k) in enumerate(copies)]
    table = {v: Counter() for v in range(p)}
    for view, col in columns:
        for idx, k in enumerate(col):
            if k:
                table[idx // 2][(view, idx % 2)] += k
    a = draw(st.lists(st.integers(0, 2), min_size=p, max_size=p))
    b = draw(st.lists(st.integers(0, 2), min_size=p, max_size=p))
    return table, dict(enumerate(a)), dict(enumerate(b))


@settings(max_examples=200)
@given(tables())
def test_lumping_preserves_linear_equalities(data):
    table, a, b = data
    lumped, _ = lump_views(table)
    assert (_combine(table, a) == _combine(table, b)) == (_combine(lumped, a) == _combine(lumped, b))
