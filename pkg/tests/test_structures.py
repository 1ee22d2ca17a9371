import json
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from securewires.structures import (AdversaryStructure, Mode, StructureError, WireSet, covers,
                                    dl_structure, general_structure, mask_of, strengthen,
                                    threshold_structure)


def ws(wires, n):
    return WireSet.of(wires, n)


def test_covers_examples():
    assert covers([ws([1, 2], 4), ws([3], 4), ws([4], 4)], 4)
    assert not covers([ws([], 4), ws([], 4)], 4)
    assert not covers([ws([1, 2], 4), ws([1, 2, 3], 4)], 4)


def test_wire_set_bounds_and_algebra():
    a, b = ws([1, 2], 4), ws([2, 3], 4)
    assert (a | b).wires == [1, 2, 3]
    assert (a & b).wires == [2]
    assert (a - b).wires == [1]
    assert a.complement().wires == [3, 4]
    with pytest.raises(StructureError):
        ws([5], 4)
    with pytest.raises(StructureError):
        ws([0], 4)
    with pytest.raises(StructureError):
        a | ws([1], 5)


@pytest.mark.parametrize("n,k,count", [(3, 1, 3), (4, 0, 1), (4, 2, 6)])
def test_threshold_counts(n, k, count):
    s = threshold_structure(n, k)
    assert len(s.pairs) == count
    assert all(pr.disrupt == pr.listen and len(pr.disrupt) == k for pr in s.pairs)


@pytest.mark.parametrize("n,d,l,count", [(3, 1, 1, 9), (2, 2, 0, 1), (3, 0, 3, 1)])
def test_dl_counts(n, d, l, count):
    assert len(dl_structure(n, d, l).pairs) == count


def test_dl_single_pair_contents():
    (pr,) = dl_structure(2, 2, 0).pairs
    assert pr.disrupt.wires == [1, 2] and pr.listen.wires == []
    (pr,) = dl_structure(3, 0, 3).pairs
    assert pr.disrupt.wires == [] and pr.listen.wires == [1, 2, 3]


def test_general_examples():
    s = general_structure(5, [[1, 2, 3], [1, 2, 4], [1, 5]])
    assert [(pr.disrupt.wires, pr.listen.wires) for pr in s.pairs] == [
        ([1, 2, 3], [1, 2, 3]), ([1, 2, 4], [1, 2, 4]), ([1, 5], [1, 5])]
    assert len(general_structure(3, []).pairs) == 0
    (pr,) = general_structure(1, [[1]]).pairs
    assert pr.disrupt.wires == [1] == pr.listen.wires


def test_strengthen_examples():
    s = AdversaryStructure.from_lists(4, [([1, 2], [1, 4]), ([], [3]), ([1], [1])])
    t = strengthen(s)
    assert [(pr.disrupt.wires, pr.listen.wires) for pr in t.pairs] == [
        ([1, 2], [1, 2, 4]), ([], [3]), ([1], [1])]


def test_json_round_trip_and_one_based_wires():
    s = AdversaryStructure.from_lists(5, [([1, 5], [2]), ([], [3, 4])], Mode.COMPLETELY_OBLIVIOUS)
    doc = json.loads(s.to_json())
    assert doc == {"wires": 5, "mode": "completely_oblivious",
                   "pairs": [{"disrupt": [1, 5], "listen": [2]}, {"disrupt": [], "listen": [3, 4]}]}
    assert AdversaryStructure.from_json(s.to_json()) == s
    assert s.masks[0] == (0b10001, 0b00010)


@pytest.mark.parametrize("doc,fragment", [
    ([], "object"),
    ({"pairs": []}, "wires"),
    ({"wires": 3, "pairs": [{"disrupt": [4]}]}, "pairs[0].disrupt"),
    ({"wires": 3, "pairs": [{"listen": ["a"]}]}, "pairs[0].listen"),
    ({"wires": 3, "mode": "psychic", "pairs": []}, "mode"),
])
def test_from_dict_diagnostics(doc, fragment):
    with pytest.raises(StructureError, match=fragment.replace("[", r"\[").replace("]", r"\]")):
        AdversaryStructure.from_dict(doc)


def test_wire_cap():
    with pytest.raises(StructureError):
        threshold_structure(17, 1)


def _structures(max_n=6, max_pairs=4):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        sub = st.lists(st.integers(1, n), unique=True, max_size=n)
        pairs = draw(st.lists(st.tuples(sub, sub), max_size=max_pairs))
        mode = draw(st.sampled_from(list(Mode)))
        return AdversaryStructure.from_lists(n, pairs, mode)
    return build()


@given(_structures())
def test_strengthen_idempotent(s):
    assert strengthen(strengthen(s)) == strengthen(s)
    for pr in strengthen(s).pairs:
        assert pr.disrupt.mask & ~pr.listen.mask == 0


@given(st.integers(1, 6), st.data())
def test_threshold_equals_general_over_k_subsets(n, data):
    k = data.draw(st.integers(0, n))
    sets = [list(c) for c in combinations(range(1, n + 1), k)]
    assert threshold_structure(n, k).pairs == general_structure(n, sets).pairs


@given(st.integers(1, 8), st.data())
def test_covers_monotone(n, data):
    sub = st.lists(st.integers(1, n), unique=True)
    sets = [ws(x, n) for x in data.draw(st.lists(sub, max_size=4))]
    extra = ws(data.draw(sub), n)
    if covers(sets, n):
        assert covers(sets + [extra], n)


@given(_structures())
def test_structure_json_round_trip(s):
    assert AdversaryStructure.from_json(s.to_json()) == s


def test_mask_helpers():
    assert mask_of([1, 3]) == 0b101
