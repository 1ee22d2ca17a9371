import pytest
from hypothesis import given, strategies as st

from securewires.strategies import Constant, Passive, RandomNoise, Scripted, Shift, ViewFunction
from securewires.structures import Mode
from securewires.tape import SeededTape
from securewires.transport import (S_TO_R, Adversary, HarnessFault, IllegalDisruption,
                                   PublicChannelFault, SlotId, Transcript, exchange_round,
                                   majority, public_receive, public_send, view_from_transcript)

P = 11
SLOT = SlotId((), "x")


def outgoing(values):
    return [(w, SLOT, v) for w, v in enumerate(values)]


def run(values, adversary=None):
    tr = Transcript()
    got = exchange_round(outgoing(values), adversary, 1, S_TO_R, tr, P)
    return got, tr


def test_no_disruption_delivers_everything():
    adv = Adversary(0, 0b111, Mode.OBLIVIOUS, Constant(3))
    got, _ = run([1, 7, 4], adv)
    assert got == {(0, SLOT): 1, (1, SLOT): 7, (2, SLOT): 4}


def test_disruption_only_on_disrupted_wire():
    adv = Adversary(0b010, 0, Mode.OBLIVIOUS, Scripted({(1, 1, SLOT): 3}))
    got, tr = run([5, 7, 9], adv)
    assert got == {(0, SLOT): 5, (1, SLOT): 3, (2, SLOT): 9}
    assert [t.written for t in tr.transmissions] == [False, True, False]


def test_completely_oblivious_view_is_empty_without_listening():
    adv = Adversary(0b010, 0, Mode.COMPLETELY_OBLIVIOUS, Constant(3))
    run([5, 7, 9], adv)
    assert adv.view == []


def test_oblivious_sees_only_its_own_writes():
    adv = Adversary(0b110, 0, Mode.OBLIVIOUS, Scripted({(1, 1, SLOT): 3}))
    run([5, 7, 9], adv)
    assert adv.view == [(1, 1, SLOT, "delivered", 3)]


def test_non_oblivious_sees_disrupted_wires():
    adv = Adversary(0b010, 0, Mode.NON_OBLIVIOUS, Passive())
    run([5, 7, 9], adv)
    assert adv.view == [(1, 1, SLOT, "sent", 7), (1, 1, SLOT, "delivered", 7)]


def test_listening_sees_sent_and_delivered():
    adv = Adversary(0b001, 0b001, Mode.COMPLETELY_OBLIVIOUS, Shift(2))
    run([5, 7, 9], adv)
    assert adv.view == [(1, 0, SLOT, "sent", 5), (1, 0, SLOT, "delivered", 7)]


def test_unheard_slot_hides_value_from_behaviour():
    seen = []

    def fn(ctx):
        seen.extend(ctx.disruptable)
        return {}
    adv = Adversary(0b011, 0b001, Mode.OBLIVIOUS, ViewFunction(fn))
    run([5, 7, 9], adv)
    assert seen == [(0, SLOT, 5), (1, SLOT, None)]


def test_write_outside_disrupt_set_is_caught():
    adv = Adversary(0b001, 0, Mode.OBLIVIOUS, ViewFunction(lambda ctx: {(2, SLOT): 1}))
    with pytest.raises(IllegalDisruption):
        run([5, 7, 9], adv)


def test_noise_needs_a_tape():
    adv = Adversary(0b001, 0, Mode.OBLIVIOUS, RandomNoise())
    with pytest.raises(HarnessFault):
        run([5, 7, 9], adv)


def test_duplicate_slots_rejected():
    with pytest.raises(HarnessFault):
        exchange_round([(0, SLOT, 1), (0, SLOT, 2)], None, 1, S_TO_R, Transcript(), P)


@pytest.mark.parametrize("copies,value", [((9, 9, 9), 9), ((9, 4, 9), 9)])
def test_majority(copies, value):
    assert majority(copies) == value


def test_majority_fault():
    with pytest.raises(PublicChannelFault):
        majority((1, 2, 3))


def test_public_round_trip():
    out = public_send([4, 2], (0, 1, 2), (), "t")
    delivered = {(w, s): v for w, s, v in out}
    first = next(k for k in delivered if k[0] == 1)
    delivered[first] = 0
    assert public_receive(delivered, (0, 1, 2), (), "t", 2) == [4, 2]


behaviours = st.sampled_from([Passive(), RandomNoise(), Constant(1), Shift(3)])


@given(st.lists(st.integers(0, P - 1), min_size=1, max_size=5), st.data())
def test_conservation_view_soundness_and_determinism(values, data):
    n = len(values)
    d = data.draw(st.integers(0, (1 << n) - 1))
    l = data.draw(st.integers(0, (1 << n) - 1))
    mode = data.draw(st.sampled_from(list(Mode)))
    beh = data.draw(behaviours)
    seed = data.draw(st.integers(0, 1000))

    def once():
        adv = Adversary(d, l, mode, beh, 0, SeededTape(seed, P, ("ADV",)))
        got, tr = run(values, adv)
        return adv, got, tr

    adv, got, tr = once()
    assert len(got) == len(values)
    for w, v in enumerate(values):
        if not d >> w & 1:
            assert got[(w, SLOT)] == v
    assert adv.view == view_from_transcript(tr, d, l, mode)
    _, got2, tr2 = once()
    assert got2 == got and tr2.to_json() == tr.to_json()
