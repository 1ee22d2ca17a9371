"""Drive a protocol through the wire layer and record what happened."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .tape import SeededTape
from .transport import Transcript, exchange_round


@dataclass
class ExecutionOutcome:
    message: int
    decoded: Optional[int]
    transcript: Transcript
    rounds: int
    seed: Optional[int] = None
    meta: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.decoded == self.message

    def to_dict(self) -> dict:
        out = {
            "message": self.message,
            "decoded": self.decoded,
            "rounds": self.rounds,
            "seed": self.seed,
        }
        out.update(self.meta)
        out["transcript"] = self.transcript.to_dict()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)


def run_protocol(protocol, message, s_tape, r_tape, adversary=None, seed=None,
                 meta=None) -> ExecutionOutcome:
    """One execution; ``adversary`` is a bound
    :class:`~securewires.transport.Adversary` or ``None``."""
    transcript = Transcript(
        pair_index=None if adversary is None else adversary.pair_index,
    )
    if adversary is not None:
        transcript.mode = adversary.mode
    counter = [0]

    def channel(outgoing, direction):
        counter[0] += 1
        return exchange_round(outgoing, adversary, counter[0], direction, transcript, protocol.p)

    decoded = protocol.run(message % protocol.p, s_tape, r_tape, channel)
    return ExecutionOutcome(message % protocol.p, decoded, transcript, counter[0], seed,
                            dict(meta or {}))


def simulate(protocol, message, seed, handle=None, structure=None, mode=None) -> ExecutionOutcome:
    """Seeded execution. Tapes: sender ``(seed, "S")``, receiver
    ``(seed, "R")``, adversary noise ``(seed, "ADV")``."""
    p = protocol.p
    adversary = None
    if handle is not None:
        st = structure if structure is not None else protocol.plan.structure
        adversary = handle.bind(st, noise_tape=SeededTape(seed, p, ("ADV",)), mode=mode)
    return run_protocol(protocol, message, SeededTape(seed, p, ("S",)),
                        SeededTape(seed, p, ("R",)), adversary, seed)


SETTINGS = ("oneway", "twoway", "tworound_nco")


def adversary_mode(structure, setting):
    """Adversary model a setting runs against: two-way is completely
    oblivious; the strengthened two-round setting defaults to oblivious;
    one-way keeps whatever the structure declares."""
    from .structures import Mode
    if setting == "twoway":
        return Mode.COMPLETELY_OBLIVIOUS
    if setting == "tworound_nco" and structure.mode is Mode.COMPLETELY_OBLIVIOUS:
        return Mode.OBLIVIOUS
    return structure.mode


def protocol_for(structure, setting, p, force=False):
    """Protocol object for ``setting``; raises ``InfeasibleStructure`` unless
    ``force``."""
    from .oneway import OneWayProtocol, plan_oneway
    from .twoway import TwoWayProtocol, plan_non_completely_oblivious, plan_twoway
    if setting == "oneway":
        return OneWayProtocol(plan_oneway(structure, force=force), p)
    if setting == "twoway":
        return TwoWayProtocol(plan_twoway(structure, force=force), p)
    if setting == "tworound_nco":
        return TwoWayProtocol(plan_non_completely_oblivious(structure, force=force), p)
    raise ValueError(f"unknown setting {setting!r}; expected one of {SETTINGS}")
