"""Adversary behaviours.

A behaviour only decides *what to write*; which pair it controls and what
it may see are enforced by :class:`securewires.transport.Adversary`.
``plan_round`` receives a :class:`~securewires.transport.RoundContext` and
returns ``{(wire, slot): value}``; slots left out pass through unchanged,
and the value :data:`~securewires.transport.NOISE` asks for fresh uniform
noise from the adversary's noise tape.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .transport import NOISE, Adversary


class Passive:
    name = "passive"

    def plan_round(self, ctx):
        return {}


@dataclass
class RandomNoise:
    """Replace disruptable slots with uniform noise.

    ``select`` filters slots by ``(round, wire, slot)``; by default every
    disruptable slot is hit.
    """

    select: Optional[Callable] = None
    name: str = "noise"

    def plan_round(self, ctx):
        return {
            (w, s): NOISE
            for w, s, _ in ctx.disruptable
            if self.select is None or self.select(ctx.round, w, s)
        }


@dataclass
class Constant:
    """Write ``value`` on every selected disruptable slot."""

    value: int = 0
    select: Optional[Callable] = None
    name: str = "constant"

    def plan_round(self, ctx):
        return {
            (w, s): self.value
            for w, s, _ in ctx.disruptable
            if self.select is None or self.select(ctx.round, w, s)
        }


@dataclass
class Shift:
    """Add ``delta`` to what was heard; slots the adversary cannot hear get
    ``delta`` (a function of the view only)."""

    delta: int = 1
    name: str = "shift"

    def plan_round(self, ctx):
        return {
            (w, s): (self.delta if v is None else v + self.delta)
            for w, s, v in ctx.disruptable
        }


@dataclass
class Scripted:
    """Fixed writes keyed by ``(round, wire, slot)``; 0-based wires."""

    script: dict
    name: str = "scripted"

    def plan_round(self, ctx):
        out = {}
        for w, s, _ in ctx.disruptable:
            key = (ctx.round, w, s)
            if key in self.script:
                out[(w, s)] = self.script[key]
        return out


@dataclass
class ViewFunction:
    """``fn(ctx) -> {(wire, slot): value}``; anything it computes can only
    depend on the lawful view carried in ``ctx``."""

    fn: Callable
    name: str = "view_function"

    def plan_round(self, ctx):
        return self.fn(ctx)


@dataclass
class StrategyHandle:
    pair_index: int
    behavior: object

    def bind(self, structure, noise_tape=None, mode=None) -> Adversary:
        return Adversary.for_structure(structure, self.pair_index, self.behavior,
                                       noise_tape=noise_tape, mode=mode)


def behavior_from_name(name: str, value: int = 0):
    """CLI helper: passive | noise | constant | shift."""
    if name == "passive":
        return Passive()
    if name == "noise":
        return RandomNoise()
    if name == "constant":
        return Constant(value)
    if name == "shift":
        return Shift(value or 1)
    raise ValueError(f"unknown adversary behaviour {name!r}")
