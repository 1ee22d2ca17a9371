"""Shared helpers for choosing wires and naming recursion paths."""
from __future__ import annotations

from .structures import AdversaryStructure, wires_of


class InfeasibleStructure(ValueError):
    """A protocol was requested for a structure that admits none."""

    def __init__(self, report, structure=None):
        self.report = report
        self.structure = structure
        msg = f"structure is infeasible for the {report.theorem_tag} setting"
        if structure is not None and report.witness is not None:
            msg += f"; witness {report.to_dict(structure)['witness']}"
        super().__init__(msg)


class DecodeFailure(Exception):
    """The receiver could not settle on a message; the adversary acted
    outside the declared structure."""


def choose_wire(n: int, avoid: list, force: bool = False, strict: int = 0) -> int:
    """Lowest 0-based wire outside every mask in ``avoid``.

    With ``force`` the best available wire is returned when none qualifies:
    wires outside ``strict`` (the listening part of ``avoid``) first, then
    fewest violated masks, then lowest index. Without it a ``ValueError`` is
    raised.
    """
    union = 0
    for m in avoid:
        union |= m
    for w in range(n):
        if not union >> w & 1:
            return w
    if not force:
        raise ValueError(f"no wire outside {wires_of(union)}")
    return min(range(n), key=lambda w: (strict >> w & 1, sum(m >> w & 1 for m in avoid), w))


def split_for_induction(structure: AdversaryStructure) -> list:
    """The four sub-structures, each missing one of the first four pairs."""
    pairs = structure.pairs
    return [structure.with_pairs(pairs[:j] + pairs[j + 1:]) for j in range(4)]


def line_decode(candidates, p: int):
    """Recover ``m`` from four candidates ``m + j*r`` (j = 1..4) when at most
    one is wrong or missing (``None``)."""
    from .field import NoDecode, decode_ints

    points = [(j + 1, v) for j, v in enumerate(candidates) if v is not None]
    erased = len(candidates) - len(points)
    if erased > 1:
        return None
    res = decode_ints(points, 1, 1 - erased, p)
    if isinstance(res, NoDecode):
        return None
    coeffs, _ = res
    return coeffs[0] if coeffs else 0
