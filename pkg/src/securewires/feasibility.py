"""Possibility predicates for secure transmission against a structure.

Each structural predicate searches exhaustively for a covering combination
of disrupt/listen sets and returns the lexicographically first one found as
a witness.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .structures import AdversaryStructure, full_mask, wires_of

ONEWAY = "oneway"
TWOWAY = "twoway"
TWOROUND_NCO = "tworound_nco"
SETTINGS = (ONEWAY, TWOWAY, TWOROUND_NCO)


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    theorem_tag: str
    witness: Optional[tuple] = None
    # how to read the witness indices: e.g. ("D", "D", "L")
    witness_roles: Optional[tuple] = None

    def __post_init__(self):
        if self.feasible != (self.witness is None):
            raise ValueError("witness must be present exactly when infeasible")

    def witness_union(self, structure: AdversaryStructure) -> int:
        masks = structure.masks
        m = 0
        for idx, role in zip(self.witness, self.witness_roles):
            m |= masks[idx][0 if role == "D" else 1]
        return m

    def to_dict(self, structure: AdversaryStructure | None = None) -> dict:
        out = {"feasible": self.feasible, "predicate": self.theorem_tag}
        if self.witness is not None:
            out["witness"] = [
                {"pair": i + 1, "set": role} for i, role in zip(self.witness, self.witness_roles)
            ]
            if structure is not None:
                out["witness_union"] = wires_of(self.witness_union(structure))
        return out


def feasible_oneway(structure: AdversaryStructure) -> FeasibilityReport:
    """No D_i, D_j, L_k (i <= j, k free) may cover every wire."""
    full = full_mask(structure.n)
    masks = structure.masks
    r = len(masks)
    for i in range(r):
        for j in range(i, r):
            dd = masks[i][0] | masks[j][0]
            for k in range(r):
                if (dd | masks[k][1]) & full == full:
                    return FeasibilityReport(False, "oneway", (i, j, k), ("D", "D", "L"))
    return FeasibilityReport(True, "oneway")


def feasible_twoway_completely_oblivious(structure: AdversaryStructure) -> FeasibilityReport:
    """Neither D_i | D_j nor D_i | L_j (i == j allowed) may cover."""
    full = full_mask(structure.n)
    masks = structure.masks
    r = len(masks)
    for i in range(r):
        for j in range(i, r):
            if (masks[i][0] | masks[j][0]) & full == full:
                return FeasibilityReport(False, "twoway_completely_oblivious", (i, j), ("D", "D"))
    for i in range(r):
        for j in range(r):
            if (masks[i][0] | masks[j][1]) & full == full:
                return FeasibilityReport(False, "twoway_completely_oblivious", (i, j), ("D", "L"))
    return FeasibilityReport(True, "twoway_completely_oblivious")


def feasible_tworound_non_completely_oblivious(structure: AdversaryStructure) -> FeasibilityReport:
    """No D_i | D_j | L_j may cover; the listen set shares the second index."""
    full = full_mask(structure.n)
    masks = structure.masks
    r = len(masks)
    for i in range(r):
        for j in range(r):
            if (masks[i][0] | masks[j][0] | masks[j][1]) & full == full:
                return FeasibilityReport(
                    False, "tworound_non_completely_oblivious", (i, j, j), ("D", "D", "L")
                )
    return FeasibilityReport(True, "tworound_non_completely_oblivious")


def check(structure: AdversaryStructure, setting: str) -> FeasibilityReport:
    if setting == ONEWAY:
        return feasible_oneway(structure)
    if setting == TWOWAY:
        return feasible_twoway_completely_oblivious(structure)
    if setting == TWOROUND_NCO:
        return feasible_tworound_non_completely_oblivious(structure)
    raise ValueError(f"unknown setting {setting!r}; expected one of {SETTINGS}")


def feasible_classic(kind: str, n: int, k: int | None = None, d: int | None = None,
                     l: int | None = None) -> bool:
    """Closed-form conditions for threshold and (d, l) structures."""
    if kind == "threshold_oneway":
        return n > 3 * k
    if kind == "threshold_twoway":
        return n > 2 * k
    if kind == "dl_oneway":
        return n > 2 * d + l
    if kind == "dl_twoway":
        return n > d + max(d, l)
    raise ValueError(f"unknown classic kind {kind!r}")
