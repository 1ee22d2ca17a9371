"""Deterministic structure corpora for the verification suite and the CLI.

Each generator draws random (D, L) pairs from a seeded ``random.Random`` and
keeps the first structures that satisfy the requested predicate, so a given
seed always yields the same list.
"""
from __future__ import annotations

import random

from .feasibility import (
    feasible_oneway,
    feasible_tworound_non_completely_oblivious,
    feasible_twoway_completely_oblivious,
)
from .structures import AdversaryStructure, Mode, general_structure


def _random_pairs(rng, n, size, density):
    pairs = []
    for _ in range(size):
        d = [w for w in range(1, n + 1) if rng.random() < density]
        l = [w for w in range(1, n + 1) if rng.random() < density]
        pairs.append((d, l))
    return pairs


def _interesting(structure):
    """At least two pairs disrupt something and one listens somewhere."""
    masks = structure.masks
    return sum(1 for d, _ in masks if d) >= 2 and any(l for _, l in masks)


def _plan_wires(structure, setting) -> int:
    from .oneway import plan_oneway
    from .twoway import plan_non_completely_oblivious, plan_twoway
    used = 0
    if setting == "oneway":
        for w, _ in plan_oneway(structure).root.slots():
            used |= 1 << w
        return used
    plan = (plan_twoway if setting == "twoway" else plan_non_completely_oblivious)(structure)
    for leaf in plan.leaves():
        for w in [w for row in leaf.share_wires for w in row] + list(leaf.public_wires):
            used |= 1 << w
    return used


def in_contact(structure, setting) -> bool:
    """Every pair that disrupts anything can reach at least one wire the
    protocol uses, so reliability sweeps are never vacuous."""
    used = _plan_wires(structure, setting)
    return all(d & used for d, _ in structure.masks if d)


def _distinct(structure):
    return len(set(structure.masks)) == len(structure.masks)


def search(predicate, count, n_values, sizes, mode, seed, density=0.4, limit=200_000):
    rng = random.Random(seed)
    out, seen = [], set()
    for _ in range(limit):
        n = rng.choice(n_values)
        size = rng.choice(sizes)
        st = AdversaryStructure.from_lists(n, _random_pairs(rng, n, size, density), mode)
        key = (n, tuple(st.masks))
        if key in seen or not _distinct(st) or not _interesting(st):
            continue
        seen.add(key)
        if predicate(st):
            out.append(st)
            if len(out) == count:
                return out
    raise RuntimeError(f"only {len(out)} structures found")


def oneway_feasible(count=20, sizes=(2, 3, 4), n_values=(4, 5), seed=1):
    return search(lambda s: feasible_oneway(s).feasible and in_contact(s, "oneway"), count,
                  n_values, sizes, Mode.OBLIVIOUS, seed)


def twoway_feasible(count=10, sizes=(3,), n_values=(4, 5), seed=2):
    return search(lambda s: feasible_twoway_completely_oblivious(s).feasible
                  and in_contact(s, "twoway"), count,
                  n_values, sizes, Mode.COMPLETELY_OBLIVIOUS, seed)


def nco_feasible(count=10, sizes=(3,), n_values=(4, 5), seed=3):
    return search(lambda s: feasible_tworound_non_completely_oblivious(s).feasible
                  and in_contact(s, "tworound_nco"), count,
                  n_values, sizes, Mode.OBLIVIOUS, seed)


def d_equals_l(count=10, sizes=(3,), n_values=(4, 5), seed=4):
    """Structures with D = L in which no two sets cover the wires."""
    rng = random.Random(seed)
    out, seen = [], set()
    while len(out) < count:
        n = rng.choice(n_values)
        sets = [[w for w in range(1, n + 1) if rng.random() < 0.45] for _ in range(rng.choice(sizes))]
        st = general_structure(n, sets, Mode.COMPLETELY_OBLIVIOUS)
        key = (n, tuple(st.masks))
        if key in seen or not _distinct(st) or sum(1 for d, _ in st.masks if d) < 2:
            continue
        seen.add(key)
        if feasible_twoway_completely_oblivious(st).feasible:
            out.append(st)
    return out


def infeasible(setting, count=5, sizes=(2, 3), n_values=(3, 4), seed=5):
    """Structures violating the predicate for ``setting``."""
    pred, mode = {
        "oneway": (feasible_oneway, Mode.OBLIVIOUS),
        "twoway": (feasible_twoway_completely_oblivious, Mode.COMPLETELY_OBLIVIOUS),
        "tworound_nco": (feasible_tworound_non_completely_oblivious, Mode.OBLIVIOUS),
    }[setting]
    return search(lambda s: not pred(s).feasible, count, n_values, sizes, mode, seed)
