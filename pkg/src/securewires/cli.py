"""Command-line front end. Every command prints one JSON document on stdout.

Exit codes::

    0  success (feasible, verified, witness found, structure generated)
    1  malformed or vacuous input
    2  structure infeasible for the requested setting
    3  verification failure
    4  privacy check refused by the budget
    5  attack search exhausted

Randomness comes from ``--seed`` only. Streams are split by name: the
sender tape is ``(seed, "S")``, the receiver tape ``(seed, "R")`` and the
adversary's noise ``(seed, "ADV")``; each stream is a ``random.Random``
seeded with the first 8 bytes of SHA-256 over the joined path.
"""
from __future__ import annotations

import argparse
import json
import sys

from .attacks import DEFAULT_BOUND, AttackRefused, SearchExhausted, attack_for, verify_witness
from .execution import SETTINGS, adversary_mode, protocol_for, simulate
from .feasibility import check
from .field import FieldError, check_prime
from .planning import InfeasibleStructure
from .strategies import StrategyHandle, behavior_from_name
from .structures import (AdversaryStructure, Mode, StructureError, dl_structure,
                         general_structure, threshold_structure)
from .verification import (DEFAULT_PRIVACY_BUDGET, BudgetExceeded, CleartextProtocol,
                           inject_fault, verify_privacy, verify_reliability)

OK, MALFORMED, INFEASIBLE, FAILED, REFUSED, EXHAUSTED = range(6)


class UsageError(Exception):
    """Input rejected before any work was done."""


def _emit(doc, code):
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return code


def _load(path) -> AdversaryStructure:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return AdversaryStructure.from_dict(doc)
    except StructureError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _prime(p) -> int:
    try:
        return check_prime(p)
    except FieldError as exc:
        raise UsageError(str(exc)) from None


def _infeasible(structure, setting):
    report = check(structure, setting)
    return _emit({"setting": setting, "error": "infeasible", **report.to_dict(structure)}, INFEASIBLE)


def cmd_check(args):
    structure = _load(args.structure)
    report = check(structure, args.setting)
    doc = {"setting": args.setting, **report.to_dict(structure)}
    return _emit(doc, OK if report.feasible else INFEASIBLE)


def cmd_simulate(args):
    structure = _load(args.structure)
    p = _prime(args.prime)
    if not check(structure, args.setting).feasible:
        return _infeasible(structure, args.setting)
    protocol = protocol_for(structure, args.setting, p)
    handle = None
    if args.pair is not None:
        if not 1 <= args.pair <= len(structure.pairs):
            raise UsageError(f"--pair must lie in 1..{len(structure.pairs)}")
        handle = StrategyHandle(args.pair - 1, behavior_from_name(args.behavior, args.value))
    outcome = simulate(protocol, args.message, args.seed, handle, structure,
                       adversary_mode(structure, args.setting))
    doc = {"setting": args.setting, "prime": p, **outcome.to_dict()}
    return _emit(doc, OK if outcome.ok else FAILED)


def cmd_verify(args):
    structure = _load(args.structure)
    p = _prime(args.prime)
    if not check(structure, args.setting).feasible:
        return _infeasible(structure, args.setting)
    mode = adversary_mode(structure, args.setting)
    if args.mode == "privacy":
        if args.inject_fault:
            protocol = CleartextProtocol(structure.n, p)
        else:
            protocol = protocol_for(structure, args.setting, p)
        try:
            report = verify_privacy(protocol, structure, budget=args.budget, mode=mode)
        except BudgetExceeded as exc:
            return _emit({"setting": args.setting, "check": "privacy", "refused": str(exc)}, REFUSED)
    else:
        protocol = protocol_for(structure, args.setting, p)
        if args.inject_fault:
            protocol = inject_fault(protocol)
        report = verify_reliability(protocol, structure, trials=args.trials, seed=args.seed)
    doc = {"setting": args.setting, "check": args.mode, "prime": p,
           "fault_injected": args.inject_fault, **report.to_dict()}
    return _emit(doc, OK if report.ok else FAILED)


def cmd_attack(args):
    structure = _load(args.structure)
    p = _prime(args.prime)
    if args.m1 % p == args.m2 % p:
        raise UsageError("m1 and m2 coincide in the field; the attack would be vacuous")
    if check(structure, args.setting).feasible:
        return _infeasible_refusal(structure, args.setting)
    if args.setting != "oneway" and args.round_cap < 2:
        raise UsageError("two-round settings need a round cap of at least 2")
    try:
        witness = attack_for(structure, args.setting, args.m1, args.m2, p, args.bound)
    except SearchExhausted as exc:
        return _emit({"setting": args.setting, "exhausted": str(exc)}, EXHAUSTED)
    except AttackRefused as exc:
        raise UsageError(str(exc)) from None
    verified = verify_witness(witness)
    doc = {"setting": args.setting, "verified": verified, **witness.to_dict()}
    return _emit(doc, OK if verified else FAILED)


def _infeasible_refusal(structure, setting):
    report = check(structure, setting)
    return _emit({"setting": setting, "error": "structure is feasible; no attack exists",
                  **report.to_dict(structure)}, INFEASIBLE)


def _wire_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad wire list {text!r}") from None


def cmd_gen(args):
    mode = Mode(args.mode)
    try:
        if args.kind == "threshold":
            n, k = _ints(args.params, 2, "threshold N K")
            structure = threshold_structure(n, k, mode)
        elif args.kind == "dl":
            n, d, l = _ints(args.params, 3, "dl N D L")
            structure = dl_structure(n, d, l, mode)
        else:
            (n,) = _ints(args.params, 1, "general N")
            sets = [_wire_list(s) for s in args.set]
            if args.sets:
                with open(args.sets, encoding="utf-8") as fh:
                    sets += json.load(fh)
            if not sets:
                raise UsageError("general needs --set or --sets")
            bad = [w for s in sets for w in s if not 1 <= w <= n]
            if bad:
                raise UsageError(f"wires {bad} outside 1..{n}")
            structure = general_structure(n, sets, mode)
    except StructureError as exc:
        raise UsageError(str(exc)) from None
    return _emit(structure.to_dict(), OK)


def _ints(params, count, usage):
    if len(params) != count:
        raise UsageError(f"usage: gen {usage}")
    try:
        return [int(x) for x in params]
    except ValueError:
        raise UsageError(f"usage: gen {usage} (integers)") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="securewires", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def structured(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("structure", help="structure JSON file, or - for stdin")
        sp.add_argument("--setting", choices=SETTINGS, default="oneway")
        return sp

    structured("check", "decide feasibility").set_defaults(func=cmd_check)

    sp = structured("simulate", "run the protocol once and print the transcript")
    sp.add_argument("--message", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--prime", type=int, default=5)
    sp.add_argument("--pair", type=int, help="1-based adversary pair; omit for no adversary")
    sp.add_argument("--behavior", choices=("passive", "noise", "constant", "shift"), default="passive")
    sp.add_argument("--value", type=int, default=0, help="constant to write or shift amount")
    sp.set_defaults(func=cmd_simulate)

    sp = structured("verify", "exhaustive reliability or exact privacy check")
    sp.add_argument("--mode", choices=("privacy", "reliability"), default="reliability")
    sp.add_argument("--budget", type=int, default=DEFAULT_PRIVACY_BUDGET)
    sp.add_argument("--prime", type=int, default=5)
    sp.add_argument("--trials", type=int, default=2000,
                    help="seeded trials when the plan is too large to sweep")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--inject-fault", action="store_true",
                    help="negative control: miswire the plan (reliability) or send in clear (privacy)")
    sp.set_defaults(func=cmd_verify)

    sp = structured("attack", "search for a witness that the setting is impossible")
    sp.add_argument("--m1", type=int, default=0)
    sp.add_argument("--m2", type=int, default=1)
    sp.add_argument("--round-cap", type=int, default=2)
    sp.add_argument("--prime", type=int, default=5)
    sp.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="tape search node cap")
    sp.set_defaults(func=cmd_attack)

    sp = sub.add_parser("gen", help="emit a structure document")
    sp.add_argument("kind", choices=("threshold", "dl", "general"))
    sp.add_argument("params", nargs="+", help="threshold: N K; dl: N D L; general: N")
    sp.add_argument("--set", action="append", default=[], help="general: comma-separated 1-based wires")
    sp.add_argument("--sets", help="general: JSON file holding a list of wire lists")
    sp.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.OBLIVIOUS.value)
    sp.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return MALFORMED if exc.code else OK
    try:
        return args.func(args)
    except UsageError as exc:
        return _emit({"error": str(exc)}, MALFORMED)
    except InfeasibleStructure as exc:
        return _emit({"error": str(exc)}, INFEASIBLE)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
