"""Secure message transmission over wires with generalised adversary
structures: feasibility deciders, one-way and two-round protocols,
exhaustive verifiers and impossibility witnesses."""
from .attacks import AttackWitness, SearchExhausted, attack_for, verify_witness
from .execution import ExecutionOutcome, protocol_for, run_protocol, simulate
from .feasibility import (FeasibilityReport, check, feasible_classic, feasible_oneway,
                          feasible_tworound_non_completely_oblivious,
                          feasible_twoway_completely_oblivious)
from .field import FieldElement, Polynomial, decode_with_errors, interpolate
from .oneway import OneWayProtocol, ThresholdProtocol, plan_oneway, receive_oneway, send_oneway
from .structures import (AdversaryPair, AdversaryStructure, Mode, WireSet, dl_structure,
                         general_structure, strengthen, threshold_structure)
from .twoway import TwoWayProtocol, plan_non_completely_oblivious, plan_twoway
from .verification import (BudgetExceeded, crossvalidate_feasibility, verify_privacy,
                           verify_reliability)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
