"""Symmetric networks in the pi-calculus with mixed and separate choice."""

from .congruence import alpha_key, canonicalize, congruent
from .execution import (
    MimicryError,
    NotSeparateError,
    Round,
    SubdivisionError,
    SymExecution,
    confluence_square,
    find_symmetric_execution,
    mimic_round,
    no_symmetric_execution,
    subdivide,
    validate_symmetric_execution,
)
from .lts import BoundOutput, FreeInput, FreeOutput, TAU, max_executions, tau_transitions, transitions
from .network import NetState, net_steps, network_of
from .parser import ParseError, format_process, parse
from .problems import LeaderElectionSpec, fixtures, has_step, must_succeed, solves_leader_election
from .symmetry import Permutation, SymNet, apply_perm, build_symmetric, indexed_substitute, recognize_symmetric, symmetric_label_sequence
from .syntax import NIL, OK, Process, WellformednessError, free_names, bound_names, is_separate, substitute
from .verdict import Verdict

__version__ = "0.1.0"
