"""Context-bounded reachability for TSO programs over the naturals."""

import json

from ._core import (
    ModelError,
    ParseError,
    Program,
    canonical_dfa,
    canonical_dlcs,
    dfa_intersection_nonempty,
    dlcs_reach,
    gen_bakery,
    gen_dlcs,
    gen_intersection,
    message_passing_litmus,
    parse_program,
)
from . import _core

__all__ = [
    "ModelError",
    "ParseError",
    "Program",
    "canonical_dfa",
    "canonical_dlcs",
    "check_reach",
    "dfa_intersection_nonempty",
    "dlcs_reach",
    "gen_bakery",
    "gen_dlcs",
    "gen_intersection",
    "message_passing_litmus",
    "parse_program",
    "selftest",
    "simulate",
]


def check_reach(program, k, target=None, *, witness=True, max_states=20_000_000, threads=1, reduce=True):
    """Decide CB(k) reachability. Returns the JSON report as a dict."""
    return json.loads(_core._check_reach(program, k, target, witness, max_states, threads, reduce))


def simulate(program, k=None, target=None, *, buffer_bound=2, domain_bound=3, depth=300, max_states=2_000_000):
    """Bounded concrete search; plain TSO when k is None."""
    return json.loads(_core._simulate(program, k, target, buffer_bound, domain_bound, depth, max_states))


def selftest(seed=1, full=False):
    return json.loads(_core._selftest(seed, full))
