"""Stateless model checking of transactional programs under causal consistency."""

try:
    from ._causalmc import (
        Program,
        check,
        enumerate_operational,
        enumerate_weak_traces,
        explore,
        parse,
        pretty,
    )
except ImportError:  # in-tree builds put the extension on sys.path directly
    from _causalmc import (
        Program,
        check,
        enumerate_operational,
        enumerate_weak_traces,
        explore,
        parse,
        pretty,
    )

__all__ = [
    "Program",
    "check",
    "enumerate_operational",
    "enumerate_weak_traces",
    "explore",
    "parse",
    "pretty",
]
