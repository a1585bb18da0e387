"""Situations are finite bit strings; the empty string is the root of the event tree.

Anywhere a situation is accepted, a ``str`` of '0'/'1', a sequence of ints or a
uint8 array will do. Level ``d`` of the tree is ordered lexicographically with
the first outcome as most significant bit, so the children of node ``i`` are
``2*i`` (outcome 0) and ``2*i + 1`` (outcome 1).
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError, TreeSizeError

MAX_TREE_DEPTH = 20


def as_bits(s) -> np.ndarray:
    if isinstance(s, np.ndarray) and s.dtype == np.uint8:
        bits = s
    elif isinstance(s, str):
        bits = np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        bits = np.asarray(s, dtype=np.int64)
        if bits.size and (bits.min() < 0 or bits.max() > 1):
            raise DomainError("outcomes must be 0 or 1")
        bits = bits.astype(np.uint8)
    if bits.ndim != 1:
        raise DomainError("a situation is a one-dimensional bit sequence")
    if bits.size and bits.max() > 1:
        raise DomainError("outcomes must be 0 or 1")
    return bits


def bitstring(s) -> str:
    return (as_bits(s) + ord("0")).tobytes().decode("ascii")


def precedes(s, t) -> bool:
    """True if ``s`` is a (not necessarily strict) prefix of ``t``."""
    s, t = as_bits(s), as_bits(t)
    return s.size <= t.size and bool(np.array_equal(s, t[: s.size]))


def check_depth(depth: int) -> None:
    if depth < 0:
        raise DomainError("depth must be non-negative")
    if depth > MAX_TREE_DEPTH:
        raise TreeSizeError(f"depth {depth} exceeds the tree size guard {MAX_TREE_DEPTH}")


def level_situations(depth: int) -> np.ndarray:
    """All ``2**depth`` situations of length ``depth`` as rows of a uint8 matrix."""
    check_depth(depth)
    idx = np.arange(2**depth, dtype=np.int64)
    shifts = np.arange(depth - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
