"""Selection processes: 0/1-valued maps on situations that pick which outcomes are looked at.

Parity and period presets refer to the length ``k`` of the situation, i.e. the
selection made in situation ``x_1..x_k`` decides whether ``x_{k+1}`` is counted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DomainError, FormatError
from .situations import as_bits, bitstring


class SelectionProcess:
    name: str = ""

    def mask(self, bits) -> np.ndarray:
        """Selection in every prefix situation of ``bits``, root first (``len + 1`` entries)."""
        raise NotImplementedError

    def at(self, s) -> int:
        return int(self.mask(as_bits(s))[-1])

    def describe(self) -> str:
        return self.name


@dataclass(frozen=True)
class AllSteps(SelectionProcess):
    name = "all"

    def mask(self, bits):
        return np.ones(as_bits(bits).size + 1, dtype=np.int8)


@dataclass(frozen=True)
class NoSteps(SelectionProcess):
    name = "none"

    def mask(self, bits):
        return np.zeros(as_bits(bits).size + 1, dtype=np.int8)


@dataclass(frozen=True)
class EvenSteps(SelectionProcess):
    name = "even"

    def mask(self, bits):
        k = np.arange(as_bits(bits).size + 1)
        return (k % 2 == 0).astype(np.int8)


@dataclass(frozen=True)
class OddSteps(SelectionProcess):
    name = "odd"

    def mask(self, bits):
        k = np.arange(as_bits(bits).size + 1)
        return (k % 2 == 1).astype(np.int8)


@dataclass(frozen=True)
class EveryK(SelectionProcess):
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("every-k needs k >= 1")

    @property
    def name(self):
        return f"every-k:{self.k}"

    def mask(self, bits):
        k = np.arange(as_bits(bits).size + 1)
        return (k % self.k == 0).astype(np.int8)


@dataclass(frozen=True)
class AfterOnes(SelectionProcess):
    """Select when the previous ``m`` outcomes were all ones."""

    m: int = 1

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("after-ones needs m >= 1")

    @property
    def name(self):
        return f"after-ones:{self.m}"

    def mask(self, bits):
        bits = as_bits(bits)
        out = np.zeros(bits.size + 1, dtype=np.int8)
        if bits.size < self.m:
            return out
        # ones in each window of length m ending at position k - 1
        c = np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))
        k = np.arange(self.m, bits.size + 1)
        out[k] = (c[k] - c[k - self.m] == self.m).astype(np.int8)
        return out


@dataclass(frozen=True)
class TableSelection(SelectionProcess):
    entries: Mapping[str, int] = field(default_factory=dict)
    default: int = 0
    name = "table"

    def __hash__(self):
        return hash((tuple(sorted(self.entries.items())), self.default))

    def mask(self, bits):
        bits = as_bits(bits)
        out = np.full(bits.size + 1, self.default, dtype=np.int8)
        longest = max((len(k) for k in self.entries), default=0)
        key = bitstring(bits[:longest])
        for k in range(min(bits.size, longest) + 1):
            v = self.entries.get(key[:k])
            if v is not None:
                out[k] = 1 if v else 0
        return out


def parse_selection(text: str) -> SelectionProcess:
    """Parse a preset: ``all``, ``even``, ``odd``, ``every-k:K``, ``after-ones:M``."""
    name, _, arg = text.partition(":")
    presets = {"all": AllSteps, "even": EvenSteps, "odd": OddSteps, "none": NoSteps}
    if name in presets and not arg:
        return presets[name]()
    try:
        if name == "every-k":
            return EveryK(int(arg))
        if name == "after-ones":
            return AfterOnes(int(arg) if arg else 1)
    except ValueError:
        raise FormatError(f"bad selection argument in {text!r}") from None
    raise FormatError(f"unknown selection preset {text!r}")
