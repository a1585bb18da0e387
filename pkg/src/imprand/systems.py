"""Forecasting systems: total maps from situations to interval forecasts.

Every system answers ``bounds(bits)``, the lower and upper forecast in each
prefix situation of ``bits`` (``len(bits) + 1`` entries, root first). The forecast
used for outcome ``x_k`` is the one attached to the situation of length ``k - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DomainError, FormatError
from .forecast import VACUOUS, IntervalForecast, check_interval
from .situations import as_bits, bitstring, check_depth, level_situations


def delta_n(n) -> float | np.ndarray:
    """Distance between the n-th near-half forecast and 1/2, for step indices ``n >= 1``."""
    arr = np.asarray(n)
    if np.any(arr < 1):
        raise DomainError("delta_n needs n >= 1")
    t = 1.0 / (arr + 1.0)
    out = np.exp(-t) * np.sqrt(np.expm1(t))
    return float(out) if np.ndim(out) == 0 else out


def near_half_p(n) -> float | np.ndarray:
    """``p_n = 1/2 + (-1)**n delta_n``."""
    arr = np.asarray(n)
    sign = np.where(arr % 2 == 0, 1.0, -1.0)
    out = 0.5 + sign * delta_n(arr)
    return float(out) if np.ndim(out) == 0 else out


def near_half_q(n) -> float | np.ndarray:
    """``1 - p_n`` computed without cancellation."""
    arr = np.asarray(n)
    sign = np.where(arr % 2 == 0, 1.0, -1.0)
    out = 0.5 - sign * delta_n(arr)
    return float(out) if np.ndim(out) == 0 else out


def n_alpha(alpha: float) -> int:
    """Smallest step index from which ``delta_n <= alpha`` (closed form)."""
    if not 0.0 < alpha < 0.5:
        raise DomainError("alpha must lie in (0, 1/2)")
    c = (1.0 + math.sqrt(1.0 - 4.0 * alpha * alpha)) / 2.0
    return max(1, math.ceil(-1.0 / math.log(c) - 1.0))


class ForecastingSystem:
    variant: str = ""
    # True when the forecast depends only on the length of the situation
    depth_only: bool = True

    def forecast(self, s) -> IntervalForecast:
        lo, hi = self.bounds(as_bits(s))
        return IntervalForecast(float(lo[-1]), float(hi[-1]))

    def bounds(self, bits) -> tuple[np.ndarray, np.ndarray]:
        bits = as_bits(bits)
        return self.by_length(np.arange(bits.size + 1))

    def level(self, depth: int) -> tuple[np.ndarray, np.ndarray]:
        """Forecast bounds for all situations of length ``depth``, lexicographic order."""
        check_depth(depth)
        if self.depth_only:
            lo, hi = self.by_length(np.array([depth]))
            return np.full(2**depth, lo[0]), np.full(2**depth, hi[0])
        rows = level_situations(depth)
        pairs = np.array([self.forecast(r).as_list() for r in rows]).reshape(-1, 2)
        return pairs[:, 0].copy(), pairs[:, 1].copy()

    def by_length(self, lengths: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def describe(self) -> str:
        return self.variant


@dataclass(frozen=True)
class Stationary(ForecastingSystem):
    interval: IntervalForecast
    variant = "stationary"

    def by_length(self, lengths):
        n = lengths.size
        return np.full(n, self.interval.lower), np.full(n, self.interval.upper)

    def to_dict(self):
        return {"variant": self.variant, "lower": self.interval.lower, "upper": self.interval.upper}

    def describe(self):
        return f"stationary[{self.interval.lower:g},{self.interval.upper:g}]"


@dataclass(frozen=True)
class Vacuous(ForecastingSystem):
    variant = "vacuous"

    def by_length(self, lengths):
        return np.zeros(lengths.size), np.ones(lengths.size)

    def to_dict(self):
        return {"variant": self.variant}


@dataclass(frozen=True)
class AlternatingPQ(ForecastingSystem):
    """Precise ``p`` after an odd number of outcomes, ``q`` after an even number (root included)."""

    p: float
    q: float
    variant = "alternating-pq"

    def __post_init__(self):
        if not 0.0 <= self.p <= self.q <= 1.0:
            raise DomainError("alternating-pq needs 0 <= p <= q <= 1")

    def by_length(self, lengths):
        v = np.where(lengths % 2 == 1, self.p, self.q)
        return v, v.copy()

    def to_dict(self):
        return {"variant": self.variant, "p": self.p, "q": self.q}

    def describe(self):
        return f"alternating-pq[{self.p:g},{self.q:g}]"


@dataclass(frozen=True)
class NearHalf(ForecastingSystem):
    """Precise ``p_n`` for the n-th outcome, i.e. in situations of length ``n - 1``."""

    variant = "near-half"

    def by_length(self, lengths):
        v = near_half_p(lengths + 1)
        v = np.atleast_1d(v)
        return v, v.copy()

    def to_dict(self):
        return {"variant": self.variant}


@dataclass(frozen=True)
class DepthPeriodic(ForecastingSystem):
    intervals: tuple[IntervalForecast, ...]
    variant = "depth-periodic"

    def __post_init__(self):
        if not self.intervals:
            raise DomainError("depth-periodic needs at least one interval")

    def by_length(self, lengths):
        lo = np.array([i.lower for i in self.intervals])
        hi = np.array([i.upper for i in self.intervals])
        k = lengths % len(self.intervals)
        return lo[k], hi[k]

    def to_dict(self):
        return {"variant": self.variant, "intervals": [i.as_list() for i in self.intervals]}


@dataclass(frozen=True)
class Table(ForecastingSystem):
    """Explicit forecasts for listed situations, ``default`` everywhere else."""

    entries: Mapping[str, IntervalForecast] = field(default_factory=dict)
    default: IntervalForecast = VACUOUS
    variant = "table"
    depth_only = False

    def __post_init__(self):
        for key in self.entries:
            if key and set(key) - {"0", "1"}:
                raise DomainError(f"table keys must be bit strings, got {key!r}")
        object.__setattr__(self, "_max_key", max((len(k) for k in self.entries), default=0))

    def __hash__(self):
        return hash((tuple(sorted(self.entries.items())), self.default))

    def forecast(self, s) -> IntervalForecast:
        return self.entries.get(bitstring(s), self.default)

    def bounds(self, bits):
        bits = as_bits(bits)
        lo = np.full(bits.size + 1, self.default.lower)
        hi = np.full(bits.size + 1, self.default.upper)
        key = bitstring(bits[: self._max_key])
        for k in range(min(bits.size, self._max_key) + 1):
            iv = self.entries.get(key[:k])
            if iv is not None:
                lo[k], hi[k] = iv.lower, iv.upper
        return lo, hi

    def to_dict(self):
        return {
            "variant": self.variant,
            "entries": {k: v.as_list() for k, v in sorted(self.entries.items())},
            "default": self.default.as_list(),
        }


def is_refinement(g1: ForecastingSystem, g2: ForecastingSystem, depth: int) -> bool:
    """True iff ``g1(s)`` is contained in ``g2(s)`` for every situation shorter than ``depth``."""
    check_depth(depth)
    for d in range(depth):
        lo1, hi1 = g1.level(d)
        lo2, hi2 = g2.level(d)
        if np.any(lo1 < lo2) or np.any(hi1 > hi2):
            return False
    return True


def _interval(v) -> IntervalForecast:
    try:
        lo, hi = v
    except (TypeError, ValueError):
        raise FormatError(f"expected [lower, upper], got {v!r}") from None
    return IntervalForecast(float(lo), float(hi))


def system_from_dict(doc: Mapping) -> ForecastingSystem:
    try:
        variant = doc["variant"]
    except (KeyError, TypeError):
        raise FormatError("forecasting system document needs a 'variant' field") from None
    try:
        if variant == "stationary":
            return Stationary(IntervalForecast(float(doc["lower"]), float(doc["upper"])))
        if variant == "vacuous":
            return Vacuous()
        if variant == "alternating-pq":
            return AlternatingPQ(float(doc["p"]), float(doc["q"]))
        if variant == "near-half":
            return NearHalf()
        if variant == "depth-periodic":
            return DepthPeriodic(tuple(_interval(v) for v in doc["intervals"]))
        if variant == "table":
            entries = {str(k): _interval(v) for k, v in doc.get("entries", {}).items()}
            return Table(entries, _interval(doc["default"]))
    except KeyError as exc:
        raise FormatError(f"{variant} system is missing field {exc}") from None
    raise FormatError(f"unknown forecasting system variant {variant!r}")


def system_to_dict(system: ForecastingSystem) -> dict:
    return system.to_dict()


def stationary(lower: float, upper: float | None = None) -> Stationary:
    check_interval(lower, lower if upper is None else upper)
    return Stationary(IntervalForecast(lower, lower if upper is None else upper))
