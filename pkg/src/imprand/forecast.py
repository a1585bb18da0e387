"""Interval forecasts, gambles on a binary outcome and their lower/upper expectations."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def check_interval(lower: float, upper: float) -> None:
    if not (0.0 <= lower <= upper <= 1.0):
        raise DomainError(f"invalid interval forecast [{lower}, {upper}]")


@dataclass(frozen=True, slots=True)
class Gamble:
    """Payoff ``f1`` when the outcome is 1, ``f0`` when it is 0."""

    f1: float
    f0: float

    def __post_init__(self):
        if not (math.isfinite(self.f1) and math.isfinite(self.f0)):
            raise DomainError(f"gamble values must be finite, got {self}")

    def __call__(self, x: int) -> float:
        return self.f1 if x else self.f0

    def __neg__(self) -> Gamble:
        return Gamble(-self.f1, -self.f0)

    def __add__(self, other) -> Gamble:
        if isinstance(other, Gamble):
            return Gamble(self.f1 + other.f1, self.f0 + other.f0)
        return Gamble(self.f1 + other, self.f0 + other)

    __radd__ = __add__

    def __sub__(self, other) -> Gamble:
        return self + (-other)

    def __mul__(self, lam: float) -> Gamble:
        return Gamble(lam * self.f1, lam * self.f0)

    __rmul__ = __mul__

    def times(self, other: Gamble) -> Gamble:
        """Pointwise product."""
        return Gamble(self.f1 * other.f1, self.f0 * other.f0)

    @property
    def min(self) -> float:
        return min(self.f1, self.f0)

    @property
    def max(self) -> float:
        return max(self.f1, self.f0)

    @property
    def range(self) -> float:
        return abs(self.f1 - self.f0)


IDENTITY = Gamble(1.0, 1.0)
INDICATOR = Gamble(1.0, 0.0)


@dataclass(frozen=True, slots=True)
class IntervalForecast:
    """Closed interval ``[lower, upper]`` of probabilities for the outcome 1."""

    lower: float
    upper: float

    def __post_init__(self):
        check_interval(self.lower, self.upper)

    @classmethod
    def precise(cls, p: float) -> IntervalForecast:
        return cls(p, p)

    @property
    def is_precise(self) -> bool:
        return self.lower == self.upper

    def __contains__(self, p: float) -> bool:
        return self.lower <= p <= self.upper

    def issubset(self, other: IntervalForecast) -> bool:
        return other.lower <= self.lower and self.upper <= other.upper

    def intersection(self, other: IntervalForecast) -> IntervalForecast | None:
        lo, hi = max(self.lower, other.lower), min(self.upper, other.upper)
        return IntervalForecast(lo, hi) if lo <= hi else None

    def as_list(self) -> list[float]:
        return [self.lower, self.upper]


VACUOUS = IntervalForecast(0.0, 1.0)


def lower_expectation(I: IntervalForecast, f: Gamble) -> float:
    # linear in p, so the minimum sits at an endpoint
    check_interval(I.lower, I.upper)
    d = f.f1 - f.f0
    return f.f0 + min(I.lower * d, I.upper * d)


def upper_expectation(I: IntervalForecast, f: Gamble) -> float:
    return -lower_expectation(I, -f)


def lower_expectation_arrays(lo, hi, f1, f0):
    """Elementwise lower expectation for arrays of intervals and gambles."""
    d = np.subtract(f1, f0)
    return f0 + np.minimum(np.multiply(lo, d), np.multiply(hi, d))


def upper_expectation_arrays(lo, hi, f1, f0):
    return -lower_expectation_arrays(lo, hi, np.negative(f1), np.negative(f0))
