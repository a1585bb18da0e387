"""Sceptic strategies: multiplier processes and capital-process transformers.

Every multiplier strategy here is a supermartingale multiplier for the system it
is declared against; the module tests check this numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .errors import DomainError, FormatError
from .forecast import INDICATOR, Gamble, IntervalForecast, lower_expectation_arrays
from .selection import SelectionProcess, parse_selection
from .situations import as_bits
from .systems import ForecastingSystem, Stationary, near_half_p, near_half_q, system_from_dict
from .tree import CapitalProcess, MultiplierStrategy

LN2 = math.log(2.0)


def _step_index(bits) -> np.ndarray:
    # multiplier used in a situation of length k bets on outcome number k + 1
    return np.arange(as_bits(bits).size + 1) + 1


@dataclass(frozen=True)
class ConstantMultiplier(MultiplierStrategy):
    gamble: Gamble
    label: str = "constant"
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def name(self):
        return self.label

    def multipliers(self, bits):
        n = as_bits(bits).size + 1
        return np.full(n, self.gamble.f1), np.full(n, self.gamble.f0)

    def params(self):
        return {"f1": self.gamble.f1, "f0": self.gamble.f0, **self.extra}


def identity() -> ConstantMultiplier:
    return ConstantMultiplier(Gamble(1.0, 1.0), "identity")


def _check_bet(lam: float, direction: str) -> None:
    if not 0.0 < lam <= 1.0:
        raise DomainError(f"bet fraction must lie in (0, 1], got {lam}")
    if direction not in ("high", "low"):
        raise DomainError(f"direction must be 'high' or 'low', got {direction!r}")


def _bet_multipliers(lo, hi, lam: float, direction: str):
    if direction == "high":
        return 1.0 + lam * (1.0 - hi), 1.0 - lam * hi
    return 1.0 - lam * (1.0 - lo), 1.0 + lam * lo


def endpoint_bet(I: IntervalForecast, lam: float, direction: str) -> ConstantMultiplier:
    """Bet that the frequency of ones exceeds ``I.upper`` (high) or falls below ``I.lower`` (low)."""
    _check_bet(lam, direction)
    f1, f0 = _bet_multipliers(I.lower, I.upper, lam, direction)
    return ConstantMultiplier(
        Gamble(f1, f0), f"endpoint-bet-{direction}",
        {"lower": I.lower, "upper": I.upper, "lam": lam, "direction": direction})


@dataclass(frozen=True)
class ForecastBet(MultiplierStrategy):
    """``endpoint_bet`` against the forecast of ``system`` in each situation."""

    system: ForecastingSystem
    lam: float
    direction: str

    def __post_init__(self):
        _check_bet(self.lam, self.direction)

    @property
    def name(self):
        return f"forecast-bet-{self.direction}-{self.lam:g}"

    def multipliers(self, bits):
        lo, hi = self.system.bounds(bits)
        return _bet_multipliers(lo, hi, self.lam, self.direction)

    def params(self):
        return {"system": self.system.to_dict(), "lam": self.lam, "direction": self.direction}


def hellinger_half(n: int) -> Gamble:
    """Multiplier for outcome ``n`` that is fair under 1/2 and profits from the near-half forecasts."""
    if n < 1:
        raise DomainError("step index must be >= 1")
    a = math.exp(1.0 / (2.0 * (n + 1)))
    return Gamble(a * math.sqrt(2.0 * near_half_p(n)), a * math.sqrt(2.0 * near_half_q(n)))


def hellinger_near_half(n: int) -> Gamble:
    """Dual multiplier, fair under ``p_n``."""
    if n < 1:
        raise DomainError("step index must be >= 1")
    a = math.exp(1.0 / (2.0 * (n + 1)))
    return Gamble(a / math.sqrt(2.0 * near_half_p(n)), a / math.sqrt(2.0 * near_half_q(n)))


@dataclass(frozen=True)
class HellingerHalf(MultiplierStrategy):
    name = "hellinger-half"

    def multipliers(self, bits):
        n = _step_index(bits)
        a = np.exp(1.0 / (2.0 * (n + 1)))
        return a * np.sqrt(2.0 * near_half_p(n)), a * np.sqrt(2.0 * near_half_q(n))


@dataclass(frozen=True)
class HellingerNearHalf(MultiplierStrategy):
    name = "hellinger-near-half"

    def multipliers(self, bits):
        n = _step_index(bits)
        a = np.exp(1.0 / (2.0 * (n + 1)))
        return a / np.sqrt(2.0 * near_half_p(n)), a / np.sqrt(2.0 * near_half_q(n))


@dataclass(frozen=True)
class ParityMasked(MultiplierStrategy):
    """``base`` on steps whose index has parity ``keep``; the identity gamble elsewhere."""

    base: MultiplierStrategy
    keep: str

    def __post_init__(self):
        if self.keep not in ("even", "odd"):
            raise DomainError("keep must be 'even' or 'odd'")

    @property
    def name(self):
        return f"{self.base.name}-{self.keep}-steps"

    def multipliers(self, bits):
        m1, m0 = self.base.multipliers(bits)
        off = (_step_index(bits) % 2 == 0) != (self.keep == "even")
        return np.where(off, 1.0, m1), np.where(off, 1.0, m0)

    def params(self):
        return {"keep": self.keep, "base": self.base.describe()}


def parity_masked(D: MultiplierStrategy, keep: str) -> ParityMasked:
    return ParityMasked(D, keep)


@dataclass(frozen=True)
class TailSwitch(MultiplierStrategy):
    """The identity gamble before step ``n_start``, ``base`` from then on."""

    base: MultiplierStrategy
    n_start: int

    def __post_init__(self):
        if self.n_start < 1:
            raise DomainError("n_start must be >= 1")

    @property
    def name(self):
        return f"{self.base.name}-from-{self.n_start}"

    def multipliers(self, bits):
        m1, m0 = self.base.multipliers(bits)
        off = _step_index(bits) < self.n_start
        return np.where(off, 1.0, m1), np.where(off, 1.0, m0)

    def params(self):
        return {"n_start": self.n_start, "base": self.base.describe()}


def tail_switch(D: MultiplierStrategy, n_start: int) -> TailSwitch:
    return TailSwitch(D, n_start)


@dataclass(frozen=True)
class SubmartingaleS:
    """Running sum of ``f(x_k)`` minus its lower forecast expectation; a submartingale."""

    f: Gamble
    system: ForecastingSystem

    @property
    def bound(self) -> float:
        return max(1.0, self.f.range)

    def increments(self, bits) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.system.bounds(bits)
        e = lower_expectation_arrays(lo, hi, self.f.f1, self.f.f0)
        return self.f.f1 - e, self.f.f0 - e

    def increment(self, s) -> Gamble:
        d1, d0 = self.increments(as_bits(s))
        return Gamble(float(d1[-1]), float(d0[-1]))

    def realized_increments(self, bits) -> np.ndarray:
        bits = as_bits(bits)
        d1, d0 = self.increments(bits)
        return np.where(bits == 1, d1[:-1], d0[:-1])


@dataclass(frozen=True)
class CalibrationParams:
    xi: float
    B: float
    epsilon: float | None = None

    def __post_init__(self):
        if not self.B > 0:
            raise DomainError("B must be positive")
        if not 0.0 < self.xi < 1.0 / self.B:
            raise DomainError(f"xi must lie in (0, 1/B) = (0, {1.0 / self.B}), got {self.xi}")

    @classmethod
    def for_gamble(cls, f: Gamble, epsilon: float) -> CalibrationParams:
        B = max(1.0, f.range)
        if not 0.0 < epsilon < B:
            raise DomainError(f"epsilon must lie in (0, B) = (0, {B})")
        return cls(epsilon / (2.0 * B * B), B, epsilon)


@dataclass(frozen=True)
class CalibrationStrategy(MultiplierStrategy):
    """``D(s) = 1 - xi * sel(s) * dS(s)``; profits when the selected average of ``S`` goes negative."""

    S: SubmartingaleS
    sel: SelectionProcess
    cal: CalibrationParams

    name = "calibration"

    def multipliers(self, bits):
        d1, d0 = self.S.increments(bits)
        w = self.cal.xi * self.sel.mask(bits)
        return 1.0 - w * d1, 1.0 - w * d0

    def params(self):
        return {"f": [self.S.f.f1, self.S.f.f0], "selection": self.sel.describe(),
                "xi": self.cal.xi, "B": self.cal.B}


def calibration_strategy(S: SubmartingaleS, sel: SelectionProcess,
                         params: CalibrationParams) -> CalibrationStrategy:
    return CalibrationStrategy(S, sel, params)


@dataclass(frozen=True)
class CalibrationMixture(CapitalProcess):
    """``sum_r 2**-r P_r + 2**-R`` with ``P_r`` the calibration capital at ``xi_r = 1/(2**(r+1) B**2)``."""

    system: ForecastingSystem
    f: Gamble
    sel: SelectionProcess
    R: int = 20

    def __post_init__(self):
        if self.R < 1:
            raise DomainError("mixture needs R >= 1")

    @property
    def name(self):
        tag = "up" if self.f.f1 < self.f.f0 else "down"
        return f"calibration-mixture-{tag}-{self.sel.describe()}"

    @property
    def S(self) -> SubmartingaleS:
        return SubmartingaleS(self.f, self.system)

    def xis(self) -> np.ndarray:
        B = self.S.bound
        r = np.arange(1, self.R + 1)
        return 1.0 / (2.0 ** (r + 1) * B * B)

    def log_capital(self, bits):
        bits = as_bits(bits)
        inc = self.S.realized_increments(bits)
        sel = self.sel.mask(bits)[:-1].astype(np.float64)
        r = np.arange(1, self.R + 1)
        return kernels.mixture_log_capital(inc, sel, self.xis(), -r * LN2, -self.R * LN2)

    def components(self) -> list[CalibrationStrategy]:
        B = self.S.bound
        return [CalibrationStrategy(self.S, self.sel, CalibrationParams(x, B)) for x in self.xis()]

    def params(self):
        return {"system": self.system.to_dict(), "f": [self.f.f1, self.f.f0],
                "selection": self.sel.describe(), "R": self.R}


def mixture_calibration(system: ForecastingSystem, f: Gamble, sel: SelectionProcess,
                        R: int = 20) -> CalibrationMixture:
    return CalibrationMixture(system, f, sel, R)


@dataclass(frozen=True)
class CappedMixture(CapitalProcess):
    """``sum_n 2**-n T_n + 2**-n_max`` where ``T_n`` freezes at ``2**n`` once ``T`` has reached it."""

    base: CapitalProcess
    n_max: int = 40
    # levels count as reached within this log-slack, so exact powers of two are not missed
    slack: float = 1e-12

    def __post_init__(self):
        if self.n_max < 1:
            raise DomainError("n_max must be >= 1")

    @property
    def name(self):
        return f"capped-{self.base.name}"

    def log_capital(self, bits):
        return kernels.cap_mix_log(self.base.log_capital(bits), self.n_max, self.slack)

    def params(self):
        return {"n_max": self.n_max, "base": self.base.describe()}


def cap_and_mix(T: CapitalProcess, levels: int = 40) -> CappedMixture:
    return CappedMixture(T, levels)


@dataclass(frozen=True)
class SplitPart(MultiplierStrategy):
    """One factor of ``D = D_I * D_J``; ``side='I'`` keeps the part that profits from zeros."""

    base: MultiplierStrategy
    side: str

    @property
    def name(self):
        return f"{self.base.name}-split-{self.side}"

    def multipliers(self, bits):
        m1, m0 = self.base.multipliers(bits)
        if self.side == "I":
            return np.minimum(m1, 1.0), np.maximum(m0, 1.0)
        return np.maximum(m1, 1.0), np.minimum(m0, 1.0)

    def params(self):
        return {"side": self.side, "base": self.base.describe()}


def split_multiplier(D: MultiplierStrategy) -> tuple[SplitPart, SplitPart]:
    return SplitPart(D, "I"), SplitPart(D, "J")


def split_mismatches(D: MultiplierStrategy, situations, tol: float = 0.0) -> list[str]:
    """Situations where ``D_I(s) * D_J(s)`` differs from ``D(s)`` by more than ``tol``."""
    DI, DJ = split_multiplier(D)
    out = []
    for s in situations:
        g, a, b = D.at(s), DI.at(s), DJ.at(s)
        if abs(a.f1 * b.f1 - g.f1) > tol or abs(a.f0 * b.f0 - g.f0) > tol:
            out.append(s if isinstance(s, str) else "".join(map(str, as_bits(s))))
    return out


@dataclass(frozen=True)
class FunctionMultiplier(MultiplierStrategy):
    """Multiplier given by an arbitrary callable on situations (slow; for ad-hoc strategies)."""

    fn: Callable[[np.ndarray], Gamble]
    label: str = "function"

    @property
    def name(self):
        return self.label

    def multipliers(self, bits):
        bits = as_bits(bits)
        gs = [self.fn(bits[:k]) for k in range(bits.size + 1)]
        return np.array([g.f1 for g in gs]), np.array([g.f0 for g in gs])


def strategy_from_dict(doc: dict, system: ForecastingSystem) -> CapitalProcess:
    """Build a strategy from a battery config entry; ``system`` fills in forecast-relative kinds."""
    kind = doc.get("kind")
    try:
        if kind == "identity":
            return identity()
        if kind == "constant":
            return ConstantMultiplier(Gamble(float(doc["f1"]), float(doc["f0"])))
        if kind == "endpoint-bet":
            I = IntervalForecast(float(doc["lower"]), float(doc["upper"]))
            return endpoint_bet(I, float(doc.get("lam", 1.0)), doc.get("direction", "high"))
        if kind == "forecast-bet":
            return ForecastBet(system, float(doc.get("lam", 1.0)), doc.get("direction", "high"))
        if kind == "hellinger-half":
            return HellingerHalf()
        if kind == "hellinger-near-half":
            return HellingerNearHalf()
        if kind == "calibration-mixture":
            f = Gamble(*map(float, doc.get("gamble", [1.0, 0.0])))
            sel = parse_selection(doc.get("selection", "all"))
            target = system_from_dict(doc["system"]) if "system" in doc else system
            return CalibrationMixture(target, f, sel, int(doc.get("R", 20)))
        if kind == "calibration":
            f = Gamble(*map(float, doc.get("gamble", [1.0, 0.0])))
            S = SubmartingaleS(f, system)
            return CalibrationStrategy(S, parse_selection(doc.get("selection", "all")),
                                       CalibrationParams.for_gamble(f, float(doc["epsilon"])))
        if kind == "parity-masked":
            return ParityMasked(strategy_from_dict(doc["base"], system), doc.get("keep", "even"))
        if kind == "tail-switch":
            return TailSwitch(strategy_from_dict(doc["base"], system), int(doc["n_start"]))
        if kind == "cap-and-mix":
            return CappedMixture(strategy_from_dict(doc["base"], system), int(doc.get("levels", 40)))
    except KeyError as exc:
        raise FormatError(f"strategy {kind!r} is missing field {exc}") from None
    raise FormatError(f"unknown strategy kind {kind!r}")


def default_battery(system: ForecastingSystem, lams=(1.0, 0.5, 0.25, 0.125),
                    selections=("all", "even", "odd"), R: int = 20) -> list[CapitalProcess]:
    """Forecast-relative endpoint bets plus calibration mixtures for ``x`` and ``-x``.

    Every member is a test supermartingale for ``system``. A fair-coin system also
    gets the Hellinger bet, which catches forecasts that drift towards 1/2.
    """
    out: list[CapitalProcess] = []
    for direction in ("high", "low"):
        out.extend(ForecastBet(system, lam, direction) for lam in lams)
    for f in (INDICATOR, -INDICATOR):
        out.extend(CalibrationMixture(system, f, parse_selection(s), R) for s in selections)
    if isinstance(system, Stationary) and system.interval == IntervalForecast(0.5, 0.5):
        out.append(HellingerHalf())
    return out
