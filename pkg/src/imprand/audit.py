"""Finite-horizon randomness audits built on Ville's inequality.

A battery of test supermartingales is run along a path. The battery verdict is
Ville's threshold test applied to the equal-weight mixture of the battery's
capitals: the mixture is itself a test supermartingale, so a path generated
inside the forecasting system is rejected with probability at most ``1/K``
however many strategies the battery holds. Each strategy's own crossing of
``K`` is reported as well, but only for information. An audit can only ever
produce evidence against randomness, never a certificate of it.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError, DomainError
from .forecast import INDICATOR, Gamble, IntervalForecast
from .gen import RealityPolicy, path_seed, sample_path
from .selection import SelectionProcess, parse_selection
from .situations import as_bits
from .strategies import (CalibrationMixture, HellingerHalf, HellingerNearHalf, SubmartingaleS,
                         default_battery, endpoint_bet)
from .systems import ForecastingSystem, NearHalf, Stationary
from .tree import (CapitalProcess, CapitalTrajectory, MultiplierStrategy, validate_multiplier_along,
                   ville_threshold_verdict)

DEFAULT_K = 100.0
SWEEP_LAMS = (1.0, 0.5, 0.25, 0.125)
SWEEP_SELECTIONS = ("all", "even", "odd")


def _workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    try:
        return max(1, int(os.environ.get("IMPRAND_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items, workers: int | None):
    n = _workers(workers)
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _horizon(bits: np.ndarray, n: int | None) -> int:
    n = bits.size if n is None else int(n)
    if n < 0 or n > bits.size:
        raise DomainError(f"horizon {n} exceeds path length {bits.size}")
    return n


def _finite(x: float) -> float | None:
    return float(x) if math.isfinite(x) else None


def battery_log_capital(logs: Sequence[np.ndarray]) -> np.ndarray:
    """Log of the equal-weight mixture of the given capitals (constant 1 for an empty battery)."""
    if len(logs) == 0:
        raise DomainError("battery mixture needs at least one capital")
    stacked = np.vstack(logs)
    return np.logaddexp.reduce(stacked, axis=0) - math.log(stacked.shape[0])


def frequency_slack(m: int) -> float:
    """Loose finite-sample envelope ``4 sqrt(ln m / m)`` for a frequency over ``m`` selected steps."""
    return 4.0 * math.sqrt(math.log(max(m, 2)) / m)


def selected_average(path, n: int, sel: SelectionProcess, f: Gamble,
                     system: ForecastingSystem) -> float:
    """Average of ``f(x_{k+1}) - lower_expectation(f)`` over the selected steps among the first ``n``."""
    bits = as_bits(path)
    bits = bits[: _horizon(bits, n)]
    inc = SubmartingaleS(f, system).realized_increments(bits)
    s = sel.mask(bits)[:-1].astype(np.uint8)
    total = int(s.sum())
    if total == 0:
        return 0.0
    return float(np.dot(s, inc) / total)


@dataclass(frozen=True)
class ChurchRecord:
    selection: str
    n_selected: int
    frequency: float | None
    slack: float | None
    within: bool | None
    lower: float
    upper: float

    def to_dict(self):
        return dict(self.__dict__)


def church_check(path, n: int, sel: SelectionProcess, I: IntervalForecast) -> ChurchRecord:
    """Selected relative frequency of ones against ``I`` widened by the frequency slack."""
    bits = as_bits(path)
    bits = bits[: _horizon(bits, n)]
    s = sel.mask(bits)[:-1].astype(np.uint8)
    m = int(s.sum())
    if m == 0:
        return ChurchRecord(sel.describe(), 0, None, None, None, I.lower, I.upper)
    freq = int(np.count_nonzero(s & bits)) / m
    sl = frequency_slack(m)
    within = I.lower - sl <= freq <= I.upper + sl
    return ChurchRecord(sel.describe(), m, freq, sl, bool(within), I.lower, I.upper)


@dataclass
class AuditConfig:
    horizon: int | None = None
    ville_threshold: float = DEFAULT_K
    strategies: Sequence[CapitalProcess] | None = None
    tolerance: float = 1e-9
    selections: Sequence[str] = SWEEP_SELECTIONS

    def __post_init__(self):
        if self.horizon is not None and self.horizon < 1:
            raise DomainError("horizon must be >= 1")
        if not self.ville_threshold > 1:
            raise DomainError("Ville threshold K must exceed 1")


@dataclass
class StrategyResult:
    name: str
    params: dict
    verdict: str
    max_log_capital: float | None = None
    argmax_step: int | None = None
    final_log_capital: float | None = None
    crossing_step: int | None = None
    error: str | None = None
    trajectory: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self):
        d = {k: v for k, v in self.__dict__.items() if k != "trajectory"}
        for k in ("max_log_capital", "final_log_capital"):
            if d[k] is not None:
                d[k] = _finite(d[k])
        return d


@dataclass
class AuditReport:
    system: dict
    horizon: int
    K: float
    results: list[StrategyResult]
    frequencies: list[dict]
    battery_max_log_capital: float = 0.0
    battery_crossing_step: int | None = None

    @property
    def reject(self) -> bool:
        return self.battery_crossing_step is not None

    @property
    def verdict(self) -> str:
        return "REJECT" if self.reject else "NO-EVIDENCE"

    @property
    def errors(self) -> list[StrategyResult]:
        return [r for r in self.results if r.error is not None]

    def to_dict(self):
        return {
            "system": self.system,
            "horizon": self.horizon,
            "K": self.K if math.isfinite(self.K) else None,
            "verdict": self.verdict,
            "battery_max_log_capital": _finite(self.battery_max_log_capital),
            "battery_crossing_step": self.battery_crossing_step,
            "n_errors": len(self.errors),
            "strategies": [r.to_dict() for r in self.results],
            "frequencies": self.frequencies,
        }

    def trajectory_rows(self, stride: int = 1):
        """``(step, strategy, log_capital)`` rows; the last step is always included."""
        for r in self.results:
            if r.trajectory is None:
                continue
            steps = list(range(0, r.trajectory.size, stride))
            if steps[-1] != r.trajectory.size - 1:
                steps.append(r.trajectory.size - 1)
            for k in steps:
                yield k, r.name, float(r.trajectory[k])


def run_strategy(strategy: CapitalProcess, bits: np.ndarray, system: ForecastingSystem,
                 K: float, tol: float, keep_trajectory: bool = True) -> StrategyResult:
    try:
        if isinstance(strategy, MultiplierStrategy):
            bad = validate_multiplier_along(strategy, system, bits[:-1] if bits.size else bits, tol)
            if bad:
                v = bad[0]
                raise ContractError(
                    f"{strategy.name} is not a supermartingale multiplier for {system.describe()}: "
                    f"upper expectation exceeds 1 by {v.excess:.3g} in situation {v.situation!r}")
        traj = strategy.trajectory(bits)
    except ContractError as exc:
        return StrategyResult(strategy.name, strategy.params(), "ERROR", error=str(exc))
    v = ville_threshold_verdict(traj, K)
    return StrategyResult(
        name=strategy.name,
        params=strategy.params(),
        verdict=v.label,
        max_log_capital=v.max_log_capital,
        argmax_step=v.max_step,
        final_log_capital=traj.final_log,
        crossing_step=v.crossing_step,
        trajectory=traj.log_values if keep_trajectory else None,
    )


def _frequency_summary(bits, system, selections) -> list[dict]:
    out = []
    for name in selections:
        sel = parse_selection(name)
        s = sel.mask(bits)[:-1].astype(np.uint8)
        m = int(s.sum())
        out.append({
            "selection": sel.describe(),
            "n_selected": m,
            "frequency": int(np.count_nonzero(s & bits)) / m if m else None,
            "avg_excess_up": selected_average(bits, bits.size, sel, -INDICATOR, system),
            "avg_excess_down": selected_average(bits, bits.size, sel, INDICATOR, system),
        })
    return out


def audit(path, system: ForecastingSystem, cfg: AuditConfig | None = None,
          keep_trajectories: bool = True) -> AuditReport:
    """Run the battery along ``path`` and apply the Ville threshold to each capital."""
    cfg = cfg or AuditConfig()
    bits = as_bits(path)
    bits = bits[: _horizon(bits, cfg.horizon)]
    strategies = cfg.strategies if cfg.strategies is not None else default_battery(system)
    results = [run_strategy(s, bits, system, cfg.ville_threshold, cfg.tolerance) for s in strategies]
    mix = _battery_verdict(results, cfg.ville_threshold)
    if not keep_trajectories:
        for r in results:
            r.trajectory = None
    return AuditReport(system.to_dict(), int(bits.size), cfg.ville_threshold, results,
                       _frequency_summary(bits, system, cfg.selections),
                       mix.max_log_capital, mix.crossing_step)


def _battery_verdict(results: Sequence[StrategyResult], K: float):
    # strategies that broke their contract are left out; they have no capital
    logs = [r.trajectory for r in results if r.trajectory is not None]
    if not logs:
        return ville_threshold_verdict(CapitalTrajectory(np.zeros(1)), K)
    return ville_threshold_verdict(CapitalTrajectory(battery_log_capital(logs)), K)


def side_battery(value: float, side: str, lams=SWEEP_LAMS, selections=SWEEP_SELECTIONS,
                 R: int = 20) -> list[CapitalProcess]:
    """Sweep strategies that look at one endpoint only.

    ``side='lower'`` bets on frequencies below ``value`` and is valid for every
    stationary ``[value, u]``; ``side='upper'`` bets above ``value``. Each
    capital shrinks when the interval grows, which makes sweep verdicts monotone.
    """
    if side == "lower":
        system, f, direction = Stationary(IntervalForecast(value, 1.0)), INDICATOR, "low"
        I = IntervalForecast(value, 1.0)
    else:
        system, f, direction = Stationary(IntervalForecast(0.0, value)), -INDICATOR, "high"
        I = IntervalForecast(0.0, value)
    out: list[CapitalProcess] = [endpoint_bet(I, lam, direction) for lam in lams]
    out.extend(CalibrationMixture(system, f, parse_selection(s), R) for s in selections)
    return out


@dataclass
class SweepReport:
    h: float
    grid: np.ndarray
    horizon: int
    K: float
    reject: np.ndarray  # [i, j]: verdict for [grid[i], grid[j]]; only i <= j is meaningful
    max_log: np.ndarray  # [i, j]: running maximum of the battery mixture's log-capital

    def cells(self):
        """``(l, u, reject, max_log_capital)`` for every grid interval ``l <= u``."""
        g = self.grid
        for i in range(g.size):
            for j in range(i, g.size):
                yield float(g[i]), float(g[j]), bool(self.reject[i, j]), float(self.max_log[i, j])

    def surviving_matrix(self) -> np.ndarray:
        """Boolean matrix ``[i, j]`` true when ``[grid[i], grid[j]]`` survives; false below the diagonal."""
        n = self.grid.size
        return ~self.reject & np.triu(np.ones((n, n), dtype=bool))

    def minimal_intervals(self) -> list[tuple[float, float]]:
        ok = self.surviving_matrix()
        out = []
        for i, j in zip(*np.nonzero(ok)):
            shrink_l = i + 1 <= j and ok[i + 1, j]
            shrink_u = j - 1 >= i and ok[i, j - 1]
            if not (shrink_l or shrink_u):
                out.append((float(self.grid[i]), float(self.grid[j])))
        return out

    @property
    def lambda_hat(self) -> float | None:
        m = self.minimal_intervals()
        return max(l for l, _ in m) if m else None

    @property
    def upsilon_hat(self) -> float | None:
        m = self.minimal_intervals()
        return min(u for _, u in m) if m else None

    def is_upward_closed(self) -> bool:
        ok = self.surviving_matrix()
        n = self.grid.size
        for i, j in zip(*np.nonzero(ok)):
            if (i > 0 and not ok[i - 1, j]) or (j < n - 1 and not ok[i, j + 1]):
                return False
        return True

    def to_dict(self):
        lam, ups = self.lambda_hat, self.upsilon_hat
        return {
            "h": self.h,
            "horizon": self.horizon,
            "K": self.K if math.isfinite(self.K) else None,
            "lambda_hat": lam,
            "upsilon_hat": ups,
            "intersection_nonempty": lam is not None and ups is not None and lam <= ups,
            "upward_closed": self.is_upward_closed(),
            "minimal_intervals": [list(m) for m in self.minimal_intervals()],
            "n_cells": int(self.grid.size * (self.grid.size + 1) // 2),
            "n_surviving": int(self.surviving_matrix().sum()),
        }


def grid_points(h: float) -> np.ndarray:
    """Grid ``0, h, ..., 1``; ``h`` must be ``1/m`` with ``4 <= m <= 100``."""
    m = round(1.0 / h) if h > 0 else 0
    if not 4 <= m <= 100 or abs(m * h - 1.0) > 1e-9:
        raise DomainError(f"grid step must be 1/m for an integer 4 <= m <= 100, got {h}")
    return np.arange(m + 1) / m


def sweep_constant_intervals(path, h: float, cfg: AuditConfig | None = None,
                             workers: int | None = None, R: int = 20) -> SweepReport:
    """Verdicts for every stationary grid interval ``[l, u]``.

    The battery for ``[l, u]`` is the lower-side battery of ``l`` together with
    the upper-side battery of ``u``, judged by its equal-weight mixture exactly
    as ``audit`` would. Every member's capital shrinks as the interval grows, so
    the surviving set is upward-closed.
    """
    cfg = cfg or AuditConfig()
    bits = as_bits(path)
    bits = bits[: _horizon(bits, cfg.horizon)]
    grid = grid_points(h)
    K = cfg.ville_threshold
    n_side = len(side_battery(0.5, "lower", R=R))

    def side_sum(task):
        # log of the summed capitals of one side's battery
        value, side = task
        logs = [s.log_capital(bits) for s in side_battery(value, side, R=R)]
        return np.logaddexp.reduce(np.vstack(logs), axis=0)

    tasks = [(float(v), "lower") for v in grid] + [(float(v), "upper") for v in grid]
    sums = _map(side_sum, tasks, workers)
    lower, upper = np.vstack(sums[: grid.size]), np.vstack(sums[grid.size:])
    n = grid.size
    max_log = np.full((n, n), -math.inf)
    for i in range(n):
        mix = np.logaddexp(lower[i][None, :], upper[i:]) - math.log(2 * n_side)
        max_log[i, i:] = mix.max(axis=1)
    threshold = math.log(K) if math.isfinite(K) else math.inf
    reject = (max_log >= threshold) & np.triu(np.ones((n, n), dtype=bool))
    return SweepReport(h=float(h), grid=grid, horizon=int(bits.size), K=K,
                       reject=reject, max_log=max_log)


@dataclass(frozen=True)
class SimulationResult:
    reject_fraction: float
    n_rejected: int
    n_paths: int
    K: float

    @property
    def bound(self) -> float:
        a = 0.0 if math.isinf(self.K) else 1.0 / self.K
        return a + 3.0 * math.sqrt(a * (1.0 - a) / self.n_paths)

    @property
    def within_bound(self) -> bool:
        return self.reject_fraction <= self.bound


def consistency_simulation(system: ForecastingSystem, n_paths: int, horizon: int,
                           cfg: AuditConfig | None = None, seed: int = 0,
                           policy: RealityPolicy | None = None,
                           workers: int | None = None) -> SimulationResult:
    """Sample paths inside ``system`` and audit each against ``system`` itself."""
    cfg = cfg or AuditConfig()
    if n_paths < 1:
        raise DomainError("n_paths must be >= 1")
    strategies = cfg.strategies if cfg.strategies is not None else default_battery(system)
    K = cfg.ville_threshold

    def one(i):
        bits = sample_path(system, policy, path_seed(seed, i), horizon)
        results = [run_strategy(s, bits, system, K, cfg.tolerance) for s in strategies]
        return _battery_verdict(results, K).reject

    flags = _map(one, range(n_paths), workers)
    k = int(sum(flags))
    return SimulationResult(k / n_paths, k, n_paths, K)


def harmonic_tail(n: int) -> float:
    """``sum_{k=1}^n 1/(k+1)``."""
    return math.fsum(1.0 / (k + 1) for k in range(1, n + 1))


@dataclass
class NearHalfDemo:
    seed: int
    horizon: int
    K: float
    log_half: np.ndarray
    log_near: np.ndarray

    @property
    def harmonic(self) -> float:
        return harmonic_tail(self.horizon)

    @property
    def sum_check_error(self) -> float:
        return abs(float(self.log_half[-1] + self.log_near[-1]) - self.harmonic)

    @property
    def near_bounded(self) -> bool:
        return float(self.log_near.max()) < math.log(self.K)

    @property
    def half_rejected(self) -> bool:
        return float(self.log_half.max()) >= math.log(self.K)

    def to_dict(self):
        return {
            "seed": self.seed,
            "horizon": self.horizon,
            "K": self.K,
            "harmonic_sum": self.harmonic,
            "final_log_half": float(self.log_half[-1]),
            "final_log_near_half": float(self.log_near[-1]),
            "max_log_half": float(self.log_half.max()),
            "max_log_near_half": float(self.log_near.max()),
            "sum_check_error": self.sum_check_error,
            "stationary_half_rejected": self.half_rejected,
            "near_half_rejected": not self.near_bounded,
        }


def near_half_demo(seed: int, horizon: int, K: float = DEFAULT_K) -> NearHalfDemo:
    """Sample from the near-half system and bet against 1/2 with the Hellinger pair."""
    bits = sample_path(NearHalf(), RealityPolicy(), seed, horizon)
    return NearHalfDemo(seed, horizon, K, HellingerHalf().log_capital(bits),
                        HellingerNearHalf().log_capital(bits))
