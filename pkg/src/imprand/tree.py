"""Capital processes on the binary event tree, supermartingale checks and finite-horizon expectations."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ContractError, DomainError
from .forecast import Gamble, upper_expectation_arrays
from .situations import as_bits, bitstring, check_depth, level_situations
from .systems import ForecastingSystem


@dataclass(frozen=True)
class CapitalTrajectory:
    """``log_values[k]`` is the log capital after ``k`` outcomes; ``-inf`` marks capital exactly 0."""

    log_values: np.ndarray

    def __len__(self):
        return self.log_values.size

    @property
    def horizon(self) -> int:
        return self.log_values.size - 1

    def capital(self) -> np.ndarray:
        return np.exp(self.log_values)

    @property
    def final_log(self) -> float:
        return float(self.log_values[-1])

    @property
    def max_log(self) -> float:
        return float(self.log_values.max())

    @property
    def argmax(self) -> int:
        return int(np.argmax(self.log_values))


class CapitalProcess:
    """A non-negative process with value 1 at the root, evaluated along paths."""

    name: str = "process"

    def log_capital(self, bits) -> np.ndarray:
        """Log capital in every prefix situation of ``bits`` (``len + 1`` values)."""
        raise NotImplementedError

    def trajectory(self, bits, n: int | None = None) -> CapitalTrajectory:
        bits = as_bits(bits)
        if n is not None:
            if n > bits.size:
                raise DomainError(f"horizon {n} exceeds path length {bits.size}")
            bits = bits[:n]
        return CapitalTrajectory(self.log_capital(bits))

    def value(self, s) -> float:
        return float(np.exp(self.log_capital(as_bits(s))[-1]))

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"name": self.name, "params": self.params()}


class MultiplierStrategy(CapitalProcess):
    """Capital generated by a multiplier process: ``T(sx) = T(s) * D(s)(x)``, ``T(root) = 1``."""

    name = "multiplier"

    def multipliers(self, bits) -> tuple[np.ndarray, np.ndarray]:
        """``(D(s)(1), D(s)(0))`` for every prefix situation ``s`` of ``bits``, root first."""
        raise NotImplementedError

    def at(self, s) -> Gamble:
        m1, m0 = self.multipliers(as_bits(s))
        return Gamble(float(m1[-1]), float(m0[-1]))

    def log_capital(self, bits) -> np.ndarray:
        bits = as_bits(bits)
        m1, m0 = self.multipliers(bits)
        logs, bad = kernels.log_capital(m1[:-1], m0[:-1], bits)
        if bad >= 0:
            raise ContractError(
                f"{self.name}: negative multiplier in situation {bitstring(bits[:bad])!r}")
        return logs


def capital_from_multiplier(D: MultiplierStrategy, path, n: int) -> CapitalTrajectory:
    return D.trajectory(path, n)


@dataclass(frozen=True)
class Violation:
    situation: str
    excess: float


def validate_multiplier(D: MultiplierStrategy, system: ForecastingSystem,
                        situations: Iterable, tol: float = 1e-9) -> list[Violation]:
    """Situations where the upper expectation of ``D(s)`` exceeds ``1 + tol``."""
    out = []
    for s in situations:
        bits = as_bits(s)
        g = D.at(bits)
        lo, hi = system.bounds(bits)
        ue = float(upper_expectation_arrays(lo[-1], hi[-1], g.f1, g.f0))
        if ue > 1.0 + tol or g.f1 < 0 or g.f0 < 0:
            out.append(Violation(bitstring(bits), ue - 1.0))
    return out


def validate_multiplier_along(D: MultiplierStrategy, system: ForecastingSystem, bits,
                              tol: float = 1e-9) -> list[Violation]:
    """Vectorised check in every prefix situation of ``bits``."""
    bits = as_bits(bits)
    m1, m0 = D.multipliers(bits)
    lo, hi = system.bounds(bits)
    excess = upper_expectation_arrays(lo, hi, m1, m0) - 1.0
    bad = np.flatnonzero((excess > tol) | (m1 < 0) | (m0 < 0))
    return [Violation(bitstring(bits[:k]), float(excess[k])) for k in bad]


def validate_multiplier_tree(D: MultiplierStrategy, system: ForecastingSystem, depth: int,
                             tol: float = 1e-9) -> list[Violation]:
    """Check every situation shorter than ``depth``."""
    check_depth(depth)
    if depth == 0:
        return []
    leaves = level_situations(depth - 1)
    seen = set()
    out = []
    for leaf in leaves:
        for v in validate_multiplier_along(D, system, leaf, tol):
            if v.situation not in seen:
                seen.add(v.situation)
                out.append(v)
    return out


def process_levels(process: CapitalProcess, depth: int) -> list[np.ndarray]:
    """Materialise ``process`` on the complete tree down to ``depth`` (level ``d`` has ``2**d`` values)."""
    check_depth(depth)
    levels = [np.empty(2**d) for d in range(depth + 1)]
    for i, leaf in enumerate(level_situations(depth)):
        vals = np.exp(process.log_capital(leaf))
        for d in range(depth + 1):
            levels[d][i >> (depth - d)] = vals[d]
    return levels


def validate_supermartingale(levels: Sequence, system: ForecastingSystem,
                             tol: float = 1e-9) -> list[Violation]:
    """Internal nodes where the upper expectation of the process increment exceeds ``tol``."""
    levels = [np.asarray(v, dtype=np.float64) for v in levels]
    for d, v in enumerate(levels):
        if v.shape != (2**d,):
            raise DomainError(f"level {d} must hold {2**d} values, got shape {v.shape}")
    out = []
    for d in range(len(levels) - 1):
        parent, child = levels[d], levels[d + 1]
        lo, hi = system.level(d)
        ue = upper_expectation_arrays(lo, hi, child[1::2] - parent, child[0::2] - parent)
        for i in np.flatnonzero(ue > tol):
            out.append(Violation(bitstring(level_situations(d)[i]) if d else "", float(ue[i])))
    return out


@dataclass(frozen=True)
class FiniteGamble:
    """A gamble that depends on the first ``depth`` outcomes only; ``values`` in lexicographic order."""

    depth: int
    values: np.ndarray

    def __post_init__(self):
        check_depth(self.depth)
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (2**self.depth,):
            raise DomainError(f"a depth-{self.depth} gamble needs {2**self.depth} values")
        if not np.all(np.isfinite(vals)):
            raise DomainError("gamble values must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, depth: int, fn) -> FiniteGamble:
        return cls(depth, np.array([fn(row) for row in level_situations(depth)], dtype=np.float64))

    def __neg__(self):
        return FiniteGamble(self.depth, -self.values)


def _flat_bounds(system: ForecastingSystem, depth: int):
    lo, hi = [], []
    for d in range(depth):
        l, h = system.level(d)
        lo.append(l)
        hi.append(h)
    if not lo:
        return np.empty(0), np.empty(0)
    return np.concatenate(lo), np.concatenate(hi)


def finite_horizon_lower_expectation(system: ForecastingSystem, g: FiniteGamble) -> float:
    lo, hi = _flat_bounds(system, g.depth)
    return kernels.backward_lower(g.values, lo, hi, g.depth)


def finite_horizon_upper_expectation(system: ForecastingSystem, g: FiniteGamble) -> float:
    return -finite_horizon_lower_expectation(system, -g)


@dataclass(frozen=True)
class VilleVerdict:
    reject: bool
    max_log_capital: float
    max_step: int
    crossing_step: int | None
    threshold: float

    @property
    def label(self) -> str:
        return "REJECT" if self.reject else "NO-EVIDENCE"

    @property
    def max_capital(self) -> float:
        return math.exp(self.max_log_capital)


def ville_threshold_verdict(traj: CapitalTrajectory, K: float) -> VilleVerdict:
    """REJECT when the capital ever reaches ``K`` (Ville level ``1/K``)."""
    if not K > 1:
        raise DomainError("Ville threshold K must exceed 1")
    logs = traj.log_values
    crossed = np.flatnonzero(logs >= math.log(K)) if math.isfinite(K) else np.empty(0, dtype=int)
    return VilleVerdict(
        reject=bool(crossed.size),
        max_log_capital=traj.max_log,
        max_step=traj.argmax,
        crossing_step=int(crossed[0]) if crossed.size else None,
        threshold=K,
    )
