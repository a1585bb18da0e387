"""Seeded outcome paths with Reality choosing a precise probability inside each forecast.

Uniform variates come from numpy's Philox counter-based generator keyed by
``(seed, stream)``; the variate for outcome ``k`` sits at counter position
``k - 1`` regardless of how the path is chunked.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError
from .systems import ForecastingSystem

BERNOULLI_STREAM = 0
POLICY_STREAM = 1

POLICY_KINDS = ("fixed-precise", "lower", "upper", "uniform", "alternating")


def counter_uniforms(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """Uniforms on [0, 1) at counter positions ``start .. start + count - 1``."""
    if count < 0 or start < 0:
        raise DomainError("start and count must be non-negative")
    key = np.array([seed, stream], dtype=np.uint64)
    skip = start % 4
    bg = np.random.Philox(key=key, counter=np.array([start // 4, 0, 0, 0], dtype=np.uint64))
    raw = bg.random_raw(count + skip)[skip:]
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True)
class RealityPolicy:
    """How Reality picks ``p`` in ``[l, u]``.

    ``fixed-precise`` uses ``l + weight * (u - l)`` (midpoint by default);
    ``alternating`` plays ``l`` for odd-numbered outcomes and ``u`` for even ones;
    ``uniform`` draws ``p`` uniformly from the interval each step.
    """

    kind: str = "fixed-precise"
    weight: float = 0.5

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise DomainError(f"unknown reality policy {self.kind!r}")
        if not 0.0 <= self.weight <= 1.0:
            raise DomainError("policy weight must lie in [0, 1]")

    def choose(self, lo, hi, steps, seed: int, start: int = 0) -> np.ndarray:
        lo, hi = np.asarray(lo, dtype=np.float64), np.asarray(hi, dtype=np.float64)
        if self.kind == "fixed-precise":
            w = self.weight
        elif self.kind == "lower":
            w = 0.0
        elif self.kind == "upper":
            w = 1.0
        elif self.kind == "alternating":
            w = (np.asarray(steps) % 2 == 0).astype(np.float64)
        else:
            w = counter_uniforms(seed, POLICY_STREAM, start, lo.size)
        return np.clip(lo + w * (hi - lo), lo, hi)


def sample_path(system: ForecastingSystem, policy: RealityPolicy | None = None,
                seed: int = 0, horizon: int = 1) -> np.ndarray:
    """Outcomes ``x_1..x_N``, each Bernoulli(p_k) with ``p_k`` chosen in the forecast for ``x_k``."""
    policy = policy or RealityPolicy()
    if horizon < 1:
        raise DomainError("horizon must be >= 1")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise DomainError("seed must be a 64-bit unsigned integer")
    u = counter_uniforms(seed, BERNOULLI_STREAM, 0, horizon)
    if system.depth_only:
        lo, hi = system.by_length(np.arange(horizon))
        p = policy.choose(lo, hi, np.arange(1, horizon + 1), seed)
        _check_inside(p, lo, hi)
        return (u < p).astype(np.uint8)
    bits = np.zeros(horizon, dtype=np.uint8)
    for k in range(horizon):
        I = system.forecast(bits[:k])
        p = policy.choose(np.array([I.lower]), np.array([I.upper]), np.array([k + 1]), seed, k)
        _check_inside(p, np.array([I.lower]), np.array([I.upper]))
        bits[k] = u[k] < p[0]
    return bits


def _check_inside(p, lo, hi) -> None:
    if np.any(p < lo) or np.any(p > hi):
        raise ContractError("reality policy left the forecast interval")


def path_seed(seed: int, index: int) -> int:
    """Deterministic 64-bit child seed for the ``index``-th path of a simulation."""
    ss = np.random.SeedSequence([int(seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
