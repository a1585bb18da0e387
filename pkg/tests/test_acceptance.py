"""End-to-end acceptance checks A1-A10, at their stated tolerances and time budgets.

Each test records the measured quantities; the terminal summary prints one
PASS/FAIL line per criterion.
"""
from __future__ import annotations

import math
import time

import numpy as np
import pytest

from imprand.audit import (AuditConfig, church_check, consistency_simulation, frequency_slack,
                           harmonic_tail, near_half_demo, sweep_constant_intervals)
from imprand.forecast import Gamble, IntervalForecast, lower_expectation, upper_expectation
from imprand.gen import RealityPolicy, sample_path
from imprand.selection import parse_selection
from imprand.situations import level_situations
from imprand.strategies import (CalibrationParams, CalibrationStrategy, ConstantMultiplier,
                                HellingerHalf, HellingerNearHalf, SubmartingaleS, cap_and_mix,
                                endpoint_bet, split_mismatches, split_multiplier)
from imprand.systems import AlternatingPQ, NearHalf, Stationary, Table, near_half_p, near_half_q
from imprand.tree import (CapitalProcess, FiniteGamble, finite_horizon_lower_expectation,
                          process_levels, validate_multiplier, validate_supermartingale)

from .oracles import leaf_weight_matrix

pytestmark = pytest.mark.acceptance


@pytest.fixture
def report(record_property, request):
    crit = request.node.name.split("_")[1].upper()
    record_property("criterion", crit)

    def detail(text):
        record_property("detail", text)
    return detail


def test_a1_coherence(report):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = dict(c1=0.0, c2=0.0, c3=0.0, c4=0.0, conj=0.0)
    for _ in range(10_000):
        l, u = np.sort(rng.uniform(0, 1, 2))
        I = IntervalForecast(float(l), float(u))
        f = Gamble(*rng.uniform(-10, 10, 2))
        g = Gamble(*rng.uniform(-10, 10, 2))
        lam, mu = float(rng.uniform(0, 10)), float(rng.uniform(-10, 10))
        lo, up = lower_expectation(I, f), upper_expectation(I, f)
        worst["c1"] = max(worst["c1"], f.min - lo, lo - up, up - f.max)
        worst["c2"] = max(worst["c2"], abs(lower_expectation(I, f * lam) - lam * lo) / max(1, abs(lam * lo)))
        worst["c3"] = max(worst["c3"], lo + lower_expectation(I, g) - lower_expectation(I, f + g),
                          upper_expectation(I, f + g) - up - upper_expectation(I, g))
        worst["c4"] = max(worst["c4"], abs(lower_expectation(I, f + mu) - lo - mu))
        worst["conj"] = max(worst["conj"], abs(up + lower_expectation(I, -f)))
    elapsed = time.perf_counter() - t0
    report(" ".join(f"{k}={v:.1e}" for k, v in worst.items()) + f" time={elapsed:.2f}s")
    assert worst["c1"] <= 1e-12 and worst["c2"] <= 1e-12 and worst["c3"] <= 1e-12
    assert worst["c4"] <= 1e-12 and worst["conj"] == 0.0
    assert elapsed < 1.0


def test_a2_oracle_equivalence(report):
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    err = 0.0
    for depth in range(4):
        for _ in range(50):
            entries, lo, hi = {}, [], []
            for d in range(depth):
                for row in level_situations(d):
                    a, b = np.sort(rng.uniform(0, 1, 2))
                    entries["".join(map(str, row))] = IntervalForecast(float(a), float(b))
                    lo.append(a)
                    hi.append(b)
            table = Table(entries)
            W = leaf_weight_matrix(lo, hi, depth) if depth else np.ones((1, 1))
            for _ in range(50):
                g = FiniteGamble(depth, rng.normal(size=2**depth))
                err = max(err, abs(finite_horizon_lower_expectation(table, g) - (W @ g.values).min()))
    elapsed = time.perf_counter() - t0
    report(f"max_abs_err={err:.1e} time={elapsed:.2f}s")
    assert err < 1e-9 and elapsed < 5.0


def test_a3_hellinger_identities(report):
    t0 = time.perf_counter()
    n = np.arange(1, 10_001)
    norm = np.exp(1 / (2 * (n + 1))) * (np.sqrt(near_half_p(n)) + np.sqrt(near_half_q(n))) / math.sqrt(2)
    e1 = float(np.max(np.abs(norm - 1)))
    rng = np.random.default_rng(3)
    harmonic = np.concatenate(([0.0], np.cumsum(1.0 / (np.arange(1, 100_001) + 1))))
    e2 = 0.0
    for _ in range(20):
        bits = rng.integers(0, 2, 100_000).astype(np.uint8)
        total = HellingerHalf().log_capital(bits) + HellingerNearHalf().log_capital(bits)
        e2 = max(e2, float(np.max(np.abs(total - harmonic))))
    elapsed = time.perf_counter() - t0
    report(f"normalisation_err={e1:.1e} sum_err={e2:.1e} time={elapsed:.2f}s")
    assert e1 < 1e-12 and e2 < 1e-9 and elapsed < 10.0


def test_a4_near_half_rejection(report):
    t0 = time.perf_counter()
    H = harmonic_tail(100_000)
    need = H - math.log(100)
    qualifying = implied = 0
    for seed in range(50):
        demo = near_half_demo(seed, 100_000, 100.0)
        if demo.near_bounded:
            qualifying += 1
            implied += bool(demo.log_half.max() >= need - 1e-9) and demo.half_rejected
    elapsed = time.perf_counter() - t0
    report(f"H={H:.4f} need={need:.4f} qualifying={qualifying}/50 rejected={implied} time={elapsed:.1f}s")
    assert implied == qualifying and qualifying >= 49 and elapsed < 60.0


@pytest.mark.slow
def test_a5_consistency(report):
    t0 = time.perf_counter()
    cases = [("stationary[.4,.6]", Stationary(IntervalForecast(0.4, 0.6)), RealityPolicy("uniform")),
             ("alternating(.3,.7)", AlternatingPQ(0.3, 0.7), RealityPolicy()),
             ("near-half", NearHalf(), RealityPolicy())]
    fractions = {}
    for name, system, policy in cases:
        res = consistency_simulation(system, 200, 10_000, AuditConfig(ville_threshold=100),
                                     seed=5, policy=policy)
        fractions[name] = res.reject_fraction
    elapsed = time.perf_counter() - t0
    report(" ".join(f"{k}={v:.3f}" for k, v in fractions.items()) + f" time={elapsed:.1f}s")
    assert all(v <= 0.04 for v in fractions.values()) and elapsed < 300.0


def test_a6_growth_bound(report):
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    violations = active = 0
    systems = [Stationary(IntervalForecast(0.3, 0.6)), AlternatingPQ(0.2, 0.7), NearHalf(),
               Stationary(IntervalForecast(0.5, 0.5))]
    for _ in range(1000):
        system = systems[rng.integers(len(systems))]
        f = Gamble(*rng.uniform(-2, 2, 2))
        B = max(1.0, f.range)
        eps = float(rng.uniform(0.01, 0.99)) * B
        sel = parse_selection(str(rng.choice(["all", "even", "odd", "every-k:3", "after-ones:1"])))
        bits = (rng.random(int(rng.integers(1, 2000))) < rng.uniform(0, 1)).astype(np.uint8)
        S = SubmartingaleS(f, system)
        D = CalibrationStrategy(S, sel, CalibrationParams.for_gamble(f, eps))
        mask = sel.mask(bits)[:-1].astype(np.float64)
        # check every prefix where the selected average is at most -eps
        sums = np.cumsum(mask * S.realized_increments(bits))
        counts = np.cumsum(mask)
        logs = D.log_capital(bits)[1:]
        hit = (counts > 0) & (sums <= -eps * counts)
        if hit.any():
            active += 1
            bound = np.exp(eps**2 / (4 * B * B) * counts[hit])
            violations += int(np.sum(np.exp(logs[hit]) < bound - 1e-9))
    elapsed = time.perf_counter() - t0
    report(f"violations={violations} tuples_with_negative_average={active} time={elapsed:.1f}s")
    assert violations == 0 and active > 100 and elapsed < 30.0


@pytest.fixture(scope="module")
def alternating_path():
    return sample_path(AlternatingPQ(0.3, 0.7), RealityPolicy(), 20240611, 100_000)


def test_a7_sweep(report, alternating_path):
    t0 = time.perf_counter()
    rep = sweep_constant_intervals(alternating_path, 0.05)
    elapsed = time.perf_counter() - t0
    report(f"lambda_hat={rep.lambda_hat} upsilon_hat={rep.upsilon_hat} "
           f"upward_closed={rep.is_upward_closed()} minimal={rep.minimal_intervals()} time={elapsed:.1f}s")
    assert 0.25 <= rep.lambda_hat <= 0.35 and 0.65 <= rep.upsilon_hat <= 0.75
    assert rep.is_upward_closed() and elapsed < 120.0


def test_a8_frequency_bounds(report, alternating_path):
    t0 = time.perf_counter()
    sels = [parse_selection(s) for s in ("all", "even", "odd")]
    violations = 0
    worst = 0.0
    paths = [("alternating", alternating_path, IntervalForecast(0.3, 0.7))]
    for seed in range(20):
        paths.append(("alternating", sample_path(AlternatingPQ(0.3, 0.7), RealityPolicy(), seed, 100_000),
                      IntervalForecast(0.3, 0.7)))
        paths.append(("half", sample_path(Stationary(IntervalForecast(0.5, 0.5)), RealityPolicy(),
                                          seed, 100_000), IntervalForecast(0.5, 0.5)))
    for _, bits, I in paths:
        for sel in sels:
            rec = church_check(bits, bits.size, sel, I)
            violations += not rec.within
            gap = max(I.lower - rec.frequency, rec.frequency - I.upper, 0.0)
            worst = max(worst, gap / rec.slack)
    elapsed = time.perf_counter() - t0
    report(f"violations={violations}/{3 * len(paths)} worst_gap/slack={worst:.3f} "
           f"slack@5e4={frequency_slack(50_000):.4f} time={elapsed:.1f}s")
    assert violations == 0 and elapsed < 30.0


def test_a9_split(report):
    rng = np.random.default_rng(9)
    t0 = time.perf_counter()
    failures = mismatches = 0
    for _ in range(1000):
        lJ, lI, uJ, uI = np.sort(rng.uniform(0, 1, 4))
        K = IntervalForecast(float(lI), float(uJ))
        g = Gamble(*rng.uniform(0, 3, 2))
        D = ConstantMultiplier(g * (1.0 / upper_expectation(K, g) / rng.uniform(1, 1.5)))
        assert validate_multiplier(D, Stationary(K), [""], tol=1e-12) == []
        DI, DJ = split_multiplier(D)
        failures += bool(validate_multiplier(DI, Stationary(IntervalForecast(lI, uI)), [""], tol=1e-9))
        failures += bool(validate_multiplier(DJ, Stationary(IntervalForecast(lJ, uJ)), [""], tol=1e-9))
        mismatches += len(split_mismatches(D, [""], tol=1e-12))
    elapsed = time.perf_counter() - t0
    report(f"validation_failures={failures} product_mismatches={mismatches} time={elapsed:.2f}s")
    assert failures == 0 and mismatches == 0 and elapsed < 10.0


class _Fixed(CapitalProcess):
    name = "fixed"

    def __init__(self, logs):
        self.logs = logs

    def log_capital(self, bits):
        return self.logs[: len(bits) + 1]


def test_a10_capping_mixture(report):
    rng = np.random.default_rng(10)
    t0 = time.perf_counter()
    worst_margin = math.inf
    for _ in range(50):
        # random walk in log space that crosses every level 2^1 .. 2^20 and then falls back
        ups = np.sort(rng.uniform(0, 1, 19))
        levels = np.concatenate(([0.0], np.diff(np.concatenate(([0.0], ups, [1.0]))).cumsum() * 20 * math.log(2)))
        noise = rng.normal(0, 0.3, levels.size)
        logs = np.maximum.accumulate(levels + np.abs(noise) * (np.arange(levels.size) > 0))
        logs = np.concatenate((logs, logs[-1] - np.cumsum(rng.uniform(0, 3, 30))))
        out = np.exp(cap_and_mix(_Fixed(logs)).log_capital(np.zeros(logs.size - 1, np.uint8)))
        reached = np.maximum.accumulate(logs) / math.log(2) + 1e-12
        for step in range(logs.size):
            k = int(math.floor(reached[step]))
            if k >= 1:
                worst_margin = min(worst_margin, out[step] - min(k, 40))
    bad = 0
    for trial in range(20):
        lo, hi = np.sort(rng.uniform(0, 1, 2))
        system = Stationary(IntervalForecast(float(lo), float(hi)))
        base = endpoint_bet(system.interval, 1.0, "high" if trial % 2 else "low")
        bad += len(validate_supermartingale(process_levels(cap_and_mix(base, 4), 8), system, tol=1e-9))
    elapsed = time.perf_counter() - t0
    report(f"min(T'-k)={worst_margin:.2e} supermartingale_violations={bad} time={elapsed:.2f}s")
    assert worst_margin >= -1e-9 and bad == 0 and elapsed < 10.0
