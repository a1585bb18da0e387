import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imprand.audit import church_check, frequency_slack
from imprand.errors import ContractError, DomainError
from imprand.forecast import IntervalForecast
from imprand.gen import RealityPolicy, counter_uniforms, path_seed, sample_path
from imprand.selection import AllSteps
from imprand.systems import AlternatingPQ, DepthPeriodic, NearHalf, Stationary, Table, Vacuous


def test_forced_ones():
    for kind in ("fixed-precise", "lower", "upper", "uniform", "alternating"):
        bits = sample_path(Stationary(IntervalForecast(1, 1)), RealityPolicy(kind), 3, 50)
        assert np.all(bits == 1)


def test_alternating_zero_one():
    bits = sample_path(AlternatingPQ(0, 1), RealityPolicy(), 11, 8)
    assert bits.tolist() == [1, 0, 1, 0, 1, 0, 1, 0]


@pytest.mark.parametrize("system", [NearHalf(), Vacuous(), Table({"1": IntervalForecast(0.9, 1)})])
def test_determinism(system):
    a = sample_path(system, RealityPolicy("uniform"), 99, 300)
    b = sample_path(system, RealityPolicy("uniform"), 99, 300)
    c = sample_path(system, RealityPolicy("uniform"), 100, 300)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_table_and_depth_paths_agree():
    # the sequential (table) and vectorised (depth-only) samplers draw the same numbers
    I = IntervalForecast(0.2, 0.7)
    a = sample_path(Stationary(I), RealityPolicy("uniform"), 5, 400)
    b = sample_path(Table({}, I), RealityPolicy("uniform"), 5, 400)
    assert np.array_equal(a, b)


@settings(max_examples=50)
@given(st.integers(0, 2**32), st.integers(0, 100), st.integers(1, 50), st.integers(0, 50))
def test_counter_uniforms_chunking(seed, start, a, b):
    whole = counter_uniforms(seed, 0, start, a + b)
    assert np.array_equal(whole[:a], counter_uniforms(seed, 0, start, a))
    assert np.array_equal(whole[a:], counter_uniforms(seed, 0, start + a, b))
    assert np.all((whole >= 0) & (whole < 1))


def test_counter_streams_differ():
    assert not np.array_equal(counter_uniforms(1, 0, 0, 10), counter_uniforms(1, 1, 0, 10))


def test_policy_choices_inside_interval(rng):
    lo = rng.uniform(0, 0.5, 100)
    hi = lo + rng.uniform(0, 0.5, 100)
    steps = np.arange(1, 101)
    for kind in ("fixed-precise", "lower", "upper", "uniform", "alternating"):
        p = RealityPolicy(kind, 0.3).choose(lo, hi, steps, 1)
        assert np.all((p >= lo) & (p <= hi))
    p = RealityPolicy("alternating").choose(lo, hi, steps, 1)
    assert np.array_equal(p[::2], lo[::2]) and np.array_equal(p[1::2], hi[1::2])


def test_bad_arguments():
    with pytest.raises(DomainError):
        RealityPolicy("magic")
    with pytest.raises(DomainError):
        RealityPolicy(weight=1.5)
    with pytest.raises(DomainError):
        sample_path(Vacuous(), horizon=0)
    with pytest.raises(DomainError):
        sample_path(Vacuous(), seed=-1)


def test_contract_error_when_policy_escapes(monkeypatch):
    monkeypatch.setattr(RealityPolicy, "choose", lambda self, lo, hi, steps, seed, start=0: hi + 0.1)
    with pytest.raises(ContractError):
        sample_path(Stationary(IntervalForecast(0.2, 0.3)), seed=1, horizon=5)


def test_path_seed():
    assert path_seed(1, 2) == path_seed(1, 2)
    assert len({path_seed(1, i) for i in range(100)}) == 100


def test_frequency_within_slack():
    I = IntervalForecast(0.3, 0.3)
    ok = 0
    for seed in range(20):
        bits = sample_path(Stationary(I), RealityPolicy(), seed, 2000)
        rec = church_check(bits, 2000, AllSteps(), I)
        ok += rec.within
        assert rec.slack == pytest.approx(frequency_slack(2000))
    assert ok >= 19


def test_depth_periodic_sampling():
    g = DepthPeriodic((IntervalForecast(0, 0), IntervalForecast(1, 1)))
    assert sample_path(g, seed=0, horizon=6).tolist() == [0, 1, 0, 1, 0, 1]
