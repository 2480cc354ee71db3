import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from psifb import InsufficientBudgetError
from psifb.schedules import (
    Schedule,
    log_bar,
    schedule_gg,
    schedule_sh,
    schedule_sr,
    schedule_uniform,
    validate_schedule,
)


def test_sr_worked_example():
    s = schedule_sr(4, 100)
    assert float(log_bar(4)) == pytest.approx(19 / 12)
    assert s.lam == (4, 3, 2, 1) and s.t == (16, 5, 10)
    assert s.cumulative == (16, 21, 31) and s.total == 99
    assert validate_schedule(s, 4, 100).ok


def test_sr_two_arms():
    s = schedule_sr(2, 4)
    assert s.lam == (2, 1) and s.t == (1,)


def test_sh_worked_examples():
    s = schedule_sh(8, 120)
    assert s.lam == (8, 4, 2, 1) and s.t == (5, 10, 20) and s.total == 120
    s = schedule_sh(3, 60)
    assert s.lam == (3, 2, 1) and s.t == (10, 15)


def test_gg_worked_example():
    s = schedule_gg(8, 240, 3)
    assert s.lam == (8, 4, 2, 1) and s.t == (10, 10, 20)
    assert s.cumulative == (10, 20, 40) and s.total == 160
    assert schedule_gg(7, 100, 1).lam == (7, 1)


def test_uniform():
    s = schedule_uniform(10, 105)
    assert s.lam == (10, 0) and s.t == (10,) and s.total == 100
    assert validate_schedule(s, 10, 105).ok


def test_validate_reports_each_violation():
    bad = Schedule(lam=(4, 3, 3, 1), t=(5, 5, 5))
    assert "lam_r > lam_(r+1) fails at r=2" in validate_schedule(bad, 4, 100).violations
    assert not validate_schedule(Schedule(lam=(5, 3, 2, 1), t=(5, 5, 5)), 4, 100)
    assert not validate_schedule(Schedule(lam=(4, 2), t=(5,)), 4, 100)
    assert not validate_schedule(Schedule(lam=(4, 1), t=(100,)), 4, 100)
    assert not validate_schedule(Schedule(lam=(4, 1), t=(0,)), 4, 100)
    assert not validate_schedule(Schedule(lam=(4,), t=()), 4, 100)


def test_budget_errors():
    with pytest.raises(InsufficientBudgetError):
        schedule_sr(5, 4)
    with pytest.raises(InsufficientBudgetError):
        schedule_sr(5, 5)
    with pytest.raises(InsufficientBudgetError):
        schedule_sh(8, 10)
    with pytest.raises(InsufficientBudgetError):
        schedule_uniform(3, 2)
    with pytest.raises(InsufficientBudgetError):
        schedule_gg(8, 47, 3)
    with pytest.raises(ValueError):
        schedule_gg(3, 1000, 2)


@given(st.integers(2, 40), st.integers(0, 20000))
def test_sr_properties(K, extra):
    T = 2 * K + extra
    s = schedule_sr(K, T)
    assert list(s.cumulative) == oracles.sr_cumulative(K, T)
    assert s.lam[-1] == 1 and s.rounds == K - 1
    assert validate_schedule(s, K, T).ok


@given(st.integers(2, 64), st.integers(0, 20000))
def test_sh_properties(K, extra):
    R = math.ceil(math.log2(K))
    T = K * R * 2 + extra
    s = schedule_sh(K, T)
    assert s.rounds == R and s.lam[-1] == 1
    assert all(b == -(-a // 2) for a, b in zip(s.lam, s.lam[1:]))
    assert validate_schedule(s, K, T).ok


@given(st.integers(2, 64), st.integers(1, 4), st.integers(0, 50000))
def test_gg_properties(K, R, extra):
    T = 2 * R * K + extra
    try:
        s = schedule_gg(K, T, R)
    except ValueError as exc:
        assert "do not decrease" in str(exc)
        return
    for r in range(R):
        exact = T * K ** (r / R) / (R * K)
        assert abs(s.cumulative[r] - math.floor(exact)) <= 1
    assert s.lam[-1] == 1
    assert validate_schedule(s, K, T).ok
