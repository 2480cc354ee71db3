import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from psifb import DegenerateInstanceError
from psifb.pareto import (
    big_m,
    complexity_profile,
    dominance_matrix,
    gap_optimal,
    gap_optimal_parts,
    gap_suboptimal,
    gap_unified,
    gaps,
    little_m,
    pareto_set,
    relaxed_profile,
)
from strategies import mean_matrices

I3 = np.array([[1.0, 0.2], [0.2, 1.0], [0.5, 0.1]])


# --- worked values -----------------------------------------------------------------


def test_margins_i3():
    assert big_m(I3, 0, 1) == pytest.approx(0.8, abs=1e-15)
    assert big_m(I3, 2, 0) == pytest.approx(-0.1, abs=1e-15)
    assert little_m(I3, 2, 0) == pytest.approx(0.1, abs=1e-15)
    assert little_m(I3, 0, 1) == pytest.approx(-0.8, abs=1e-15)


def test_big_m_identical_rows_is_zero():
    theta = np.array([[0.3, 0.7], [0.3, 0.7], [0.1, 0.1]])
    assert big_m(theta, 0, 1) == 0.0


@pytest.mark.parametrize("i,j", [(0, 0), (0, 3), (-1, 0)])
def test_margin_bad_indices(i, j):
    with pytest.raises(ValueError):
        big_m(I3, i, j)


def test_pareto_i3_and_duplicates():
    assert pareto_set(I3) == {0, 1}
    assert pareto_set(np.ones((4, 2))) == {0, 1, 2, 3}


def test_gaps_i3():
    assert gap_suboptimal(I3, 2) == pytest.approx(0.1, abs=1e-15)
    assert gap_optimal_parts(I3, 0) == pytest.approx((0.8, 0.1), abs=1e-15)
    assert gap_optimal_parts(I3, 1) == pytest.approx((0.8, 0.4), abs=1e-15)
    assert [gap_unified(I3, i) for i in range(3)] == pytest.approx([0.1, 0.4, 0.1], abs=1e-15)


def test_gap_branch_errors():
    with pytest.raises(ValueError):
        gap_suboptimal(I3, 0)
    with pytest.raises(ValueError):
        gap_optimal(I3, 2)


def test_uniform_dominance_gap():
    theta = np.array([[1.0, 2.0, 3.0], [0.75, 1.75, 2.75]])
    assert gap_suboptimal(theta, 1) == pytest.approx(0.25)


def test_all_optimal_uses_plus_only():
    theta = np.array([[0.0, 1.0], [0.5, 0.6], [1.0, 0.0]])
    plus, minus = gap_optimal_parts(theta, 1)
    assert minus == math.inf
    assert gap_optimal(theta, 1) == plus


def test_single_optimal_arm_has_finite_gap_via_minus():
    theta = np.array([[1.0, 1.0], [0.5, 0.5]])
    plus, minus = gap_optimal_parts(theta, 0)
    assert plus == math.inf and minus == pytest.approx(0.5)


def test_profile_i3():
    p = complexity_profile(I3)
    assert p.h1 == pytest.approx(206.25, rel=1e-12)
    assert p.h2 == pytest.approx(200.0, rel=1e-12)
    assert p.pareto == {0, 1} and p.suboptimal == {2}


def test_profile_equal_gaps():
    # four corners of a square spaced 1 apart, gaps all equal
    theta = np.array([[0.0, 3.0], [1.0, 2.0], [2.0, 1.0], [3.0, 0.0]])
    p = complexity_profile(theta)
    assert np.allclose(p.delta, p.delta[0])
    assert p.h1 == pytest.approx(p.h2) == pytest.approx(4 / p.delta[0] ** 2)


def test_profile_rejects_duplicates():
    with pytest.raises(DegenerateInstanceError):
        complexity_profile(np.array([[0.5, 0.5], [0.5, 0.5], [0.1, 0.2]]))


def test_relaxed_i3():
    r1 = relaxed_profile(I3, 1)
    assert r1.omega_k == pytest.approx(0.4)
    assert r1.delta_k == pytest.approx([0.4, 0.4, 0.1])
    assert r1.h2_k == pytest.approx(100.0, rel=1e-12)
    r2 = relaxed_profile(I3, 2)
    assert r2.omega_k == pytest.approx(0.1)
    assert r2.h2_k == pytest.approx(200.0, rel=1e-12)
    with pytest.raises(ValueError):
        relaxed_profile(I3, 0)


@pytest.mark.parametrize("bad", [[[1.0, 2.0]], [[1.0, np.nan], [0.0, 0.0]], np.zeros((2, 2, 2))])
def test_mean_matrix_validation(bad):
    with pytest.raises(ValueError):
        pareto_set(bad)


# --- properties --------------------------------------------------------------------


@given(mean_matrices(unique=False))
def test_antisymmetry_exact(theta):
    K = len(theta)
    for i in range(K):
        for j in range(K):
            if i != j:
                assert big_m(theta, i, j) == -little_m(theta, i, j)


@given(mean_matrices(unique=False))
def test_pareto_matches_bruteforce(theta):
    assert pareto_set(theta) == oracles.pareto(theta.tolist())
    dom = dominance_matrix(theta)
    for i in range(len(theta)):
        for j in range(len(theta)):
            assert dom[i, j] == oracles.dominated(theta[i], theta[j])


@given(mean_matrices())
def test_unified_gap_equals_branch_definitions(theta):
    rows = theta.tolist()
    ref = [oracles.gap(rows, i) for i in range(len(rows))]
    got = gaps(theta)
    for g, r in zip(got, ref):
        assert g == r or math.isclose(g, r, rel_tol=1e-12)


@given(mean_matrices())
def test_suboptimal_gap_max_over_all_arms(theta):
    opt = pareto_set(theta)
    rows = theta.tolist()
    for i in set(range(len(rows))) - opt:
        over_all = max(oracles.m(rows, i, j) for j in range(len(rows)) if j != i)
        assert gap_suboptimal(theta, i) == pytest.approx(over_all, rel=1e-12)


@given(mean_matrices())
def test_complexity_sandwich(theta):
    p = complexity_profile(theta)
    assert p.h1 == pytest.approx(oracles.h1(p.delta), rel=1e-12)
    assert p.h2 == pytest.approx(oracles.h2(p.delta), rel=1e-12)
    K = len(theta)
    assert p.h2 <= p.h1 * (1 + 1e-12)
    assert p.h1 <= p.h2 * math.log(2 * K) * (1 + 1e-12)


@given(mean_matrices(), st.integers(1, 9))
def test_relaxed_profile_properties(theta, k):
    p = complexity_profile(theta)
    r = relaxed_profile(theta, k, p)
    opt = sorted(p.pareto)
    sub = sorted(p.suboptimal)
    assert np.all(r.delta_k[opt] >= p.delta[opt])
    assert np.array_equal(r.delta_k[sub], p.delta[sub])
    if k > len(opt):
        assert r.omega_k == 0.0
        assert np.array_equal(r.delta_k, p.delta) and r.h2_k == p.h2
