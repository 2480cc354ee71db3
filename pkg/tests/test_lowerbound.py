import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from psifb.lowerbound import (
    STAIRCASE,
    alternative_instance,
    class_b_check,
    lb_value,
    staircase_instance,
    verify_gap_preservation,
)
from psifb.pareto import complexity_profile, pareto_set

I3 = np.array([[1.0, 0.2], [0.2, 1.0], [0.5, 0.1]])


@pytest.mark.parametrize("variant", ["B", "B'"])
def test_staircase_is_member(variant):
    rep = class_b_check(STAIRCASE, variant)
    assert rep.member, rep.failures
    assert set(rep.partners) == pareto_set(STAIRCASE)
    p = complexity_profile(STAIRCASE)
    assert np.allclose(p.delta, 0.5) and p.h1 == pytest.approx(16.0)


def test_i3_not_member():
    rep = class_b_check(I3)
    assert not rep.member and rep.failures
    with pytest.raises(ValueError):
        alternative_instance(I3, 2)


def test_two_dominators_rejected():
    theta = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [-1.0, -1.0]])
    rep = class_b_check(theta)
    assert not rep.member
    assert any(cond == 1 for cond, _, _ in rep.violations)


def test_describe_numbers_arms_from_base():
    rep = class_b_check(I3)
    zero, one = rep.describe(0), rep.describe(1)
    assert len(zero) == len(one) and zero != one


def test_unknown_variant():
    with pytest.raises(ValueError):
        class_b_check(STAIRCASE, "C")


@pytest.mark.parametrize("i", range(4))
def test_alternatives_on_staircase(i):
    alt = alternative_instance(STAIRCASE, i)
    diff = alt - STAIRCASE
    assert np.count_nonzero(diff) == 1
    assert abs(diff[np.nonzero(diff)][0]) == pytest.approx(2 * 0.5)
    g = verify_gap_preservation(STAIRCASE, i)
    assert g.pareto_changed and g.preserved()
    assert g.h1_alt == pytest.approx(g.h1, rel=1e-12)


def test_sentinel_returns_copy():
    alt = alternative_instance(STAIRCASE, None)
    assert np.array_equal(alt, STAIRCASE) and alt is not STAIRCASE
    g = verify_gap_preservation(STAIRCASE, None)
    assert not g.pareto_changed and g.max_rel_deviation == 0.0
    with pytest.raises(ValueError):
        alternative_instance(STAIRCASE, 4)


def test_lb_value_examples():
    assert lb_value(0, 16, 1) == 0.25
    assert lb_value(16, 16, 1) == pytest.approx(math.exp(-2) / 4)
    assert lb_value(16, 16, 1) == pytest.approx(0.03383, abs=1e-5)
    with pytest.raises(ValueError):
        lb_value(-1, 16, 1)
    with pytest.raises(ValueError):
        lb_value(1, 0, 1)


@given(st.lists(st.floats(0.05, 0.5).map(lambda x: round(x, 4)), min_size=1, max_size=5),
       st.sampled_from(["B", "B'"]), st.data())
def test_fuzzed_staircases(gaps, variant, data):
    theta = staircase_instance(gaps)
    rep = class_b_check(theta, variant)
    assert rep.member, rep.failures
    i = data.draw(st.integers(0, len(theta) - 1))
    g = verify_gap_preservation(theta, i, rep)
    assert g.pareto_changed
    assert g.preserved(1e-9)
    diff = alternative_instance(theta, i, rep) - theta
    assert np.count_nonzero(diff) == 1
    assert abs(diff[np.nonzero(diff)][0]) == pytest.approx(2 * g.delta[i], rel=1e-12)


def test_staircase_rejects_bad_input():
    with pytest.raises(ValueError):
        staircase_instance([])
    with pytest.raises(ValueError):
        staircase_instance([0.5, -0.1])
    with pytest.raises(ValueError):
        staircase_instance([1.0, 1.0], spacing=2.0)
