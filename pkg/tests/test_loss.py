import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coxkit import (
    LossValue,
    TieMethod,
    build_risk_order,
    log_cum_sum_exp,
    log_diff_exp,
    nll,
    nll_breslow,
    nll_efron,
    nll_oracle,
)
from coxkit.exceptions import InvalidInputError, NumericalDomainError

from helpers import (
    finite_difference_gradient,
    nll_reference_longdouble,
    random_instance,
    relative_close,
)

LOG2 = math.log(2.0)

# Frozen reference values, evaluated from the definitions in extended
# precision (mpmath, 60 digits) and spot-checked against direct float math.
LDE_50_025_49 = 49.90352229257833
NLL_BRESLOW_4 = 2.702501027456988  # t=[3,2,2,1], e=[1,1,1,0], g=[.5,-.3,.1,.2]
NLL_EFRON_5 = 5.430485117480148   # t=[3,2,2,2,1], e=[0,1,1,1,1], g=[.2,-1,0,1,.5]


# ---------------------------------------------------------------- RiskOrder

def test_build_risk_order_distinct_times():
    order = build_risk_order([1.0, 3.0, 2.0], [1, 1, 1])
    assert order.perm.tolist() == [1, 2, 0]
    assert order.n_groups == 3
    assert order.group_death_count.tolist() == [1, 1, 1]
    assert not order.has_ties


def test_build_risk_order_single_tie_group():
    order = build_risk_order([2.0, 2.0], [1, 0])
    assert order.n_groups == 1
    assert order.group_death_count.tolist() == [1]
    assert order.group_start.tolist() == [0, 0]
    assert order.group_end.tolist() == [1]


def test_build_risk_order_mixed_groups():
    # groups {5,5}, {3}, {1,1} with death counts (1, 1, 2)
    order = build_risk_order([5.0, 1.0, 5.0, 1.0, 3.0], [1, 1, 0, 1, 1])
    assert order.perm.tolist() == [0, 2, 4, 1, 3]
    assert order.n_groups == 3
    assert order.group_death_count.tolist() == [1, 1, 2]
    assert order.unique_death_groups.tolist() == [0, 1, 2]
    assert order.death_positions.tolist() == [0, 2, 3, 4]


def test_build_risk_order_tie_break_is_original_index():
    order = build_risk_order([7.0, 7.0, 7.0], [0, 1, 0])
    assert order.perm.tolist() == [0, 1, 2]


def test_build_risk_order_invariants_random():
    rng = np.random.default_rng(5)
    for _ in range(200):
        d, e, _ = random_instance(rng, max_n=20)
        order = build_risk_order(d, e)
        sorted_d = d[order.perm]
        assert np.all(np.diff(sorted_d) <= 0)
        # group members share the exact duration value
        for pos in range(order.n):
            start = order.group_start[pos]
            assert sorted_d[pos] == sorted_d[start]
        assert order.group_death_count[order.unique_death_groups].sum() == e.sum()
        assert np.all(order.group_death_count[order.unique_death_groups] >= 1)


def test_build_risk_order_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        build_risk_order([1.0, np.nan], [1, 1])
    with pytest.raises(InvalidInputError):
        build_risk_order([1.0, np.inf], [1, 1])
    with pytest.raises(InvalidInputError):
        build_risk_order([1.0, 2.0], [1, 1, 0])
    with pytest.raises(InvalidInputError):
        build_risk_order([], [])
    with pytest.raises(InvalidInputError):
        build_risk_order([1.0, 2.0], [1, 2])


# ---------------------------------------------------------- log-space kernels

def test_log_cum_sum_exp_equal_entries():
    out = log_cum_sum_exp([0.0, 0.0, 0.0])
    assert out == pytest.approx([0.0, math.log(2), math.log(3)], abs=1e-14)


def test_log_cum_sum_exp_identity_on_singletons():
    for x in (-700.0, -1.5, 0.0, 3.25, 700.0):
        assert log_cum_sum_exp([x]).tolist() == [x]


def test_log_cum_sum_exp_no_overflow():
    out = log_cum_sum_exp([1000.0, 1000.0])
    assert np.all(np.isfinite(out))
    assert out[0] == 1000.0
    assert out[1] == pytest.approx(1000.693147180559945, abs=1e-12)


def test_log_cum_sum_exp_rejects_nonfinite():
    with pytest.raises(InvalidInputError):
        log_cum_sum_exp([0.0, np.nan])


def test_log_diff_exp_exact_cancellation_to_one():
    assert log_diff_exp(LOG2, 0.5, LOG2) == pytest.approx(0.0, abs=1e-15)


def test_log_diff_exp_zero_weight_returns_a():
    assert log_diff_exp(3.5, 0.0, 3.5) == 3.5
    assert log_diff_exp(3.5, 0.0, -100.0) == 3.5


def test_log_diff_exp_frozen_value():
    assert log_diff_exp(50.0, 0.25, 49.0) == pytest.approx(LDE_50_025_49, rel=1e-15)


def test_log_diff_exp_domain_error():
    with pytest.raises(NumericalDomainError):
        log_diff_exp(0.0, 1.0, 0.0)
    with pytest.raises(NumericalDomainError):
        log_diff_exp(0.0, 0.5, 10.0)


def test_log_diff_exp_validates_weight():
    with pytest.raises(InvalidInputError):
        log_diff_exp(1.0, -0.1, 0.0)
    with pytest.raises(InvalidInputError):
        log_diff_exp(1.0, 1.5, 0.0)


def test_log_diff_exp_vectorized():
    out = log_diff_exp(np.array([LOG2, 5.0]), np.array([0.5, 0.0]), np.array([LOG2, 4.0]))
    assert out == pytest.approx([0.0, 5.0], abs=1e-15)


# ------------------------------------------------------------------ NLL values

def test_nll_breslow_nested_risk_sets():
    order = build_risk_order([2.0, 1.0], [1, 1])
    assert nll_breslow(order, [0.0, 0.0]).nll == pytest.approx(LOG2, rel=1e-15)


def test_nll_breslow_shared_tie_denominator():
    order = build_risk_order([1.0, 1.0], [1, 1])
    assert nll_breslow(order, [0.0, 0.0]).nll == pytest.approx(2 * LOG2, rel=1e-15)


def test_nll_breslow_frozen_value():
    order = build_risk_order([3.0, 2.0, 2.0, 1.0], [1, 1, 1, 0])
    value = nll_breslow(order, [0.5, -0.3, 0.1, 0.2]).nll
    assert value == pytest.approx(NLL_BRESLOW_4, rel=1e-14)


def test_nll_efron_two_death_tie():
    order = build_risk_order([1.0, 1.0], [1, 1])
    assert nll_efron(order, [0.0, 0.0]).nll == pytest.approx(LOG2, rel=1e-15)


def test_nll_efron_frozen_value():
    order = build_risk_order([3.0, 2.0, 2.0, 2.0, 1.0], [0, 1, 1, 1, 1])
    value = nll_efron(order, [0.2, -1.0, 0.0, 1.0, 0.5]).nll
    assert value == pytest.approx(NLL_EFRON_5, rel=1e-14)


def test_efron_equals_breslow_bitwise_without_ties():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(1, 30))
        d = rng.exponential(1.0, n)
        assert np.unique(d).size == n
        e = rng.random(n) >= 0.3
        g = rng.uniform(-3, 3, n)
        order = build_risk_order(d, e)
        assert nll_efron(order, g).nll == nll_breslow(order, g).nll


def test_all_censored_gives_zero_loss_and_gradient():
    order = build_risk_order([3.0, 1.0, 1.0], [0, 0, 0])
    for method in (TieMethod.BRESLOW, TieMethod.EFRON):
        lv = nll(order, [0.4, -0.2, 1.0], method, want_grad=True)
        assert lv.nll == 0.0
        assert np.all(lv.grad == 0.0)


def test_nll_dispatch_no_ties_assumed():
    tied = build_risk_order([1.0, 1.0], [1, 1])
    with pytest.raises(InvalidInputError):
        nll(tied, [0.0, 0.0], TieMethod.NO_TIES_ASSUMED)
    free = build_risk_order([2.0, 1.0], [1, 1])
    a = nll(free, [0.3, -0.3], TieMethod.NO_TIES_ASSUMED).nll
    b = nll(free, [0.3, -0.3], TieMethod.BRESLOW).nll
    assert a == b


def test_nll_dispatch_accepts_strings_and_rejects_unknown():
    order = build_risk_order([2.0, 1.0], [1, 1])
    assert nll(order, [0.0, 0.0], "breslow").nll == nll(order, [0.0, 0.0], TieMethod.BRESLOW).nll
    with pytest.raises(InvalidInputError):
        nll(order, [0.0, 0.0], "exact")


def test_scores_validation():
    order = build_risk_order([2.0, 1.0], [1, 1])
    with pytest.raises(InvalidInputError):
        nll_breslow(order, [0.0, np.nan])
    with pytest.raises(InvalidInputError):
        nll_breslow(order, [0.0, np.inf])
    with pytest.raises(InvalidInputError):
        nll_breslow(order, [0.0, 0.0, 0.0])


def test_extreme_scores_stay_finite():
    order = build_risk_order([3.0, 2.0, 2.0, 1.0], [1, 1, 1, 1])
    for g in ([700.0, 700.0, 700.0, 700.0], [-700.0, 700.0, -700.0, 700.0]):
        for method in (TieMethod.BRESLOW, TieMethod.EFRON):
            assert math.isfinite(nll(order, g, method).nll)


# -------------------------------------------------------------- oracle checks

def test_matches_oracle_on_random_small_instances():
    rng = np.random.default_rng(7)
    for _ in range(300):
        d, e, g = random_instance(rng, max_n=12)
        order = build_risk_order(d, e)
        for method in ("breslow", "efron"):
            fast = nll(order, g, method).nll
            ref = nll_oracle(d, e, g, method)
            assert relative_close(fast, ref, 1e-10)


def test_gradient_matches_finite_differences_spot():
    rng = np.random.default_rng(13)
    for _ in range(10):
        d, e, g = random_instance(rng, max_n=15, score_bound=3.0, min_n=2)
        order = build_risk_order(d, e)
        for method in ("breslow", "efron"):
            lv = nll(order, g, method, want_grad=True)
            fd = finite_difference_gradient(d, e, g, method)
            for a, b in zip(lv.grad, fd):
                assert abs(a - b) <= max(1e-6 * abs(b), 1e-9)


def test_gradient_sums_to_zero_minus_events():
    # Shift invariance forces the gradient coordinates to sum to zero.
    rng = np.random.default_rng(17)
    for _ in range(30):
        d, e, g = random_instance(rng, max_n=25, score_bound=3.0, min_n=2)
        order = build_risk_order(d, e)
        for method in ("breslow", "efron"):
            lv = nll(order, g, method, want_grad=True)
            assert abs(lv.grad.sum()) < 1e-10


# ------------------------------------------------------------------ properties

@st.composite
def survival_instances(draw):
    n = draw(st.integers(min_value=1, max_value=20))
    base = draw(st.lists(st.floats(0.05, 20.0), min_size=n, max_size=n))
    gran = draw(st.sampled_from([0.0, 0.5, 2.0]))
    d = np.asarray(base)
    if gran:
        d = np.ceil(d / gran) * gran
    e = np.asarray(draw(st.lists(st.booleans(), min_size=n, max_size=n)))
    g = np.asarray(draw(st.lists(st.floats(-3.0, 3.0), min_size=n, max_size=n)))
    return d, e, g


@settings(max_examples=150, deadline=None)
@given(survival_instances(), st.sampled_from(["breslow", "efron"]),
       st.sampled_from([-20.0, -1.0, 1.0, 20.0]))
def test_shift_invariance_property(instance, method, shift):
    d, e, g = instance
    order = build_risk_order(d, e)
    base = nll(order, g, method).nll
    shifted = nll(order, g + shift, method).nll
    assert abs(shifted - base) <= 1e-9


@settings(max_examples=150, deadline=None)
@given(survival_instances(), st.sampled_from(["breslow", "efron"]), st.randoms())
def test_permutation_invariance_property(instance, method, pyrandom):
    d, e, g = instance
    idx = list(range(len(d)))
    pyrandom.shuffle(idx)
    idx = np.asarray(idx)
    base = nll(build_risk_order(d, e), g, method).nll
    permuted = nll(build_risk_order(d[idx], e[idx]), g[idx], method).nll
    assert abs(permuted - base) <= 1e-12 * max(1.0, abs(base))


@settings(max_examples=150, deadline=None)
@given(survival_instances())
def test_efron_never_exceeds_breslow_property(instance):
    d, e, g = instance
    order = build_risk_order(d, e)
    nb = nll_breslow(order, g).nll
    ne = nll_efron(order, g).nll
    assert ne <= nb
    multi_death = np.any(order.group_death_count >= 2)
    if not multi_death:
        assert ne == nb


@settings(max_examples=100, deadline=None)
@given(survival_instances(), st.sampled_from(["breslow", "efron"]))
def test_oracle_equivalence_property(instance, method):
    d, e, g = instance
    order = build_risk_order(d, e)
    assert relative_close(nll(order, g, method).nll, nll_oracle(d, e, g, method), 1e-10)


def test_loss_value_is_plain_dataclass():
    lv = LossValue(1.5)
    assert lv.grad is None
    assert lv.nll == 1.5
