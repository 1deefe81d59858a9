import random
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fulldof.channel import CanonicalForm3, ChannelMatrix
from fulldof.entropy import DiscreteRV, RVFamily
from fulldof.inequalities import (
    ZeroDenominator,
    balancing_at_measured_epsilon,
    balancing_bounds,
    balancing_report,
    check_delta_nonnegative,
    check_max_lower_bound,
    check_pr_sum,
    check_subadditivity,
    check_wu_lem18,
    check_wu_thm14,
    dof_ratio,
    madiman_pair,
    tau,
)
from fulldof.suites import INEQUALITY_SUITES, random_rv, run_suite

mpmath.mp.dps = 40
PM = DiscreteRV.point_mass(3)


def H_oracle(pmf):
    return float(-sum(mpmath.mpf(p.numerator) / p.denominator * mpmath.log(mpmath.mpf(p.numerator) / p.denominator, 2)
                      for p in pmf.values()))


@st.composite
def rvs(draw, max_support=6):
    return random_rv(random.Random(draw(st.integers(0, 10 ** 9))), max_support)


def test_subadditivity_examples(bit):
    r = check_subadditivity(PM, bit)
    assert r.holds and r.slack.value == 0
    r = check_subadditivity(bit, bit)
    assert (r.lhs.value, r.rhs.value) == (1.5, 2.0) and r.holds
    r = check_subadditivity(bit, DiscreteRV.uniform([0, 2]))
    assert (r.lhs.value, r.rhs.value) == (2.0, 2.0)


def test_max_lower_bound_examples(bit):
    r = check_max_lower_bound(1, 1, bit, PM)
    assert r.slack.value == 0
    assert check_max_lower_bound(1, 1, bit, bit).rhs.value == 1.5
    assert check_max_lower_bound(1, -1, bit, bit).rhs.value == 1.5
    with pytest.raises(ValueError):
        check_max_lower_bound(0, 1, bit, bit)


def test_pr_sum_examples(bit):
    r = check_pr_sum(bit, [DiscreteRV.uniform([0, 3])])
    assert r.lhs == r.rhs
    r = check_pr_sum(bit, [bit, bit])
    assert r.rhs.value == 2.0
    assert r.lhs.value == pytest.approx(H_oracle({0: F(1, 8), 1: F(3, 8), 2: F(3, 8), 3: F(1, 8)}), abs=1e-12)
    assert round(r.lhs.value, 4) == 1.8113
    assert r.holds and "ratio" in r.inputs
    r = check_pr_sum(bit, [PM, DiscreteRV.point_mass(-1)])
    assert r.lhs.value == r.rhs.value == 1.0


def test_tau_values():
    assert tau(1, 1) == 2
    assert tau(2, 1) == 9
    assert tau(-4, 3) == 7 * 2 + 7 * 1 + 2
    assert tau(7, 8) == 7 * 2 + 7 * 3 + 2
    with pytest.raises(ValueError):
        tau(0, 1)


@given(st.integers(-10 ** 6, 10 ** 6).filter(bool), st.integers(-10 ** 6, 10 ** 6).filter(bool))
def test_tau_matches_float_floor(p, q):
    import math
    assert tau(p, q) == 7 * math.floor(math.log2(abs(p)) + 1e-12) + 7 * math.floor(math.log2(abs(q)) + 1e-12) + 2


def test_wu_thm14_examples(bit):
    r = check_wu_thm14(1, 1, bit, bit)
    assert r.lhs.value == 0 and r.holds
    r = check_wu_thm14(2, 1, bit, bit)
    assert (r.lhs.value, r.rhs.value) == (0.5, 9.0)
    r = check_wu_thm14(3, -2, bit, PM)
    # 2H(X+Y) - H(X) - H(Y) = 2 - 1 - 0, times tau = 16
    assert r.holds and r.lhs.value == 0 and r.rhs.value == 16.0
    with pytest.raises(TypeError):
        check_wu_thm14(F(1, 2), 1, bit, bit)


def test_wu_lem18_examples(bit):
    r = check_wu_lem18(1, 1, bit, bit, bit)
    assert r.holds
    r = check_wu_lem18(1, 0, bit, bit, PM)
    assert (r.lhs.value, r.rhs.value) == (0.5, 1.0)
    r = check_wu_lem18(2, 1, bit, bit, bit)
    # rhs variable X' + X + Z is Binomial(3, 1/2); lhs is H(2X + Z) - 1/2 = 2 - 1/2
    assert r.lhs.value == 1.5
    assert r.rhs.value == pytest.approx(H_oracle({0: F(1, 8), 1: F(3, 8), 2: F(3, 8), 3: F(1, 8)}), abs=1e-12)
    with pytest.raises(ValueError):
        check_wu_lem18(1, 1, bit, PM, bit)


@given(rvs(), rvs(), st.integers(-4, 4).filter(bool), st.integers(-4, 4).filter(bool))
def test_inequalities_hold(X, Y, p, q):
    for r in (check_subadditivity(X, Y), check_max_lower_bound(p, q, X, Y), check_wu_thm14(p, q, X, Y),
              check_delta_nonnegative(X, Y), check_pr_sum(X, [Y])):
        assert r.holds, r.to_json()


@settings(max_examples=60)
@given(rvs(4), rvs(4), st.integers(-4, 4).filter(bool), st.integers(-4, 4))
def test_lem18_holds(X, Z, p, r):
    assert check_wu_lem18(p, r, X, X, Z).holds


@given(rvs(), rvs())
def test_verdict_reproducible_from_report(X, Y):
    js = check_subadditivity(X, Y).to_json()
    assert js["holds"] == (js["slack"] >= -js["error_bound"])


def test_madiman_pair(bit):
    m = madiman_pair(bit)
    assert m.delta_sum.value == 0.5 and m.delta_diff.value == 0.5
    assert m.ratio.value == 1.0 and m.holds
    assert madiman_pair(PM).ratio is None


def test_dof_ratio_examples(bit):
    with pytest.raises(ZeroDenominator):
        dof_ratio(ChannelMatrix.ones(3), [PM, PM, PM])
    M = ChannelMatrix.from_rows([[1, 2], [1, 3]])
    rep = dof_ratio(M, [bit, bit])
    # user 1: H(V1 + 2V2) = 2, H(2V2) = 1; user 2: H(V1 + 3V2) = 2, H(V1) = 1
    assert [s.value for s in rep.signal_entropies] == [2.0, 2.0]
    assert [t.value for t in rep.interference_entropies] == [1.0, 1.0]
    assert [r.value for r in rep.ratios] == [0.5, 0.5]
    assert rep.epsilon.value == 0.0


def test_dof_ratio_all_ones_canonical(bit):
    rep = dof_ratio(CanonicalForm3(g=(1, 1, 1), h=1), RVFamily([bit, bit, bit]))
    three = H_oracle({0: F(1, 8), 1: F(3, 8), 2: F(3, 8), 3: F(1, 8)})
    assert all(s.value == pytest.approx(three, abs=1e-12) for s in rep.signal_entropies)
    assert all(t.value == 1.5 for t in rep.interference_entropies)
    assert rep.ratios[0].value == pytest.approx((three - 1.5) / three, abs=1e-12)


@settings(max_examples=30)
@given(st.lists(rvs(4), min_size=3, max_size=3),
       st.fractions(min_value=-3, max_value=3, max_denominator=3).filter(bool),
       st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3), min_size=3, max_size=3))
def test_dof_ratio_relabeling_invariant(family, a, b):
    """Per-variable shifts and one common scale leave every sum law's entropy unchanged."""
    M = ChannelMatrix.from_rows([[2, 1, -1], [1, F(1, 2), 3], [1, 2, 5]])
    moved = [DiscreteRV(tuple(a * x + bi for x in rv.support), rv.probs) for rv, bi in zip(family, b)]
    try:
        before = dof_ratio(M, family)
    except ZeroDenominator:
        with pytest.raises(ZeroDenominator):
            dof_ratio(M, moved)
        return
    after = dof_ratio(M, moved)
    assert before.user_entropies == after.user_entropies
    assert before.signal_entropies == after.signal_entropies
    assert before.ratios == after.ratios


def test_dof_ratio_not_invariant_under_single_scaling(bit):
    # scaling one variable can create or destroy collisions in the mixed sums
    M = ChannelMatrix.from_rows([[1, 1], [1, 2]])
    a = dof_ratio(M, [bit, bit])
    b = dof_ratio(M, [DiscreteRV.uniform([0, 2]), bit])
    assert a.signal_entropies[0].value == 1.5 and b.signal_entropies[0].value == 2.0


def test_balancing_bounds_values():
    b = balancing_bounds(F(1, 10))
    assert b["ratio_lower"] == F(2, 3) and b["ratio_upper"] == F(3, 2)
    assert b["signal_lower"] == 2 * F(4, 5) / F(6, 5) ** 2
    assert b["signal_upper"] == F(5, 2)


def test_balancing_examples(bit):
    M = ChannelMatrix.ones(3)
    rep = balancing_report(M, [bit, PM, bit], F(1, 10))
    assert not rep.applicable and rep.to_json()["verdict"] == "not-applicable"
    good = ChannelMatrix.from_rows([[1, 2], [1, 3]])
    rep = balancing_report(good, [bit, bit], F(1, 10))
    assert rep.applicable and rep.holds
    pair = [c for c in rep.checks if c.name.startswith("H(V")]
    assert all(c.value.value == 1.0 for c in pair)
    with pytest.raises(ValueError):
        balancing_report(good, [bit, bit], F(1, 2))


def test_balancing_at_measured_epsilon_is_tight(bit):
    rep = balancing_at_measured_epsilon(ChannelMatrix.from_rows([[1, 2], [1, 3]]), [bit, bit])
    # ratios are exactly 1/2, so the measured epsilon is 0 and nothing is asserted
    assert not rep.applicable and rep.epsilon == 0


@pytest.mark.parametrize("suite", INEQUALITY_SUITES + ["balancing"])
def test_suites_small_run_clean(suite):
    res = run_suite(suite, 40, seed=7)
    assert res.violations == 0
    assert res.to_json()["verdict"] == "all-hold"


def test_suite_independent_of_workers():
    a = run_suite("wu_thm14", 30, seed=3, workers=1).to_json()
    b = run_suite("wu_thm14", 30, seed=3, workers=2).to_json()
    assert a == b


def test_balancing_on_interval_boundary():
    # true min ratio is exactly 2/5, so eps = 1/10 and several values sit on 2/3 and 3/2
    M = ChannelMatrix.from_rows([[-2, -1], [4, F(-3, 2)]])
    V1 = DiscreteRV((0, 1, 5), (F(1, 2), F(1, 4), F(1, 4)))
    rep = balancing_at_measured_epsilon(M, [V1, DiscreteRV.uniform([0, 1])])
    assert rep.epsilon >= F(1, 10)
    assert rep.holds
