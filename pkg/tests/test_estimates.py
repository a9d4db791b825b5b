from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import log, mp, mpf

from anergodic import bounds as bd
from anergodic.estimates import (
    HEADLINE,
    METHODS,
    beta1_summary,
    dual_estimate,
    estimate,
    s1_bound,
    s2_bound,
)
from anergodic.numerics import Verdict

from conftest import rotation

SPECS = ["golden", "sqrt2m1", "cf:1,2,[3]", "cf:1,[1,3,2]", "cf:2,3,[3,3]", "cf:1,1,1,1,[1000]"]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SPECS), st.sampled_from([Fraction(1), Fraction(3, 2), Fraction(2)]), st.integers(1, 2000))
def test_estimate_headline_verdicts(spec, beta, N):
    rep = estimate(rotation(spec), N, beta)
    assert rep.verdict == Verdict.PASS, {k: rep.verdicts[k] for k in HEADLINE}
    assert all(v != Verdict.FAIL for v in rep.verdicts.values())


def test_estimate_large_n():
    for spec in ("golden", "sqrt2m1"):
        rot = rotation(spec)
        t = rot.table_for(10**6)
        n = 1
        while t.q(n + 1) <= 5 * 10**5:
            n += 1
        for N in (t.q(n), t.q(n) + 1, 3 * t.q(n - 2) + 17):
            assert estimate(rot, N, 1).verdict == Verdict.PASS


def test_s1_s2_closed_forms_golden_100():
    # independent mpmath evaluation of N (1 + log q_n) at N = 100, q_n = 89
    mp.dps = 40
    ctx = bd.bounds_context(rotation("golden"), 100)
    s1 = s1_bound(ctx, Fraction(1))
    expect = 100 * (1 + log(mpf(89)))
    assert abs(float(s1) - float(expect)) < 1e-12
    # n = 10 is even: 2 min{2 q_8, q_9} + X-term for q_2 = 2 with b_2 = 0 absent
    assert ctx.n == 10
    assert s2_bound(ctx, Fraction(1)).contains(2 * min(2 * 34, 55))


def test_methods_report_best():
    rep = estimate(rotation("sqrt2m1"), 10**4, 1)
    name, val = rep.best()
    assert name in METHODS
    assert all(float(val) <= float(rep.totals[m]) for m in METHODS)


@pytest.mark.parametrize("spec", ["golden", "sqrt2m1", "cf:1,2,[3]"])
def test_beta1_summary(spec):
    rot = rotation(spec)
    for N in (3, 50, 144, 1000, 4000):
        s = beta1_summary(rot, N)
        assert all(v == Verdict.PASS for v in s.verdicts.values()), s.verdicts


def test_dual_estimate_agrees_with_reflected_sum():
    rep, v = dual_estimate(rotation("golden"), 500)
    assert v == Verdict.PASS
    assert rep.verdict == Verdict.PASS


def test_beta_below_one_rejected():
    with pytest.raises(ValueError):
        estimate(rotation("golden"), 10, Fraction(1, 2))
