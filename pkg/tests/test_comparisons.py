from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from anergodic import comparisons as cp
from anergodic.numerics import SpecError, Verdict
from anergodic.observables import birkhoff_sum_direct, cot_pi, make_theta, psi_half

from conftest import rotation

# 40-digit mpmath values, computed independently of the package
LANG_GOLDEN_100 = ("1293.86363697321398383178155406698492194", "4921.03403719761827360719658187374568304")
HALF_NEAREST_GOLDEN_100 = "531.5473478974321318762129095533202568876"
EXP2_GOLDEN_89 = ("116.9371574651023728764055379882348327497", "-47.61694187238247836107477551325061074204")
EXP2_GOLDEN_10 = ("13.85441385506772999438207302860123540445", "-6.705218166304427439127500528375670192698")


def _contains(x, text: str, tol=Fraction(1, 10**25)) -> bool:
    v = Fraction(text)
    return x.lower - tol <= v <= x.upper + tol


def test_lang_golden_100():
    rep = cp.lang_compare(rotation("golden"), 100)
    assert rep.inputs["q_n"] == 89 and rep.inputs["A"] == 2
    assert _contains(rep.ours, LANG_GOLDEN_100[0])
    assert _contains(rep.theirs, LANG_GOLDEN_100[1])
    assert rep.verdict == Verdict.PASS
    assert rep.ratios["ours/theirs"] < 1


@pytest.mark.parametrize("spec", ["golden", "sqrt2m1"])
def test_lang_uppers_hold(spec):
    rot = rotation(spec)
    cache: dict = {}
    for N in (2, 10, 99, 100, 1000, 10**4, 10**5):
        assert cp.lang_compare(rot, N, cache).verdict == Verdict.PASS


def test_lb3_at_two_is_four():
    x = cp.lb3(2)
    assert x.exact == 4


def test_lb_formulas_against_mpmath():
    mp.dps = 40
    t = rotation("sqrt2m1").table_for(10**4)
    n, b = 6, 2  # q_6 = 169, a_7 = 2
    q, q1 = t.q(n), float(t.qs(n + 1))
    L = mp.log
    lb1 = mpf(q1) * max(1, L(1 + b)) + b * q * (2 * max(1, L(q)) - (1 + 2 * L(2)))
    assert abs(float(cp.lb1(t, n, b)) - float(lb1)) < 1e-9
    N = b * q + 5
    lb2 = t.q(n + 1) * L(1 + N // q) + N * L(q) / 24 - (L(t.q(2)) / 3 + mpf(1) / 2) * N
    assert abs(float(cp.lb2(t, n, N)) - float(lb2)) < 1e-9
    lb2u = t.q(n + 1) * L(1 + mpf(N) / q) + N * L(q) / 24 - (L(t.q(2)) / 3 + mpf(1) / 2) * N
    assert abs(float(cp.lb2(t, n, N, floored=False)) - float(lb2u)) < 1e-9
    lb3 = N * L(N) + N * (1 - L(2)) + 2
    assert abs(float(cp.lb3(N)) - float(lb3)) < 1e-9
    vu = 2 * t.q(n + 1) * (1 + L(1 + mpf(N) / q)) + 32 * N * L(q) + t.q(3) * N
    assert abs(float(cp.velani_upper(t, n, N)) - float(vu)) < 1e-8


def test_nearest_direct_matches_oracle():
    rep = cp.sum_nearest_bounds(rotation("golden"), 100)
    assert _contains(rep.direct, HALF_NEAREST_GOLDEN_100, Fraction(1, 10**9))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(["golden", "sqrt2m1", "cf:1,2,[3]", "cf:2,3,[3,3]", "cf:[5]"]), st.integers(2, 5000))
def test_nearest_bounds_certified(spec, N):
    rep = cp.sum_nearest_bounds(rotation(spec), N)
    assert rep.verdict == Verdict.PASS, rep.verdicts


def test_half_sum_from_estimates():
    rep = cp.sum_nearest_bounds(rotation("sqrt2m1"), 3000, with_estimates=True)
    assert rep.verdicts["ours_estimates>=half"] == Verdict.PASS


def test_beresnevich_lower_view():
    rep = cp.beresnevich_lower(rotation("golden"), 987)
    assert rep.kinds["ours"] == "lower"
    assert rep.verdict == Verdict.PASS
    assert rep.ratios["ours/theirs"] > 1


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(["sqrt2m1", "cf:1,2,[3]", "cf:2,3,[3,3]", "cf:[3]", "cf:[7]"]), st.integers(30, 10**6))
def test_corrected_lb1_lb3_condition_suffices(spec, N):
    c = cp.lb1_vs_lb3(rotation(spec), N)
    if c.sufficient:
        assert c.verdict == Verdict.PASS


def test_lb1_lb3_stated_threshold_counterexample():
    # b_n = 2 and q_n = 109 >= 27, yet LB1 < LB3; the corrected condition rules it out
    c = cp.lb1_vs_lb3(rotation("cf:1,2,[3]"), 326)
    assert (c.b, c.q) == (2, 109)
    assert c.stated_scope and not c.sufficient
    assert c.verdict == Verdict.FAIL


def test_antisym_scan_and_constant_type():
    scan = cp.antisym_scan(rotation("golden"), cot_pi(), 10)
    assert len(scan.rows) == 11
    assert scan.max_ratio < 1
    with pytest.raises(SpecError):
        cp.antisym_scan(rotation("dec:0.41421356237309504880:64"), cot_pi(), 4)
    with pytest.raises(SpecError):
        cp.antisym_scan(rotation("golden"), make_theta(1), 4)
    assert cp.hole_equality(rotation("sqrt2m1"), 3000) == Verdict.PASS


def test_envelope_check():
    assert cp.envelope_check([(1, 1), (2, 2), (3, 3)], 1, 3) == Verdict.PASS
    assert cp.envelope_check([(1, 1), (1, 1), (10, 10)], 1, 3) == Verdict.FAIL
    assert cp.envelope_check([(1, 1), (1, 1), (2.9, 3.1)], 1, 3) == Verdict.INDETERMINATE


def test_weighted_gamma_zero_is_birkhoff_sum():
    rot = rotation("golden")
    w = cp.weighted_series(rot, cot_pi(), 0, 1000)
    s = birkhoff_sum_direct(rot, cot_pi(), 1000)
    assert w.value.lower <= s.upper and s.lower <= w.value.upper
    assert w.growth == "O(N^(beta-gamma))"


def test_weighted_gamma_two_is_cauchy():
    # 1 <= psi <= 2, so |W_{2m} - W_m| <= 2 sum_{r>m} r^-2 < 2/m
    w = cp.weighted_series(rotation("sqrt2m1"), psi_half(), 2, 1 << 14)
    for (m, a, _, _), (_, b, _, _) in zip(w.rows, w.rows[1:]):
        d = b - a
        assert max(abs(d.lower), abs(d.upper)) <= Fraction(2, m)
    assert w.growth == "O(1)"


def test_growth_classes():
    assert cp.growth_class(Fraction(1), Fraction(2)) == "O(1)"
    assert cp.growth_class(Fraction(1), Fraction(1)) == "O(log N)"
    assert cp.growth_class(Fraction(2), Fraction(1)) == "O(N^(beta-gamma))"


def test_exp2_of_one():
    z = cp.exp2(rotation("golden"), 1)
    assert z.re.exact == 1 and z.im.exact == 0


@pytest.mark.parametrize("N,expect", [(10, EXP2_GOLDEN_10), (89, EXP2_GOLDEN_89)])
def test_exp2_matches_oracle(N, expect):
    z = cp.exp2(rotation("golden"), N)
    assert _contains(z.re, expect[0], Fraction(1, 10**8))
    assert _contains(z.im, expect[1], Fraction(1, 10**8))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["golden", "sqrt2m1", "cf:1,2,[3]"]), st.integers(1, 200))
def test_exp2_two_routes_agree(spec, N):
    rot = rotation(spec)
    assert cp.exp2(rot, N).overlaps(cp.exp2_double(rot, N))


@given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
def test_geometric_identity(x):
    assert cp.cot_identity_residual(x) < 1e-6 * (1 + 1 / min(x, 1 - x))


def test_partial_birkhoff():
    rot = rotation("golden")
    t = rot.table(16)
    for n in (8, 10, 12):
        q = t.q(n)
        pb = cp.partial_birkhoff_lipschitz(rot, q, q, cot_pi())
        assert pb.verdict == Verdict.PASS and pb.informative
        assert float(pb.bound) < 2 * q
    far = cp.partial_birkhoff_lipschitz(rot, 1, 500, cot_pi())
    assert far.verdict == Verdict.PASS and not far.informative


def test_conjecture_scan_is_exploratory():
    c = cp.conjecture_scan(rotation("golden"))
    assert c.N == 233 and len(c.rows) == 64
    assert c.verdict == Verdict.EXPLORATORY
    assert c.spread >= 1


def test_lb1_lb3_counterexample_oracle():
    # cf:1,2,[3] at N = 91: q_4 = 33, b_4 = 2; values from an independent mpmath run
    c = cp.lb1_vs_lb3(rotation("cf:1,2,[3]"), 91)
    assert (c.b, c.q) == (2, 33)
    assert _contains(c.lb1, "434.7691999431024391418309947811872520185", Fraction(1, 10**15))
    assert _contains(c.lb3, "440.4118216620783305884863337830792807394", Fraction(1, 10**15))
    assert c.verdict == Verdict.FAIL and c.stated_scope and not c.sufficient
