from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf, sqrt

from anergodic.numerics import (
    RigorousReal,
    SpecError,
    Verdict,
    combine,
    dist_nearest,
    floor,
    format_bounds,
    frac,
    parse_alpha_spec,
    periodic_cf_surd,
    policy_for,
    prove_le,
    random_periodic_spec,
    realize,
    sign,
)

fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6)


def test_named_specs_are_surds():
    g = realize(parse_alpha_spec("golden"))
    assert g.surd is not None
    mp.dps = 40
    exact = (sqrt(5) - 1) / 2
    assert g.lower <= Fraction(str(exact + mpf(10) ** -35))
    assert Fraction(str(exact - mpf(10) ** -35)) <= g.upper


def test_periodic_cf_surd_golden_and_silver():
    assert float(RigorousReal.from_surd(periodic_cf_surd((), (1,)))) == pytest.approx(0.6180339887498949)
    assert float(RigorousReal.from_surd(periodic_cf_surd((), (2,)))) == pytest.approx(2**0.5 - 1)
    # cf:1,2,[3] = 1/(1 + 1/(2 + 1/x)) with x = [3;3,...] = (3 + sqrt 13)/2
    x = (3 + 13**0.5) / 2
    expect = 1 / (1 + 1 / (2 + 1 / x))
    assert float(realize(parse_alpha_spec("cf:1,2,[3]"))) == pytest.approx(expect, rel=1e-14)


@pytest.mark.parametrize("text", ["foo", "cf:1,2", "cf:[0]", "dec:0.5:64", "dec:1.5:64", "cf:"])
def test_bad_specs(text):
    with pytest.raises(SpecError):
        parse_alpha_spec(text)


def test_decimal_spec_has_width():
    spec = parse_alpha_spec("dec:0.41421356237309504880:64")
    x = realize(spec, policy_for(spec))
    assert x.width > 0
    assert x.contains(Fraction("0.41421356237309504880"))


@given(fractions, fractions)
def test_arithmetic_encloses_exact(a, b):
    x, y = RigorousReal.from_exact(a), RigorousReal.from_exact(b)
    assert (x + y).contains(a + b)
    assert (x - y).contains(a - b)
    assert (x * y).contains(a * b)
    if b != 0:
        assert (x / y).contains(a / b)


@given(st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=1000))
def test_log_and_power_enclose_float(a):
    x = RigorousReal.from_exact(a)
    mp.dps = 50
    assert x.log().lower <= Fraction(str(mp.log(mpf(a.numerator) / a.denominator))) + Fraction(1, 10**40)
    assert x.power(Fraction(3, 2)).upper >= Fraction(str(mp.power(mpf(a.numerator) / a.denominator, 1.5))) - Fraction(1, 10**30)


@given(fractions, fractions)
def test_prove_le_agrees_with_exact_order(a, b):
    v = prove_le(a, b)
    assert v == (Verdict.PASS if a <= b else Verdict.FAIL)
    vs = prove_le(a, b, strict=True)
    assert vs == (Verdict.PASS if a < b else Verdict.FAIL)


def test_prove_le_is_indeterminate_on_overlap():
    x = RigorousReal.from_interval(0, 1)
    y = RigorousReal.from_interval(Fraction(1, 2), 2)
    assert prove_le(x, y) == Verdict.INDETERMINATE


def test_combine_order():
    assert combine([Verdict.PASS, Verdict.INDETERMINATE]) == Verdict.INDETERMINATE
    assert combine([Verdict.PASS, Verdict.FAIL, Verdict.INDETERMINATE]) == Verdict.FAIL
    assert combine([Verdict.EXPLORATORY]) == Verdict.EXPLORATORY
    assert combine([Verdict.EXPLORATORY, Verdict.PASS]) == Verdict.PASS


@given(st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**9))
def test_format_bounds_is_outward(a):
    x = RigorousReal.from_exact(a)
    lo, hi = format_bounds(x, 20)
    assert Fraction(lo) <= a <= Fraction(hi)
    assert Fraction(hi) - Fraction(lo) <= abs(a) * Fraction(1, 10**18) + Fraction(1, 10**300)


def test_floor_frac_and_nearest_on_surd():
    g = realize(parse_alpha_spec("golden"))
    x = g * 89
    assert floor(x) == 55
    assert float(frac(x)) == pytest.approx(89 * 0.6180339887498949 - 55, abs=1e-12)
    d = dist_nearest(x)
    assert d.lower > 0 and float(d) < 1 / 144
    assert sign(g - Fraction(618, 1000)) == 1


def test_random_periodic_spec_is_seeded():
    a = [random_periodic_spec(random.Random(2024)).text for _ in range(3)]
    assert len(set(a)) == 1
    rng = random.Random(2024)
    assert [random_periodic_spec(rng).text for _ in range(2)] == ["cf:1,[1,3,2]", "cf:2,3,[3,3]"]


@settings(max_examples=30)
@given(st.lists(st.integers(1, 9), min_size=0, max_size=3), st.lists(st.integers(1, 9), min_size=1, max_size=3))
def test_periodic_surd_matches_cf_evaluation(pre, per):
    s = RigorousReal.from_surd(periodic_cf_surd(tuple(pre), tuple(per)))
    digits = (pre + per * 30)[:60]
    v = Fraction(0)
    for a in reversed(digits):
        v = 1 / (a + v)
    assert abs(Fraction(float(s)) - v) < Fraction(1, 10**12)
