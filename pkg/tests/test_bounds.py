from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anergodic import bounds as bd
from anergodic.numerics import Verdict
from anergodic.observables import antisym_theta, cot_pi, make_theta, recip_signed_hole

from conftest import rotation

SPECS = ["golden", "sqrt2m1", "cf:1,2,[3]", "cf:1,[1,3,2]", "cf:2,3,[3,3]", "cf:1,1,[4,1]"]
BETAS = [Fraction(1), Fraction(3, 2), Fraction(2)]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SPECS), st.sampled_from(BETAS), st.integers(1, 700))
def test_sandwich_holds(spec, beta, N):
    ctx = bd.bounds_context(rotation(spec), N)
    rows = bd.verify_sandwich(ctx, make_theta(beta))
    assert bd.sandwich_verdict(rows) == Verdict.PASS
    assert rows[-1].r == -1


@pytest.mark.parametrize("spec", SPECS[:3])
def test_sandwich_on_quasiperiod_grid(spec):
    rot = rotation(spec)
    cache: dict = {}
    grid = [N for N in bd.standard_grid(rot.table_for(10**5), small=0, n_max=10) if N < 10**5]
    for N in grid:
        ctx = bd.bounds_context(rot, N, cache)
        assert bd.sandwich_verdict(bd.verify_sandwich(ctx, make_theta(1))) == Verdict.PASS


def test_sandwich_needs_decreasing_observable():
    ctx = bd.bounds_context(rotation("golden"), 50)
    from anergodic.observables import reflect

    with pytest.raises(ValueError):
        bd.verify_sandwich(ctx, reflect(make_theta(1)))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SPECS), st.sampled_from(BETAS), st.integers(1, 600))
def test_refined_primitive_bound(spec, beta, N):
    ctx = bd.bounds_context(rotation(spec), N)
    assert all(v == Verdict.PASS for v in bd.verify_refined(ctx, make_theta(beta)).values())


@pytest.mark.parametrize("spec", ["sqrt2m1", "cf:[2,3]", "cf:4,[1,5]", "cf:3,1,[2,2,7]"])
def test_duality(spec):
    rot = rotation(spec)
    for N in (1, 7, 40, 333, 1000):
        rows, v = bd.duality_check(rot, N, make_theta(1))
        assert v == Verdict.PASS, (N, rows)


def test_duality_requires_a1_at_least_two():
    with pytest.raises(ValueError):
        bd.duality_check(rotation("golden"), 10, make_theta(1))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SPECS), st.integers(1, 800))
def test_q1_blocks_closed_form(spec, N):
    ctx = bd.bounds_context(rotation(spec), N)
    for r in range(ctx.n + 1):
        if ctx.q(r) == 1 and ctx.b(r) > 0:
            lo, up = bd.a0_bounds(ctx, r, make_theta(1))
            seg = bd.segment_sum(ctx, r, make_theta(1))
            assert lo.lower <= seg.upper and seg.lower <= up.upper


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SPECS), st.sampled_from(BETAS), st.integers(2, 3000))
def test_coefficients(spec, beta, N):
    ctx = bd.bounds_context(rotation(spec), N)
    data = bd.coeffs(ctx, beta)
    assert all(v == Verdict.PASS for v in bd.coeff_checks(ctx, data).values())
    assert bd.regrouped_check(ctx, data, make_theta(beta)) == Verdict.PASS


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SPECS), st.integers(1, 1500), st.sampled_from([cot_pi(), antisym_theta(1), recip_signed_hole()]))
def test_antisymmetric_collapse_and_pair_sign(spec, N, phi):
    ctx = bd.bounds_context(rotation(spec), N)
    for r in range(ctx.n + 1):
        lo, up = bd.antisym_collapsed(ctx, r, phi)
        assert lo.lower <= bd.B_lower(ctx, r, phi).upper and bd.B_lower(ctx, r, phi).lower <= lo.upper
        assert up.lower <= bd.B_upper(ctx, r, phi).upper and bd.B_upper(ctx, r, phi).lower <= up.upper
        if ctx.b(r) < ctx.table.a(r + 1):
            assert bd.antisym_pair_sign(ctx, r, phi) == Verdict.PASS


def test_pair_sign_fails_at_maximal_digit():
    # golden, N = 7 = 5 + 2: b_2 = a_3 = 1 and the pair sum at r = 2 is negative
    ctx = bd.bounds_context(rotation("golden"), 7)
    assert ctx.b(2) == ctx.table.a(3) == 1
    assert bd.antisym_pair_sign(ctx, 2, cot_pi()) == Verdict.FAIL


def test_standard_grid_contents():
    t = rotation("sqrt2m1").table_for(10**6)
    g = bd.standard_grid(t, small=10, n_max=5)
    assert set(range(1, 11)) <= set(g)
    assert {t.q(5) - 1, t.q(5), t.q(5) + 1, 2 * t.q(5)} <= set(g)
    assert 0 not in g
