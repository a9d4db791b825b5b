from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf, sqrt

from anergodic.numerics import Verdict
from anergodic.orbit import (
    alpha_rst,
    epsilon,
    epsilon_bounds,
    make_context,
    origin_interval_triples,
    verify_distribution,
)
from anergodic.ostrowski import triples

from conftest import rotation

SPECS = ["golden", "sqrt2m1", "cf:1,2,[3]", "cf:[1,3]", "cf:3,1,[2,2,7]"]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SPECS), st.integers(1, 400))
def test_epsilon_envelopes(spec, N):
    rot = rotation(spec)
    ctx = make_context(rot.table_for(N), N)
    for M, tr in triples(ctx.rep):
        if M % 7 and M != N:
            continue
        assert epsilon_bounds(ctx, tr).verdict == Verdict.PASS


def test_tracking_error_oracle_golden():
    # {M alpha} = {t p_r/q_r + (-1)^r eps}, checked with an independent mpmath evaluation
    mp.dps = 60
    g = (sqrt(5) - 1) / 2
    rot = rotation("golden")
    N = 300
    ctx = make_context(rot.table_for(N), N)
    for M, tr in triples(ctx.rep):
        x = alpha_rst(ctx, tr)
        direct = (M * g) % 1
        assert abs(float(x) - float(direct)) < 1e-30
        e = epsilon(ctx, tr)
        p, q = ctx.table.p(tr.r), ctx.table.q(tr.r)
        z = mpf(tr.t * p) / q + (1 if tr.r % 2 == 0 else -1) * mpf(float(e))
        assert abs((z - direct) - round(float(z - direct))) < 1e-12


def test_verify_distribution_small_grid():
    for spec in SPECS:
        rep = verify_distribution(rotation(spec), range(1, 300))
        assert rep.verdict() == Verdict.PASS
        assert rep.indeterminate_rate() == 0


def test_origin_triples_near_zero():
    rot = rotation("sqrt2m1")
    N = 500
    ctx = make_context(rot.table_for(N), N)
    for r in range(ctx.n + 1):
        for ot in origin_interval_triples(ctx, r):
            assert ot is not None
