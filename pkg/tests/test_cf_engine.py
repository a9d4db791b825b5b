from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf, sqrt

from anergodic.cf_engine import (
    A_slash_upto,
    A_upto,
    Rotation,
    TableTooShallow,
    index_n,
    type_functions,
    verify_determinant,
    verify_recurrences,
)
from anergodic.numerics import Verdict, prove_le, random_periodic_spec

from conftest import rotation

FIB = [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233]


def test_golden_quasiperiods_are_fibonacci(golden):
    t = golden.table(12)
    assert [t.q(r) for r in range(13)] == FIB
    assert [t.p(r) for r in range(1, 13)] == FIB[:12]
    assert all(t.a(r) == 1 for r in range(1, 12))


def test_error_periods_golden_oracle(golden):
    # q'_r = q_r + q_{r-1}/a'_{r+1} with a' = phi throughout; independent mpmath evaluation
    mp.dps = 50
    phi = (1 + sqrt(5)) / 2
    t = golden.table(12)
    for r in range(1, 11):
        expect = FIB[r] + FIB[r - 1] / phi
        assert t.qs(r).lower <= Fraction(str(expect + mpf(10) ** -40))
        assert t.qs(r).upper >= Fraction(str(expect - mpf(10) ** -40))


def test_error_period_is_product_of_complete_quotients(sqrt2m1):
    t = sqrt2m1.table(12)
    prod = t.af(1)
    for r in range(2, 10):
        prod = prod * t.af(r)
        diff = prod - t.qs(r)
        assert abs(float(diff)) < 1e-20 * float(prod)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_cf_identities_random_periodic(seed):
    rot = Rotation.from_spec(random_periodic_spec(random.Random(seed)))
    t = rot.table(20)
    assert verify_determinant(t)[0] == Verdict.PASS
    assert verify_recurrences(t)[0] == Verdict.PASS
    for r in range(2, 18):
        assert prove_le(t.q(r), t.qs(r), strict=True) == Verdict.PASS
        assert prove_le(t.qs(r), t.q(r) + t.q(r - 1), strict=True) == Verdict.PASS


def test_type_functions_golden(golden):
    t = golden.table(12)
    assert A_upto(t, 1) == 1
    assert A_upto(t, 5) == 2
    assert float(A_slash_upto(t, 5)) == pytest.approx(float(t.qs(2)) / t.q(1))
    td = type_functions(t, 8)
    assert td.a_max[8] == 1
    assert all(td.a_max[r] <= td.A[r] for r in range(1, 9))


def test_index_n_and_shallow_table():
    t = Rotation.from_spec("golden").table(12)  # fresh: the shared rotation may be deeper
    assert t.depth == 12
    assert index_n(t, 1) == 1
    assert index_n(t, 88) == 9
    assert index_n(t, 89) == 10
    with pytest.raises(TableTooShallow):
        index_n(t, 10**9)
    with pytest.raises(ValueError):
        index_n(t, 0)


def test_table_for_extends_on_demand():
    rot = rotation("cf:1,2,[3]")
    t = rot.table_for(10**7)
    assert t.q(t.depth - 3) > 10**7
