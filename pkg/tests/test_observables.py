from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf, zeta

from anergodic.numerics import SpecError, Verdict
from anergodic.observables import (
    OrbitSums,
    antisym_theta,
    birkhoff_sum_direct,
    check_metadata,
    cot_pi,
    denjoy_koksma_band,
    evaluate,
    harmonic,
    harmonic_bounds,
    make_theta,
    negate,
    parse_observable,
    partition_sum,
    psi_half,
    recip_nearest,
    recip_signed,
    recip_signed_hole,
    reflect,
    theta_bar,
    zeta_enclosure,
)

from conftest import rotation

# S_N values from a 40-digit mpmath sum of phi(frac(r alpha)), independent of the package
ORACLE = {
    ("golden", "theta", 100): "657.0303687667561417328348933879582511813",
    ("golden", "cot", 1000): "-441.7601131012894768758877651646528341611",
    ("sqrt2m1", "theta", 1000): "9934.291341765271013501153072428266781143",
    ("golden", "theta:2", 100): "49861.52956136406603638469394339239287856",
    ("golden", "psi", 2000): "2772.715703794114743226343173992292705507",
}


@pytest.mark.parametrize("key", sorted(ORACLE))
def test_direct_sums_match_oracle(key):
    spec, phi, N = key
    s = birkhoff_sum_direct(rotation(spec), parse_observable(phi), N)
    v = Fraction(ORACLE[key])
    assert s.lower - Fraction(1, 10**30) <= v <= s.upper + Fraction(1, 10**30)
    assert s.width < abs(v) * Fraction(1, 10**9)


def test_orbit_sums_segments_add_up(golden):
    sums = OrbitSums(golden.alpha, cot_pi(), 3000)
    a, b, c = sums.segment(0, 1000), sums.segment(1000, 3000), sums.total(3000)
    assert (a + b).lower <= c.upper and c.lower <= (a + b).upper


def test_orbit_sums_block_path():
    rot = rotation("sqrt2m1")
    sums = OrbitSums(rot.alpha, make_theta(1), 300_000)
    whole = sums.total(300_000)
    direct = birkhoff_sum_direct(rot, make_theta(1), 300_000)
    assert whole.lower <= direct.upper and direct.lower <= whole.upper


@settings(max_examples=40)
@given(st.integers(1, 60), st.fractions(min_value=Fraction(1, 5), max_value=5, max_denominator=20))
def test_harmonic_matches_fraction_sum(k, y):
    exact = sum((1 / (y + s) for s in range(k)), Fraction(0))
    assert harmonic(1, k, y).value.contains(exact)
    lo, hi = harmonic_bounds(1, k, y)
    assert lo.upper < exact <= hi.upper


@pytest.mark.parametrize("beta", [Fraction(3, 2), Fraction(2), Fraction(5, 2)])
def test_zeta_enclosure_contains_mpmath(beta):
    mp.dps = 40
    z = zeta(mpf(beta.numerator) / beta.denominator)
    enc = zeta_enclosure(beta)
    assert enc.lower <= Fraction(str(z + mpf(10) ** -35)) and Fraction(str(z - mpf(10) ** -35)) <= enc.upper
    assert enc.width < Fraction(1, 10**9)
    assert zeta_enclosure(Fraction(1)) is None


def test_partition_sums():
    # sum_{t=1}^{k-1} 1/(t/k) = k H_{k-1}
    for k in (2, 5, 40, 300):
        exact = k * sum(Fraction(1, t) for t in range(1, k))
        assert partition_sum(make_theta(1), k).contains(exact)
    assert partition_sum(cot_pi(), 17).contains(0)


@pytest.mark.parametrize("phi", [make_theta(1), make_theta(Fraction(3, 2)), theta_bar(1), recip_nearest(),
                                 recip_signed(), recip_signed_hole(), cot_pi(), antisym_theta(2), psi_half()])
def test_metadata_is_consistent(phi):
    assert check_metadata(phi) == Verdict.PASS


def test_reflect_and_negate():
    th = make_theta(1)
    r = reflect(th)
    assert r.monotonicity == "increasing"
    assert evaluate(r, Fraction(1, 4)).exact == Fraction(4, 3)
    n = negate(th)
    assert evaluate(n, Fraction(1, 4)).exact == -4
    assert evaluate(th, 0).exact == 0  # normalised at its singular end


def test_hole_variant_differs_only_at_half():
    assert evaluate(recip_signed(), Fraction(1, 2)).exact == -2
    assert evaluate(recip_signed_hole(), Fraction(1, 2)).exact == 0
    assert evaluate(recip_signed_hole(), Fraction(1, 3)).exact == 3


def test_nearest_decomposition_pointwise():
    for x in (Fraction(1, 7), Fraction(1, 2), Fraction(5, 8), Fraction(99, 100)):
        lhs = evaluate(recip_nearest(), x)
        rhs = evaluate(make_theta(1), x) + evaluate(theta_bar(1), x) - evaluate(psi_half(), x)
        assert lhs.exact == rhs.exact


@pytest.mark.parametrize("spec", ["golden", "sqrt2m1", "cf:1,2,[3]"])
def test_denjoy_koksma_band(spec):
    rot = rotation(spec)
    sums = OrbitSums(rot.alpha, psi_half(), 2000)
    for N in (1, 2, 3, 10, 99, 500, 1999, 2000):
        assert denjoy_koksma_band(rot, N, sums).verdict == Verdict.PASS


def test_parse_observable_errors():
    with pytest.raises(SpecError):
        parse_observable("nope")
    with pytest.raises(SpecError):
        parse_observable("theta:1/2")
    assert parse_observable("theta:3/2").beta == Fraction(3, 2)


def test_partition_sum_respects_value_at_half():
    for k in (4, 610, 20002):
        assert partition_sum(recip_signed_hole(), k).contains(0)
        assert partition_sum(recip_signed(), k).contains(-2)
    assert check_metadata(recip_signed()) == Verdict.PASS
    assert recip_signed().symmetry == "none"
