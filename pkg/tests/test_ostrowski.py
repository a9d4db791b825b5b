from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from anergodic.numerics import Verdict
from anergodic.ostrowski import (
    CanonicalTriple,
    all_triples,
    decompose_orbit,
    digit_sum,
    lexmax_admissible,
    represent,
    triple_of,
    triples,
    validate,
    value_of,
)

from conftest import rotation

SPECS = ["golden", "sqrt2m1", "cf:1,2,[3]", "cf:[4,1]", "cf:2,[1,5]"]


def zeckendorf(N: int) -> list[int]:
    """Classic greedy Zeckendorf over 1, 2, 3, 5, 8, ..."""
    fib = [1, 2]
    while fib[-1] <= N:
        fib.append(fib[-1] + fib[-2])
    out = []
    for f in reversed(fib):
        if f <= N:
            out.append(f)
            N -= f
    return out


@given(st.integers(1, 10**6))
def test_golden_digits_are_zeckendorf(N):
    t = rotation("golden").table_for(N)
    rep = represent(t, N)
    parts = sorted((t.q(r) for r, b in enumerate(rep.b) if b), reverse=True)
    assert parts == zeckendorf(N)
    assert all(b <= 1 for b in rep.b)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SPECS), st.integers(1, 2000))
def test_greedy_is_lexmax(spec, N):
    t = rotation(spec).table_for(N)
    rep = represent(t, N)
    assert validate(rep)[0] == Verdict.PASS
    assert lexmax_admissible(t, N) == rep.b


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SPECS), st.integers(1, 3000))
def test_triples_round_trip(spec, N):
    rep = represent(rotation(spec).table_for(N), N)
    seen = [M for M, tr in triples(rep)]
    assert sorted(seen) == list(range(1, N + 1))
    for M in (1, N, (N + 1) // 2):
        assert value_of(rep, triple_of(rep, M)) == M
    vec = all_triples(rep)
    for M, tr in triples(rep):
        assert (vec["r"][M - 1], vec["s"][M - 1], vec["t"][M - 1]) == (tr.r, tr.s, tr.t)


def test_blocks_tile_the_orbit():
    rep = represent(rotation("sqrt2m1").table_for(1000), 1000)
    blocks = decompose_orbit(rep)
    assert sum(b.length for b in blocks) == 1000
    assert blocks[0].start == 1
    for a, b in zip(blocks, blocks[1:]):
        assert b.start == a.start + a.length


def test_digit_sum_at_b_q_n():
    t = rotation("sqrt2m1").table_for(10**5)
    for n in range(1, 10):
        for b in range(1, t.a(n + 1) + 1):
            assert digit_sum(represent(t, b * t.q(n))) == b


def test_validate_flags_bad_digits():
    t = rotation("golden").table_for(100)
    rep = represent(t, 4)
    bad = type(rep)(4, (0, 1, 1), t)  # q_1 + q_2 = 3 != 4
    assert validate(bad)[0] == Verdict.FAIL
    assert CanonicalTriple(2, 0, 1).E == 1
