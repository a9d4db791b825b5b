"""Ostrowski numeration N = sum b_r q_r and the canonical (r, s, t) addressing.

For a representation with top index n, ``r00`` denotes sum_{u>r} b_u q_u, so
n00 = 0 and (-1)00 = N.  An orbit index M in [1, N] sits in block r when
r00 < M <= (r-1)00, i.e. M = r00 + s q_r + t with 0 <= s < b_r, 1 <= t <= q_r.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .cf_engine import QuasiperiodTable, index_n
from .numerics import Verdict


@dataclass(frozen=True)
class CanonicalTriple:
    r: int
    s: int
    t: int

    @property
    def E(self) -> int:
        return int(self.r % 2 == 0)

    @property
    def O(self) -> int:
        return int(self.r % 2 == 1)


@dataclass(frozen=True)
class OstrowskiRep:
    N: int
    b: tuple[int, ...]  # b_0..b_n
    table: QuasiperiodTable

    @property
    def n(self) -> int:
        return len(self.b) - 1

    def digit(self, r: int) -> int:
        return self.b[r] if 0 <= r < len(self.b) else 0

    def r00(self, r: int) -> int:
        """sum_{u>r} b_u q_u for -1 <= r <= n."""
        return sum(self.b[u] * self.table.q(u) for u in range(max(r + 1, 0), len(self.b)))

    def heads(self) -> list[int]:
        """[r00 for r = 0..n]."""
        out, acc = [0] * len(self.b), 0
        for r in range(self.n, -1, -1):
            out[r] = acc
            acc += self.b[r] * self.table.q(r)
        return out


def represent(table: QuasiperiodTable, N: int) -> OstrowskiRep:
    """Greedy digits: maximise b_n, then b_{n-1}, and so on."""
    if N < 0:
        raise ValueError("N must be >= 0")
    if N == 0:
        return OstrowskiRep(0, (), table)
    n = index_n(table, N)
    b = [0] * (n + 1)
    rem = N
    for r in range(n, -1, -1):
        b[r], rem = divmod(rem, table.q(r))
    return OstrowskiRep(N, tuple(b), table)


def validate(rep: OstrowskiRep) -> tuple[Verdict, str]:
    t, b = rep.table, rep.b
    if any(x < 0 for x in b):
        return Verdict.FAIL, "negative digit"
    if sum(x * t.q(r) for r, x in enumerate(b)) != rep.N:
        return Verdict.FAIL, "digits do not sum to N"
    if rep.N == 0:
        return (Verdict.PASS, "") if not b else (Verdict.FAIL, "nonempty digits for N = 0")
    if b[-1] < 1:
        return Verdict.FAIL, "leading digit b_n = 0"
    if t.q(1) == 1 and b[0] != 0:
        return Verdict.FAIL, "q_1 = 1 forces b_0 = 0"
    if b[0] >= t.a(1):
        return Verdict.FAIL, "b_0 >= a_1"
    for r, x in enumerate(b):
        if r + 1 <= t.depth and x > t.a(r + 1):
            return Verdict.FAIL, f"b_{r} > a_{r + 1}"
        if r >= 1 and r + 1 <= t.depth and x == t.a(r + 1) and b[r - 1] != 0:
            return Verdict.FAIL, f"b_{r} = a_{r + 1} but b_{r - 1} != 0"
    return Verdict.PASS, ""


def triple_of(rep: OstrowskiRep, M: int) -> CanonicalTriple:
    if not 1 <= M <= rep.N:
        raise ValueError(f"M = {M} outside [1, {rep.N}]")
    heads = rep.heads()
    for r in range(0, rep.n + 1):
        if heads[r] < M:
            q = rep.table.q(r)
            s = (M - 1 - heads[r]) // q
            return CanonicalTriple(r, s, M - heads[r] - s * q)
    raise AssertionError("unreachable: n00 = 0 < M")


def value_of(rep: OstrowskiRep, triple: CanonicalTriple) -> int:
    if triple.r == -1:
        return rep.N
    return rep.r00(triple.r) + triple.s * rep.table.q(triple.r) + triple.t


def digit_sum(rep: OstrowskiRep) -> int:
    return sum(rep.b)


@dataclass(frozen=True)
class Block:
    r: int
    s: int
    start: int  # first orbit index
    length: int


def decompose_orbit(rep: OstrowskiRep) -> list[Block]:
    out = []
    heads = rep.heads()
    for r in range(rep.n, -1, -1):
        q = rep.table.q(r)
        for s in range(rep.b[r]):
            out.append(Block(r, s, heads[r] + s * q + 1, q))
    return out


def triples(rep: OstrowskiRep) -> Iterator[tuple[int, CanonicalTriple]]:
    for blk in decompose_orbit(rep):
        for t in range(1, blk.length + 1):
            yield blk.start + t - 1, CanonicalTriple(blk.r, blk.s, t)


def all_triples(rep: OstrowskiRep) -> dict[str, np.ndarray]:
    """Vectorized canonical triples for M = 1..N (arrays indexed by M - 1)."""
    M = np.arange(1, rep.N + 1, dtype=np.int64)
    if rep.N == 0:
        e = np.zeros(0, dtype=np.int64)
        return {"M": M, "r": e, "s": e, "t": e, "head": e}
    heads = np.array(rep.heads(), dtype=np.int64)  # nonincreasing in r
    qs = np.array([rep.table.q(r) for r in range(rep.n + 1)], dtype=np.int64)
    # r = min{k : heads[k] < M}; heads reversed is nondecreasing
    rev = heads[::-1]
    pos = np.searchsorted(rev, M, side="left")  # count of k with heads[k] < M
    r = rep.n - pos + 1
    head = heads[r]
    q = qs[r]
    s = (M - 1 - head) // q
    t = M - head - s * q
    return {"M": M, "r": r, "s": s, "t": t, "head": head}


def admissible_digits(table: QuasiperiodTable, b: tuple[int, ...]) -> bool:
    if not b or b[-1] < 1:
        return False
    if b[0] >= table.a(1) or (table.q(1) == 1 and b[0] != 0):
        return False
    for r in range(len(b)):
        if b[r] > table.a(r + 1):
            return False
        if r >= 1 and b[r] == table.a(r + 1) and b[r - 1] != 0:
            return False
    return True


def exhaustive_representations(table: QuasiperiodTable, N: int) -> list[tuple[int, ...]]:
    """Every digit vector with b_r <= a_{r+1} and top digit at index n summing to N.

    Independent of ``represent``: plain enumeration with a capacity prune.
    """
    if N == 0:
        return [()]
    n = index_n(table, N)
    cap = [0] * (n + 2)  # cap[r] = max reachable sum using indices < r
    for r in range(n + 1):
        cap[r + 1] = cap[r] + table.a(r + 1) * table.q(r)
    found = []

    def search(r: int, rem: int, acc: list[int]):
        if r < 0:
            if rem == 0:
                found.append(tuple(reversed(acc)))
            return
        for x in range(min(table.a(r + 1), rem // table.q(r)) + 1):
            left = rem - x * table.q(r)
            if left <= cap[r]:
                acc.append(x)
                search(r - 1, left, acc)
                acc.pop()

    search(n, N, [])
    return found


def lexmax_admissible(table: QuasiperiodTable, N: int) -> Optional[tuple[int, ...]]:
    """Lexicographic maximum (top index first) of the admissible vectors."""
    cands = [b for b in exhaustive_representations(table, N) if N == 0 or admissible_digits(table, b)]
    if not cands:
        return None
    return max(cands, key=lambda b: tuple(reversed(b)))
