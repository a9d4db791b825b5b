"""Continued fractions of a rotation number and the sequences built on them.

Convention: alpha in (0, 1), a_0 = 0 and partial quotients are indexed from 1.
Complete quotients satisfy a'_r = a_r + 1/a'_{r+1} with a'_1 = 1/alpha.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from mpmath import iv

from .numerics import (
    DEFAULT_POLICY,
    AlphaSpec,
    IndeterminateError,
    PrecisionPolicy,
    RigorousReal,
    Verdict,
    iv_floor_pair,
    parse_alpha_spec,
    policy_for,
    realize,
    working_bits,
)


class TableTooShallow(ValueError):
    pass


@dataclass(frozen=True)
class CFExpansion:
    alpha: RigorousReal
    a: tuple[int, ...]  # a[0] = 0, a[r] for r = 1..depth
    a_full: tuple[Optional[RigorousReal], ...]  # a_full[r] = a'_r, r = 1..depth+1; a_full[0] unused

    @property
    def depth(self) -> int:
        return len(self.a) - 1


def expand(alpha: RigorousReal, depth: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> CFExpansion:
    """Partial quotients a_1..a_depth and complete quotients a'_1..a'_{depth+1}."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if alpha.surd is not None:
        return _expand_surd(alpha, depth)
    return _expand_interval(alpha, depth, policy)


def _expand_surd(alpha: RigorousReal, depth: int) -> CFExpansion:
    x = alpha.surd.reciprocal()
    digits, full = [0], [None]
    for _ in range(depth + 1):
        k = x.floor()
        full.append(RigorousReal.from_surd(x, alpha.bits))
        digits.append(k)
        x = (x - k).reciprocal()
    if any(d < 1 for d in digits[1:]):
        raise ValueError("alpha outside (0, 1)")
    return CFExpansion(alpha, tuple(digits[: depth + 1]), tuple(full))


def _expand_interval(alpha: RigorousReal, depth: int, policy: PrecisionPolicy) -> CFExpansion:
    digits = [0]

    def chain(bits: int, count: int) -> list:
        out = []
        with working_bits(bits):
            x = 1 / alpha.at(bits)
            out.append(x)
            for r in range(1, count):
                x = 1 / (x - digits[r])
                out.append(x)
        return out

    for r in range(1, depth + 2):
        for bits in policy.schedule():
            x = chain(bits, r)[-1]
            lo, hi = iv_floor_pair(x)
            if lo == hi:
                break
        else:
            raise IndeterminateError(f"digit a_{r} undecidable: alpha too close to a rational")
        digits.append(lo)
    full: list = [None]
    for r in range(1, depth + 2):
        full.append(RigorousReal(lambda b, r=r: chain(b, r)[-1], alpha.bits))
    return CFExpansion(alpha, tuple(digits[: depth + 1]), tuple(full))


@dataclass(frozen=True)
class QuasiperiodTable:
    """Convergents p_r/q_r for r = -2..depth and error periods q'_r for r = 0..depth+1."""

    cf: CFExpansion
    p_seq: tuple[int, ...]  # index r + 2
    q_seq: tuple[int, ...]
    q_slash: tuple[RigorousReal, ...]  # index r
    digits: tuple[int, ...] = field(default=())  # a_r for r = 0..depth

    @property
    def depth(self) -> int:
        return len(self.p_seq) - 3

    def p(self, r: int) -> int:
        return self.p_seq[r + 2]

    def q(self, r: int) -> int:
        if r < -2 or r > self.depth:
            raise TableTooShallow(f"q_{r} outside table depth {self.depth}")
        return self.q_seq[r + 2]

    def a(self, r: int) -> int:
        return self.digits[r]

    def af(self, r: int) -> RigorousReal:
        return self.cf.a_full[r]

    def qs(self, r: int) -> RigorousReal:
        if r > len(self.q_slash) - 1:
            raise TableTooShallow(f"q'_{r} outside table")
        return self.q_slash[r]


def quasiperiods(cf: CFExpansion) -> QuasiperiodTable:
    a = list(cf.a)
    p, q = [0, 1], [1, 0]
    for r in range(0, cf.depth + 1):
        p.append(a[r] * p[-1] + p[-2])
        q.append(a[r] * q[-1] + q[-2])
    qs = [RigorousReal.from_exact(1)]
    for r in range(1, cf.depth + 2):
        q1, q2 = q[r + 1], q[r]  # q_{r-1}, q_{r-2}
        af = cf.a_full[r]
        if af.surd is not None:
            qs.append(RigorousReal.from_surd(af.surd.affine(q1, q2), af.bits))
        else:
            qs.append(af * q1 + q2)
    return QuasiperiodTable(cf, tuple(p), tuple(q), tuple(qs), tuple(a))


def verify_determinant(table: QuasiperiodTable) -> tuple[Verdict, Optional[int]]:
    """Exact check of p_{r+1} q_r - p_r q_{r+1} = (-1)^r for 0 <= r < depth."""
    for r in range(0, table.depth):
        if table.p(r + 1) * table.q(r) - table.p(r) * table.q(r + 1) != (-1) ** r:
            return Verdict.FAIL, r
    return Verdict.PASS, None


def verify_recurrences(table: QuasiperiodTable) -> tuple[Verdict, Optional[int]]:
    for r in range(0, table.depth + 1):
        ar = table.a(r)
        if table.q(r) != ar * table.q(r - 1) + table.q(r - 2) or table.p(r) != ar * table.p(r - 1) + table.p(r - 2):
            return Verdict.FAIL, r
    return Verdict.PASS, None


@dataclass(frozen=True)
class TypeData:
    A: tuple[Optional[Fraction], ...]  # index n >= 1
    A_slash: tuple[Optional[RigorousReal], ...]
    a_max: tuple[int, ...]
    golden_log: RigorousReal


def golden_log() -> RigorousReal:
    def build(b):
        with working_bits(b):
            return iv.log((1 + iv.sqrt(iv.mpf(5))) / 2)

    return RigorousReal(build)


def type_functions(table: QuasiperiodTable, n: Optional[int] = None) -> TypeData:
    n = table.depth if n is None else n
    A, As, amax = [None], [None], [0]
    bestA = None
    ratios = []
    for r in range(1, n + 1):
        ratio = Fraction(table.q(r), table.q(r - 1))
        bestA = ratio if bestA is None else max(bestA, ratio)
        ratios.append(table.qs(r) / table.q(r - 1))
        A.append(bestA)
        As.append(RigorousReal.maximum(ratios))
        amax.append(max(amax[-1], table.a(r)))
    return TypeData(tuple(A), tuple(As), tuple(amax), golden_log())


def A_upto(table: QuasiperiodTable, n: int) -> Fraction:
    """A_n = max_{1<=r<=n} q_r/q_{r-1}."""
    return max(Fraction(table.q(r), table.q(r - 1)) for r in range(1, n + 1))


def A_slash_upto(table: QuasiperiodTable, n: int) -> RigorousReal:
    """A'_n = max_{1<=r<=n} q'_r/q_{r-1}."""
    return RigorousReal.maximum(table.qs(r) / table.q(r - 1) for r in range(1, n + 1))


def index_n(table: QuasiperiodTable, N: int) -> int:
    """n = max{t : q_t <= N}."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if table.q(table.depth) <= N:
        raise TableTooShallow(f"q_{table.depth} = {table.q(table.depth)} <= N = {N}")
    n = 0
    while table.q(n + 1) <= N:
        n += 1
    return n


def dual_expansion(cf: CFExpansion) -> CFExpansion:
    """Expansion of 1 - alpha for alpha < 1/2, built by the index shift."""
    if cf.depth < 3:
        raise ValueError("depth must be >= 3")
    if cf.a[1] < 2:
        raise ValueError("dual expansion needs alpha < 1/2 (a_1 >= 2)")
    alpha_bar = 1 - cf.alpha
    if cf.alpha.surd is not None:
        alpha_bar.surd = -cf.alpha.surd + 1
    digits = (0, 1, cf.a[1] - 1) + tuple(cf.a[2:])
    af1 = 1 / alpha_bar
    if alpha_bar.surd is not None:
        af1.surd = alpha_bar.surd.reciprocal()
    af2 = cf.a_full[1] - 1
    if cf.a_full[1].surd is not None:
        af2.surd = cf.a_full[1].surd - 1
    full = (None, af1, af2) + tuple(cf.a_full[2:])
    return CFExpansion(alpha_bar, digits, full)


def depth_bounds(table: QuasiperiodTable, n: int, policy: PrecisionPolicy = DEFAULT_POLICY):
    """(lower, upper, verdict) for log q_n / log A_n <= n <= log q_n / log phi + 1.

    ``lower`` is None when A_n = 1, where the left inequality is vacuous.
    """
    from .numerics import prove_le, combine

    qn = RigorousReal.from_exact(table.q(n))
    logq = qn.log()
    upper = logq / golden_log() + 1
    An = A_upto(table, n) if n >= 1 else Fraction(1)
    verdicts = [prove_le(n, upper, policy)]
    lower = None
    if An > 1:
        lower = logq / RigorousReal.from_exact(An).log()
        verdicts.append(prove_le(lower, n, policy))
    return lower, upper, combine(verdicts)


class Rotation:
    """A rotation number with continued-fraction data extended on demand."""

    def __init__(self, alpha: RigorousReal, policy: PrecisionPolicy = DEFAULT_POLICY,
                 spec: Optional[AlphaSpec] = None, max_depth: int = 400):
        self.alpha = alpha
        self.policy = policy
        self.spec = spec
        self.max_depth = max_depth
        self._table: Optional[QuasiperiodTable] = None

    @classmethod
    def from_spec(cls, spec, policy: PrecisionPolicy = DEFAULT_POLICY) -> "Rotation":
        if isinstance(spec, str):
            spec = parse_alpha_spec(spec)
        pol = policy_for(spec, policy)
        return cls(realize(spec, pol), pol, spec)

    @property
    def label(self) -> str:
        return self.spec.text if self.spec is not None else repr(self.alpha)

    def table(self, depth: int) -> QuasiperiodTable:
        if depth > self.max_depth:
            raise TableTooShallow(f"depth {depth} above cap {self.max_depth}")
        if self._table is None or self._table.depth < depth:
            d = max(depth, 2 * self._table.depth if self._table else 8)
            d = min(d, self.max_depth)
            self._table = quasiperiods(expand(self.alpha, d, self.policy))
        return self._table

    def table_for(self, N: int, extra: int = 3) -> QuasiperiodTable:
        """A table with q_{depth - extra} > N."""
        t = self.table(8)
        while True:
            d = t.depth - extra
            if d >= 0 and t.q(d) > N:
                return t
            t = self.table(t.depth * 2)
