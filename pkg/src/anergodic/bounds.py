"""Bounds functionals B_r and their duals, the sandwich check, and coefficient data.

For N = sum b_r q_r and a decreasing observable phi, block r contributes
sum_s S_rs phi = sum of phi over orbit indices r00 + 1 .. r00 + b_r q_r, and

    Bbar_r phi <= sum_s S_rs phi <= B_r phi.

phi_rst below is phi evaluated at the orbit point with canonical triple (r, s, t).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import floatenc as fe
from .cf_engine import QuasiperiodTable, Rotation
from .numerics import (
    DEFAULT_POLICY,
    PrecisionPolicy,
    RigorousReal,
    Verdict,
    affine,
    combine,
    prove_le,
)
from .observables import (
    Observable,
    OrbitSums,
    evaluate,
    harmonic,
    harmonic_real,
    partition_sum,
    zeta_enclosure,
)
from .orbit import OrbitContext
from .ostrowski import OstrowskiRep, represent

ZERO = RigorousReal.from_exact(0)


@dataclass
class BoundsContext:
    table: QuasiperiodTable
    rep: OstrowskiRep
    orbit: OrbitContext
    policy: PrecisionPolicy = DEFAULT_POLICY
    cache: dict = field(default_factory=dict)  # Observable -> OrbitSums

    @property
    def n(self) -> int:
        return self.rep.n

    @property
    def N(self) -> int:
        return self.rep.N

    @property
    def alpha(self) -> RigorousReal:
        return self.table.cf.alpha

    def b(self, r: int) -> int:
        return self.rep.digit(r)

    def q(self, r: int) -> int:
        return self.table.q(r)

    def sums(self, phi: Observable) -> OrbitSums:
        s = self.cache.get(phi)
        if s is None or s.nmax < self.N:
            s = OrbitSums(self.alpha, phi, max(self.N, 1), self.policy)
            self.cache[phi] = s
        return s

    def index(self, r: int, s: int, t: int) -> int:
        return self.rep.r00(r) + s * self.q(r) + t

    def point_sum(self, phi: Observable, indices: list[int]) -> RigorousReal:
        if not indices:
            return ZERO
        v = self.sums(phi).values(np.array(indices, dtype=np.int64))
        lo, hi = fe.fsum_interval(v)
        return RigorousReal.from_interval(Fraction(lo), Fraction(hi))

    def value(self, phi: Observable, M: int) -> RigorousReal:
        return self.sums(phi).value(M)


def bounds_context(rot: Rotation, N: int, cache: Optional[dict] = None) -> BoundsContext:
    """Context for S_N on ``rot``; pass a shared ``cache`` to reuse orbit sums across N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    table = rot.table_for(N)
    rep = represent(table, N)
    return BoundsContext(table, rep, OrbitContext(table, rep, rot.policy), rot.policy,
                         cache if cache is not None else {})


def _bar(phi: Observable, x: Fraction) -> RigorousReal:
    """phibar(x) = phi(1 - x)."""
    return evaluate(phi, 1 - x)


# -------------------------------------------------------------- functionals

def _functional(ctx: BoundsContext, r: int, phi: Observable, upper: bool) -> RigorousReal:
    b = ctx.b(r)
    if b == 0:
        return ZERO
    q = ctx.q(r)
    pts = [ctx.index(r, s, q) for s in range(b)]
    if q > 1:
        q1 = ctx.q(r - 1)
        pts += [ctx.index(r, s, q1) for s in range(b)]
    total = ctx.point_sum(phi, pts)
    if q > 1:
        corr = _bar(phi, Fraction(1, q)) if upper else evaluate(phi, Fraction(1, q))
        total = total + b * (partition_sum(phi, q) - corr)
    gate = (r % 2 == 0) if upper else (r % 2 == 1)
    if gate and 2 < q < ctx.q(ctx.n):
        mid = ctx.value(phi, ctx.index(r, 0, q - ctx.q(r - 1)))
        corr = _bar(phi, Fraction(2, q)) if upper else evaluate(phi, Fraction(2, q))
        total = total + (mid - corr)
    return total


def B_upper(ctx: BoundsContext, r: int, phi: Observable) -> RigorousReal:
    """B_r phi."""
    return _functional(ctx, r, phi, True)


def B_lower(ctx: BoundsContext, r: int, phi: Observable) -> RigorousReal:
    """Bbar_r phi, the double dual of B_r."""
    return _functional(ctx, r, phi, False)


def B_dual_upper(ctx: BoundsContext, r: int, phi: Observable) -> RigorousReal:
    """B_r on 1 - alpha at index r + 1, written with alpha data: phibar at the
    orbit points and O_r gating the mid term."""
    from .observables import reflect

    b = ctx.b(r)
    if b == 0:
        return ZERO
    pb = reflect(phi)
    q = ctx.q(r)
    pts = [ctx.index(r, s, q) for s in range(b)]
    if q > 1:
        pts += [ctx.index(r, s, ctx.q(r - 1)) for s in range(b)]
    total = ctx.point_sum(pb, pts)
    if q > 1:
        total = total + b * (partition_sum(phi, q) - _bar(phi, Fraction(1, q)))
    if r % 2 == 1 and 2 < q < ctx.q(ctx.n):
        total = total + (ctx.value(pb, ctx.index(r, 0, q - ctx.q(r - 1))) - _bar(phi, Fraction(2, q)))
    return total


def segment_sum(ctx: BoundsContext, r: int, phi: Observable) -> RigorousReal:
    """sum_{s < b_r} S_rs phi."""
    b = ctx.b(r)
    if b == 0:
        return ZERO
    start = ctx.rep.r00(r)
    return ctx.sums(phi).segment(start, start + b * ctx.q(r))


def antisym_collapsed(ctx: BoundsContext, r: int, phi: Observable) -> tuple[RigorousReal, RigorousReal]:
    """(Bbar_r, B_r) for a decreasing antisymmetric phi, where P_q = 0 and phibar = -phi."""
    b = ctx.b(r)
    if b == 0:
        return ZERO, ZERO
    q = ctx.q(r)
    base = ctx.point_sum(phi, [ctx.index(r, s, q) for s in range(b)])
    up = lo = base
    if q > 1:
        tail = ctx.point_sum(phi, [ctx.index(r, s, ctx.q(r - 1)) for s in range(b)])
        c = evaluate(phi, Fraction(1, q))
        up = up + tail + b * c
        lo = lo + tail - b * c
    if 2 < q < ctx.q(ctx.n):
        mid = ctx.value(phi, ctx.index(r, 0, q - ctx.q(r - 1)))
        c2 = evaluate(phi, Fraction(2, q))
        if r % 2 == 0:
            up = up + mid + c2
        else:
            lo = lo + mid - c2
    return lo, up


def antisym_pair_sign(ctx: BoundsContext, r: int, phi: Observable) -> Verdict:
    """For q_r > 1: sum_s (phi_rsq_r + phi_rsq_{r-1}) >= 0 for r even, <= 0 for r odd.

    Holds for b_r < a_{r+1}; with b_r = a_{r+1} it can fail (golden, N = 7, r = 2).
    """
    b, q = ctx.b(r), ctx.q(r)
    if b == 0 or q <= 1:
        return Verdict.PASS
    x = ctx.point_sum(phi, [ctx.index(r, s, q) for s in range(b)] +
                      [ctx.index(r, s, ctx.q(r - 1)) for s in range(b)])
    return prove_le(0, x) if r % 2 == 0 else prove_le(x, 0)


# ------------------------------------------------------------------ sandwich

@dataclass(frozen=True)
class BoundsRow:
    r: int  # -1 marks the aggregate row over all blocks
    B_lower: RigorousReal
    segment: RigorousReal
    B_upper: RigorousReal
    verdict: Verdict
    note: str = ""


def _overlap(*xs: RigorousReal) -> bool:
    return max(x.lower for x in xs) <= min(x.upper for x in xs)


def is_identity(ctx: BoundsContext, r: int, upper: bool) -> bool:
    """True when the functional equals the block sum term by term.

    That happens for q_r <= 2, and for q_r = 3, b_r = 1 on the side whose
    mid term is active: the only interior point is the mid point and the
    constants cancel.
    """
    q = ctx.q(r)
    if q <= 2:
        return True
    gate = (r % 2 == 0) == upper
    return q == 3 and ctx.b(r) == 1 and gate and q < ctx.q(ctx.n)


def _side(ctx: BoundsContext, r: int, x: RigorousReal, y: RigorousReal, upper: bool) -> Verdict:
    if is_identity(ctx, r, upper):
        return Verdict.PASS if _overlap(x, y) else Verdict.FAIL
    return prove_le(x, y, ctx.policy)


def _row(ctx: BoundsContext, r: int, phi: Observable) -> BoundsRow:
    lo, seg, up = B_lower(ctx, r, phi), segment_sum(ctx, r, phi), B_upper(ctx, r, phi)
    if ctx.b(r) == 0:
        return BoundsRow(r, lo, seg, up, Verdict.PASS, "b_r = 0")
    v = combine([_side(ctx, r, lo, seg, False), _side(ctx, r, seg, up, True)])
    note = ", ".join(k for k, u in (("lower identity", False), ("upper identity", True)) if is_identity(ctx, r, u))
    return BoundsRow(r, lo, seg, up, v, note)


def verify_sandwich(ctx: BoundsContext, phi: Observable) -> list[BoundsRow]:
    """Rows r = 0..n and an aggregate row (r = -1) for Bbar <= S_N <= B."""
    if phi.monotonicity != "decreasing":
        raise ValueError(f"{phi.label} is not declared decreasing")
    rows = [_row(ctx, r, phi) for r in range(ctx.n + 1)]
    lo = sum((x.B_lower for x in rows), ZERO)
    up = sum((x.B_upper for x in rows), ZERO)
    seg = sum((x.segment for x in rows), ZERO)
    total = ctx.sums(phi).total(ctx.N)
    direct = combine([prove_le(lo, total, ctx.policy), prove_le(total, up, ctx.policy)])
    if direct == Verdict.INDETERMINATE:
        # the tiling sum_r segments = S_N is exact, so the rows decide the aggregate
        direct = combine([x.verdict for x in rows]) if _overlap(seg, total) else Verdict.FAIL
    note = "" if _overlap(seg, total) else "segments do not tile S_N"
    if note:
        direct = Verdict.FAIL
    rows.append(BoundsRow(-1, lo, total, up, direct, note))
    return rows


def sandwich_verdict(rows: list[BoundsRow]) -> Verdict:
    return combine(x.verdict for x in rows)


# ------------------------------------------------------- primitive refinement

def primitive_upper_refined(ctx: BoundsContext, r: int, phi: Observable) -> RigorousReal:
    """b_r P_q + [2 <= q_r < q_n] E_r (phi_{r0,q_r-q_{r-1}} - phibar(1/q_r)) + sum_s (E_r phi_rsq_r + O_r phi_rsq_{r-1}).

    At q_r = 2 the mid term is the X_r term, always retained; at q_r = 1 the
    bound is the block sum itself.
    """
    if phi.quadrant != "DL":
        raise ValueError(f"{phi.label} is not a DL primitive")
    b = ctx.b(r)
    if b == 0:
        return ZERO
    q = ctx.q(r)
    if q == 1:
        return ctx.point_sum(phi, [ctx.index(r, s, 1) for s in range(b)])
    t = q if r % 2 == 0 else ctx.q(r - 1)
    total = ctx.point_sum(phi, [ctx.index(r, s, t) for s in range(b)]) + b * partition_sum(phi, q)
    if r % 2 == 0 and 2 <= q < ctx.q(ctx.n):
        total = total + ctx.value(phi, ctx.index(r, 0, q - ctx.q(r - 1))) - _bar(phi, Fraction(1, q))
    return total


def refined_is_identity(ctx: BoundsContext, r: int) -> bool:
    """q_r = 1, or q_r = 2 with b_r = 1 on an even index below n: the refined bound is the block sum."""
    q = ctx.q(r)
    return q == 1 or (q == 2 and ctx.b(r) == 1 and r % 2 == 0 and q < ctx.q(ctx.n))


def verify_refined(ctx: BoundsContext, phi: Observable) -> dict[int, Verdict]:
    """Per r: segment, Bbar_r and B_r all sit below the refined primitive bound."""
    out = {}
    for r in range(ctx.n + 1):
        if ctx.b(r) == 0:
            continue
        ref = primitive_upper_refined(ctx, r, phi)
        xs = [segment_sum(ctx, r, phi), B_lower(ctx, r, phi), B_upper(ctx, r, phi)]
        if refined_is_identity(ctx, r):
            vs = [Verdict.PASS if _overlap(x, ref) or prove_le(x, ref, ctx.policy) == Verdict.PASS
                  else Verdict.FAIL for x in xs]
        else:
            vs = [prove_le(x, ref, ctx.policy) for x in xs]
        out[r] = combine(vs)
    return out


def x_term_sign_hint(ctx: BoundsContext, r: int) -> str:
    """Report-only note on when the q_r = 2 mid term can be positive."""
    if ctx.q(r) != 2 or ctx.b(r) == 0:
        return ""
    if r == 1:
        return "X_1 of phibar can be positive only if a_1 = 2 and a_3 >= 2"
    return "X_2 can be positive only if a_1 = a_2 = 1 and a_4 >= 2"


def a0_bounds(ctx: BoundsContext, r: int, phi: Observable) -> tuple[RigorousReal, RigorousReal]:
    """Closed-form (lower, upper) for the block sum when q_r = 1.

    The orbit points have tracking error in [s/q'_{r+1} + 1/q'_{r+2}, (s+1)/q'_{r+1} + 1/q'_{r+2}];
    even r puts the point there, odd r at one minus it.
    """
    if ctx.q(r) != 1:
        raise ValueError("q_r != 1")
    b = ctx.b(r)
    t = ctx.table
    i1, i2 = 1 / t.qs(r + 1), 1 / t.qs(r + 2)
    near = [affine(i1, s) + i2 for s in range(b)]
    far = [affine(i1, s + 1) + i2 for s in range(b)]
    if r % 2 == 0:
        lo = sum((evaluate(phi, x) for x in far), ZERO)
        up = sum((evaluate(phi, x) for x in near), ZERO)
    else:
        lo = sum((evaluate(phi, 1 - x) for x in near), ZERO)
        up = sum((evaluate(phi, 1 - x) for x in far), ZERO)
    return lo, up


# ----------------------------------------------------------- coefficients

@dataclass(frozen=True)
class CoeffData:
    beta: Fraction
    Q: tuple[RigorousReal, ...]  # Q_r, r = 0..n, with C_r(theta^beta) <= Q_r q'_{r+1}^beta
    C: tuple[RigorousReal, ...]
    c: tuple[int, ...]
    c_bar: tuple[int, ...]
    L: int
    q_L: int

    @property
    def c_max_tail(self) -> int:
        """max_{r <= n-1} c_r (0 when n = 0)."""
        return max(self.c[:-1], default=0)


def c_coeff(rep: OstrowskiRep, table: QuasiperiodTable, r: int, dual: bool = False) -> int:
    b, n = rep.digit(r), rep.n
    even = (r % 2 == 0) != dual
    if even:
        return b - (b > 0) + (r == n)
    return min(b + (rep.digit(r - 1) > 0), table.a(r + 1))


def L_index(rep: OstrowskiRep) -> int:
    """max odd r in [-1, n] with r = -1 or b_{r-1} > 0."""
    best = -1
    for r in range(1, rep.n + 1, 2):
        if rep.digit(r - 1) > 0:
            best = r
    return best


def Q_coefficient(ctx: BoundsContext, r: int, beta: Fraction) -> RigorousReal:
    """Coefficient of q'_{r+1}^beta in the regrouped double sum, from the harmonic forms."""
    beta = Fraction(beta)
    b, n, t = ctx.b(r), ctx.n, ctx.table
    prev = 1 if ctx.b(r - 1) > 0 else 0
    if r % 2 == 0:
        if r == n:
            return harmonic(beta, b).value
        if b <= 1:
            return ZERO
        return harmonic_real(beta, b - 1, 1 + 1 / t.af(r + 2))
    if r == n:
        y = affine(t.af(n + 1), 1, 1 - b)
        return harmonic_real(beta, b, y) + prev
    return harmonic(beta, b, t.a(r + 1) - b + 1).value + prev


def coeffs(ctx: BoundsContext, beta) -> CoeffData:
    beta = Fraction(beta)
    t = ctx.table
    Q, C, c, cb = [], [], [], []
    for r in range(ctx.n + 1):
        qr = Q_coefficient(ctx, r, beta)
        Q.append(qr)
        C.append(qr * t.qs(r + 1).power(beta))
        c.append(c_coeff(ctx.rep, t, r))
        cb.append(c_coeff(ctx.rep, t, r, dual=True))
    L = L_index(ctx.rep)
    return CoeffData(beta, tuple(Q), tuple(C), tuple(c), tuple(cb), L, t.q(L))


def log_plus(x: int) -> RigorousReal:
    return RigorousReal.from_exact(max(x, 1)).log()


def Q_generic_bound(beta: Fraction, c: int) -> RigorousReal:
    """min{zeta(beta), [c > 0] + log+ c}, the bound on H_c^beta."""
    alt = RigorousReal.from_exact(1 if c > 0 else 0) + log_plus(c)
    z = zeta_enclosure(Fraction(beta))
    return alt if z is None else RigorousReal.minimum([z, alt])


def _integer_bases(ctx: BoundsContext, r: int) -> Optional[list[int]]:
    """Q_r as sum of k^-beta over the returned bases, when they are all integers."""
    b, n = ctx.b(r), ctx.n
    if r % 2 == 0:
        return list(range(1, b + 1)) if r == n else ([] if b <= 1 else None)
    if r == n:
        return None
    a = ctx.table.a(r + 1)
    return [1] * (ctx.b(r - 1) > 0) + [a - b + 1 + s for s in range(b)]


def _termwise_le(ctx: BoundsContext, r: int, c: int) -> bool:
    """Exact certificate for Q_r <= H_c: each base of Q_r, smallest first, is
    at least the matching base 1, 2, ... of H_c."""
    bases = _integer_bases(ctx, r)
    if bases is None or len(bases) > c:
        return False
    return all(x >= k for k, x in enumerate(sorted(bases), start=1))


def coeff_checks(ctx: BoundsContext, data: CoeffData) -> dict[str, Verdict]:
    """Per-r inequalities on the coefficients."""
    t, beta = ctx.table, data.beta
    out: dict[str, list[Verdict]] = {"Q<=H_c": [], "Q<=min(zeta,1+log a)": [], "c<=b+1": [],
                                     "q_L<=O_n q_n+E_n q_{n-1}": []}
    for r in range(ctx.n + 1):
        hc = harmonic(beta, data.c[r]).value
        v = prove_le(data.Q[r], hc, ctx.policy)
        if v == Verdict.INDETERMINATE and _termwise_le(ctx, r, data.c[r]):
            v = Verdict.PASS
        out["Q<=H_c"].append(v)
        cap = RigorousReal.from_exact(1) + RigorousReal.from_exact(t.a(r + 1)).log()
        z = zeta_enclosure(beta)
        cap = cap if z is None else RigorousReal.minimum([z, cap])
        out["Q<=min(zeta,1+log a)"].append(prove_le(hc, cap, ctx.policy))
        out["c<=b+1"].append(Verdict.PASS if data.c[r] <= ctx.b(r) + 1 else Verdict.FAIL)
        if beta == 1 and r < ctx.n:
            out.setdefault("Q<=O_r+b_r/2", []).append(
                prove_le(data.Q[r], Fraction(r % 2) + Fraction(ctx.b(r), 2), ctx.policy))
    n = ctx.n
    cap = t.q(n) if n % 2 else t.q(n - 1)
    out["q_L<=O_n q_n+E_n q_{n-1}"].append(Verdict.PASS if data.q_L <= cap else Verdict.FAIL)
    return {k: combine(v) for k, v in out.items()}


def regrouped_double_sum(ctx: BoundsContext, phi: Observable) -> RigorousReal:
    """S^3 phi = sum_r sum_s (E_r phi_rsq_r + O_r phi_rsq_{r-1}), evaluated directly."""
    pts = []
    for r in range(ctx.n + 1):
        t = ctx.q(r) if r % 2 == 0 else ctx.q(r - 1)
        pts += [ctx.index(r, s, t) for s in range(ctx.b(r))]
    return ctx.point_sum(phi, pts)


# ------------------------------------------------------------------ duality

def complement_rotation(rot: Rotation) -> Rotation:
    """The rotation by 1 - alpha."""
    return Rotation(affine(rot.alpha, -1, 1), rot.policy)


@dataclass(frozen=True)
class DualityRow:
    r: int
    via_alpha: RigorousReal  # B_dual_upper with alpha data
    via_complement: RigorousReal  # B_{r+1} on 1 - alpha
    verdict: Verdict


def duality_check(rot: Rotation, N: int, phi: Observable,
                  cache: Optional[dict] = None) -> tuple[list[DualityRow], Verdict]:
    """Compare the dual functional written with alpha data against B on 1 - alpha.

    Needs a_1 >= 2, so that the digits of N for 1 - alpha are those for alpha
    shifted up by one index.  Also checks S_N(phibar) on alpha against S_N(phi)
    on 1 - alpha.
    """
    from .observables import reflect

    ctx = bounds_context(rot, N, cache)
    if ctx.table.a(1) < 2:
        raise ValueError("duality check needs a_1 >= 2; use 1 - alpha as the base")
    dual = bounds_context(complement_rotation(rot), N)
    verdicts = []
    if dual.rep.b != (0,) + ctx.rep.b:
        return [], Verdict.FAIL
    rows = []
    for r in range(ctx.n + 1):
        x, y = B_dual_upper(ctx, r, phi), B_upper(dual, r + 1, phi)
        v = Verdict.PASS if _overlap(x, y) else Verdict.FAIL
        rows.append(DualityRow(r, x, y, v))
        verdicts.append(v)
    s1 = ctx.sums(reflect(phi)).total(N)
    s2 = dual.sums(phi).total(N)
    verdicts.append(Verdict.PASS if _overlap(s1, s2) else Verdict.FAIL)
    return rows, combine(verdicts)


def regrouped_check(ctx: BoundsContext, data: CoeffData, phi: Observable) -> Verdict:
    """S^3 theta^beta <= sum_r C_r, split so the exact part is not compared strictly.

    The r = n terms equal their harmonic form exactly; the rest, including the
    last even term of block n - 1 carried into Q_n, is bounded above.
    """
    t, n, beta = ctx.table, ctx.n, data.beta
    b = ctx.b(n)
    own_pts = [ctx.index(n, s, ctx.q(n) if n % 2 == 0 else ctx.q(n - 1)) for s in range(b)]
    own = ctx.point_sum(phi, own_pts)
    if n % 2 == 0:
        h = harmonic(beta, b).value
    else:
        h = harmonic_real(beta, b, affine(t.af(n + 1), 1, 1 - b))
    exact = h * t.qs(n + 1).power(beta)
    verdicts = [Verdict.PASS if _overlap(own, exact) else Verdict.FAIL]
    pts = []
    for r in range(n):
        tt = ctx.q(r) if r % 2 == 0 else ctx.q(r - 1)
        pts += [ctx.index(r, s, tt) for s in range(ctx.b(r))]
    if pts:
        cap = sum(data.C[:n], ZERO)
        if n % 2 == 1 and ctx.b(n - 1) > 0:
            cap = cap + t.qs(n + 1).power(beta)
        verdicts.append(prove_le(ctx.point_sum(phi, pts), cap, ctx.policy))
    return combine(verdicts)


def standard_grid(table: QuasiperiodTable, small: int = 500, n_max: int = 14) -> list[int]:
    """{1..small} together with q_n, q_n +- 1 and b q_n (1 <= b <= a_{n+1}) for n <= n_max."""
    out = set(range(1, small + 1))
    for n in range(n_max + 1):
        q = table.q(n)
        out.update((q - 1, q, q + 1))
        out.update(b * q for b in range(1, table.a(n + 1) + 1))
    out.discard(0)
    return sorted(out)
