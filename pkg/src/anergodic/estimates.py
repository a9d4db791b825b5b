"""Upper and lower estimates for S_N theta^beta.

S_N theta^beta <= S1 + S2 + S3 where S1 collects partition sums, S2 the
mid-point corrections and S3 the regrouped double sum.  Three ways of
bounding S3 are offered (methods A, B and C); each total is compared with
the directly computed sum.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import bounds as bd
from .cf_engine import A_slash_upto, Rotation, golden_log
from .numerics import (
    RigorousReal,
    Verdict,
    combine,
    prove_le,
)
from .observables import (
    evaluate,
    harmonic,
    make_theta,
    partition_sum,
    theta_bar,
    zeta_enclosure,
)

ZERO = RigorousReal.from_exact(0)
ONE = RigorousReal.from_exact(1)
METHODS = ("A", "B", "C")
# claims that decide the report verdict; the rest are component diagnostics,
# which can be exact ties (e.g. S3 at N = q_n) and then stay INDETERMINATE
HEADLINE = ("total_A", "total_B", "total_C", "lower_single", "lower_symmetric", "split")


def _rr(x) -> RigorousReal:
    return RigorousReal.lift(x)


def _log(k: int) -> RigorousReal:
    """log k for an integer k >= 1."""
    return RigorousReal.from_exact(k).log()


def _minimum(values: list[RigorousReal]) -> RigorousReal:
    return values[0] if len(values) == 1 else RigorousReal.minimum(values)


@dataclass
class EstimateReport:
    label: str
    N: int
    beta: Fraction
    n: int
    S1: RigorousReal
    S2: RigorousReal
    S3_A: RigorousReal
    S3_B: RigorousReal
    S3_C: RigorousReal
    totals: dict[str, RigorousReal]
    lower_single: RigorousReal
    lower_symmetric: RigorousReal
    direct: RigorousReal
    head_single: RigorousReal  # S_{b_n q_n} theta^beta
    head_symmetric: RigorousReal  # S_{b_n q_n} (theta^beta + thetabar^beta)
    actual: dict[str, RigorousReal] = field(default_factory=dict)
    Q_n: Optional[RigorousReal] = None
    Q_n_relaxed: Optional[RigorousReal] = None
    verdicts: dict[str, Verdict] = field(default_factory=dict)

    @property
    def verdict(self) -> Verdict:
        return combine(self.verdicts[k] for k in HEADLINE)

    def best(self) -> tuple[str, RigorousReal]:
        """The method with the smallest total (by midpoint)."""
        k = min(METHODS, key=lambda m: float(self.totals[m]))
        return k, self.totals[k]


# ------------------------------------------------------------ components

def actual_components(ctx: bd.BoundsContext, phi) -> dict[str, RigorousReal]:
    """S1, S2, S3 of phi evaluated from orbit points and partition sums."""
    s1 = sum((ctx.b(r) * partition_sum(phi, ctx.q(r)) for r in range(ctx.n + 1) if ctx.q(r) > 1), ZERO)
    s2 = ZERO
    qn = ctx.q(ctx.n)
    for r in range(0, ctx.n + 1, 2):
        q = ctx.q(r)
        if ctx.b(r) > 0 and 2 <= q < qn:
            mid = ctx.value(phi, ctx.index(r, 0, q - ctx.q(r - 1)))
            s2 = s2 + mid - evaluate(phi, 1 - Fraction(1, q))
    return {"S1": s1, "S2": s2, "S3": bd.regrouped_double_sum(ctx, phi)}


def s1_bound(ctx: bd.BoundsContext, beta: Fraction) -> RigorousReal:
    """N^beta min{zeta(beta), 1 + log q_n}."""
    alt = ONE + _log(ctx.q(ctx.n))
    z = zeta_enclosure(beta)
    return _rr(ctx.N).power(beta) * (alt if z is None else _minimum([z, alt]))


def _geo(beta: Fraction) -> RigorousReal:
    """1 / (1 - 2^-beta)."""
    return ONE / (ONE - _rr(2).power(-beta))


def s2_bound(ctx: bd.BoundsContext, beta: Fraction) -> RigorousReal:
    """2^beta (O_n min{q_{n-1}^beta/(1-2^-beta), q_n^beta} + E_n min{q_{n-2}^beta/(1-2^-beta), q_{n-1}^beta}),
    plus 3^beta - 2^beta for a q_r = 2 mid term below n on an even index.
    """
    n = ctx.n
    g = _geo(beta)
    hi, lo = (n, n - 1) if n % 2 == 1 else (n - 1, n - 2)
    p = lambda k: _rr(ctx.q(k)).power(beta)
    total = _rr(2).power(beta) * _minimum([g * p(lo), p(hi)])
    for r in range(0, n + 1):
        if r % 2 == 0 and ctx.q(r) == 2 < ctx.q(n) and ctx.b(r) > 0:
            total = total + _rr(3).power(beta) - _rr(2).power(beta)
    return total


def tail_qs(ctx: bd.BoundsContext, beta: Fraction) -> RigorousReal:
    """sum_{r<n} q'_{r+1}^beta."""
    return sum((ctx.table.qs(r).power(beta) for r in range(1, ctx.n + 1)), ZERO)


def q_n_relaxed(ctx: bd.BoundsContext, beta: Fraction) -> RigorousReal:
    """min{zeta, E_n(1 + log b_n) + O_n([b_{n-1}>0] + log-form)} for the head coefficient."""
    n, b = ctx.n, ctx.b(ctx.n)
    a = ctx.table.a(n + 1)
    if n % 2 == 0:
        alt = ONE + _log(b)
    else:
        alt = _rr(1 if ctx.b(n - 1) > 0 else 0)
        if b < a:
            alt = alt + (_log(a) - _log(a - b))
        else:
            alt = alt + ONE + _log(a)
    z = zeta_enclosure(beta)
    return alt if z is None else _minimum([z, alt])


def method_A(ctx: bd.BoundsContext, data: bd.CoeffData) -> RigorousReal:
    """Head term plus the smallest of three tail relaxations."""
    t, n, beta = ctx.table, ctx.n, data.beta
    head = data.C[n]
    if n == 0:
        return head
    qn = t.qs(n).power(beta)
    lq = _log(ctx.q(n))
    opts = [tail_qs(ctx, beta) + qn * lq,
            qn * (ONE + (ONE + ONE / golden_log()) * lq)]
    z = zeta_enclosure(beta)
    if z is not None:
        opts.insert(0, z * qn * n)
    return head + _minimum(opts)


def method_B(ctx: bd.BoundsContext, data: bd.CoeffData) -> RigorousReal:
    """A'_{n+1}^beta min{N^beta/2 + parity terms, N^beta + q_L^beta}."""
    n, beta = ctx.n, data.beta
    p = lambda k: _rr(ctx.q(k)).power(beta)
    Nb = _rr(ctx.N).power(beta)
    g = _geo(beta)
    if n % 2 == 1:
        first = Nb / 2 + g * p(n)
    else:
        first = Nb / 2 + p(n) / 2 + g * p(n - 1)
    second = Nb + _rr(data.q_L).power(beta)
    return A_slash_upto(ctx.table, n + 1).power(beta) * _minimum([first, second])


def method_C(ctx: bd.BoundsContext, data: bd.CoeffData) -> RigorousReal:
    """Head term plus the tail of quasiperiods times min{zeta, 1 + log+ c_max}."""
    n, beta = ctx.n, data.beta
    head = data.C[n]
    if n == 0:
        return head
    return head + tail_qs(ctx, beta) * bd.Q_generic_bound(beta, max(data.c_max_tail, 1))


# --------------------------------------------------------------- lower bounds

def lower_single(ctx: bd.BoundsContext, beta: Fraction, dual: bool = False) -> RigorousReal:
    """b_n q_n^beta (H_{q_n-1} - 1) + E_n q'_{n+1}^beta H_{b_n} + O_n b_n q'_n^beta + b_n.

    ``dual`` interchanges E_n and O_n.
    """
    t, n = ctx.table, ctx.n
    b, q = ctx.b(n), ctx.q(n)
    x = b * _rr(q).power(beta) * (harmonic(beta, q - 1).value - 1) + b
    if (n % 2 == 0) != dual:
        return x + t.qs(n + 1).power(beta) * harmonic(beta, b).value
    return x + b * t.qs(n).power(beta)


def lower_symmetric(ctx: bd.BoundsContext, beta: Fraction) -> RigorousReal:
    t, n = ctx.table, ctx.n
    b, q = ctx.b(n), ctx.q(n)
    return (2 * b * _rr(q).power(beta) * (harmonic(beta, q - 1).value - 1)
            + t.qs(n + 1).power(beta) * harmonic(beta, b).value
            + b * t.qs(n).power(beta) + 2 * b)


# ---------------------------------------------------------------- report

def _le(x, y, ctx) -> Verdict:
    return prove_le(x, y, ctx.policy)


def _overlap_or_le(x, y, ctx) -> Verdict:
    v = _le(x, y, ctx)
    if v == Verdict.INDETERMINATE and x.lower <= y.upper and y.lower <= x.upper:
        return Verdict.PASS
    return v


def estimate(rot: Rotation, N: int, beta=1, cache: Optional[dict] = None) -> EstimateReport:
    beta = Fraction(beta)
    if beta < 1:
        raise ValueError("beta must be >= 1")
    ctx = bd.bounds_context(rot, N, cache)
    phi, phib = make_theta(beta), theta_bar(beta)
    data = bd.coeffs(ctx, beta)
    n = ctx.n
    S1, S2 = s1_bound(ctx, beta), s2_bound(ctx, beta)
    S3 = {"A": method_A(ctx, data), "B": method_B(ctx, data), "C": method_C(ctx, data)}
    totals = {k: S1 + S2 + v for k, v in S3.items()}
    direct = ctx.sums(phi).total(N)
    head = ctx.b(n) * ctx.q(n)
    head_single = ctx.sums(phi).segment(0, head)
    head_sym = head_single + ctx.sums(phib).segment(0, head)
    act = actual_components(ctx, phi)
    lo1, lo2 = lower_single(ctx, beta), lower_symmetric(ctx, beta)

    v: dict[str, Verdict] = {}
    v["S1"] = _le(act["S1"], S1, ctx)
    v["S2"] = _le(act["S2"], S2, ctx)
    for k in METHODS:
        v[f"S3_{k}"] = _le(act["S3"], S3[k], ctx)
        v[f"total_{k}"] = _le(direct, totals[k], ctx)
    split = _le(direct, act["S1"] + act["S2"] + act["S3"], ctx)
    if split == Verdict.INDETERMINATE:
        split = combine(bd.verify_refined(ctx, phi).values())
    v["split"] = split
    v["regrouped"] = bd.regrouped_check(ctx, data, phi)
    qn_rel = q_n_relaxed(ctx, beta)
    v["Q_n<=relaxed"] = _le(data.Q[n], qn_rel, ctx)
    if ctx.q(n) == 1:
        # outside the q_n > 1 scope both bounds reduce to S_1 = q'_1^beta terms exactly
        v["lower_single"] = _overlap_or_le(lo1, head_single, ctx)
        v["lower_symmetric"] = _overlap_or_le(lo2, head_sym, ctx)
    else:
        v["lower_single"] = combine([_le(lo1, head_single, ctx), _le(lo1, direct, ctx)])
        v["lower_symmetric"] = _le(lo2, head_sym, ctx)
    return EstimateReport(rot.label, N, beta, n, S1, S2, S3["A"], S3["B"], S3["C"], totals,
                          lo1, lo2, direct, head_single, head_sym, act, data.Q[n], qn_rel, v)


def dual_estimate(rot: Rotation, N: int, beta=1) -> tuple[EstimateReport, Verdict]:
    """Estimates for S_N thetabar^beta on alpha, obtained as S_N theta^beta on 1 - alpha.

    The second value checks that both direct sums agree.
    """
    beta = Fraction(beta)
    comp = bd.complement_rotation(rot)
    rep = estimate(comp, N, beta)
    ctx = bd.bounds_context(rot, N)
    own = ctx.sums(theta_bar(beta)).total(N)
    ok = own.lower <= rep.direct.upper and rep.direct.lower <= own.upper
    return rep, Verdict.PASS if ok else Verdict.FAIL


# ------------------------------------------------------------- beta = 1

@dataclass(frozen=True)
class Beta1Summary:
    N: int
    S1: RigorousReal
    S2: int
    tail_bound: int  # 3 q_n + 4 q_{n-1}
    tail_actual: RigorousReal  # sum_{r<=n} q'_r
    method_B_inner: RigorousReal
    verdicts: dict


def beta1_summary(rot: Rotation, N: int, cache: Optional[dict] = None) -> Beta1Summary:
    """Closed forms at beta = 1, checked against the general-beta expressions."""
    ctx = bd.bounds_context(rot, N, cache)
    n, q = ctx.n, ctx.q
    E, O = int(n % 2 == 0), int(n % 2 == 1)
    s1 = ctx.N * (ONE + _log(q(n)))
    s2 = 2 * (O * min(2 * q(n - 1), q(n)) + E * min(2 * q(n - 2), q(n - 1)))
    for r in range(0, n + 1, 2):
        if q(r) == 2 < q(n) and ctx.b(r) > 0:
            s2 += 1  # 3 - 2
    inner = min(Fraction(ctx.N, 2) + O * 2 * q(n) + E * (Fraction(q(n), 2) + 2 * q(n - 1)),
                Fraction(ctx.N + q(bd.L_index(ctx.rep))))
    tail = sum((ctx.table.qs(r) for r in range(0, n + 1)), ZERO)
    tb = 3 * q(n) + 4 * q(n - 1)
    gen_B = method_B(ctx, bd.coeffs(ctx, 1))
    v = {
        "S1": _overlap(s1, s1_bound(ctx, Fraction(1))),
        "S2": _overlap(_rr(s2), s2_bound(ctx, Fraction(1))),
        "B": _overlap(A_slash_upto(ctx.table, n + 1) * inner, gen_B),
        "tail": prove_le(tail, tb, ctx.policy, strict=True),
    }
    return Beta1Summary(N, s1, s2, tb, tail, _rr(inner), v)


def _overlap(x: RigorousReal, y: RigorousReal) -> Verdict:
    return Verdict.PASS if x.lower <= y.upper and y.lower <= x.upper else Verdict.FAIL
