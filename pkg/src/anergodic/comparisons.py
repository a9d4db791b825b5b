"""Comparisons with earlier bounds and a few exploratory scans.

Every bound tagged "upper" or "lower" is certified against a directly
computed enclosure.  Scans of asymptotic statements (antisymmetric sums,
weighted series, the double exponential sum) only report ratios; their
envelope checks are heuristics and say so.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from mpmath import iv

from . import bounds as bd
from . import floatenc as fe
from .cf_engine import A_upto, Rotation
from .estimates import dual_estimate, estimate
from .numerics import (
    RigorousReal,
    SpecError,
    Verdict,
    combine,
    dist_nearest,
    prove_le,
    working_bits,
)
from .observables import (
    Observable,
    OrbitSums,
    cot_pi,
    denjoy_koksma_band,
    make_theta,
    orbit_values,
    psi_half,
    recip_nearest,
    recip_signed,
    recip_signed_hole,
)
from .ostrowski import digit_sum

ZERO = RigorousReal.from_exact(0)
ONE = RigorousReal.from_exact(1)
TARGETS = ("lang", "beresnevich_upper", "beresnevich_lower", "antisym", "weighted", "exp2", "conjecture")


def _rr(x) -> RigorousReal:
    return RigorousReal.lift(x)


def _log(x) -> RigorousReal:
    return _rr(x).log()


def log_star(x) -> RigorousReal:
    """max{1, log x}."""
    return RigorousReal.maximum([ONE, _log(x)])


def two_pi() -> RigorousReal:
    def build(b):
        with working_bits(b):
            return 2 * iv.pi

    return RigorousReal(build)


def _from_floats(lo: float, hi: float) -> RigorousReal:
    return RigorousReal.from_interval(Fraction(lo), Fraction(hi))


@dataclass
class ComparisonReport:
    target: str
    alpha: str
    inputs: dict
    ours: Optional[RigorousReal]
    theirs: Optional[RigorousReal]
    direct: Optional[RigorousReal]
    extra: dict[str, RigorousReal] = field(default_factory=dict)
    kinds: dict[str, str] = field(default_factory=dict)  # name -> upper | lower | value
    verdicts: dict[str, Verdict] = field(default_factory=dict)
    ratios: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> Verdict:
        return combine(self.verdicts.values())


# ------------------------------------------------------------------ Lang

def lang_compare(rot: Rotation, N: int, cache: Optional[dict] = None) -> ComparisonReport:
    """Lang's 2N log N + 20 N A_{n+1} against N log q_n + (N + q_n) A_{n+1} + 2N + 3q_n, at k0 = 0."""
    ctx = bd.bounds_context(rot, N, cache)
    n, qn = ctx.n, ctx.q(ctx.n)
    A = _rr(A_upto(ctx.table, n + 1))
    theirs = 2 * N * _log(N) + 20 * N * A
    ours = N * _log(qn) + (N + qn) * A + (2 * N + 3 * qn)
    direct = ctx.sums(make_theta(1)).total(N)
    best_name, best = estimate(rot, N, 1, ctx.cache).best()
    rep = ComparisonReport("lang", rot.label, {"N": N, "n": n, "q_n": qn, "A": A_upto(ctx.table, n + 1)},
                           ours, theirs, direct)
    rep.extra[f"method_{best_name}"] = best
    rep.kinds = {"ours": "upper", "theirs": "upper", f"method_{best_name}": "upper"}
    rep.verdicts = {
        "ours>=direct": prove_le(direct, ours, ctx.policy),
        "theirs>=direct": prove_le(direct, theirs, ctx.policy),
        f"method_{best_name}>=direct": prove_le(direct, best, ctx.policy),
    }
    rep.ratios = {"ours/theirs": float(ours) / float(theirs), "ours/direct": float(ours) / float(direct),
                  f"method_{best_name}/theirs": float(best) / float(theirs)}
    return rep


# ------------------------------------------------------- nearest integer

def lb1(table, n: int, b: int) -> RigorousReal:
    """q'_{n+1} log*(1 + b_n) + b_n q_n (2 log* q_n - (1 + 2 log 2)); lower bound on the full sum."""
    qn = table.q(n)
    return table.qs(n + 1) * log_star(1 + b) + b * qn * (2 * log_star(qn) - (1 + 2 * _log(2)))


def lb2(table, n: int, N: int, floored: bool = True) -> RigorousReal:
    """q_{n+1} log(1 + N/q_n) + N log q_n / 24 - (log q_2 / 3 + 1/2) N, with N/q_n floored by default."""
    qn = table.q(n)
    k = _rr(N // qn) if floored else _rr(Fraction(N, qn))
    return (table.q(n + 1) * _log(1 + k) + N * _log(qn) / 24
            - (_log(table.q(2)) / 3 + Fraction(1, 2)) * N)


def lb3(N: int) -> RigorousReal:
    """N log N + N (1 - log 2) + 2, written as N log(N/2) + N + 2 so that N = 2 gives 4 exactly."""
    if N < 2:
        raise ValueError("LB3 needs N >= 2")
    return N * _rr(Fraction(N, 2)).log() + (N + 2)


def velani_upper(table, n: int, N: int) -> RigorousReal:
    """2 q_{n+1} (1 + log(1 + N/q_n)) + 32 N log q_n + q_3 N, bounding the half sum."""
    qn = table.q(n)
    return (2 * table.q(n + 1) * (1 + _log(1 + Fraction(N, qn))) + 32 * N * _log(qn)
            + table.q(3) * N)


def half_sum_upper(ctx: bd.BoundsContext) -> RigorousReal:
    """Closed-form upper bound on (1/2) sum 1/||r alpha||.

    Both theta and its reflection are bounded through the coefficients c_r;
    the reflected sum uses c-bar, so the larger of the two is taken.  A q_r = 2
    mid term adds at most 1/2.
    """
    n = ctx.n
    data = bd.coeffs(ctx, 1)
    cn = max(data.c[n], data.c_bar[n])
    cmax = max((max(a, b) for a, b in zip(data.c[:-1], data.c_bar[:-1])), default=0)
    tail = sum((ctx.table.qs(r) for r in range(1, n + 1)), ZERO)
    qn, qn1 = ctx.q(n), ctx.q(n - 1)
    N = ctx.N
    out = ((1 + bd.log_plus(cn)) * ctx.table.qs(n + 1) + N * _log(qn) + (1 + bd.log_plus(cmax)) * tail
           + (1 - _log(2)) * N + (qn + qn1) + digit_sum(ctx.rep))
    if any(ctx.q(r) == 2 < qn and ctx.b(r) > 0 for r in range(n + 1)):
        out = out + Fraction(1, 2)
    return out


def half_sum_from_estimates(rot: Rotation, N: int, cache: Optional[dict] = None) -> RigorousReal:
    """(1/2)(best bound on S_N theta + best bound on S_N thetabar) - N log 2 + d(N)."""
    ctx = bd.bounds_context(rot, N, cache)
    _, up = estimate(rot, N, 1, ctx.cache).best()
    dual, _ = dual_estimate(rot, N, 1)
    _, upb = dual.best()
    return (up + upb) / 2 - N * _log(2) + digit_sum(ctx.rep)


def lb3_condition(b: int, q: int) -> bool:
    """(b - 1) log q - b (2 + log 2) - (1 - log 2) > 2 / q, which forces LB1 > LB3."""
    return (b - 1) * math.log(q) - b * (2 + math.log(2)) - (1 - math.log(2)) > 2 / q + 1e-12


@dataclass(frozen=True)
class LB1vsLB3:
    N: int
    b: int
    q: int
    lb1: RigorousReal
    lb3: RigorousReal
    verdict: Verdict  # LB1 > LB3
    stated_scope: bool  # b_n > 1 and q_n >= 27
    sufficient: bool  # lb3_condition(b_n, q_n)


def lb1_vs_lb3(rot: Rotation, N: int) -> LB1vsLB3:
    table = rot.table_for(N)
    from .ostrowski import represent

    rep = represent(table, N)
    n, b = rep.n, rep.digit(rep.n)
    q = table.q(n)
    x, y = lb1(table, n, b), lb3(N)
    v = prove_le(y, x, rot.policy, strict=True)
    return LB1vsLB3(N, b, q, x, y, v, b > 1 and q >= 27, b > 1 and lb3_condition(b, q))


def sum_nearest_bounds(rot: Rotation, N: int, cache: Optional[dict] = None,
                       with_estimates: bool = False) -> ComparisonReport:
    """Upper and lower bounds for sum_{r<=N} 1/||r alpha||.

    The upper bounds (ours and the earlier one) concern the half sum.  LB1, LB2
    and LB3 bound the full sum; LB1 is stated at b_n q_n and holds for N because
    the summands are positive.  The half-sum ratio of LB1 is reported only.
    """
    ctx = bd.bounds_context(rot, N, cache)
    n, t = ctx.n, ctx.table
    full = ctx.sums(recip_nearest()).total(N)
    half = full / 2
    ours = half_sum_upper(ctx)
    theirs = velani_upper(t, n, N)
    rep = ComparisonReport("beresnevich_upper", rot.label, {"N": N, "n": n, "q_n": ctx.q(n), "b_n": ctx.b(n)},
                           ours, theirs, half)
    rep.kinds = {"ours": "upper", "theirs": "upper"}
    pol = ctx.policy
    rep.verdicts["ours>=half"] = prove_le(half, ours, pol)
    rep.verdicts["theirs>=half"] = prove_le(half, theirs, pol)
    if with_estimates:
        est = half_sum_from_estimates(rot, N, ctx.cache)
        rep.extra["ours_estimates"] = est
        rep.kinds["ours_estimates"] = "upper"
        rep.verdicts["ours_estimates>=half"] = prove_le(half, est, pol)
    rep.extra["full"] = full
    rep.kinds["full"] = "value"
    if N >= 2:
        rep.extra["LB3"] = lb3(N)
        rep.kinds["LB3"] = "lower"
        rep.verdicts["LB3<=full"] = prove_le(rep.extra["LB3"], full, pol)
    if ctx.q(2) <= ctx.q(n):
        for key, fl in (("LB2", True), ("LB2_unfloored", False)):
            rep.extra[key] = lb2(t, n, N, fl)
            rep.kinds[key] = "lower"
        rep.verdicts["LB2<=full"] = prove_le(rep.extra["LB2"], full, pol)
    if ctx.q(n) > 1:
        x = lb1(t, n, ctx.b(n))
        rep.extra["LB1"] = x
        rep.kinds["LB1"] = "lower"
        rep.verdicts["LB1<=full"] = prove_le(x, full, pol)
        rep.ratios["LB1/half"] = float(x) / float(half)
        if N >= 2:
            rep.ratios["LB1/LB3"] = float(x) / float(rep.extra["LB3"])
    band = denjoy_koksma_band(rot, N, ctx.sums(psi_half()))
    rep.verdicts["denjoy_koksma"] = band.verdict
    rep.ratios["ours/theirs"] = float(ours) / float(theirs)
    rep.ratios["ours/half"] = float(ours) / float(half)
    return rep


def beresnevich_lower(rot: Rotation, N: int, cache: Optional[dict] = None) -> ComparisonReport:
    """The lower-bound view of ``sum_nearest_bounds``: ours = LB1, theirs = LB2, direct = full sum."""
    rep = sum_nearest_bounds(rot, N, cache)
    full = rep.extra["full"]
    low = ComparisonReport("beresnevich_lower", rep.alpha, rep.inputs, rep.extra.get("LB1"),
                           rep.extra.get("LB2"), full)
    for k in ("LB2_unfloored", "LB3"):
        if k in rep.extra:
            low.extra[k] = rep.extra[k]
    low.kinds = {"ours": "lower", "theirs": "lower", "LB2_unfloored": "value", "LB3": "lower"}
    low.verdicts = {k: v for k, v in rep.verdicts.items() if k.startswith("LB") or k == "denjoy_koksma"}
    low.ratios = {k: v for k, v in rep.ratios.items() if k.startswith("LB")}
    if low.ours is not None and low.theirs is not None:
        low.ratios["ours/theirs"] = float(low.ours) / float(low.theirs)
    return low


# --------------------------------------------------------- antisymmetric

def _magnitude(x: RigorousReal) -> tuple[Fraction, Fraction]:
    lo, hi = x.lower, x.upper
    if lo >= 0:
        return lo, hi
    if hi <= 0:
        return -hi, -lo
    return Fraction(0), max(-lo, hi)


def _require_constant_type(rot: Rotation, assume: bool) -> None:
    if assume:
        return
    if rot.spec is None or not rot.spec.constant_type:
        raise SpecError(f"{rot.label}: constant type must be declared (periodic cf); pass assume_constant_type")


def envelope_check(values: Sequence[tuple[float, float]], split: int, factor: float = 3) -> Verdict:
    """max over indices >= split no larger than factor * max over indices <= split.

    ``values`` holds (lower, upper) pairs.  A heuristic for non-exploding
    growth, not a proof of a bound.
    """
    early = values[: split + 1]
    late = values[split:]
    if not early or not late:
        raise ValueError("envelope check needs points on both sides of the split")
    e_lo, e_hi = max(v[0] for v in early), max(v[1] for v in early)
    l_lo, l_hi = max(v[0] for v in late), max(v[1] for v in late)
    if l_hi <= factor * e_lo:
        return Verdict.PASS
    if l_lo > factor * e_hi:
        return Verdict.FAIL
    return Verdict.INDETERMINATE


@dataclass
class ScanReport:
    label: str
    phi: str
    rows: list[tuple[int, RigorousReal, float, float]]  # (N, value, ratio lower, ratio upper)
    notes: list[str] = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max(r[3] for r in self.rows)

    def envelope(self, split: int, factor: float = 3) -> Verdict:
        return envelope_check([(r[2], r[3]) for r in self.rows], split, factor)


def antisym_scan(rot: Rotation, phi: Observable, k_max: int = 14,
                 assume_constant_type: bool = False) -> ScanReport:
    """|S_N phi| / N over N = 2^k, k = 0..k_max."""
    _require_constant_type(rot, assume_constant_type)
    if phi.symmetry != "antisymmetric":
        raise SpecError(f"{phi.label} is not antisymmetric")
    sums = OrbitSums(rot.alpha, phi, 1 << k_max, rot.policy)
    rows = []
    for k in range(k_max + 1):
        N = 1 << k
        s = sums.total(N)
        lo, hi = _magnitude(s)
        rows.append((N, s, float(lo / N), float(hi / N)))
    return ScanReport(rot.label, phi.label, rows, ["heuristic: ratios only, no constant is certified"])


def hole_equality(rot: Rotation, N: int) -> Verdict:
    """S_N of 1/{{x}} and of its variant vanishing at 1/2 coincide, since r alpha never hits 1/2."""
    a = OrbitSums(rot.alpha, recip_signed(), N, rot.policy).total(N)
    b = OrbitSums(rot.alpha, recip_signed_hole(), N, rot.policy).total(N)
    return Verdict.PASS if a.lower <= b.upper and b.lower <= a.upper else Verdict.FAIL


# --------------------------------------------------------------- weighted

@dataclass
class WeightedReport:
    label: str
    phi: str
    gamma: Fraction
    beta: Fraction
    value: RigorousReal
    growth: str  # "O(1)" | "O(log N)" | "O(N^(beta-gamma))"
    rows: list[tuple[int, RigorousReal, float, float]]  # (N, W_N, |W_N|/g(N) lower, upper)

    def envelope(self, split: int, factor: float = 3) -> Verdict:
        return envelope_check([(r[2], r[3]) for r in self.rows], split, factor)


def growth_class(beta: Fraction, gamma: Fraction) -> str:
    if gamma > beta:
        return "O(1)"
    if gamma == beta:
        return "O(log N)"
    return "O(N^(beta-gamma))"


def _scale(cls: str, N: int, beta: Fraction, gamma: Fraction) -> float:
    if cls == "O(1)":
        return 1.0
    if cls == "O(log N)":
        return max(1.0, math.log(N))
    return float(N) ** float(beta - gamma)


def weighted_series(rot: Rotation, phi: Observable, gamma, N: int, beta=1) -> WeightedReport:
    """W_N = sum_{r<=N} phi({r alpha}) / r^gamma, with dyadic partial sums.

    ``beta`` is the growth exponent of S_N phi, taken from a prior scan or
    estimate; the predicted class of W_N follows by partial summation.
    """
    gamma, beta = Fraction(gamma), Fraction(beta)
    if N < 1 or gamma < 0:
        raise ValueError("need N >= 1 and gamma >= 0")
    M = np.arange(1, N + 1, dtype=np.int64)
    v = orbit_values(rot.alpha, phi, M, rot.policy)
    if gamma != 0:
        v = v * fe.FI.point(M.astype(np.float64)).neg_power(gamma)
    ps = fe.PrefixSums(v)
    cls = growth_class(beta, gamma)
    rows = []
    k = 0
    while (1 << k) <= N:
        m = 1 << k
        w = _from_floats(*ps.segment(0, m))
        lo, hi = _magnitude(w)
        g = _scale(cls, m, beta, gamma)
        rows.append((m, w, float(lo) / g * (1 - 1e-12), float(hi) / g * (1 + 1e-12)))
        k += 1
    value = _from_floats(*ps.segment(0, N))
    return WeightedReport(rot.label, phi.label, gamma, beta, value, cls, rows)


# ------------------------------------------------------------------ Exp2

@dataclass(frozen=True)
class ComplexEnclosure:
    re: RigorousReal
    im: RigorousReal

    def magnitude(self) -> tuple[float, float]:
        """Outward-rounded bounds on |z|."""
        rl, rh = _magnitude(self.re)
        il, ih = _magnitude(self.im)
        lo2, hi2 = rl * rl + il * il, rh * rh + ih * ih
        return float(fe.down(math.sqrt(fe.fraction_down(lo2)))), float(fe.up(math.sqrt(fe.fraction_up(hi2))))

    def overlaps(self, other: "ComplexEnclosure") -> bool:
        return all(a.lower <= b.upper and b.lower <= a.upper
                   for a, b in ((self.re, other.re), (self.im, other.im)))


def _sum_fi(v: fe.FI) -> RigorousReal:
    return _from_floats(*fe.fsum_interval(v))


def _check_index(m: int) -> None:
    if m >= 1 << 31:
        raise ValueError(f"orbit index {m} beyond the float fast path")


def exp2(rot: Rotation, N: int) -> ComplexEnclosure:
    """sum_{u,v<N} e(u v alpha) as N + sum_{u=1}^{N-1} (1 - e(u N alpha)) (1 + i cot(pi u alpha)) / 2."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N == 1:
        return ComplexEnclosure(ONE, ZERO)
    _check_index((N - 1) * N)
    u = np.arange(1, N, dtype=np.int64)
    c, s = fe.cis_turns(fe.orbit_fraction(rot.alpha, u * N))
    k = orbit_values(rot.alpha, cot_pi(), u, rot.policy)
    one_minus_c = 1.0 - c
    re = 0.5 * (one_minus_c + s * k)
    im = 0.5 * (one_minus_c * k - s)
    return ComplexEnclosure(_sum_fi(re) + N, _sum_fi(im))


def exp2_double(rot: Rotation, N: int, limit: int = 512) -> ComplexEnclosure:
    """sum_{u,v<N} e(u v alpha) summed term by term; N <= limit."""
    if N < 1 or N > limit:
        raise ValueError(f"double-sum route takes 1 <= N <= {limit}")
    u = np.arange(N, dtype=np.int64)
    M = np.outer(u, u).ravel()
    c, s = fe.cis_turns(fe.orbit_fraction(rot.alpha, M))
    return ComplexEnclosure(_sum_fi(c), _sum_fi(s))


def cot_identity_residual(x: float) -> float:
    """|1/(1 - e(x)) - (1 + i cot(pi x))/2| in floating point, for spot checks."""
    z = 1 / (1 - complex(math.cos(2 * math.pi * x), math.sin(2 * math.pi * x)))
    w = complex(0.5, 0.5 / math.tan(math.pi * x))
    return abs(z - w)


def exp2_scan(rot: Rotation, n_max: int = 20) -> ScanReport:
    """|Exp2(q_n)| / q_n for n = 1..n_max."""
    t = rot.table_for(1)
    while t.depth < n_max + 2:
        t = rot.table(t.depth * 2)
    rows = []
    for n in range(1, n_max + 1):
        q = t.q(n)
        z = exp2(rot, q)
        lo, hi = z.magnitude()
        rows.append((q, z.re, lo / q, hi / q))
    return ScanReport(rot.label, "exp2", rows, ["heuristic: ratios only"])


# ------------------------------------------------- partial Birkhoff sums

@dataclass
class PartialBirkhoff:
    M: int
    N: int
    B: float  # max_{r<=N} |S_r phi| / r, rounded up
    norm: RigorousReal  # ||M alpha||
    bound: RigorousReal
    direct: tuple[float, float]  # |S_N(e_M phi)|
    informative: bool  # bound / N stays O(1): N ||M alpha|| <= 1
    verdict: Verdict


def birkhoff_ratio_max(v: fe.FI) -> float:
    """Upper bound on max_{r<=N} |S_r| / r from prefix sums."""
    ps = fe.PrefixSums(v)
    r = np.arange(1, ps.n + 1, dtype=np.float64)
    err = fe.up(ps._c * ps.abs[1:] * 1.01 + 1e-300)
    top = np.maximum(np.abs(fe.down(ps.lo[1:] - err)), np.abs(fe.up(ps.hi[1:] + err)))
    return float(np.max(fe.up(fe.up(top) / r)) * (1 + 4 * fe.EPS))


def twisted_sum(rot: Rotation, phi: Observable, M: int, N: int,
                values: Optional[fe.FI] = None) -> ComplexEnclosure:
    """sum_{r<=N} e(r M alpha) phi({r alpha})."""
    _check_index(M * N)
    r = np.arange(1, N + 1, dtype=np.int64)
    v = values if values is not None else orbit_values(rot.alpha, phi, r, rot.policy)
    c, s = fe.cis_turns(fe.orbit_fraction(rot.alpha, r * M))
    return ComplexEnclosure(_sum_fi(c * v), _sum_fi(s * v))


def partial_birkhoff_lipschitz(rot: Rotation, M: int, N: int, phi: Observable,
                               C: Optional[RigorousReal] = None, B: Optional[float] = None) -> PartialBirkhoff:
    """B N (C ||M alpha|| (N - 1) / 2 + 1) for psi = e(.), against the direct twisted sum."""
    if M < 1 or N < 1:
        raise ValueError("need M, N >= 1")
    C = two_pi() if C is None else C
    v = orbit_values(rot.alpha, phi, np.arange(1, N + 1, dtype=np.int64), rot.policy)
    if B is None:
        B = birkhoff_ratio_max(v)
    norm = dist_nearest(rot.alpha * M, rot.policy)
    bound = _rr(Fraction(B)) * N * (C * norm * Fraction(N - 1, 2) + 1)
    direct = twisted_sum(rot, phi, M, N, v).magnitude()
    v_ = prove_le(_rr(Fraction(direct[1])), bound, rot.policy)
    return PartialBirkhoff(M, N, B, norm, bound, direct, float(norm) * N <= 1, v_)


@dataclass
class ConjectureScan:
    label: str
    N: int
    rows: list[tuple[int, float]]  # (M, |S_N(e_M phi)| / N, midpoint)
    verdict: Verdict = Verdict.EXPLORATORY

    @property
    def spread(self) -> float:
        """max / min of the ratios over M."""
        vals = [r[1] for r in self.rows]
        return max(vals) / min(vals)


def conjecture_scan(rot: Rotation, Ms: Sequence[int] = range(1, 65), N: Optional[int] = None,
                    phi: Optional[Observable] = None, assume_constant_type: bool = False) -> ConjectureScan:
    """|S_N(e_M phi)| / N over M; exploration only, never a verdict."""
    _require_constant_type(rot, assume_constant_type)
    phi = cot_pi() if phi is None else phi
    if N is None:
        N = rot.table(16).q(12)
    v = orbit_values(rot.alpha, phi, np.arange(1, N + 1, dtype=np.int64), rot.policy)
    rows = []
    for M in Ms:
        lo, hi = twisted_sum(rot, phi, M, N, v).magnitude()
        rows.append((M, (lo + hi) / 2 / N))
    return ConjectureScan(rot.label, N, rows)
