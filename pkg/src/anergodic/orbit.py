"""Where the orbit points alpha_rst = {(rst) alpha} sit on the circle.

The tracking error of a canonical triple is
    eps_rst = (-1)^r {{alpha_r00}} + s/q'_{r+1} + t/(q_r q'_{r+1}),
and alpha_rst = {t p_r/q_r + (-1)^r eps_rst}.  Scalar routines return
RigorousReal values; ``verify_distribution`` checks every triple of many
representations at once on the float fast path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import floatenc as fe
from .cf_engine import QuasiperiodTable
from .numerics import (
    DEFAULT_POLICY,
    PrecisionPolicy,
    RigorousReal,
    Verdict,
    affine,
    combine,
    contains_integer,
    frac,
    prove_le,
    sign,
    signed_frac,
    working_bits,
)
from .ostrowski import CanonicalTriple, OstrowskiRep, represent, value_of


@dataclass
class OrbitContext:
    table: QuasiperiodTable
    rep: OstrowskiRep
    policy: PrecisionPolicy = DEFAULT_POLICY
    _r00: dict = field(default_factory=dict)

    @property
    def alpha(self) -> RigorousReal:
        return self.table.cf.alpha

    @property
    def n(self) -> int:
        return self.rep.n

    def point(self, M: int) -> RigorousReal:
        """{M alpha}."""
        return frac(affine(self.alpha, M), self.policy)

    def alpha_r00(self, r: int) -> RigorousReal:
        if r not in self._r00:
            self._r00[r] = self.point(self.rep.r00(r))
        return self._r00[r]

    def signed_r00(self, r: int) -> RigorousReal:
        return signed_frac(self.alpha_r00(r), self.policy)


def make_context(table: QuasiperiodTable, N: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> OrbitContext:
    return OrbitContext(table, represent(table, N), policy)


def _check_triple(ctx: OrbitContext, tr: CanonicalTriple) -> None:
    if not (0 <= tr.r <= ctx.n and 0 <= tr.s < ctx.rep.b[tr.r] and 1 <= tr.t <= ctx.table.q(tr.r)):
        raise ValueError(f"{tr} is not canonical for N = {ctx.rep.N}")


def epsilon(ctx: OrbitContext, tr: CanonicalTriple) -> RigorousReal:
    _check_triple(ctx, tr)
    t = ctx.table
    q, qs1 = t.q(tr.r), t.qs(tr.r + 1)
    head = ctx.signed_r00(tr.r)
    if tr.r % 2:
        head = -head
    return head + (tr.s + Fraction(tr.t, q)) / qs1


def alpha_rst(ctx: OrbitContext, tr: CanonicalTriple, check: bool = True) -> RigorousReal:
    """{(rst) alpha}, cross-checked against {t p_r/q_r + (-1)^r eps}."""
    _check_triple(ctx, tr)
    x = ctx.point(value_of(ctx.rep, tr))
    if check:
        r = tr.r
        eps = epsilon(ctx, tr)
        z = Fraction(tr.t * ctx.table.p(r), ctx.table.q(r)) + (eps if r % 2 == 0 else -eps)
        bits = max(x.bits, 128)
        with working_bits(bits):
            d = x.at(bits) - z.at(bits)
        if not contains_integer(d):
            raise AssertionError(f"tracking error route disagrees with direct orbit point at {tr}")
    return x


@dataclass(frozen=True)
class EpsilonBounds:
    eps: RigorousReal
    eps_L: RigorousReal
    eps_U: RigorousReal
    l: RigorousReal
    u: RigorousReal
    verdict: Verdict


def _eps_lower(ctx: OrbitContext, tr: CanonicalTriple) -> RigorousReal:
    t = ctx.table
    q = t.q(tr.r)
    return Fraction((tr.s - 1) * q + tr.t, q) / t.qs(tr.r + 1) + 1 / t.qs(tr.r + 2)


def epsilon_bounds(ctx: OrbitContext, tr: CanonicalTriple) -> EpsilonBounds:
    """eps_L < eps < eps_U, |eps| < 1/q'_r and the sign facts for s != 0 and t = q_r."""
    t, pol = ctx.table, ctx.policy
    r, q = tr.r, t.q(tr.r)
    eps = epsilon(ctx, tr)
    lo = _eps_lower(ctx, tr)
    hi = lo + 1 / t.qs(r + 1)
    bound = 1 / t.qs(r)
    checks = [
        prove_le(lo, eps, pol, strict=True),
        prove_le(eps, hi, pol, strict=True),
        prove_le(eps, bound, pol, strict=True),
        prove_le(-bound, eps, pol, strict=True),
    ]
    if tr.s != 0:
        checks.append(prove_le(0, eps, pol, strict=True))
    if r < ctx.n and tr.s == 0 and tr.t == q:
        checks.append(prove_le(1 / t.qs(r + 2), eps, pol, strict=True))
    l, u, _, pv = parity_bounds(ctx, tr)
    return EpsilonBounds(eps, lo, hi, l, u, combine(checks + [pv]))


def parity_bounds(ctx: OrbitContext, tr: CanonicalTriple):
    """(l, u, side, verdict): l < alpha_rst < u for even r, l < 1 - alpha_rst < u for odd r."""
    t, pol = ctx.table, ctx.policy
    r, q = tr.r, t.q(tr.r)
    k = ((-1) ** r * tr.t * t.p(r)) % q
    l = Fraction(k, q) + _eps_lower(ctx, tr)
    u = l + 1 / t.qs(r + 1)
    x = alpha_rst(ctx, tr)
    side = "even" if r % 2 == 0 else "odd"
    target = x if r % 2 == 0 else affine(x, -1, 1)
    checks = [
        prove_le(l, target, pol, strict=True),
        prove_le(target, u, pol, strict=True),
        _l_floor(ctx.table, tr, k, pol),
        prove_le(0, l, pol, strict=True),
        prove_le(u, 1, pol, strict=True),
    ]
    return l, u, side, combine(checks)


def _l_floor(table: QuasiperiodTable, tr: CanonicalTriple, k: int, pol: PrecisionPolicy) -> Verdict:
    """1/q'_{r+2} <= l, via l - 1/q'_{r+2} = k/q_r + ((s-1) q_r + t)/(q_r q'_{r+1}).

    Equality holds exactly when k = 0 and s = 0, t = q_r.
    """
    q = table.q(tr.r)
    m = (tr.s - 1) * q + tr.t
    if k == 0 and m == 0:
        return Verdict.PASS
    gap = Fraction(k, q) + Fraction(m, q) / table.qs(tr.r + 1)
    return prove_le(0, gap, pol, strict=True)


@dataclass(frozen=True)
class IntervalLocation:
    k: int
    sign: int
    verdict: Verdict


def locate_interval(ctx: OrbitContext, tr: CanonicalTriple) -> IntervalLocation:
    """alpha_rst lies in {(k + sign*nu)/q_r : 0 < nu < 1} with k = t p_r mod q_r."""
    t, pol = ctx.table, ctx.policy
    r, q = tr.r, t.q(tr.r)
    k = (tr.t * t.p(r)) % q
    eps = epsilon(ctx, tr)
    try:
        sg = (-1) ** r * sign(eps, pol)
    except ArithmeticError:
        return IntervalLocation(k, 0, Verdict.INDETERMINATE)
    x = alpha_rst(ctx, tr)
    # nu = sign * (q x - k) taken mod q must lie in (0, 1)
    nu = affine(x, sg * q, -sg * k)
    # reduce mod q onto [0, q)
    shift = (math.floor(nu.lower) // q) * q
    nu = affine(nu, 1, -shift)
    v = combine([prove_le(0, nu, pol, strict=True), prove_le(nu, 1, pol, strict=True)])
    return IntervalLocation(k, sg, v)


@dataclass(frozen=True)
class OriginTriple:
    triple: CanonicalTriple
    side: int  # the point lies in side * I_0
    bound_name: str
    bound: Optional[RigorousReal]
    verdict: Verdict


def origin_interval_triples(ctx: OrbitContext, r: int) -> list[OriginTriple]:
    """Triples of level r whose point lies in +I_0 or -I_0."""
    if not 0 <= r <= ctx.n:
        raise ValueError("r outside [0, n]")
    t, pol = ctx.table, ctx.policy
    q, qm = t.q(r), t.q(r - 1)
    out = []
    sd = (-1) ** r
    for s in range(ctx.rep.b[r]):
        tr = CanonicalTriple(r, s, q)
        out.append(OriginTriple(tr, sd, "", None, _in_origin(ctx, tr, sd)))
    if q == 1:
        return out
    if r < ctx.n and ctx.rep.b[r] > 0 and q > qm:
        tr = CanonicalTriple(r, 0, q - qm)
        if sign(epsilon(ctx, tr), pol) < 0:
            l, _, _, _ = parity_bounds(ctx, tr)
            half = Fraction(1, 2 * q)
            v = combine([_in_origin(ctx, tr, sd), prove_le(half, l, pol, strict=True)])
            out.append(OriginTriple(tr, sd, "l > 1/(2 q_r)", l, v))
    tq = qm % q
    if tq:
        for s in range(ctx.rep.b[r]):
            tr = CanonicalTriple(r, s, tq)
            if sign(epsilon(ctx, tr), pol) > 0:
                _, u, _, _ = parity_bounds(ctx, tr)
                # u equals this cap exactly; the point itself sits strictly below it
                cap = 1 - (t.af(r + 1) - s) / t.qs(r + 1) + 1 / t.qs(r + 2)
                x = alpha_rst(ctx, tr)
                target = x if r % 2 == 0 else affine(x, -1, 1)
                v = combine([_in_origin(ctx, tr, -sd), prove_le(target, cap, pol, strict=True)])
                out.append(OriginTriple(tr, -sd, "point < 1 - (a'_{r+1} - s)/q'_{r+1} + 1/q'_{r+2}", cap, v))
    return out


def origin_cap_as_stated(ctx: OrbitContext, tr: CanonicalTriple) -> Verdict:
    """The sharper cap u < 1 - (a'_{r+1} - s)/q'_{r+1} in its literal form.

    Algebraically u exceeds this by exactly 1/q'_{r+2}, so the verdict is FAIL.
    """
    _, u, _, _ = parity_bounds(ctx, tr)
    cap = 1 - (ctx.table.af(tr.r + 1) - tr.s) / ctx.table.qs(tr.r + 1)
    return prove_le(u, cap, ctx.policy, strict=True)


def _in_origin(ctx: OrbitContext, tr: CanonicalTriple, side: int) -> Verdict:
    q = ctx.table.q(tr.r)
    x = alpha_rst(ctx, tr)
    if q == 1:
        return Verdict.PASS
    if side > 0:
        return prove_le(x, Fraction(1, q), ctx.policy, strict=True)
    return prove_le(Fraction(q - 1, q), x, ctx.policy, strict=True)


# ------------------------------------------------------------ bulk checks

@dataclass
class DistributionReport:
    alpha: str
    triples: int
    counts: dict  # check name -> {verdict: count}

    def verdict(self) -> Verdict:
        if any(c.get(Verdict.FAIL, 0) for c in self.counts.values()):
            return Verdict.FAIL
        if any(c.get(Verdict.INDETERMINATE, 0) for c in self.counts.values()):
            return Verdict.INDETERMINATE
        return Verdict.PASS

    def indeterminate_rate(self) -> float:
        ind = sum(c.get(Verdict.INDETERMINATE, 0) for c in self.counts.values())
        tot = sum(sum(c.values()) for c in self.counts.values())
        return ind / tot if tot else 0.0


def _lt(a: fe.FI, b: fe.FI) -> np.ndarray:
    """Three-way verdict codes for a < b: 1 proved, -1 refuted, 0 open."""
    return np.where(a.hi < b.lo, 1, np.where(a.lo >= b.hi, -1, 0))


def _consts(table: QuasiperiodTable, rmax: int):
    inv = [fe.enclose(1 / table.qs(r)) for r in range(rmax + 3)]
    return np.array([c[0] for c in inv]), np.array([c[1] for c in inv])


def verify_distribution(rot, Ns, label: str = "") -> DistributionReport:
    """Check the tracking-error envelopes for every canonical triple of every N in Ns."""
    Ns = [int(N) for N in Ns if N >= 1]
    table = rot.table_for(max(Ns), extra=3)
    alpha = table.cf.alpha
    parts = {k: [] for k in ("M", "r", "s", "t", "head")}
    from .ostrowski import all_triples

    for N in Ns:
        tri = all_triples(represent(table, N))
        for k in parts:
            parts[k].append(tri[k])
    A = {k: np.concatenate(v) for k, v in parts.items()}
    r, s, t, head, M = A["r"], A["s"], A["t"], A["head"], A["M"]
    rmax = int(r.max())
    ilo, ihi = _consts(table, rmax)
    inv = lambda idx: fe.FI(ilo[idx], ihi[idx])  # noqa: E731
    qarr = np.array([table.q(k) for k in range(rmax + 1)], dtype=np.int64)
    parr = np.array([table.p(k) for k in range(rmax + 1)], dtype=np.int64)
    q, p = qarr[r], parr[r]
    sgn = np.where(r % 2 == 0, 1.0, -1.0)

    # signed remainder of the head point; head = 0 gives exactly 0
    hc = fe.orbit_coords(alpha, np.maximum(head, 1))
    upper_half = hc.x.lo >= 0.5
    lower_half = hc.x.hi < 0.5
    sig = fe.FI(np.where(upper_half, -hc.y.hi, hc.x.lo), np.where(upper_half, -hc.y.lo, hc.x.hi))
    zero = head == 0
    sig = fe.FI(np.where(zero, 0.0, sig.lo), np.where(zero, 0.0, sig.hi))
    half_open = ~(upper_half | lower_half | zero)

    i1, i2, i0 = inv(r + 1), inv(r + 2), inv(r)
    tq = fe.FI(t.astype(float), t.astype(float)) / fe.FI(q.astype(float), q.astype(float))
    eps = sig * fe.FI(sgn, sgn) + (fe.FI.point(s.astype(float)) + tq) * i1
    sm1 = (s - 1).astype(float)
    eps_L = (fe.FI.point(sm1) + tq) * i1 + i2
    eps_U = eps_L + i1

    k = (np.where(r % 2 == 0, 1, -1) * t * p) % q
    kq = fe.FI.point(k.astype(float)) / fe.FI.point(q.astype(float))
    l = kq + eps_L
    u = l + i1
    pts = fe.orbit_coords(alpha, M)
    target = pts.x.where(r % 2 == 0, pts.y)

    # BaseAlpha route: x - (t p_r/q_r + (-1)^r eps) must enclose an integer
    tp = (t * p) % q
    z = fe.FI.point(tp.astype(float)) / fe.FI.point(q.astype(float)) + eps * fe.FI(sgn, sgn)
    d = pts.x - z
    route_ok = (np.floor(d.hi) >= np.ceil(d.lo))
    if not np.all(route_ok):
        bad = int(np.argmin(route_ok))
        raise AssertionError(f"tracking error route mismatch at M={M[bad]} (r,s,t)=({r[bad]},{s[bad]},{t[bad]})")

    # l - 1/q'_{r+2} = k/q + m/(q q'_{r+1}); exactly zero when k = 0 and m = 0
    m = (s - 1) * q + t
    gap = kq + fe.FI.point(m.astype(float)) / fe.FI.point(q.astype(float)) * i1
    lfloor = np.where((k == 0) & (m == 0), 1, _lt(fe.FI.point(np.zeros(len(l))), gap))
    checks = {
        "eps_L < eps": _lt(eps_L, eps),
        "eps < eps_U": _lt(eps, eps_U),
        "|eps| < 1/q'_r": np.minimum(_lt(eps, i0), _lt(-i0, eps)),
        "l < point": _lt(l, target),
        "point < u": _lt(target, u),
        "1/q'_{r+2} <= l": lfloor,
        "0 < l": _lt(fe.FI.point(np.zeros(len(l))), l),
        "u < 1": _lt(u, fe.FI.point(np.ones(len(u)))),
    }
    counts = {}
    open_idx = set()
    for key, code in checks.items():
        # a head point near 1/2 leaves the signed remainder undecided
        code = np.where(half_open, np.minimum(code, 0), code)
        checks[key] = code
        open_idx.update(np.nonzero(code == 0)[0].tolist())
    # rigorous fallback for anything the float path could not decide
    resolved = {}
    for idx in sorted(open_idx):
        resolved[idx] = _scalar_checks(table, int(M[idx]), int(r[idx]), int(s[idx]), int(t[idx]), int(head[idx]))
    for key, code in checks.items():
        c = {Verdict.PASS: 0, Verdict.FAIL: 0, Verdict.INDETERMINATE: 0}
        c[Verdict.PASS] = int(np.sum(code == 1))
        c[Verdict.FAIL] = int(np.sum(code == -1))
        for idx in np.nonzero(code == 0)[0].tolist():
            c[resolved[idx][key]] += 1
        counts[key] = c
    return DistributionReport(label or rot.label, int(len(M)), counts)


def _scalar_checks(table: QuasiperiodTable, M: int, r: int, s: int, t: int, head: int) -> dict:
    """High-precision re-evaluation of one triple, used when floats are inconclusive."""
    pol = DEFAULT_POLICY
    alpha = table.cf.alpha
    h = signed_frac(frac(affine(alpha, head), pol), pol) if head else RigorousReal.from_exact(0)
    q = table.q(r)
    eps = (h if r % 2 == 0 else -h) + (s + Fraction(t, q)) / table.qs(r + 1)
    eps_L = Fraction((s - 1) * q + t, q) / table.qs(r + 1) + 1 / table.qs(r + 2)
    eps_U = eps_L + 1 / table.qs(r + 1)
    k = ((-1) ** r * t * table.p(r)) % q
    l = Fraction(k, q) + eps_L
    u = l + 1 / table.qs(r + 1)
    x = frac(affine(alpha, M), pol)
    target = x if r % 2 == 0 else affine(x, -1, 1)
    inv0 = 1 / table.qs(r)
    return {
        "eps_L < eps": prove_le(eps_L, eps, pol, strict=True),
        "eps < eps_U": prove_le(eps, eps_U, pol, strict=True),
        "|eps| < 1/q'_r": combine([prove_le(eps, inv0, pol, strict=True), prove_le(-inv0, eps, pol, strict=True)]),
        "l < point": prove_le(l, target, pol, strict=True),
        "point < u": prove_le(target, u, pol, strict=True),
        "1/q'_{r+2} <= l": _l_floor(table, CanonicalTriple(r, s, t), k, pol),
        "0 < l": prove_le(0, l, pol, strict=True),
        "u < 1": prove_le(u, 1, pol, strict=True),
    }
