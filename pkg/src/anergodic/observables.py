"""Circle observables, their dualities, partition sums and direct Birkhoff sums.

An observable carries three evaluators sharing one definition:
an mpmath interval form ``iv_fn(x, y)`` with y = 1 - x passed separately so
both ends of the circle keep full relative accuracy, a vectorized float
form ``fast(x, y)`` on ``floatenc.FI`` arrays, and an optional exact
rational form.  Metadata (monotonicity, quadrant, symmetry, singular ends)
is declared and spot-checked by ``check_metadata``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from mpmath import iv

from . import floatenc as fe
from .numerics import (
    DEFAULT_POLICY,
    IndeterminateError,
    PrecisionPolicy,
    RigorousReal,
    SpecError,
    Verdict,
    affine,
    combine,
    endpoints,
    iv_const,
    prove_le,
    rpow,
    working_bits,
)

Number = Union[int, Fraction]
HALF = Fraction(1, 2)

_QUAD_REFLECT = {"DL": "AL", "AL": "DL", "AU": "DU", "DU": "AU", "none": "none"}
_QUAD_NEGATE = {"DL": "AU", "AU": "DL", "AL": "DU", "DU": "AL", "none": "none"}
_MONO_FLIP = {"decreasing": "increasing", "increasing": "decreasing", "none": "none"}
_SING_REFLECT = {"0+": "1-", "1-": "0+"}


@dataclass(frozen=True)
class Observable:
    label: str
    iv_fn: Callable  # (x, y) mpmath intervals, y = 1 - x
    fast: Callable  # (x, y) FI arrays
    exact: Optional[Callable] = None  # Fraction -> Fraction or None
    monotonicity: str = "none"
    quadrant: str = "none"
    symmetry: str = "none"
    singularities: frozenset = field(default_factory=frozenset)
    normalised: bool = False
    beta: Optional[Fraction] = None

    @property
    def singular(self) -> bool:
        return bool(self.singularities)


# ------------------------------------------------------------ branch helpers

def _iv_branch(x, y, left: Callable, right: Callable):
    """left on x < 1/2, right on x >= 1/2, hull when x straddles 1/2."""
    h = iv.mpf(0.5)
    if x.b < h.a:
        return left(x, y)
    if x.a >= h.b:
        return right(x, y)
    lo_side = left(iv.mpf([x.a, 0.5]), iv.mpf([0.5, y.b]))
    hi_side = right(iv.mpf([0.5, x.b]), iv.mpf([y.a, 0.5]))
    return iv.mpf([min(lo_side.a, hi_side.a), max(lo_side.b, hi_side.b)])


def _fast_branch(x: fe.FI, y: fe.FI, left: Callable, right: Callable) -> fe.FI:
    lmask = x.hi < 0.5
    rmask = x.lo >= 0.5
    mixed = ~(lmask | rmask)
    out_lo = np.full(x.lo.shape, np.nan)
    out_hi = np.full(x.lo.shape, np.nan)
    if lmask.any():
        v = left(x[lmask], y[lmask])
        out_lo[lmask], out_hi[lmask] = v.lo, v.hi
    if rmask.any():
        v = right(x[rmask], y[rmask])
        out_lo[rmask], out_hi[rmask] = v.lo, v.hi
    if mixed.any():
        xm, ym = x[mixed], y[mixed]
        half = np.full(xm.lo.shape, 0.5)
        a = left(fe.FI(xm.lo, half), fe.FI(half, ym.hi))
        b = right(fe.FI(half, xm.hi), fe.FI(ym.lo, half))
        h = a.hull(b)
        out_lo[mixed], out_hi[mixed] = h.lo, h.hi
    return fe.FI(out_lo, out_hi)


def _exact_pow(x: Fraction, beta: Fraction) -> Optional[Fraction]:
    if beta.denominator != 1 or x <= 0:
        return None
    return x ** (-beta.numerator)


# ----------------------------------------------------------------- builtins

def _check_beta(beta) -> Fraction:
    beta = Fraction(beta)
    if beta < 1:
        raise SpecError(f"beta = {beta} < 1 is outside the supported range")
    return beta


def _iv_inv_pow(x, beta: Fraction):
    return 1 / rpow(x, beta)


@lru_cache(maxsize=None)
def make_theta(beta: Number = 1) -> Observable:
    """theta^beta(x) = x^-beta, normalised to 0 at the origin."""
    beta = _check_beta(beta)
    return Observable(
        label=f"theta:{beta}",
        iv_fn=lambda x, y: _iv_inv_pow(x, beta),
        fast=lambda x, y: x.neg_power(beta),
        exact=lambda x: _exact_pow(x, beta),
        monotonicity="decreasing",
        quadrant="DL",
        singularities=frozenset({"0+"}),
        normalised=True,
        beta=beta,
    )


@lru_cache(maxsize=None)
def theta_bar(beta: Number = 1) -> Observable:
    """(1 - x)^-beta."""
    return replace(reflect(make_theta(beta)), label=f"theta_bar:{Fraction(beta)}")


@lru_cache(maxsize=None)
def recip_nearest() -> Observable:
    """1/||x||."""

    def ex(x):
        d = min(x, 1 - x)
        return 1 / d if d > 0 else None

    return Observable(
        label="recip_nearest",
        iv_fn=lambda x, y: _iv_branch(x, y, lambda a, b: 1 / a, lambda a, b: 1 / b),
        fast=lambda x, y: _fast_branch(x, y, lambda a, b: a.recip(), lambda a, b: b.recip()),
        exact=ex,
        symmetry="symmetric",
        singularities=frozenset({"0+", "1-"}),
        normalised=True,
    )


@lru_cache(maxsize=None)
def recip_signed() -> Observable:
    """1/{{x}} with {{x}} in [-1/2, 1/2), so the value at 1/2 is -2."""

    def ex(x):
        if x <= 0 or x >= 1:
            return None
        return 1 / x if x < HALF else -1 / (1 - x)

    return Observable(
        label="recip_signed",
        iv_fn=lambda x, y: _iv_branch(x, y, lambda a, b: 1 / a, lambda a, b: -1 / b),
        fast=lambda x, y: _fast_branch(x, y, lambda a, b: a.recip(), lambda a, b: -(b.recip())),
        exact=ex,
        monotonicity="decreasing",
        symmetry="none",  # the value at 1/2 breaks antisymmetry
        singularities=frozenset({"0+", "1-"}),
        normalised=True,
    )


def _fast_cot_small(z: fe.FI) -> fe.FI:
    """cot(pi z) for z in (0, 1/2], decreasing in z."""
    pi_lo, pi_hi = fe.down(np.pi), np.pi  # float pi is below the true value
    a_lo = fe.down(z.lo * pi_lo)
    a_hi = fe.up(z.hi * fe.up(pi_hi))
    # cot is decreasing on (0, pi/2]
    c_lo = fe._libm_widen(np.cos(a_hi), True)
    s_hi = fe._libm_widen(np.sin(a_hi), False)
    c_hi = fe._libm_widen(np.cos(a_lo), False)
    s_lo = fe._libm_widen(np.sin(a_lo), True)
    lo = np.where(c_lo >= 0, fe.down(c_lo / s_hi), fe.down(c_lo / np.maximum(s_lo, 1e-300)))
    hi = fe.up(c_hi / s_lo)
    return fe.FI(lo, hi)


@lru_cache(maxsize=None)
def recip_signed_hole() -> Observable:
    """1/{{x}} with the value at 1/2 replaced by 0, which makes it antisymmetric."""
    base = recip_signed()

    def ex(x):
        return Fraction(0) if x == HALF else base.exact(x)

    def ivf(x, y):
        return _iv_branch(x, y, lambda a, b: 1 / a, lambda a, b: -1 / b)

    def fast(x, y):
        return _fast_branch(x, y, lambda a, b: a.recip(), lambda a, b: -b.recip())

    return replace(base, label="recip_signed_hole", iv_fn=ivf, fast=fast, exact=ex,
                   symmetry="antisymmetric")


@lru_cache(maxsize=None)
def cot_pi() -> Observable:
    """cot(pi x)."""

    def cot(a):
        # iv.cot loses everything near pi/2
        z = iv.pi * a
        return iv.cos(z) / iv.sin(z)

    def ivf(x, y):
        return _iv_branch(x, y, lambda a, b: cot(a), lambda a, b: -cot(b))

    def fast(x, y):
        return _fast_branch(x, y, lambda a, b: _fast_cot_small(a), lambda a, b: -_fast_cot_small(b))

    return Observable(
        label="cot",
        iv_fn=ivf,
        fast=fast,
        exact=lambda x: Fraction(0) if x == HALF else None,
        monotonicity="decreasing",
        symmetry="antisymmetric",
        singularities=frozenset({"0+", "1-"}),
        normalised=True,
    )


@lru_cache(maxsize=None)
def antisym_theta(beta: Number = 1) -> Observable:
    """x^-beta - (1 - x)^-beta."""
    beta = _check_beta(beta)

    def ex(x):
        a, b = _exact_pow(x, beta), _exact_pow(1 - x, beta)
        return None if a is None or b is None else a - b

    return Observable(
        label="antisym_theta" if beta == 1 else f"antisym_theta:{beta}",
        iv_fn=lambda x, y: _iv_inv_pow(x, beta) - _iv_inv_pow(y, beta),
        fast=lambda x, y: x.neg_power(beta) - y.neg_power(beta),
        exact=ex,
        monotonicity="decreasing",
        symmetry="antisymmetric",
        singularities=frozenset({"0+", "1-"}),
        normalised=True,
        beta=beta,
    )


@lru_cache(maxsize=None)
def psi_half() -> Observable:
    """psi(x) = 1/(1-x) on [0, 1/2) and 1/x on [1/2, 1); 1/||x|| = theta + theta_bar - psi."""

    def ex(x):
        return 1 / (1 - x) if x < HALF else 1 / x

    return Observable(
        label="psi",
        iv_fn=lambda x, y: _iv_branch(x, y, lambda a, b: 1 / b, lambda a, b: 1 / a),
        fast=lambda x, y: _fast_branch(x, y, lambda a, b: b.recip(), lambda a, b: a.recip()),
        exact=ex,
        symmetry="symmetric",
    )


@lru_cache(maxsize=None)
def constant(c: Number) -> Observable:
    c = Fraction(c)
    return Observable(
        label=f"const:{c}",
        iv_fn=lambda x, y: iv_const(c),
        fast=lambda x, y: fe.FI(np.full(x.lo.shape, fe.fraction_down(c)), np.full(x.lo.shape, fe.fraction_up(c))),
        exact=lambda x: c,
        monotonicity="decreasing",
        symmetry="symmetric",
    )


def linear_combination(terms: list[tuple[Number, Observable]]) -> Observable:
    """sum a_i phi_i; metadata is dropped except shared singular ends."""
    terms = [(Fraction(a), p) for a, p in terms]

    def ivf(x, y):
        out = iv.mpf(0)
        for a, p in terms:
            out = out + iv_const(a) * p.iv_fn(x, y)
        return out

    def fast(x, y):
        out = fe.FI.point(np.zeros(x.lo.shape))
        for a, p in terms:
            out = out + fe._as_fi(a) * p.fast(x, y)
        return out

    def ex(x):
        vals = [p.exact(x) if p.exact else None for _, p in terms]
        if any(v is None for v in vals):
            return None
        return sum(a * v for (a, _), v in zip(terms, vals))

    sing = frozenset().union(*(p.singularities for _, p in terms))
    return Observable(
        label="+".join(f"{a}*{p.label}" for a, p in terms),
        iv_fn=ivf,
        fast=fast,
        exact=ex,
        singularities=sing,
        normalised=all(p.normalised or not p.singularities for _, p in terms),
    )


# ---------------------------------------------------------------- dualities

def reflect(phi: Observable) -> Observable:
    """x -> phi(1 - x)."""
    ex = phi.exact
    return Observable(
        label=f"reflect({phi.label})",
        iv_fn=lambda x, y: phi.iv_fn(y, x),
        fast=lambda x, y: phi.fast(y, x),
        exact=(lambda x: ex(1 - x)) if ex else None,
        monotonicity=_MONO_FLIP[phi.monotonicity],
        quadrant=_QUAD_REFLECT[phi.quadrant],
        symmetry=phi.symmetry,
        singularities=frozenset(_SING_REFLECT[s] for s in phi.singularities),
        normalised=phi.normalised,
        beta=phi.beta,
    )


def negate(phi: Observable) -> Observable:
    """x -> -phi(x)."""
    ex = phi.exact

    def nex(x):
        v = ex(x)
        return None if v is None else -v

    return Observable(
        label=f"negate({phi.label})",
        iv_fn=lambda x, y: -phi.iv_fn(x, y),
        fast=lambda x, y: -phi.fast(x, y),
        exact=nex if ex else None,
        monotonicity=_MONO_FLIP[phi.monotonicity],
        quadrant=_QUAD_NEGATE[phi.quadrant],
        symmetry=phi.symmetry,
        singularities=phi.singularities,
        normalised=phi.normalised,
        beta=phi.beta,
    )


_BUILTINS = {
    "recip_nearest": recip_nearest,
    "recip_signed": recip_signed,
    "cot": cot_pi,
    "psi": psi_half,
}


def parse_observable(name: str) -> Observable:
    """CLI names: theta:<beta>, theta_bar:<beta>, antisym_theta[:<beta>], recip_nearest, recip_signed, cot, psi."""
    head, _, arg = name.partition(":")
    try:
        if head == "theta":
            return make_theta(Fraction(arg or 1))
        if head == "theta_bar":
            return theta_bar(Fraction(arg or 1))
        if head == "antisym_theta":
            return antisym_theta(Fraction(arg or 1))
        if head == "const":
            return constant(Fraction(arg))
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"bad observable {name!r}: {exc}") from exc
    if head in _BUILTINS and not arg:
        return _BUILTINS[head]()
    raise SpecError(f"unknown observable {name!r}")


# --------------------------------------------------------------- evaluation

def _singular_at(phi: Observable, x: Fraction) -> bool:
    return (x == 0 and "0+" in phi.singularities) or (x == 1 and "1-" in phi.singularities)


def evaluate(phi: Observable, x: Union[RigorousReal, Number]) -> RigorousReal:
    """phi(x) for x in [0, 1]; a normalised observable is 0 at its singular ends."""
    x = RigorousReal.lift(x)
    if x.exact is not None:
        if _singular_at(phi, x.exact):
            if phi.normalised:
                return RigorousReal.from_exact(0)
            raise ValueError(f"{phi.label} is singular at {x.exact}")
        if phi.exact is not None:
            v = phi.exact(x.exact)
            if v is not None:
                return RigorousReal.from_exact(v)
    y = 1 - x
    if x.surd is not None:
        y = affine(x, -1, 1)

    def build(b):
        xi, yi = x.at(b), y.at(b)
        with working_bits(b):
            return phi.iv_fn(xi, yi)

    return RigorousReal(build, x.bits)


def check_metadata(phi: Observable, samples: int = 64, seed: int = 0) -> Verdict:
    """Spot-check declared monotonicity, symmetry and normalisation."""
    rng = np.random.default_rng(seed)
    den = 1 << 20
    pts = sorted({Fraction(int(k), den) for k in rng.integers(1, den, samples)} - {HALF})
    vals = [evaluate(phi, p) for p in pts]
    out = []
    if phi.monotonicity != "none":
        for a, b in zip(vals, vals[1:]):
            out.append(prove_le(b, a) if phi.monotonicity == "decreasing" else prove_le(a, b))
    for p, v in zip(pts, vals):
        w = evaluate(phi, 1 - p)
        if phi.symmetry == "symmetric":
            out.append(Verdict.PASS if (v - w).contains(0) else Verdict.FAIL)
        elif phi.symmetry == "antisymmetric":
            out.append(Verdict.PASS if (v + w).contains(0) else Verdict.FAIL)
    if phi.symmetry == "antisymmetric":
        out.append(Verdict.PASS if evaluate(phi, HALF).contains(0) else Verdict.FAIL)
    if phi.normalised:
        for end, s in ((0, "0+"), (1, "1-")):
            if s in phi.singularities:
                out.append(Verdict.PASS if evaluate(phi, end).exact == 0 else Verdict.FAIL)
    return combine(out)


# ----------------------------------------------------------- partition sums

def _fraction_points(k: int, t: np.ndarray) -> tuple[fe.FI, fe.FI]:
    kf = float(k)
    x = t.astype(np.float64) / kf
    y = (k - t).astype(np.float64) / kf
    return fe.FI(fe.down(x), fe.up(x)), fe.FI(fe.down(y), fe.up(y))


def _interval_rr(lo: float, hi: float) -> RigorousReal:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise IndeterminateError("non-finite float enclosure")
    return RigorousReal.from_interval(Fraction(lo), Fraction(hi))


EXACT_LIMIT = 256
IV_LIMIT = 2048


@lru_cache(maxsize=4096)
def _partition_cached(phi: Observable, k: int) -> RigorousReal:
    if k <= EXACT_LIMIT and phi.exact is not None:
        vals = [phi.exact(Fraction(t, k)) for t in range(1, k)]
        if all(v is not None for v in vals):
            return RigorousReal.from_exact(sum(vals, Fraction(0)))
    # the branch point 1/2 is evaluated exactly, so a redefined value there is honoured
    mid = k // 2 if k % 2 == 0 and phi.exact is not None and phi.exact(HALF) is not None else None
    extra = RigorousReal.from_exact(phi.exact(HALF)) if mid is not None else None
    if k <= IV_LIMIT:
        def build(b):
            with working_bits(b):
                acc = iv.mpf(0)
                kk = iv.mpf(k)
                for t in range(1, k):
                    if t != mid:
                        acc += phi.iv_fn(iv.mpf(t) / kk, iv.mpf(k - t) / kk)
                return acc

        out = RigorousReal(build)
        return out if extra is None else out + extra
    parts = []
    for start in range(1, k, 1 << 20):
        t = np.arange(start, min(k, start + (1 << 20)), dtype=np.int64)
        if mid is not None:
            t = t[t != mid]
        x, y = _fraction_points(k, t)
        v = phi.fast(x, y)
        if v.bad().any():
            raise IndeterminateError(f"partition sum P_{k}({phi.label}): float path failed")
        parts.append(fe.fsum_interval(v))
    lo = float(fe.down(math.fsum(p[0] for p in parts)))
    hi = float(fe.up(math.fsum(p[1] for p in parts)))
    out = _interval_rr(lo, hi)
    return out if extra is None else out + extra


def partition_sum(phi: Observable, k: int) -> RigorousReal:
    """P_k(phi) = sum_{t=1}^{k-1} phi(t/k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return RigorousReal.from_exact(0)
    return _partition_cached(phi, k)


# --------------------------------------------------------- harmonic function

@dataclass(frozen=True)
class HarmonicValue:
    beta: Fraction
    k: int
    y: Fraction
    value: RigorousReal


def _harmonic_rr(beta: Fraction, k: int, y: Fraction) -> RigorousReal:
    if k <= 0:
        return RigorousReal.from_exact(0)
    if beta.denominator == 1 and k <= EXACT_LIMIT:
        return RigorousReal.from_exact(sum((y + s) ** (-beta.numerator) for s in range(k)))
    if k <= IV_LIMIT:
        def build(b):
            with working_bits(b):
                yy = iv_const(y)
                acc = iv.mpf(0)
                for s in range(k):
                    acc += 1 / rpow(yy + s, beta)
                return acc

        return RigorousReal(build)
    parts = []
    ylo, yhi = fe.fraction_down(y), fe.fraction_up(y)
    for start in range(0, k, 1 << 20):
        s = np.arange(start, min(k, start + (1 << 20)), dtype=np.float64)
        x = fe.FI(fe.down(s + ylo), fe.up(s + yhi))
        parts.append(fe.fsum_interval(x.neg_power(beta)))
    return _interval_rr(float(fe.down(math.fsum(p[0] for p in parts))),
                        float(fe.up(math.fsum(p[1] for p in parts))))


@lru_cache(maxsize=8192)
def _harmonic_cached(beta: Fraction, k: int, y: Fraction) -> RigorousReal:
    return _harmonic_rr(beta, k, y)


def harmonic(beta: Number, k: int, y: Number = 1) -> HarmonicValue:
    """H_k^beta(y) = sum_{s=0}^{k-1} (y + s)^-beta, zero for k <= 0."""
    beta, y = Fraction(beta), Fraction(y)
    if y <= 0:
        raise ValueError("y must be > 0")
    return HarmonicValue(beta, k, y, _harmonic_cached(beta, k, y))


def harmonic_real(beta: Number, k: int, y: RigorousReal) -> RigorousReal:
    """H_k^beta(y) for a real (enclosed) y > 0 and small k."""
    beta = Fraction(beta)
    if k <= 0:
        return RigorousReal.from_exact(0)
    if y.exact is not None:
        return harmonic(beta, k, y.exact).value

    def build(b):
        yy = y.at(b)
        with working_bits(b):
            acc = iv.mpf(0)
            for s in range(k):
                acc += 1 / rpow(yy + s, beta)
            return acc

    return RigorousReal(build, y.bits)


def harmonic_bounds(beta: Number, k: int, y: Number = 1) -> tuple[RigorousReal, RigorousReal]:
    """(lower, upper) integral-comparison bounds for H_k^beta(y), k >= 1.

    The lower bound is strict.
    """
    beta, y = Fraction(beta), Fraction(y)
    if k < 1:
        raise ValueError("k must be >= 1")
    Y = RigorousReal.from_exact(y)
    if beta == 1:
        lower = (1 + RigorousReal.from_exact(Fraction(k) / y)).log()
        upper = 1 / Y + (1 + RigorousReal.from_exact(Fraction(k - 1) / y)).log()
        return lower, upper
    g = beta - 1

    def p(v):
        return 1 / RigorousReal.from_exact(v).power(g)

    lower = (p(y) - p(y + k)) / g
    upper = 1 / Y.power(beta) + (p(y) - p(y + k - 1)) / g
    return lower, upper


def harmonic_trivial_bound(beta: Number, n: int) -> Fraction:
    """[n > 0](1 + 2^-beta (n - 1)) for integer beta; the beta = 1 form is (n + 1)/2."""
    beta = Fraction(beta)
    if n <= 0:
        return Fraction(0)
    if beta.denominator != 1:
        raise ValueError("exact trivial bound needs integer beta")
    return 1 + Fraction(n - 1, 2**beta.numerator)


# ------------------------------------------------------------------- zeta

@lru_cache(maxsize=64)
def zeta_enclosure(beta: Fraction, K: int = 2000) -> Optional[RigorousReal]:
    """zeta(beta) for beta > 1 via a K-term sum and a convex tail bound; None at beta = 1.

    With f(x) = x^-beta the tail sum_{k>=K} f(k) lies in
    [I + f(K)/2, I + f(K)/2 + (f''(K) - f'(K))/12], I = K^{1-beta}/(beta-1).
    """
    beta = Fraction(beta)
    if beta <= 1:
        return None
    head = harmonic(beta, K - 1).value
    g = beta - 1
    Kr = RigorousReal.from_exact(K)
    fK = 1 / Kr.power(beta)
    integral = 1 / (Kr.power(g) * g)
    fprime = -beta / Kr.power(beta + 1)
    fsecond = beta * (beta + 1) / Kr.power(beta + 2)
    lo = head + integral + fK / 2
    hi = lo + (fsecond - fprime) / 12
    return RigorousReal(lambda b: iv.mpf([lo.at(b).a, hi.at(b).b]))


# ------------------------------------------------------------- orbit sums

CHUNK = 1 << 20


def _orbit_points_iv(alpha: RigorousReal, M: int, bits: int):
    """({M alpha}, 1 - {M alpha}) as mpmath intervals."""
    with working_bits(bits):
        z = alpha.at(bits) * M
        k = int(math.floor(endpoints(z)[0]))
        x = z - k
        if x.b >= 1:
            raise IndeterminateError("orbit point straddles an integer")
        return x, 1 - x


def orbit_values(alpha: RigorousReal, phi: Observable, M: np.ndarray, policy: PrecisionPolicy = DEFAULT_POLICY) -> fe.FI:
    """Enclosures of phi({M alpha}) on the float path, mpmath where it fails."""
    M = np.asarray(M, dtype=np.int64)
    c = fe.orbit_coords(alpha, M)
    amb = c.ambiguous()
    if amb.any():
        x, y = c.x, c.y
        x.lo[amb], x.hi[amb], y.lo[amb], y.hi[amb] = 0.25, 0.25, 0.75, 0.75
    with np.errstate(all="ignore"):
        v = phi.fast(c.x, c.y)
    bad = v.bad() | amb
    for i in np.flatnonzero(bad):
        lo, hi = _slow_value(alpha, phi, int(M[i]), policy)
        v.lo[i], v.hi[i] = lo, hi
    return v


def _slow_value(alpha: RigorousReal, phi: Observable, m: int, policy: PrecisionPolicy) -> tuple[float, float]:
    for bits in policy.schedule():
        try:
            x, y = _orbit_points_iv(alpha, m, max(bits, alpha.bits))
        except IndeterminateError:
            continue
        if x.a <= 0:
            continue
        with working_bits(bits):
            val = phi.iv_fn(x, y)
        lo, hi = endpoints(val)
        return fe.fraction_down(lo), fe.fraction_up(hi)
    raise IndeterminateError(f"phi({{{m} alpha}}) undecidable")


class OrbitSums:
    """Rigorous sums of phi({M alpha}) over index ranges, for M up to nmax.

    Values for M <= head are kept with prefix sums; beyond that only
    block sums are kept and block edges are recomputed on demand.
    """

    BLOCK = 4096
    HEAD = 1 << 17

    def __init__(self, alpha: RigorousReal, phi: Observable, nmax: int,
                 policy: PrecisionPolicy = DEFAULT_POLICY):
        self.alpha, self.phi, self.policy = alpha, phi, policy
        self.nmax = nmax
        h = min(nmax, self.HEAD)
        self.head_vals = orbit_values(alpha, phi, np.arange(1, h + 1), policy)
        self.head = fe.PrefixSums(self.head_vals)
        self.h = h
        nb = (nmax - h) // self.BLOCK
        self.nb = nb
        lo, hi, ab = np.zeros(nb), np.zeros(nb), np.zeros(nb)
        per = max(1, CHUNK // self.BLOCK)
        for k0 in range(0, nb, per):
            k1 = min(nb, k0 + per)
            M = np.arange(h + 1 + k0 * self.BLOCK, h + 1 + k1 * self.BLOCK)
            v = orbit_values(alpha, phi, M, policy)
            vl = v.lo.reshape(-1, self.BLOCK)
            vh = v.hi.reshape(-1, self.BLOCK)
            a = np.maximum(np.abs(vl), np.abs(vh)).sum(axis=1)
            err = fe.up(a * (1.01 * self.BLOCK * fe.EPS))
            lo[k0:k1] = fe.down(vl.sum(axis=1) - err)
            hi[k0:k1] = fe.up(vh.sum(axis=1) + err)
            ab[k0:k1] = a
        self._blo = np.concatenate(([0.0], np.cumsum(lo)))
        self._bhi = np.concatenate(([0.0], np.cumsum(hi)))
        self._babs = np.concatenate(([0.0], np.cumsum(ab)))
        self._bc = 1.01 * (nb + 8) * fe.EPS

    def values(self, M) -> fe.FI:
        M = np.atleast_1d(np.asarray(M, dtype=np.int64))
        if M.size and M.max() <= self.h:
            return self.head_vals[M - 1]
        return orbit_values(self.alpha, self.phi, M, self.policy)

    def value(self, m: int) -> RigorousReal:
        v = self.values([m])
        return _interval_rr(float(v.lo[0]), float(v.hi[0]))

    def _direct(self, m0: int, m1: int) -> tuple[float, float]:
        if m1 <= m0:
            return 0.0, 0.0
        return fe.fsum_interval(orbit_values(self.alpha, self.phi, np.arange(m0 + 1, m1 + 1), self.policy))

    def _bounds(self, m0: int, m1: int) -> tuple[float, float]:
        if m1 <= m0:
            return 0.0, 0.0
        if m1 > self.nmax:
            raise ValueError(f"index {m1} beyond cache size {self.nmax}")
        parts = []
        if m0 < self.h:
            parts.append(self.head.segment(m0, min(m1, self.h)))
            m0 = min(m1, self.h)
        if m1 > m0:
            B = self.BLOCK
            k0 = -(-(m0 - self.h) // B)
            k1 = (m1 - self.h) // B
            if k1 <= k0:
                parts.append(self._direct(m0, m1))
            else:
                parts.append(self._direct(m0, self.h + k0 * B))
                err = fe.up(self._bc * (self._babs[k1] + self._babs[k0]))
                parts.append((float(fe.down(self._blo[k1] - self._blo[k0] - err)),
                              float(fe.up(self._bhi[k1] - self._bhi[k0] + err))))
                parts.append(self._direct(self.h + k1 * B, m1))
        return (float(fe.down(math.fsum(p[0] for p in parts))),
                float(fe.up(math.fsum(p[1] for p in parts))))

    def segment(self, m0: int, m1: int) -> RigorousReal:
        """sum of phi({M alpha}) for m0 < M <= m1."""
        if m1 <= m0:
            return RigorousReal.from_exact(0)
        return _interval_rr(*self._bounds(m0, m1))

    def total(self, N: int) -> RigorousReal:
        return self.segment(0, N)


def _alpha_of(alpha) -> RigorousReal:
    return alpha.alpha if hasattr(alpha, "table_for") else alpha


def _direct_bits(rot, phi: Observable, N: int) -> int:
    """Working bits from min ||r alpha|| >= 1/q'_{n+1}."""
    if not hasattr(rot, "table_for"):
        return 64 + 4 * max(N, 2).bit_length()
    from .cf_engine import index_n

    t = rot.table_for(N)
    n = index_n(t, N)
    lq = float(t.qs(n + 1).upper).__ceil__().bit_length()
    beta = float(phi.beta) if phi.beta is not None else 1.0
    return int((2 + beta) * lq) + 64


def birkhoff_sum_direct(alpha, phi: Observable, N: int, tolerance: Fraction = Fraction(1, 10**9),
                        policy: PrecisionPolicy = DEFAULT_POLICY) -> RigorousReal:
    """Enclosure of S_N phi = sum_{r=1}^N phi({r alpha}).

    ``alpha`` is a RigorousReal or a cf_engine.Rotation; the latter lets the
    mpmath fallback size its precision from the error periods.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    if N == 0:
        return RigorousReal.from_exact(0)
    a = _alpha_of(alpha)
    tolerance = Fraction(tolerance)
    if N < 1 << 31:
        parts = []
        for start in range(1, N + 1, CHUNK):
            M = np.arange(start, min(N, start + CHUNK - 1) + 1)
            parts.append(fe.fsum_interval(orbit_values(a, phi, M, policy)))
        lo = float(fe.down(math.fsum(p[0] for p in parts)))
        hi = float(fe.up(math.fsum(p[1] for p in parts)))
        out = _interval_rr(lo, hi)
        if out.width <= tolerance * max(1, abs(out.lower), abs(out.upper)):
            return out
    bits = max(policy.initial_bits, _direct_bits(alpha, phi, N))
    while bits <= policy.max_bits:
        with working_bits(bits):
            acc = iv.mpf(0)
            for m in range(1, N + 1):
                x, y = _orbit_points_iv(a, m, bits)
                acc += phi.iv_fn(x, y)
        lo, hi = endpoints(acc)
        if hi - lo <= tolerance * max(1, abs(lo), abs(hi)):
            return RigorousReal.from_interval(lo, hi)
        bits *= 2
    raise IndeterminateError(f"S_{N} {phi.label}: tolerance {tolerance} unreachable within {policy.max_bits} bits")


# ------------------------------------------------------------ Denjoy-Koksma

@dataclass(frozen=True)
class DKBand:
    center: RigorousReal
    radius: int
    direct: RigorousReal
    verdict: Verdict


def denjoy_koksma_band(rot, N: int, sums: Optional[OrbitSums] = None) -> DKBand:
    """Check |S_N psi - 2 N log 2| <= 2 d(N), d the Ostrowski digit sum."""
    from .ostrowski import digit_sum, represent

    if N < 1:
        raise ValueError("N must be >= 1")
    d = digit_sum(represent(rot.table_for(N), N))
    center = RigorousReal.from_exact(2 * N) * RigorousReal.from_exact(2).log()
    direct = sums.total(N) if sums is not None else birkhoff_sum_direct(rot, psi_half(), N)
    radius = 2 * d
    v = combine([prove_le(center - radius, direct), prove_le(direct, center + radius)])
    return DKBand(center, radius, direct, v)


def denjoy_koksma_psi(rot, N: int) -> tuple[RigorousReal, int]:
    """(2 N log 2, 2 d(N)); a provable exit from the band is a hard failure."""
    band = denjoy_koksma_band(rot, N)
    if band.verdict == Verdict.FAIL:
        raise AssertionError(f"S_{N} psi = {band.direct} outside {band.center} +- {band.radius}")
    if band.verdict == Verdict.INDETERMINATE:
        raise IndeterminateError(f"S_{N} psi band membership undecided")
    return band.center, band.radius
