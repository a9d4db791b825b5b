"""Rigorous real arithmetic for rotation numbers.

Every real quantity is carried as an mpmath interval produced by a builder
``bits -> interval``.  Asking for more bits re-runs the builder and the result
is intersected with what is already known, so enclosures only ever shrink.
Quadratic surds are kept exactly so that floors and comparisons of complete
quotients are decided by integer arithmetic.
"""
from __future__ import annotations

import contextlib
import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Union

import mpmath.libmp as libmp
from mpmath import iv

Number = Union[int, Fraction]


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INDETERMINATE = "INDETERMINATE"
    EXPLORATORY = "EXPLORATORY"


def combine(verdicts: Iterable[Verdict]) -> Verdict:
    """Worst verdict wins: FAIL, then INDETERMINATE, then PASS."""
    seen = set(verdicts)
    if Verdict.FAIL in seen:
        return Verdict.FAIL
    if Verdict.INDETERMINATE in seen:
        return Verdict.INDETERMINATE
    if seen and seen <= {Verdict.EXPLORATORY}:
        return Verdict.EXPLORATORY
    return Verdict.PASS


class Ordering(str, enum.Enum):
    LT = "LT"
    GT = "GT"
    EQ = "EQ"
    INDETERMINATE = "INDETERMINATE"


class SpecError(ValueError):
    """Malformed or unsupported alpha specification."""


class IndeterminateError(ArithmeticError):
    """A decision could not be made within the precision budget."""


@contextlib.contextmanager
def working_bits(bits: int) -> Iterator[None]:
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


@dataclass(frozen=True)
class PrecisionPolicy:
    initial_bits: int = 128
    max_bits: int = 8192
    target_width: Fraction = Fraction(1, 2**80)

    def __post_init__(self):
        if self.initial_bits < 16 or self.initial_bits > self.max_bits:
            raise ValueError("need 16 <= initial_bits <= max_bits")
        if self.target_width <= 0:
            raise ValueError("target_width must be positive")

    def schedule(self) -> Iterator[int]:
        bits = self.initial_bits
        while True:
            yield bits
            if bits >= self.max_bits:
                return
            bits = min(2 * bits, self.max_bits)


DEFAULT_POLICY = PrecisionPolicy()


# ---------------------------------------------------------------- intervals

def mpf_to_fraction(t) -> Fraction:
    if t in (libmp.finf, libmp.fninf, libmp.fnan):
        raise IndeterminateError("non-finite interval endpoint")
    p, q = libmp.to_rational(t)
    return Fraction(int(p), int(q))


def endpoints(x) -> tuple[Fraction, Fraction]:
    a, b = x._mpi_
    return mpf_to_fraction(a), mpf_to_fraction(b)


def iv_const(value: Number):
    """Enclosure of an exact rational at the current iv precision."""
    value = Fraction(value)
    if value.denominator == 1:
        return iv.mpf(value.numerator)
    return iv.mpf(value.numerator) / value.denominator


def iv_intersect(x, y):
    xa, xb = x._mpi_
    ya, yb = y._mpi_
    lo = xa if libmp.mpf_ge(xa, ya) else ya
    hi = xb if libmp.mpf_le(xb, yb) else yb
    if libmp.mpf_gt(lo, hi):
        raise AssertionError("disjoint enclosures of the same quantity")
    out = iv.mpf(0)
    out._mpi_ = (lo, hi)
    return out


def iv_floor_pair(x) -> tuple[int, int]:
    lo, hi = endpoints(x)
    return math.floor(lo), math.floor(hi)


def contains_integer(x) -> bool:
    lo, hi = endpoints(x)
    return math.floor(hi) >= math.ceil(lo)


# --------------------------------------------------------------------- surds

def _is_square(d: int) -> bool:
    return d >= 0 and math.isqrt(d) ** 2 == d


@dataclass(frozen=True)
class Surd:
    """The number (a + b*sqrt(d)) / c with c > 0 and d > 0 not a square."""

    a: int
    b: int
    d: int
    c: int

    @staticmethod
    def make(a: int, b: int, d: int, c: int) -> "Surd":
        if c == 0:
            raise ZeroDivisionError("surd with zero denominator")
        if d <= 0 or _is_square(d):
            raise SpecError(f"sqrt({d}) is rational")
        if b == 0:
            raise SpecError("surd with b = 0 is rational")
        if c < 0:
            a, b, c = -a, -b, -c
        for f in (2, 3, 5, 7, 11, 13):
            while d % (f * f) == 0:
                d //= f * f
                b *= f
        g = math.gcd(math.gcd(a, b), c)
        return Surd(a // g, b // g, d, c // g)

    def _floor_numerator(self) -> int:
        r = math.isqrt(self.b * self.b * self.d)
        return self.a + (r if self.b > 0 else -r - 1)

    def floor(self) -> int:
        return self._floor_numerator() // self.c

    def sign(self) -> int:
        # sign of a + b sqrt d; never zero since sqrt d is irrational
        if self.a >= 0 and self.b > 0:
            return 1
        if self.a <= 0 and self.b < 0:
            return -1
        if self.a > 0:
            return 1 if self.a * self.a > self.b * self.b * self.d else -1
        return 1 if self.b * self.b * self.d > self.a * self.a else -1

    def affine(self, m: Number, k: Number) -> "Surd":
        """m*x + k for rational m != 0 and k."""
        m, k = Fraction(m), Fraction(k)
        den = self.c * m.denominator * k.denominator
        a = self.a * m.numerator * k.denominator + k.numerator * self.c * m.denominator
        b = self.b * m.numerator * k.denominator
        return Surd.make(a, b, self.d, den)

    def __sub__(self, k: Number) -> "Surd":
        return self.affine(1, -Fraction(k))

    def __add__(self, k: Number) -> "Surd":
        return self.affine(1, Fraction(k))

    def __neg__(self) -> "Surd":
        return self.affine(-1, 0)

    def reciprocal(self) -> "Surd":
        # c / (a + b sqrt d) = c (a - b sqrt d) / (a^2 - b^2 d)
        den = self.a * self.a - self.b * self.b * self.d
        return Surd.make(self.c * self.a, -self.c * self.b, self.d, den)

    def mobius(self, p1: int, p0: int, q1: int, q0: int) -> "Surd":
        """(p1*x + p0) / (q1*x + q0) with integer coefficients."""
        # numerator and denominator as (A + B sqrt d)/c pairs
        na, nb = p1 * self.a + p0 * self.c, p1 * self.b
        da, db = q1 * self.a + q0 * self.c, q1 * self.b
        den = da * da - db * db * self.d
        a = na * da - nb * db * self.d
        b = nb * da - na * db
        if b == 0:
            raise SpecError("Mobius image of a surd is rational")
        return Surd.make(a, b, self.d, den)

    def enclosure(self, bits: int):
        with working_bits(bits + 16):
            v = (iv.mpf(self.a) + iv.mpf(self.b) * iv.sqrt(iv.mpf(self.d))) / self.c
        with working_bits(bits):
            return +v

    def __str__(self) -> str:
        return f"({self.a}{self.b:+d}*sqrt({self.d}))/{self.c}"


def periodic_cf_surd(preamble: tuple[int, ...], period: tuple[int, ...]) -> Surd:
    """Value of [0; preamble, (period)] as an exact surd."""
    # y = [period; y] satisfies y = (h y + h1) / (k y + k1)
    h, h1, k, k1 = 1, 0, 0, 1
    for digit in period:
        h, h1 = digit * h + h1, h
        k, k1 = digit * k + k1, k
    # k y^2 + (k1 - h) y - h1 = 0, positive root
    disc = (k1 - h) ** 2 + 4 * k * h1
    y = Surd.make(h - k1, 1, disc, 2 * k) if not _is_square(disc) else None
    if y is None:
        raise SpecError("periodic block gives a rational value")
    # alpha = 1/x with x = [a1; a2, ..., ak, y], a Mobius image of y
    P, P1, Q, Q1 = 1, 0, 0, 1
    for digit in preamble:
        P, P1 = digit * P + P1, P
        Q, Q1 = digit * Q + Q1, Q
    x = y.mobius(P, P1, Q, Q1)
    return x.reciprocal()


# ------------------------------------------------------------- alpha specs

@dataclass(frozen=True)
class AlphaSpec:
    kind: str  # "surd", "cf" or "dec"
    text: str
    surd: Optional[Surd] = None
    preamble: tuple[int, ...] = ()
    period: tuple[int, ...] = ()
    decimal: Optional[Fraction] = None
    bits: int = 0

    @property
    def constant_type(self) -> bool:
        return self.surd is not None


_SURD_RE = re.compile(
    r"^surd:\(\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*/\s*([+-]?\d+)\s*([+-]\s*\d+)?$"
)
_CF_RE = re.compile(r"^cf:((?:\d+,)*)\[(\d+(?:,\d+)*)\]$")
_DEC_RE = re.compile(r"^dec:(\d*\.\d+|\d+):(\d+)$")

NAMED = {
    "golden": Surd.make(-1, 1, 5, 2),
    "sqrt2m1": Surd.make(-1, 1, 2, 1),
}


def _check_unit(s: Surd, text: str) -> None:
    if not (0 <= s.floor() < 1) or s.sign() < 0:
        raise SpecError(f"{text}: value outside (0, 1)")


def parse_alpha_spec(text: str) -> AlphaSpec:
    text = text.strip()
    compact = text.replace(" ", "")
    if compact in NAMED:
        return AlphaSpec("surd", compact, surd=NAMED[compact])
    m = _SURD_RE.match(text)
    if m:
        p, sgn, q, d, r, off = m.groups()
        qv = int(q) if sgn == "+" else -int(q)
        c = int(r)
        if c == 0:
            raise SpecError("zero denominator")
        a = int(p)
        if off:
            a += int(off.replace(" ", "")) * c
        if qv == 0 or _is_square(int(d)):
            raise SpecError(f"{text}: rational value")
        s = Surd.make(a, qv, int(d), c)
        _check_unit(s, text)
        return AlphaSpec("surd", compact, surd=s)
    m = _CF_RE.match(compact)
    if m:
        pre = tuple(int(x) for x in m.group(1).split(",") if x)
        per = tuple(int(x) for x in m.group(2).split(","))
        if any(x < 1 for x in pre + per):
            raise SpecError("cf digits must be >= 1")
        s = periodic_cf_surd(pre, per)
        _check_unit(s, text)
        return AlphaSpec("cf", compact, surd=s, preamble=pre, period=per)
    if compact.startswith("cf:"):
        raise SpecError(f"{text}: cf spec needs a nonempty periodic block [..]")
    m = _DEC_RE.match(compact)
    if m:
        value = Fraction(m.group(1))
        bits = int(m.group(2))
        if bits < 8:
            raise SpecError("decimal needs at least 8 declared bits")
        if not 0 < value < 1:
            raise SpecError(f"{text}: value outside (0, 1)")
        radius = Fraction(1, 2**bits)
        limit = 2 ** (bits // 4)
        # reject when a rational of small height lies inside the declared enclosure
        near = value.limit_denominator(limit)
        if abs(near - value) <= radius:
            raise SpecError(f"{text}: indistinguishable from the rational {near}")
        return AlphaSpec("dec", compact, decimal=value, bits=bits)
    raise SpecError(f"cannot parse alpha spec {text!r}")


def random_periodic_spec(rng, max_pre: int = 2, max_period: int = 4, digits: tuple[int, int] = (1, 3)) -> AlphaSpec:
    """A random purely or eventually periodic cf spec drawn from ``rng`` (a random.Random)."""
    lo, hi = digits
    pre = [rng.randint(lo, hi) for _ in range(rng.randint(0, max_pre))]
    per = [rng.randint(lo, hi) for _ in range(rng.randint(1, max_period))]
    body = ",".join(str(x) for x in pre)
    text = f"cf:{body}{',' if pre else ''}[{','.join(str(x) for x in per)}]"
    return parse_alpha_spec(text)


# ------------------------------------------------------------ rigorous reals

Builder = Callable[[int], object]


class RigorousReal:
    """Refinable enclosure of a real number.

    ``at(bits)`` returns an mpmath interval; results are cached and
    intersected so a higher precision never yields a wider enclosure.
    """

    __slots__ = ("_build", "_cache", "bits", "exact", "surd")

    def __init__(self, build: Builder, bits: int = 128, exact: Optional[Fraction] = None,
                 surd: Optional[Surd] = None, _cache: Optional[dict] = None):
        self._build = build
        self._cache = {} if _cache is None else _cache
        self.bits = bits
        self.exact = exact
        self.surd = surd

    # construction
    @classmethod
    def from_exact(cls, value: Number, bits: int = 128) -> "RigorousReal":
        value = Fraction(value)

        def build(b):
            with working_bits(b):
                return iv_const(value)

        return cls(build, bits, exact=value)

    @classmethod
    def from_surd(cls, s: Surd, bits: int = 128) -> "RigorousReal":
        return cls(s.enclosure, bits, surd=s)

    @classmethod
    def from_interval(cls, lo: Number, hi: Number, bits: int = 128) -> "RigorousReal":
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("lo > hi")
        if lo == hi:
            return cls.from_exact(lo, bits)

        def build(b):
            with working_bits(b):
                return iv.mpf([iv_const(lo).a, iv_const(hi).b])

        return cls(build, bits)

    # evaluation
    def at(self, bits: int):
        hit = self._cache.get(bits)
        if hit is not None:
            return hit
        val = self._build(bits)
        for b in sorted(self._cache):
            val = iv_intersect(val, self._cache[b])
        self._cache[bits] = val
        return val

    @property
    def interval(self):
        return self.at(self.bits)

    def refine(self, bits: int) -> "RigorousReal":
        return RigorousReal(self._build, max(bits, self.bits), self.exact, self.surd, self._cache)

    @property
    def lower(self) -> Fraction:
        return self.exact if self.exact is not None else endpoints(self.interval)[0]

    @property
    def upper(self) -> Fraction:
        return self.exact if self.exact is not None else endpoints(self.interval)[1]

    @property
    def width(self) -> Fraction:
        return Fraction(0) if self.exact is not None else self.upper - self.lower

    def __float__(self) -> float:
        return float((self.lower + self.upper) / 2)

    def __repr__(self) -> str:
        if self.exact is not None:
            return f"RigorousReal({self.exact})"
        return f"RigorousReal({self.interval})"

    def contains(self, value: Number) -> bool:
        value = Fraction(value)
        return self.lower <= value <= self.upper

    # arithmetic
    @staticmethod
    def lift(x: Union["RigorousReal", Number]) -> "RigorousReal":
        return x if isinstance(x, RigorousReal) else RigorousReal.from_exact(x)

    def _binary(self, other, kind: str) -> "RigorousReal":
        other = RigorousReal.lift(other)
        op = _OPS[kind]
        bits = max(self.bits, other.bits)
        if self.exact is not None and other.exact is not None:
            return RigorousReal.from_exact(op(self.exact, other.exact), bits)
        if kind in ("mul", "div") and self.exact == 0:
            return self
        if kind == "mul" and other.exact == 0:
            return other
        x, y = self, other

        def build(b):
            with working_bits(b):
                return op(x.at(b), y.at(b))

        return RigorousReal(build, bits)

    def __add__(self, o):
        return self._binary(o, "add")

    __radd__ = __add__

    def __sub__(self, o):
        return self._binary(o, "sub")

    def __rsub__(self, o):
        return RigorousReal.lift(o) - self

    def __mul__(self, o):
        return self._binary(o, "mul")

    __rmul__ = __mul__

    def __truediv__(self, o):
        return self._binary(o, "div")

    def __rtruediv__(self, o):
        return RigorousReal.lift(o) / self

    def __neg__(self):
        if self.exact is not None:
            return RigorousReal.from_exact(-self.exact, self.bits)
        x = self
        return RigorousReal(lambda b: -x.at(b), self.bits)

    def map(self, fn: Callable, exact_fn: Optional[Callable] = None) -> "RigorousReal":
        """Apply an interval function ``fn`` (and optionally its exact form)."""
        if self.exact is not None and exact_fn is not None:
            r = exact_fn(self.exact)
            if r is not None:
                return RigorousReal.from_exact(r, self.bits)
        x = self

        def build(b):
            with working_bits(b):
                return fn(x.at(b))

        return RigorousReal(build, self.bits)

    def log(self) -> "RigorousReal":
        return self.map(iv.log, lambda v: Fraction(0) if v == 1 else None)

    def power(self, beta: Number) -> "RigorousReal":
        beta = Fraction(beta)

        def exact(v):
            if beta.denominator == 1 and v != 0:
                return v ** beta.numerator
            return None

        return self.map(lambda v: rpow(v, beta), exact)

    @staticmethod
    def maximum(values: Iterable["RigorousReal"]) -> "RigorousReal":
        vals = list(values)
        if all(v.exact is not None for v in vals):
            return RigorousReal.from_exact(max(v.exact for v in vals))

        def build(b):
            with working_bits(b):
                ivs = [v.at(b) for v in vals]
                lo = max(ivs, key=lambda t: endpoints(t)[0])
                hi = max(ivs, key=lambda t: endpoints(t)[1])
                return iv.mpf([lo.a, hi.b])

        return RigorousReal(build, max(v.bits for v in vals))

    @staticmethod
    def minimum(values: Iterable["RigorousReal"]) -> "RigorousReal":
        vals = [RigorousReal.lift(v) for v in values]
        return -RigorousReal.maximum([-v for v in vals])


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def rpow(x, beta: Fraction):
    """Interval power x**beta for x > 0 and rational beta."""
    if beta.denominator == 1:
        return x ** int(beta.numerator)
    if beta.denominator == 2:
        return iv.sqrt(x) ** int(beta.numerator)
    return iv.exp(iv.log(x) * iv_const(beta))


def affine(x: RigorousReal, m: Number, k: Number = 0) -> RigorousReal:
    """m*x + k, keeping an exact surd form when x has one."""
    m, k = Fraction(m), Fraction(k)
    if m == 0:
        return RigorousReal.from_exact(k, x.bits)
    if x.surd is not None:
        return RigorousReal.from_surd(x.surd.affine(m, k), x.bits)
    return x * m + k


# ------------------------------------------------------------- realization

def realize(spec: AlphaSpec, policy: PrecisionPolicy = DEFAULT_POLICY) -> RigorousReal:
    """Enclosure of alpha whose width is at most the policy target."""
    if spec.surd is not None:
        x = RigorousReal.from_surd(spec.surd, policy.initial_bits)
    else:
        radius = Fraction(1, 2**spec.bits)
        x = RigorousReal.from_interval(spec.decimal - radius, spec.decimal + radius, policy.initial_bits)
    for bits in policy.schedule():
        y = x.refine(bits)
        if y.width <= policy.target_width:
            return y
    raise IndeterminateError(
        f"{spec.text}: width {float(y.width):.3g} above target after {policy.max_bits} bits")


def policy_for(spec: AlphaSpec, policy: PrecisionPolicy = DEFAULT_POLICY) -> PrecisionPolicy:
    """Relax the target width of a decimal spec to its declared uncertainty."""
    if spec.kind != "dec":
        return policy
    width = Fraction(4, 2**spec.bits)
    if width <= policy.target_width:
        return policy
    return PrecisionPolicy(policy.initial_bits, policy.max_bits, width)


# -------------------------------------------------------- circle coordinates

def _decide_floor(x: RigorousReal, policy: PrecisionPolicy) -> int:
    if x.exact is not None:
        return math.floor(x.exact)
    if x.surd is not None:
        return x.surd.floor()
    for bits in policy.schedule():
        lo, hi = iv_floor_pair(x.at(max(bits, x.bits)))
        if lo == hi:
            return lo
    raise IndeterminateError("enclosure straddles an integer at max precision")


def floor(x: RigorousReal, policy: PrecisionPolicy = DEFAULT_POLICY) -> int:
    return _decide_floor(x, policy)


def _shift(x: RigorousReal, k: int) -> RigorousReal:
    return x if k == 0 else affine(x, 1, -k)


def frac(x: RigorousReal, policy: PrecisionPolicy = DEFAULT_POLICY) -> RigorousReal:
    """{x} in [0, 1)."""
    return _shift(x, _decide_floor(x, policy))


def signed_frac(x: RigorousReal, policy: PrecisionPolicy = DEFAULT_POLICY) -> RigorousReal:
    """{{x}} in [-1/2, 1/2)."""
    return _shift(x, _decide_floor(x + Fraction(1, 2), policy))


def dist_nearest(x: RigorousReal, policy: PrecisionPolicy = DEFAULT_POLICY) -> RigorousReal:
    """||x|| = |{{x}}|."""
    y = signed_frac(x, policy)
    s = sign(y, policy)
    if s > 0 or s == 0:
        return y
    return -y


def sign(x: RigorousReal, policy: PrecisionPolicy = DEFAULT_POLICY) -> int:
    """Sign of x; raises IndeterminateError if undecidable."""
    if x.exact is not None:
        return (x.exact > 0) - (x.exact < 0)
    if x.surd is not None:
        return x.surd.sign()
    for bits in policy.schedule():
        lo, hi = endpoints(x.at(max(bits, x.bits)))
        if lo > 0:
            return 1
        if hi < 0:
            return -1
    raise IndeterminateError("sign undecidable at max precision")


def cmp(x: RigorousReal, y: RigorousReal | Number, policy: PrecisionPolicy = DEFAULT_POLICY) -> Ordering:
    y = RigorousReal.lift(y)
    if x is y:
        return Ordering.EQ
    if x.exact is not None and y.exact is not None:
        return Ordering.LT if x.exact < y.exact else Ordering.GT if x.exact > y.exact else Ordering.EQ
    if x.surd is not None and y.surd is not None and x.surd == y.surd:
        return Ordering.EQ
    if x.surd is not None and y.exact is not None:
        s = (x.surd - y.exact).sign()
        return Ordering.GT if s > 0 else Ordering.LT
    if y.surd is not None and x.exact is not None:
        s = (y.surd - x.exact).sign()
        return Ordering.LT if s > 0 else Ordering.GT
    for bits in policy.schedule():
        b = max(bits, x.bits, y.bits)
        xl, xh = endpoints(x.at(b))
        yl, yh = endpoints(y.at(b))
        if xh < yl:
            return Ordering.LT
        if xl > yh:
            return Ordering.GT
    return Ordering.INDETERMINATE


def prove_le(x, y, policy: PrecisionPolicy = DEFAULT_POLICY, strict: bool = False) -> Verdict:
    """Verdict for x <= y (or x < y when strict)."""
    x, y = RigorousReal.lift(x), RigorousReal.lift(y)
    o = cmp(x, y, policy) if (x.exact is not None and y.exact is not None) or x is y else None
    if o is not None:
        ok = o == Ordering.LT or (o == Ordering.EQ and not strict)
        return Verdict.PASS if ok else Verdict.FAIL
    for bits in policy.schedule():
        b = max(bits, x.bits, y.bits)
        xl, xh = (x.exact, x.exact) if x.exact is not None else endpoints(x.at(b))
        yl, yh = (y.exact, y.exact) if y.exact is not None else endpoints(y.at(b))
        if xh < yl or (not strict and xh <= yl):
            return Verdict.PASS
        if xl > yh or (strict and xl >= yh):
            return Verdict.FAIL
    return Verdict.INDETERMINATE


# ---------------------------------------------------------------- formatting

def _round_decimal(value: Fraction, digits: int, up: bool) -> str:
    """Scientific notation with ``digits`` significant digits, rounded
    toward +inf when ``up`` and toward -inf otherwise."""
    if value == 0:
        return "0"
    neg = value < 0
    mag = -value if neg else value
    e = len(str(mag.numerator)) - len(str(mag.denominator))
    while Fraction(10) ** e > mag:
        e -= 1
    while Fraction(10) ** (e + 1) <= mag:
        e += 1
    scaled = mag * Fraction(10) ** (digits - 1 - e)
    m = math.ceil(scaled) if up != neg else math.floor(scaled)
    if m >= 10**digits:  # rounding carried into a new decade
        m //= 10
        e += 1
        if up != neg and m * Fraction(10) ** (e - digits + 1) < mag:
            m += 1
    text = str(m)
    mant = text[0] + "." + text[1:] if len(text) > 1 else text
    return f"{'-' if neg else ''}{mant}e{e:+d}"


def format_bounds(x: RigorousReal, digits: int = 20) -> tuple[str, str]:
    """Outward-rounded decimal strings for the enclosure endpoints."""
    return _round_decimal(x.lower, digits, up=False), _round_decimal(x.upper, digits, up=True)
