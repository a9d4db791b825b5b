"""Vectorized float64 interval enclosures.

IEEE add, sub, mul, div and sqrt are correctly rounded, so stepping one ulp
outward after each of them gives a valid enclosure.  Library transcendentals
(numpy sin, cos, log, exp, power) are not correctly rounded; they are widened
by ``LIBM_ULPS`` relative ulps, an assumption about the platform libm that is
recorded with the other build decisions.

Orbit points {M alpha} are formed from a fixed-point split of alpha so that
their absolute error is far below ulp(1), which matters near the origin
where observables blow up.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numerics import RigorousReal

INF = np.inf
EPS = 2.0**-53
LIBM_ULPS = 4


def down(x):
    return np.nextafter(x, -INF)


def up(x):
    return np.nextafter(x, INF)


def fraction_down(fr: Fraction) -> float:
    f = float(fr)
    return float(down(f)) if Fraction(f) > fr else f


def fraction_up(fr: Fraction) -> float:
    f = float(fr)
    return float(up(f)) if Fraction(f) < fr else f


def enclose(x: RigorousReal) -> tuple[float, float]:
    return fraction_down(x.lower), fraction_up(x.upper)


def _libm_widen(v, sign_lo: bool):
    """Widen a libm result by LIBM_ULPS relative ulps in one direction."""
    scale = 1.0 - LIBM_ULPS * 2 * EPS if sign_lo else 1.0 + LIBM_ULPS * 2 * EPS
    w = np.where(v >= 0, v * scale, v * (2.0 - scale))
    return down(w) if sign_lo else up(w)


@dataclass
class FI:
    """Arrays of closed intervals [lo, hi]."""

    lo: np.ndarray
    hi: np.ndarray

    @staticmethod
    def point(x) -> "FI":
        a = np.asarray(x, dtype=np.float64)
        return FI(a.copy(), a.copy())

    @staticmethod
    def const(x: RigorousReal, shape=()) -> "FI":
        lo, hi = enclose(x)
        return FI(np.full(shape, lo), np.full(shape, hi))

    def __len__(self):
        return len(self.lo)

    def __getitem__(self, idx) -> "FI":
        return FI(self.lo[idx], self.hi[idx])

    def __add__(self, o):
        o = _as_fi(o)
        return FI(down(self.lo + o.lo), up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self):
        return FI(-self.hi, -self.lo)

    def __sub__(self, o):
        o = _as_fi(o)
        return FI(down(self.lo - o.hi), up(self.hi - o.lo))

    def __rsub__(self, o):
        return _as_fi(o) - self

    def __mul__(self, o):
        o = _as_fi(o)
        if np.all(self.lo >= 0) and np.all(o.lo >= 0):
            return FI(down(self.lo * o.lo), up(self.hi * o.hi))
        c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return FI(down(np.minimum.reduce(c)), up(np.maximum.reduce(c)))

    __rmul__ = __mul__

    def recip(self):
        if np.any((self.lo <= 0) & (self.hi >= 0)):
            raise ZeroDivisionError("interval contains zero")
        return FI(down(1.0 / self.hi), up(1.0 / self.lo))

    def __truediv__(self, o):
        return self * _as_fi(o).recip()

    def sqrt(self):
        return FI(down(np.sqrt(np.maximum(self.lo, 0.0))), up(np.sqrt(self.hi)))

    def ipow(self, k: int):
        """x**k for x >= 0 and integer k >= 0."""
        out = FI.point(np.ones_like(self.lo))
        for _ in range(k):
            out = out * self
        return out

    def pos_power(self, beta: Fraction):
        """x**beta for positive x."""
        beta = Fraction(beta)
        if beta.denominator == 1:
            return self.ipow(beta.numerator)
        if beta.denominator == 2:
            return self.ipow(beta.numerator // 2) * self.sqrt()
        b = beta.numerator / beta.denominator
        with np.errstate(divide="ignore"):
            lo = _libm_widen(np.power(self.lo, b), True)
            hi = _libm_widen(np.power(self.hi, b), False)
        return FI(np.maximum(lo, 0.0), hi)

    def neg_power(self, beta: Fraction):
        """x**(-beta) for positive x."""
        return self.pos_power(beta).recip()

    def width(self):
        return self.hi - self.lo

    def bad(self):
        return ~(np.isfinite(self.lo) & np.isfinite(self.hi)) | (self.lo > self.hi)

    def where(self, mask, other: "FI") -> "FI":
        return FI(np.where(mask, self.lo, other.lo), np.where(mask, self.hi, other.hi))

    def hull(self, other: "FI") -> "FI":
        return FI(np.minimum(self.lo, other.lo), np.maximum(self.hi, other.hi))


def _as_fi(o) -> FI:
    if isinstance(o, FI):
        return o
    if isinstance(o, RigorousReal):
        return FI.const(o)
    if isinstance(o, Fraction):
        return FI(np.float64(fraction_down(o)), np.float64(fraction_up(o)))
    return FI.point(o)


# ------------------------------------------------------------------- orbits

def orbit_fraction(alpha: RigorousReal, M: np.ndarray) -> FI:
    """Enclosures of {M*alpha} for integer M >= 0."""
    M = np.asarray(M, dtype=np.int64)
    mmax = int(M.max()) if M.size else 1
    b = max(1, mmax.bit_length())
    if b > 31:
        raise ValueError("orbit index too large for the float fast path")
    K = min(52, 62 - b)
    scale = 1 << (2 * K)
    A = math.floor(alpha.lower * scale)
    dlo = alpha.lower - Fraction(A, scale)
    dhi = alpha.upper - Fraction(A, scale)
    A1, A2 = A >> K, A & ((1 << K) - 1)
    mask = (1 << K) - 1
    prod2 = M * np.int64(A2)
    f = (M * np.int64(A1) + (prod2 >> K)) & mask
    g = prod2 & mask
    s = f.astype(np.float64) * 2.0**-K + g.astype(np.float64) * 2.0 ** (-2 * K)
    # s is exact when it fits 53 bits; otherwise enclose the rounding
    s = FI(down(s), up(s))
    Mf = M.astype(np.float64)
    t = FI(down(Mf * fraction_down(dlo)), up(Mf * fraction_up(dhi)))
    x = s + t
    # x lies in [0, 2); shift the part above 1
    over = x.lo >= 1.0
    x = FI(np.where(over, down(x.lo - 1.0), x.lo), np.where(over, up(x.hi - 1.0), x.hi))
    x.lo = np.maximum(x.lo, 0.0)
    return x


@dataclass
class OrbitCoords:
    """x = {M alpha} and y = {-M alpha} = 1 - x, both with small relative error."""

    M: np.ndarray
    x: FI
    y: FI

    def ambiguous(self) -> np.ndarray:
        # a point whose enclosure touches 0 or 1 cannot feed a singular observable
        return (self.x.lo <= 0) | (self.x.hi >= 1) | (self.y.lo <= 0) | (self.y.hi >= 1)


def orbit_coords(alpha: RigorousReal, M: np.ndarray) -> OrbitCoords:
    x = orbit_fraction(alpha, M)
    y = orbit_fraction(1 - alpha, M)
    # tighten each coordinate using the other
    x2 = FI(np.maximum(x.lo, down(1.0 - y.hi)), np.minimum(x.hi, up(1.0 - y.lo)))
    y2 = FI(np.maximum(y.lo, down(1.0 - x.hi)), np.minimum(y.hi, up(1.0 - x.lo)))
    return OrbitCoords(np.asarray(M, dtype=np.int64), x2, y2)


# --------------------------------------------------------------------- sums

def fsum_interval(v: FI) -> tuple[float, float]:
    """Rigorous enclosure of the sum of an interval array."""
    if len(v.lo) == 0:
        return 0.0, 0.0
    lo = math.fsum(v.lo.tolist())
    hi = math.fsum(v.hi.tolist())
    return float(down(lo)), float(up(hi))


class PrefixSums:
    """Prefix sums of an interval array with a rigorous rounding budget.

    Blocked cumulative sums: each prefix carries an error of at most
    (BLOCK + blocks + 4) * u * (prefix of |values|).
    """

    BLOCK = 4096

    def __init__(self, v: FI):
        n = len(v.lo)
        self.n = n
        nb = max(1, -(-n // self.BLOCK))
        self._c = (self.BLOCK + nb + 8) * EPS * 1.01
        self.lo = self._prefix(v.lo, nb)
        self.hi = self._prefix(v.hi, nb)
        self.abs = self._prefix(np.maximum(np.abs(v.lo), np.abs(v.hi)), nb)

    def _prefix(self, a: np.ndarray, nb: int) -> np.ndarray:
        pad = np.zeros(nb * self.BLOCK)
        pad[: len(a)] = a
        blocks = pad.reshape(nb, self.BLOCK)
        inner = np.cumsum(blocks, axis=1)
        offsets = np.concatenate(([0.0], np.cumsum(inner[:, -1])[:-1]))
        flat = (inner + offsets[:, None]).ravel()[: len(a)]
        return np.concatenate(([0.0], flat))

    def segment(self, i: int, j: int) -> tuple[float, float]:
        """Enclosure of the sum of entries i..j-1 (0-based, half open)."""
        if j <= i:
            return 0.0, 0.0
        err = up(self._c * (self.abs[j] + self.abs[i]) * 1.01 + 1e-300)
        lo = down(down(self.lo[j] - self.lo[i]) - err)
        hi = up(up(self.hi[j] - self.hi[i]) + err)
        return float(lo), float(hi)


def cis_turns(x: FI) -> tuple[FI, FI]:
    """Enclosures of (cos 2 pi x, sin 2 pi x).

    Both are 2 pi-Lipschitz in x, so the value at the midpoint is widened by
    2 pi times the half-width plus the rounding of the argument and libm.
    """
    mid = (x.lo + x.hi) * 0.5
    a = 2.0 * np.pi * mid
    rad = np.pi * (x.hi - x.lo) * 1.01 + 8.0 * EPS * np.abs(a) + 8.0 * EPS + LIBM_ULPS * 2 * EPS
    c, s = np.cos(a), np.sin(a)
    return (FI(np.maximum(down(c - rad), -1.0), np.minimum(up(c + rad), 1.0)),
            FI(np.maximum(down(s - rad), -1.0), np.minimum(up(s + rad), 1.0)))
