"""Certified mid-rad ball arithmetic on top of MPFR (via gmpy2).

Representation
--------------
A real ball is a pair (mid, rad): ``mid`` is an mpfr at the working
precision, ``rad`` is a nonnegative mpfr at the fixed radius precision
RADIUS_PREC, and the ball stands for the closed interval
[mid - rad, mid + rad].  A complex ball keeps one real ball per
component, so it is an axis-aligned box in the plane.  Radius
bookkeeping is per component; no operation ever collapses the two
components into a single disk radius.

Soundness contract
------------------
Every operation returns a ball that contains the exact mathematical
result for every point of the input balls.  Midpoints are computed with
round-to-nearest at the requested precision; when MPFR reports the
result inexact, half an ulp of the midpoint is added to the radius.
Propagated radius terms are computed only from the *input* midpoints
and radii, with upward rounding, which also guarantees that doubling
the working precision never increases the radius of a result computed
from the same exact inputs.

gmpy2 quirks worth knowing: unary minus and abs() on an mpfr round to
the *global* context precision, so this module only negates through a
context pinned to the operand's own precision (exact), and magnitude
comparisons go through gmpy2.cmp_abs (exact, no rounding).  All
contexts are thread local and nothing touches gmpy2 global state, so
concurrent evaluation at different precisions is safe.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpz

from .errors import DivisorContainsZero, PrecisionCapExceeded

# Radius mantissa width.  64 bits keeps radius arithmetic cheap while
# leaving the bound far tighter than any tolerance used downstream.
RADIUS_PREC = 64

DEFAULT_PREC_CAP = 1 << 20
MIN_PREC = 8


@dataclass(frozen=True)
class Precision:
    """Working precision in bits, with a hard cap for refinement loops."""

    bits: int
    cap: int = DEFAULT_PREC_CAP

    def __post_init__(self):
        if not MIN_PREC <= self.bits <= self.cap:
            raise ValueError(
                f"precision bits must lie in [{MIN_PREC}, cap={self.cap}], got {self.bits}")

    def double(self) -> "Precision":
        """Next rung of the refinement ladder; raises at the cap."""
        nxt = self.bits * 2
        if nxt > self.cap:
            raise PrecisionCapExceeded(
                f"refinement would need {nxt} bits, cap is {self.cap}")
        return Precision(nxt, self.cap)


_local = threading.local()


def _ctx(bits: int, rnd) -> gmpy2.context:
    cache = getattr(_local, "ctx_cache", None)
    if cache is None:
        cache = _local.ctx_cache = {}
    key = (bits, rnd)
    c = cache.get(key)
    if c is None:
        c = cache[key] = gmpy2.context(precision=bits, round=rnd)
    return c


def _nearest(bits: int) -> gmpy2.context:
    return _ctx(bits, gmpy2.RoundToNearest)


def _rup() -> gmpy2.context:
    """Radius context: RADIUS_PREC bits, rounding toward +inf."""
    return _ctx(RADIUS_PREC, gmpy2.RoundUp)


def _rdown() -> gmpy2.context:
    return _ctx(RADIUS_PREC, gmpy2.RoundDown)


_ZERO = mpfr(0)


def _neg_exact(x: mpfr) -> mpfr:
    """Negate without rounding (gmpy2's unary minus would round)."""
    return _ctx(max(x.precision, MIN_PREC), gmpy2.RoundToNearest).minus(x)


def _abs_exact(x: mpfr) -> mpfr:
    return _neg_exact(x) if x < 0 else x


def _pow2(e: int) -> mpfr:
    # exact power of two at radius precision
    if e >= 0:
        return _rup().mul_2exp(mpfr(1), e)
    return _rup().div_2exp(mpfr(1), -e)


def _half_ulp(m: mpfr) -> mpfr:
    """Upper bound on the round-to-nearest error of a nonzero result m."""
    _, e = m.as_mantissa_exp()
    return _pow2(int(e) - 1)


def _rnd_err(m: mpfr, inexact: bool) -> mpfr:
    if not inexact:
        return _ZERO
    if not gmpy2.is_finite(m):
        raise PrecisionCapExceeded("enclosure overflowed the exponent range")
    # an inexact zero cannot occur inside our exponent range
    return _half_ulp(m)


def _check_mid(m: mpfr) -> mpfr:
    if not gmpy2.is_finite(m):
        raise PrecisionCapExceeded("enclosure overflowed the exponent range")
    return m


class BallReal:
    """Closed interval [mid - rad, mid + rad]; treat as immutable."""

    __slots__ = ("mid", "rad")

    def __init__(self, mid: mpfr, rad: mpfr):
        self.mid = mid
        self.rad = rad

    @staticmethod
    def zero() -> "BallReal":
        return BallReal(_ZERO, _ZERO)

    # -- exact queries (no rounding involved) ------------------------

    def is_exact(self) -> bool:
        return self.rad == 0

    def mid_fraction(self) -> Fraction:
        return _mpfr_to_fraction(self.mid)

    def rad_fraction(self) -> Fraction:
        return _mpfr_to_fraction(self.rad)

    def lower_fraction(self) -> Fraction:
        return self.mid_fraction() - self.rad_fraction()

    def upper_fraction(self) -> Fraction:
        return self.mid_fraction() + self.rad_fraction()

    def contains_fraction(self, x: Fraction) -> bool:
        return abs(self.mid_fraction() - x) <= self.rad_fraction()

    def overlaps(self, other: "BallReal") -> bool:
        gap = abs(self.mid_fraction() - other.mid_fraction())
        return gap <= self.rad_fraction() + other.rad_fraction()

    def contains_zero(self) -> bool:
        return gmpy2.cmp_abs(self.mid, self.rad) <= 0

    # -- directed endpoints as mpfr (sound, rounded outward) ---------

    def lower(self) -> mpfr:
        if self.rad == 0:
            return self.mid
        return _ctx(max(self.mid.precision, RADIUS_PREC),
                    gmpy2.RoundDown).sub(self.mid, self.rad)

    def upper(self) -> mpfr:
        if self.rad == 0:
            return self.mid
        return _ctx(max(self.mid.precision, RADIUS_PREC),
                    gmpy2.RoundUp).add(self.mid, self.rad)

    def __repr__(self):
        return f"BallReal({self.mid!r} +/- {self.rad!r})"

    def __str__(self):
        return f"[{decimal_str(self.mid)} +/- {decimal_str(self.rad)}]"


class BallComplex:
    """Axis-aligned box: independent real balls for re and im."""

    __slots__ = ("re", "im")

    def __init__(self, re: BallReal, im: BallReal):
        self.re = re
        self.im = im

    @staticmethod
    def zero() -> "BallComplex":
        return BallComplex(BallReal.zero(), BallReal.zero())

    def is_exact(self) -> bool:
        return self.re.is_exact() and self.im.is_exact()

    def is_real(self) -> bool:
        return self.im.mid == 0 and self.im.rad == 0

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def overlaps(self, other: "BallComplex") -> bool:
        return self.re.overlaps(other.re) and self.im.overlaps(other.im)

    def __repr__(self):
        return f"BallComplex({self.re!r}, {self.im!r})"

    def __str__(self):
        return f"({self.re} + {self.im}*i)"


# ---------------------------------------------------------------------------
# conversions

def _mpfr_to_fraction(x: mpfr) -> Fraction:
    if x == 0:
        return Fraction(0)
    m, e = x.as_mantissa_exp()
    m, e = int(m), int(e)
    if e >= 0:
        return Fraction(m << e)
    return Fraction(m, 1 << -e)


def mpfr_to_fraction(x: mpfr) -> Fraction:
    """Exact rational value of a (finite) mpfr."""
    return _mpfr_to_fraction(x)


def decimal_str(x: mpfr) -> str:
    """Exact decimal form of a dyadic mpfr value (always terminates)."""
    if x == 0:
        return "0"
    m, e = x.as_mantissa_exp()
    m, e = int(m), int(e)
    sign = "-" if m < 0 else ""
    m = abs(m)
    if e >= 0:
        return sign + str(m << e)
    q = -e
    digits = str(m * 5 ** q)
    if len(digits) <= q:
        digits = "0" * (q + 1 - len(digits)) + digits
    ip, fp = digits[:-q], digits[-q:]
    fp = fp.rstrip("0")
    return sign + ip + ("." + fp if fp else "")


def mpfr_from_decimal(s: str) -> mpfr:
    """Inverse of decimal_str: rebuild the exact dyadic value."""
    f = Fraction(s)
    if f == 0:
        return mpfr(0)
    num, den = f.numerator, f.denominator
    # decimal_str only emits dyadic values, so den = 2^k after reduction
    k = den.bit_length() - 1
    if den != 1 << k:
        raise ValueError(f"not a dyadic decimal: {s}")
    bits = max(MIN_PREC, abs(num).bit_length())
    c = _nearest(bits)
    c.clear_flags()
    r = c.div(mpz(num), mpz(den))
    if c.inexact:
        raise ValueError(f"could not reconstruct {s} exactly")
    return r


def real_from_int(v: int, prec: Precision) -> BallReal:
    c = _nearest(prec.bits)
    c.clear_flags()
    m = _check_mid(c.div(mpz(v), mpz(1)))
    return BallReal(m, _rnd_err(m, c.inexact))


def real_from_fraction(f: Fraction, prec: Precision) -> BallReal:
    c = _nearest(prec.bits)
    c.clear_flags()
    m = _check_mid(c.div(mpz(f.numerator), mpz(f.denominator)))
    return BallReal(m, _rnd_err(m, c.inexact))


def complex_from_fractions(re: Fraction, im: Fraction, prec: Precision) -> BallComplex:
    return BallComplex(real_from_fraction(re, prec), real_from_fraction(im, prec))


def lift(x: BallReal) -> BallComplex:
    """Embed a real ball in the plane with exactly zero imaginary part."""
    return BallComplex(x, BallReal.zero())


def ball_from_endpoints(lo: mpfr, hi: mpfr, prec: Precision) -> BallReal:
    """Smallest representable ball containing [lo, hi] (endpoints exact)."""
    if not (gmpy2.is_finite(lo) and gmpy2.is_finite(hi)):
        raise PrecisionCapExceeded("enclosure overflowed the exponent range")
    c = _nearest(prec.bits)
    m = _check_mid(c.div_2exp(c.add(lo, hi), 1))
    up = _rup()
    rad = up.maxnum(up.sub(hi, m), up.sub(m, lo))
    return BallReal(m, rad)


# ---------------------------------------------------------------------------
# real ball arithmetic

def real_neg(a: BallReal) -> BallReal:
    return BallReal(_neg_exact(a.mid), a.rad)


def real_add(a: BallReal, b: BallReal, prec: Precision) -> BallReal:
    c = _nearest(prec.bits)
    c.clear_flags()
    m = _check_mid(c.add(a.mid, b.mid))
    err = _rnd_err(m, c.inexact)
    up = _rup()
    return BallReal(m, up.add(up.add(a.rad, b.rad), err))


def real_sub(a: BallReal, b: BallReal, prec: Precision) -> BallReal:
    c = _nearest(prec.bits)
    c.clear_flags()
    m = _check_mid(c.sub(a.mid, b.mid))
    err = _rnd_err(m, c.inexact)
    up = _rup()
    return BallReal(m, up.add(up.add(a.rad, b.rad), err))


def real_mul(a: BallReal, b: BallReal, prec: Precision) -> BallReal:
    c = _nearest(prec.bits)
    c.clear_flags()
    m = _check_mid(c.mul(a.mid, b.mid))
    rad = _rnd_err(m, c.inexact)
    up = _rup()
    # |am|*br + |bm|*ar + ar*br, all upward, from inputs only
    if b.rad != 0:
        rad = up.add(rad, up.mul(_abs_exact(a.mid), b.rad))
    if a.rad != 0:
        rad = up.add(rad, up.mul(_abs_exact(b.mid), a.rad))
    if a.rad != 0 and b.rad != 0:
        rad = up.add(rad, up.mul(a.rad, b.rad))
    return BallReal(m, rad)


def real_div(a: BallReal, b: BallReal, prec: Precision) -> BallReal:
    if gmpy2.cmp_abs(b.mid, b.rad) <= 0:
        raise DivisorContainsZero("real divisor ball contains zero")
    c = _nearest(prec.bits)
    c.clear_flags()
    m = _check_mid(c.div(a.mid, b.mid))
    rad = _rnd_err(m, c.inexact)
    up = _rup()
    if a.rad != 0 or b.rad != 0:
        # |a/b - am/bm| <= (ar*|bm| + |am|*br) / (|bm|*(|bm| - br))
        bm = _abs_exact(b.mid)
        num = up.add(up.mul(a.rad, bm), up.mul(_abs_exact(a.mid), b.rad))
        dn = _rdown()
        den = dn.mul(bm, dn.sub(bm, b.rad))
        if den <= 0:
            raise DivisorContainsZero(
                "divisor ball cannot be bounded away from zero at this precision")
        rad = up.add(rad, up.div(num, den))
    return BallReal(m, rad)


def real_sqr_endpoints(a: BallReal) -> tuple[mpfr, mpfr]:
    """Directed endpoints of a^2 as (lo, hi); respects sign correlation."""
    lo, hi = a.lower(), a.upper()
    bits = max(a.mid.precision, RADIUS_PREC)
    up = _ctx(bits, gmpy2.RoundUp)
    dn = _ctx(bits, gmpy2.RoundDown)
    if lo >= 0:
        return dn.mul(lo, lo), up.mul(hi, hi)
    if hi <= 0:
        return dn.mul(hi, hi), up.mul(lo, lo)
    m = max(_neg_exact(lo), hi)
    return mpfr(0), up.mul(m, m)


def real_exp(a: BallReal, prec: Precision) -> BallReal:
    c = _nearest(prec.bits)
    c.clear_flags()
    m = _check_mid(c.exp(a.mid))
    rad = _rnd_err(m, c.inexact)
    if a.rad != 0:
        # mean value bound: sup of exp over the ball, times the radius
        up = _rup()
        t = up.exp(up.add(a.mid, a.rad))
        if not gmpy2.is_finite(t):
            raise PrecisionCapExceeded("exp enclosure overflowed")
        rad = up.add(rad, up.mul(t, a.rad))
    return BallReal(m, rad)


def real_log(a: BallReal, prec: Precision) -> BallReal:
    """Natural log; the argument ball must be strictly positive."""
    if a.lower() <= 0:
        raise ValueError("log argument ball must be strictly positive")
    c = _nearest(prec.bits)
    c.clear_flags()
    m = _check_mid(c.log(a.mid))
    rad = _rnd_err(m, c.inexact)
    if a.rad != 0:
        # sup of 1/x over the ball is 1/(mid - rad)
        up = _rup()
        den = _rdown().sub(a.mid, a.rad)
        if den <= 0:
            raise ValueError("log argument ball must be strictly positive")
        rad = up.add(rad, up.div(a.rad, den))
    return BallReal(m, rad)


def _real_sin_cos(a: BallReal, prec: Precision, which: str) -> BallReal:
    c = _nearest(prec.bits)
    c.clear_flags()
    m = _check_mid(c.sin(a.mid) if which == "sin" else c.cos(a.mid))
    rad = _rnd_err(m, c.inexact)
    # |derivative| <= 1 everywhere
    return BallReal(m, _rup().add(a.rad, rad))


def real_sin(a: BallReal, prec: Precision) -> BallReal:
    return _real_sin_cos(a, prec, "sin")


def real_cos(a: BallReal, prec: Precision) -> BallReal:
    return _real_sin_cos(a, prec, "cos")


def real_abs(a: BallReal, prec: Precision) -> BallReal:
    lo, hi = a.lower(), a.upper()
    if lo >= 0:
        return BallReal(a.mid, a.rad)
    if hi <= 0:
        return real_neg(a)
    return ball_from_endpoints(_ZERO, max(_neg_exact(lo), hi), prec)


def real_scale_2exp(a: BallReal, k: int) -> BallReal:
    """Multiply by 2^k exactly (pure exponent shift on mid and rad)."""
    cm = _ctx(max(a.mid.precision, MIN_PREC), gmpy2.RoundToNearest)
    cr = _rup()
    if k >= 0:
        return BallReal(_check_mid(cm.mul_2exp(a.mid, k)), cr.mul_2exp(a.rad, k))
    return BallReal(cm.div_2exp(a.mid, -k), cr.div_2exp(a.rad, -k))


def real_add_error(a: BallReal, extra: mpfr) -> BallReal:
    """Widen the radius by a nonnegative bound, rounded upward."""
    if extra == 0:
        return a
    if extra < 0:
        raise ValueError("error term must be nonnegative")
    return BallReal(a.mid, _rup().add(a.rad, extra))


def real_sqrt(a: BallReal, prec: Precision) -> BallReal:
    """Square root of a nonnegative ball (lower endpoint clamped at 0)."""
    lo, hi = a.lower(), a.upper()
    if hi < 0:
        raise ValueError("sqrt argument ball must be nonnegative")
    bits = max(a.mid.precision, RADIUS_PREC)
    s_lo = _ctx(bits, gmpy2.RoundDown).sqrt(lo) if lo > 0 else _ZERO
    s_hi = _ctx(bits, gmpy2.RoundUp).sqrt(hi)
    return ball_from_endpoints(s_lo, s_hi, prec)


# ---------------------------------------------------------------------------
# complex ball arithmetic

def add(a: BallComplex, b: BallComplex, prec: Precision) -> BallComplex:
    return BallComplex(real_add(a.re, b.re, prec), real_add(a.im, b.im, prec))


def sub(a: BallComplex, b: BallComplex, prec: Precision) -> BallComplex:
    return BallComplex(real_sub(a.re, b.re, prec), real_sub(a.im, b.im, prec))


def neg(a: BallComplex) -> BallComplex:
    return BallComplex(real_neg(a.re), real_neg(a.im))


def conj(a: BallComplex) -> BallComplex:
    return BallComplex(a.re, real_neg(a.im))


def mul(a: BallComplex, b: BallComplex, prec: Precision) -> BallComplex:
    re = real_sub(real_mul(a.re, b.re, prec), real_mul(a.im, b.im, prec), prec)
    im = real_add(real_mul(a.re, b.im, prec), real_mul(a.im, b.re, prec), prec)
    return BallComplex(re, im)


def _abs2_endpoints(a: BallComplex) -> tuple[mpfr, mpfr]:
    """Directed endpoints of |a|^2 = re^2 + im^2.

    Sums at operand precision: adding at radius precision would cap the
    relative accuracy of abs/div at RADIUS_PREC bits however wide the
    midpoints are.
    """
    rlo, rhi = real_sqr_endpoints(a.re)
    ilo, ihi = real_sqr_endpoints(a.im)
    bits = max(a.re.mid.precision, a.im.mid.precision, RADIUS_PREC)
    return (_ctx(bits, gmpy2.RoundDown).add(rlo, ilo),
            _ctx(bits, gmpy2.RoundUp).add(rhi, ihi))


def div(a: BallComplex, b: BallComplex, prec: Precision) -> BallComplex:
    if b.contains_zero():
        raise DivisorContainsZero("complex divisor ball contains zero")
    d_lo, d_hi = _abs2_endpoints(b)
    if d_lo <= 0:
        raise DivisorContainsZero(
            "divisor ball cannot be bounded away from zero at this precision")
    den = ball_from_endpoints(d_lo, d_hi, prec)
    num = mul(a, conj(b), prec)
    return BallComplex(real_div(num.re, den, prec), real_div(num.im, den, prec))


def exp(z: BallComplex, prec: Precision) -> BallComplex:
    """Complex exponential exp(x)*(cos y + i sin y), componentwise sound."""
    ex = real_exp(z.re, prec)
    cy = real_cos(z.im, prec)
    sy = real_sin(z.im, prec)
    return BallComplex(real_mul(ex, cy, prec), real_mul(ex, sy, prec))


def exp_ball(z: BallComplex, prec: Precision) -> BallComplex:
    return exp(z, prec)


def abs_ball(z: BallComplex, prec: Precision) -> BallReal:
    """Enclosure of |z| from the squared-modulus endpoints."""
    if z.im.mid == 0 and z.im.rad == 0:
        return real_abs(z.re, prec)
    d_lo, d_hi = _abs2_endpoints(z)
    bits = max(z.re.mid.precision, z.im.mid.precision, RADIUS_PREC)
    lo = _ctx(bits, gmpy2.RoundDown).sqrt(d_lo) if d_lo > 0 else _ZERO
    hi = _ctx(bits, gmpy2.RoundUp).sqrt(d_hi)
    return ball_from_endpoints(lo, hi, prec)


def pow_int(z: BallComplex, k: int, prec: Precision) -> BallComplex:
    """z^k for k >= 0 by binary powering."""
    if k < 0:
        raise ValueError("pow_int requires a nonnegative exponent")
    result = BallComplex(real_from_int(1, prec), BallReal.zero())
    base = z
    while k:
        if k & 1:
            result = mul(result, base, prec)
        k >>= 1
        if k:
            base = mul(base, base, prec)
    return result


def const_pi(prec: Precision) -> BallReal:
    c = _nearest(prec.bits)
    c.clear_flags()
    m = c.const_pi()
    return BallReal(m, _rnd_err(m, c.inexact))


def const_e(prec: Precision) -> BallReal:
    c = _nearest(prec.bits)
    c.clear_flags()
    m = c.exp(mpfr(1))
    return BallReal(m, _rnd_err(m, c.inexact))


_ARITH = {"add": add, "sub": sub, "mul": mul, "div": div}


def arith(op: str, a: BallComplex, b: BallComplex, prec: Precision) -> BallComplex:
    """Dispatch one of the four field operations by name."""
    try:
        fn = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}, expected one of {sorted(_ARITH)}")
    return fn(a, b, prec)


def factorial_exact(n: int) -> int:
    if n < 0:
        raise ValueError("factorial requires n >= 0")
    return math.factorial(n)
