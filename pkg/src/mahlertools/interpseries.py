"""Interpolation-style series pinned to the canonical enumeration.

The n-th term is the Newton-style product over the first n enumerated
algebraic numbers,

    T_n(w, z) = w^n * prod_(j<=n) (z - alpha_j)
                / ( n! * (|w|^n + 1) * (1 + sum_(k<=n) |sigma_k|) ),

with sigma_k the elementary symmetric functions of alpha_1..alpha_n.
The normalizer equals the coefficient length of the z-product, and
|w^n| / (|w|^n + 1) < 1, so the length bound gives |T_n| <= M^n / n!
with M = max(1, |z|), a summable envelope independent of the heights
involved.  Summing from n = 1:

 *  |U(w, z)| <= e^M - 1, an entire-like growth bound in z;
 *  the tail beyond N is at most M^(N+1)/(N+1)! * e^M;
 *  U(w, alpha_j) needs only the first j - 1 terms, every later one
    carries the exact factor (z - alpha_j) = 0; in particular
    U(w, alpha_1) = 0 exactly;
 *  U(0, z) = 0 exactly, every term carrying the factor w^n = 0.

The denominator depends on w only through |w|, deliberately: the
series is a test bed for certified evaluation, not an analytic
function of w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import balls
from .balls import BallComplex, BallReal, Precision
from .intpoly import _max_with_one
from .qbar import ENUMERATION_ID, AlgebraicNumber, Enumeration, default_enumeration
from .errors import PrecisionCapExceeded, Undecidable

# e < E_UP; used in exact rational tail bounds
_E_UP = Fraction(2718281828459045236, 10 ** 18)


def _as_ball(x, prec: Precision) -> BallComplex:
    if isinstance(x, BallComplex):
        return x
    if isinstance(x, BallReal):
        return balls.lift(x)
    if isinstance(x, (int, Fraction)):
        return balls.lift(balls.real_from_fraction(Fraction(x), prec))
    if isinstance(x, tuple) and len(x) == 2:
        # exact rational point (re, im): re-rounded at each precision,
        # so the enclosure keeps shrinking as the ladder climbs
        return balls.complex_from_fractions(Fraction(x[0]), Fraction(x[1]), prec)
    raise TypeError(f"cannot interpret {type(x).__name__} as a point")


def _exactly_zero(b: BallComplex) -> bool:
    return (b.re.is_exact() and b.re.mid == 0
            and b.im.is_exact() and b.im.mid == 0)


def _term_stream(w, z, prec: Precision, en: Enumeration, n_max: int):
    """Terms 1..n_max sharing incremental prefix state: the numerator
    product (one factor of w and one of z - alpha per step), the
    symmetric-function table, and the |w| power each grow by one
    update per term instead of being rebuilt."""
    wb = _as_ball(w, prec)
    zb = z if isinstance(z, BallComplex) else _as_ball(z, prec)
    radius = Fraction(1, 2 ** (prec.bits + 8))
    one = balls.real_from_int(1, prec)
    num = BallComplex(one, BallReal.zero())
    e = [BallComplex(one, BallReal.zero())]
    aw = balls.abs_ball(wb, prec)
    awn = one
    for n in range(1, n_max + 1):
        a = en.approx(n, radius)
        num = balls.mul(num, wb, prec)
        num = balls.mul(num, balls.sub(zb, a, prec), prec)
        e.append(BallComplex.zero())
        for j in range(n, 0, -1):
            e[j] = balls.add(e[j], balls.mul(a, e[j - 1], prec), prec)
        norm = one
        for k in range(1, n + 1):
            norm = balls.real_add(norm, balls.abs_ball(e[k], prec), prec)
        # the exact normalizer is >= 1; clamping keeps the enclosure there
        norm = _max_with_one(norm, prec)
        awn = balls.real_mul(awn, aw, prec)
        aw1 = balls.real_add(awn, one, prec)
        den = balls.real_mul(balls.real_from_int(math.factorial(n), prec),
                             balls.real_mul(aw1, norm, prec), prec)
        yield BallComplex(balls.real_div(num.re, den, prec),
                          balls.real_div(num.im, den, prec))


def u_term(n: int, w, z, prec: Precision = Precision(64),
           enumeration: Enumeration | None = None) -> BallComplex:
    """Enclosure of the n-th series term at (w, z)."""
    if n < 1:
        raise ValueError("terms are indexed from 1")
    en = enumeration if enumeration is not None else default_enumeration()
    for term in _term_stream(w, z, prec, en, n):
        pass
    return term


@dataclass(frozen=True)
class UEvaluation:
    """Certified series value with its truncation bookkeeping."""

    value: BallComplex
    truncation: int
    tail_bound: Fraction
    enumeration_id: str = ENUMERATION_ID


def _ceil(f: Fraction) -> int:
    return -((-f.numerator) // f.denominator)


def _tail_bound(m: Fraction, n: int) -> Fraction:
    """Rational upper bound on sum_(k>n) M^k / k!."""
    return m ** (n + 1) / math.factorial(n + 1) * _E_UP ** _ceil(m)


def _fraction_bits(f: Fraction) -> int:
    return max(1, f.denominator.bit_length() - f.numerator.bit_length())


def u_eval(w, z, target_radius, enumeration: Enumeration | None = None) -> UEvaluation:
    """Series value with both component radii <= target_radius.

    When z is one of the enumerated numbers the sum truncates exactly:
    every term past its index vanishes identically, so the tail bound
    is zero rather than estimated.
    """
    target = Fraction(target_radius)
    if target <= 0:
        raise ValueError("target radius must be positive")
    en = enumeration if enumeration is not None else default_enumeration()

    probe = Precision(64)
    if _exactly_zero(_as_ball(w, probe)):
        # every term carries the factor w^n = 0
        return UEvaluation(value=BallComplex.zero(), truncation=0,
                           tail_bound=Fraction(0))
    if isinstance(z, AlgebraicNumber):
        m_up = balls.abs_ball(_algebraic_ball(z, en, probe), probe).upper_fraction()
    else:
        m_up = balls.abs_ball(_as_ball(z, probe), probe).upper_fraction()
    m = max(Fraction(1), m_up)

    n_cut = 1
    while _tail_bound(m, n_cut) > target / 2:
        n_cut += 1
    tail = _tail_bound(m, n_cut)

    struct = None
    if isinstance(z, AlgebraicNumber):
        for k in range(1, n_cut + 1):
            if en.alpha(k) == z:
                struct = k
                break
    if struct is not None:
        n_cut = struct - 1
        tail = Fraction(0)
        if n_cut == 0:
            return UEvaluation(value=BallComplex.zero(), truncation=0,
                               tail_bound=Fraction(0))

    bits = max(64, _fraction_bits(target) + 8 * n_cut.bit_length() + 32)
    while True:
        prec = Precision(bits)
        zb = (_algebraic_ball(z, en, prec)
              if isinstance(z, AlgebraicNumber) else _as_ball(z, prec))
        acc = BallComplex.zero()
        for term in _term_stream(w, zb, prec, en, n_cut):
            acc = balls.add(acc, term, prec)
        if tail:
            pad = balls.real_from_fraction(tail, Precision(64)).upper()
            acc = BallComplex(balls.real_add_error(acc.re, pad),
                              balls.real_add_error(acc.im, pad))
        if (acc.re.rad_fraction() <= target and acc.im.rad_fraction() <= target):
            return UEvaluation(value=acc, truncation=n_cut, tail_bound=tail)
        bits = Precision(bits).double().bits


def _algebraic_ball(z: AlgebraicNumber, en: Enumeration, prec: Precision) -> BallComplex:
    from .qbar import approx
    return approx(z, Fraction(1, 2 ** (prec.bits + 8)))


def u_finite_sum(w, t: int, prec: Precision = Precision(96),
                 enumeration: Enumeration | None = None) -> BallComplex:
    """Partial sum of the first t terms evaluated at z = alpha_(t+1).

    The full series at alpha_(t+1) equals this finite sum: all later
    terms carry the factor (z - alpha_(t+1)) = 0.  t = 0 gives exact 0.
    """
    if t < 0:
        raise ValueError("term count must be >= 0")
    en = enumeration if enumeration is not None else default_enumeration()
    if t == 0:
        return BallComplex.zero()
    zb = en.approx(t + 1, Fraction(1, 2 ** (prec.bits + 8)))
    acc = BallComplex.zero()
    for term in _term_stream(w, zb, prec, en, t):
        acc = balls.add(acc, term, prec)
    return acc


def u_bound_check(w, z, prec: Precision = Precision(64),
                  enumeration: Enumeration | None = None) -> bool:
    """Certify |U(w, z)| <= e^max(1, |z|) by interval comparison.

    The inequality is strict with margin >= 1, so the first rung
    normally settles it; Undecidable signals a cap hit.
    """
    en = enumeration if enumeration is not None else default_enumeration()
    while True:
        ev = u_eval(w, z, Fraction(1, 2 ** (prec.bits // 2)), en)
        lhs = balls.abs_ball(ev.value, prec)
        zb = (_algebraic_ball(z, en, prec)
              if isinstance(z, AlgebraicNumber) else _as_ball(z, prec))
        mz = _max_with_one(balls.abs_ball(zb, prec), prec)
        rhs = balls.real_exp(mz, prec)
        if lhs.upper_fraction() <= rhs.lower_fraction():
            return True
        if lhs.lower_fraction() > rhs.upper_fraction():
            return False
        try:
            prec = prec.double()
        except PrecisionCapExceeded as e:
            raise Undecidable("growth bound comparison hit the precision cap") from e
