"""A small catalogue of explicit transcendental values and functions.

The Liouville constant sum(10^-n!) with certified partial-sum
enclosures and rational witnesses for its defining inequality, plus
four entire functions built from the kernel:

    eval_exp_sum            e^z + e^(1+z)
    eval_scaled_exp         e^(1+pi z)
    eval_exp_plus_liouville ell + e^z
    eval_double_exp         e^(e^z)

and the residual of the exact identity
e^-1 * e^(1+pi z) * e^(-pi z) = 1, taken on the principal branch
(so (-1)^(iz) means e^(-pi z); any other branch breaks the identity).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import balls
from .balls import BallComplex, BallReal, Precision


def _factorial(m: int) -> int:
    out = 1
    for j in range(2, m + 1):
        out *= j
    return out


def partial_sum(m: int) -> Fraction:
    """sum_{j=1}^m 10^(-j!) as an exact rational with denominator 10^(m!)."""
    if m < 1:
        raise ValueError("need m >= 1")
    mfact = _factorial(m)
    p = sum(10 ** (mfact - _factorial(j)) for j in range(1, m + 1))
    return Fraction(p, 10 ** mfact)


def tail_bound(m: int) -> Fraction:
    """Strict upper bound on sum_{j>m} 10^(-j!).

    The first omitted term is 10^(-(m+1)!) and the rest are dominated
    by a geometric series with ratio 1/10, so the tail is below twice
    the first omitted term.
    """
    return Fraction(2, 10 ** _factorial(m + 1))


@dataclass(frozen=True)
class LiouvilleApprox:
    """Exact partial sum p/q of the constant, with q = 10^(m!)."""

    m: int
    p: int
    q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    @staticmethod
    def at(m: int) -> "LiouvilleApprox":
        v = partial_sum(m)
        q = 10 ** _factorial(m)
        return LiouvilleApprox(m, v.numerator * (q // v.denominator), q)


def liouville_constant(target_radius) -> BallReal:
    """Ball containing sum(10^-n!) with radius <= target_radius."""
    target = target_radius if isinstance(target_radius, Fraction) else Fraction(target_radius)
    if target <= 0:
        raise ValueError("target radius must be positive")
    m = 1
    while tail_bound(m) > target / 2:
        m += 1
    s = partial_sum(m)
    bits = max(64, _fraction_bits(target) + 32)
    prec = Precision(bits)
    lo = balls.real_from_fraction(s, prec)
    hi = balls.real_from_fraction(s + tail_bound(m), prec)
    return balls.ball_from_endpoints(lo.lower(), hi.upper(), prec)


def _fraction_bits(f: Fraction) -> int:
    if f >= 1:
        return 1
    return (f.denominator // f.numerator).bit_length() + 1


@dataclass(frozen=True)
class LiouvilleWitness:
    """Rational pair p/q with certified gap bounds for the constant.

    gap_lo < ell - p/q < gap_hi, both bounds exact rationals, and
    gap_hi < q^-n, which is the inequality the witness exists for.
    """

    n: int
    m: int
    p: int
    q: int
    gap_lo: Fraction
    gap_hi: Fraction

    def certifies(self) -> bool:
        return (0 < self.gap_lo < self.gap_hi < Fraction(1, self.q ** self.n))


def liouville_witness(n: int) -> LiouvilleWitness:
    """Witness for the n-th inequality: 0 < ell - p/q < q^-n.

    Takes m = max(n, 2): the gap after m terms lies strictly between
    the first omitted term and twice the first omitted term, and for
    m >= max(n, 2) twice the first omitted term is below q^-n.
    (m = n would fail at n = 1: the bound 2/10^2 is not below 1/10.)
    """
    if n < 1:
        raise ValueError("need n >= 1")
    m = max(n, 2)
    approx = LiouvilleApprox.at(m)
    gap_lo = Fraction(1, 10 ** _factorial(m + 1))
    gap_hi = tail_bound(m)
    w = LiouvilleWitness(n, m, approx.p, approx.q, gap_lo, gap_hi)
    assert w.certifies()
    return w


# ---------------------------------------------------------------------------
# entire functions

def eval_exp_sum(z: BallComplex, prec: Precision) -> BallComplex:
    """e^z + e^(1+z)."""
    one = balls.lift(balls.real_from_int(1, prec))
    return balls.add(balls.exp(z, prec),
                     balls.exp(balls.add(one, z, prec), prec), prec)


def eval_scaled_exp(z: BallComplex, prec: Precision) -> BallComplex:
    """e^(1+pi z)."""
    pi = balls.lift(balls.const_pi(prec))
    one = balls.lift(balls.real_from_int(1, prec))
    return balls.exp(balls.add(one, balls.mul(pi, z, prec), prec), prec)


def eval_exp_plus_liouville(z: BallComplex, prec: Precision) -> BallComplex:
    """ell + e^z, with ell enclosed at radius 2^-bits."""
    ell = balls.lift(liouville_constant(Fraction(1, 2 ** prec.bits)))
    return balls.add(ell, balls.exp(z, prec), prec)


def eval_double_exp(z: BallComplex, prec: Precision) -> BallComplex:
    """e^(e^z)."""
    return balls.exp(balls.exp(z, prec), prec)


def baker_identity_residual(z: BallComplex, prec: Precision) -> BallReal:
    """|e^-1 * e^(1+pi z) * e^(-pi z) - 1|.

    Exactly zero for every z; the returned ball contains 0 with a
    radius that shrinks as prec grows.
    """
    pi = balls.lift(balls.const_pi(prec))
    minus_one = balls.lift(balls.real_from_int(-1, prec))
    inv_e = balls.exp(minus_one, prec)
    g = eval_scaled_exp(z, prec)
    damp = balls.exp(balls.mul(balls.neg(pi), z, prec), prec)
    prod = balls.mul(balls.mul(inv_e, g, prec), damp, prec)
    one = balls.lift(balls.real_from_int(1, prec))
    return balls.abs_ball(balls.sub(prod, one, prec), prec)
