"""Liouville constant, witnesses, and the explicit entire functions."""

import random
from fractions import Fraction

import mpmath
import pytest

from mahlertools import balls
from mahlertools.balls import BallComplex, Precision, complex_from_fractions
from mahlertools.funcs import (
    LiouvilleApprox, baker_identity_residual, eval_double_exp, eval_exp_sum,
    eval_exp_plus_liouville, eval_scaled_exp, liouville_constant,
    liouville_witness, partial_sum, tail_bound,
)


def oracle(expr_dps_pairs, dps=40):
    """Evaluate an mpmath scalar to a Fraction with known slack."""
    with mpmath.workdps(dps):
        v = expr_dps_pairs()
        return Fraction(mpmath.nstr(v, dps - 5, strip_zeros=False))


ORACLE_SLACK = Fraction(1, 10 ** 30)


def holds(ball_real, fr):
    return (ball_real.lower_fraction() - ORACLE_SLACK <= fr
            <= ball_real.upper_fraction() + ORACLE_SLACK)


class TestLiouvilleConstant:
    def test_printed_digits(self):
        b = liouville_constant(Fraction(1, 10 ** 12))
        lo, hi = b.lower_fraction(), b.upper_fraction()
        assert Fraction("0.1100009999") < lo and hi < Fraction("0.1100010001")

    def test_thirty_digit_enclosure(self):
        b = liouville_constant(Fraction(1, 10 ** 30))
        assert b.rad_fraction() <= Fraction(1, 10 ** 30)
        assert b.contains_fraction(Fraction("0.110001000000000000000001000000"))

    def test_nested_enclosures(self):
        wide = liouville_constant(Fraction(1, 10 ** 6))
        tight = liouville_constant(Fraction(1, 10 ** 30))
        assert wide.lower_fraction() <= tight.lower_fraction()
        assert tight.upper_fraction() <= wide.upper_fraction()

    def test_partial_sums_increase_toward_it(self):
        b = liouville_constant(Fraction(1, 10 ** 50))
        prev = Fraction(0)
        for m in range(1, 5):
            s = partial_sum(m)
            assert s > prev
            assert s < b.lower_fraction() + Fraction(1, 10 ** 45)
            prev = s

    def test_tail_bound_is_a_bound(self):
        # sum_{j>m} 10^-j! computed with two extra terms sits inside
        for m in range(1, 4):
            more = partial_sum(m + 2) - partial_sum(m)
            assert 0 < more < tail_bound(m)

    def test_rejects_bad_radius(self):
        with pytest.raises(ValueError):
            liouville_constant(Fraction(0))


class TestWitness:
    def test_first_witness_values(self):
        w = liouville_witness(1)
        assert (w.p, w.q) == (11, 100)
        assert w.m == 2
        assert w.certifies()

    @pytest.mark.parametrize("n", range(1, 7))
    def test_certification_chain(self, n):
        w = liouville_witness(n)
        assert 0 < w.gap_lo < w.gap_hi < Fraction(1, w.q ** n)
        assert Fraction(w.p, w.q) == partial_sum(w.m)

    @pytest.mark.parametrize("n", range(1, 5))
    def test_gap_against_tight_enclosure(self, n):
        w = liouville_witness(n)
        ell = liouville_constant(Fraction(1, 10 ** 750))
        gap_lo_pt = Fraction(w.p, w.q) + w.gap_lo
        gap_hi_pt = Fraction(w.p, w.q) + w.gap_hi
        assert gap_lo_pt < ell.lower_fraction()
        assert ell.upper_fraction() < gap_hi_pt

    def test_approx_record(self):
        a = LiouvilleApprox.at(3)
        assert a.q == 10 ** 6
        assert a.value == partial_sum(3)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            liouville_witness(0)


class TestFunctionValues:
    def test_exp_sum_at_zero(self):
        v = eval_exp_sum(BallComplex.zero(), Precision(128))
        one_plus_e = oracle(lambda: 1 + mpmath.e)
        assert holds(v.re, one_plus_e)
        assert holds(v.im, Fraction(0))

    def test_scaled_exp_at_zero(self):
        v = eval_scaled_exp(BallComplex.zero(), Precision(128))
        assert holds(v.re, oracle(lambda: mpmath.e))

    def test_double_exp_at_zero(self):
        v = eval_double_exp(BallComplex.zero(), Precision(128))
        assert holds(v.re, oracle(lambda: mpmath.e))

    def test_exp_plus_liouville_reproduces_the_constant(self):
        prec = Precision(128)
        rng = random.Random(11)
        for _ in range(20):
            z = complex_from_fractions(
                Fraction(rng.randint(-300, 300), 100),
                Fraction(rng.randint(-300, 300), 100), prec)
            h = eval_exp_plus_liouville(z, prec)
            diff = balls.sub(h, balls.exp(z, prec), prec)
            ell = liouville_constant(Fraction(1, 2 ** 100))
            assert diff.re.overlaps(ell)
            assert diff.im.contains_zero()

    def test_factored_route_agrees(self):
        # e^z + e^(1+z) = e^z * (1 + e)
        prec = Precision(128)
        rng = random.Random(7)
        one_plus_e = balls.add(balls.lift(balls.real_from_int(1, prec)),
                               balls.exp_ball(balls.lift(balls.real_from_int(1, prec)), prec),
                               prec)
        for _ in range(100):
            z = complex_from_fractions(
                Fraction(rng.randint(-300, 300), 100),
                Fraction(rng.randint(-300, 300), 100), prec)
            a = eval_exp_sum(z, prec)
            b = balls.mul(balls.exp(z, prec), one_plus_e, prec)
            assert a.overlaps(b)

    def test_entire_at_moderate_arguments(self):
        prec = Precision(96)
        for re, im in [(5, 0), (-5, 3), (0, 5), (4, -4)]:
            z = complex_from_fractions(Fraction(re), Fraction(im), prec)
            for fn in (eval_exp_sum, eval_scaled_exp,
                       eval_exp_plus_liouville, eval_double_exp):
                v = fn(z, prec)
                scale = max(Fraction(1), abs(v.re.mid_fraction()),
                            abs(v.im.mid_fraction()))
                assert v.re.rad_fraction() < scale * Fraction(1, 2 ** 40)
                assert v.im.rad_fraction() < scale * Fraction(1, 2 ** 40)


class TestBakerResidual:
    def test_contains_zero_and_shrinks(self):
        z = complex_from_fractions(Fraction(1, 3), Fraction(2, 7), Precision(256))
        r_low = baker_identity_residual(z, Precision(64))
        r_high = baker_identity_residual(z, Precision(256))
        assert r_low.lower_fraction() <= 0
        assert r_high.lower_fraction() <= 0
        assert r_high.upper_fraction() < r_low.upper_fraction()

    @pytest.mark.parametrize("re,im", [
        (Fraction(0), Fraction(0)),
        (Fraction(1, 3), Fraction(0)),
        (Fraction(-7, 2), Fraction(0)),
        (Fraction(0), Fraction(1)),
        (Fraction(2), Fraction(-3)),
        (Fraction(-5, 4), Fraction(9, 8)),
    ])
    def test_forty_digits_at_two_hundred_bits(self, re, im):
        prec = Precision(200)
        z = complex_from_fractions(re, im, prec)
        r = baker_identity_residual(z, prec)
        assert r.upper_fraction() <= Fraction(1, 10 ** 40)
