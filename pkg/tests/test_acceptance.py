"""Acceptance gate: ten desk-scale property checks, one test each.

Every test is self-contained, uses its own seeded generator, and pins
the tolerances and runtime budgets it must meet.  Oracles here are
deliberately independent of the library's internals: exact rational
arithmetic, a tiny quadratic-field type, full nested-loop scans, and
recomputation from scratch.
"""

import json
import math
import time
from fractions import Fraction
from pathlib import Path

import pytest
import sympy

from mahlertools import balls, funcs, qbar
from mahlertools.balls import BallComplex, Precision, complex_from_fractions
from mahlertools.intpoly import (
    IntPolynomial,
    expand_roots,
    length_bound_holds,
    omitted_product_combination,
    sigma,
    eval_ball,
)
from mahlertools.interpseries import u_eval, u_finite_sum, u_term, u_bound_check
from mahlertools.mahler import OmegaQuery, omega_search
from mahlertools.qbar import nth_algebraic

import random

GOLDEN = Path(__file__).parent / "golden" / "qbar_1000.jsonl"


def dyadic(rng, lo, hi, den=8):
    return Fraction(rng.randint(lo * den, hi * den), den)


class Timer:
    def __init__(self, budget_s):
        self.budget = budget_s

    def __enter__(self):
        self.t0 = time.monotonic()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.monotonic() - self.t0
        if exc == (None, None, None):
            assert self.elapsed < self.budget, (
                f"ran {self.elapsed:.1f}s, budget {self.budget}s")


def test_01_length_bound_never_violated():
    rng = random.Random(101)
    with Timer(30):
        for _ in range(10 ** 4):
            deg = rng.randint(0, 8)
            p = IntPolynomial.make(tuple(rng.randint(-100, 100)
                                         for _ in range(deg + 1)))
            z = complex_from_fractions(dyadic(rng, -7, 7), dyadic(rng, -7, 7),
                                       Precision(64))
            assert z.is_exact()
            assert length_bound_holds(p, z)


def test_02_omitted_combination_null_only_at_zero():
    def verdict(a):
        return omitted_product_combination(a).is_zero() == all(x == 0 for x in a)

    rng = random.Random(102)
    with Timer(10):
        for n in range(1, 5):
            grid = [Fraction(v) for v in range(-2, 3)]

            def rec(prefix):
                if len(prefix) == n + 1:
                    assert verdict(tuple(prefix))
                    return
                for g in grid:
                    rec(prefix + [g])

            rec([])
        for _ in range(10 ** 3):
            n = rng.randint(1, 6)
            a = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 9))
                      for _ in range(n + 1))
            assert verdict(a)


def test_03_expanded_roots_match_signed_symmetric_functions():
    rng = random.Random(103)
    with Timer(5):
        for _ in range(500):
            n = rng.randint(1, 6)
            xs = [Fraction(rng.randint(-9, 9), rng.randint(1, 9))
                  for _ in range(n)]
            p = expand_roots(xs)
            assert p.degree == n
            for k in range(n + 1):
                assert p.coeffs[n - k] == (-1) ** k * sigma(xs, k)


def test_04_series_truncation_consistency():
    rng = random.Random(104)
    target = Fraction(1, 10 ** 30)
    with Timer(60):
        for t in range(0, 9):
            z = nth_algebraic(t + 1)
            for _ in range(20):
                w = (dyadic(rng, -2, 2), dyadic(rng, -2, 2))
                ev = u_eval(w, z, target)
                fs = u_finite_sum(w, t, Precision(160))
                assert ev.truncation == t
                assert ev.tail_bound == 0
                assert ev.value.overlaps(fs)
        # forced exact zeros
        for w in (0, Fraction(3), (Fraction(1, 2), Fraction(-5, 4))):
            ev = u_eval(w, nth_algebraic(1), target)
            assert ev.value.is_exact()
            assert ev.value.re.mid == 0 and ev.value.im.mid == 0
        for zre, zim in ((Fraction(2), Fraction(3)), (Fraction(-7, 8), Fraction(0))):
            ev = u_eval(0, (zre, zim), target)
            assert ev.value.is_exact()
            assert ev.value.re.mid == 0 and ev.value.im.mid == 0


def test_05_series_growth_bound():
    rng = random.Random(105)
    with Timer(60):
        for _ in range(500):
            w = (dyadic(rng, -3, 3), dyadic(rng, -3, 3))
            z = (dyadic(rng, -3, 3), dyadic(rng, -3, 3))
            assert u_bound_check(w, z)


# --- criterion 6: the naive reference, in exact quadratic arithmetic ------

class Quad:
    """a + b*sqrt(d) with rational a, b; exact sign and product."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d):
        self.a, self.b, self.d = Fraction(a), Fraction(b), d

    def __add__(self, o):
        return Quad(self.a + o.a, self.b + o.b, self.d)

    def __sub__(self, o):
        return Quad(self.a - o.a, self.b - o.b, self.d)

    def mul(self, o):
        return Quad(self.a * o.a + self.d * self.b * o.b,
                    self.a * o.b + self.b * o.a, self.d)

    def scale(self, c):
        return Quad(self.a * c, self.b * c, self.d)

    def sign(self):
        if self.a == 0 and self.b == 0:
            return 0
        if self.a >= 0 and self.b >= 0:
            return 1 if (self.a or self.b) else 0
        if self.a <= 0 and self.b <= 0:
            return -1
        lhs, rhs = self.a * self.a, self.d * self.b * self.b
        if self.a > 0:
            return 1 if lhs > rhs else -1
        return 1 if rhs > lhs else -1


def quad_value(coeffs, xi: Quad) -> Quad:
    acc = Quad(0, 0, xi.d)
    for c in reversed(coeffs):
        acc = acc.mul(xi).__add__(Quad(c, 0, xi.d))
    return acc


def ref_key(coeffs):
    d = max(i for i, c in enumerate(coeffs) if c)
    h = max(abs(c) for c in coeffs)
    return (d + h, d, tuple(reversed(coeffs)))


def naive_scan(xi: Quad, n, H):
    """Nested loop over one representative per sign class (P and -P
    share |P(xi)|), exact arithmetic throughout.  Returns the squared
    minimum as a Quad, the argmin tuple, the count of exact zeros, and
    the count of candidates visited."""
    best2, best_t, zeros, seen = None, None, 0, 0
    import itertools
    for t in itertools.product(*([range(-H, H + 1)] * (n + 1))):
        nz = [i for i, c in enumerate(t) if c]
        if nz and t[nz[-1]] < 0:
            continue
        seen += 1
        v = quad_value(t, xi)
        v2 = v.mul(v)
        if v2.sign() == 0:
            zeros += 1
            continue
        if best2 is None or (best2 - v2).sign() > 0 or (
                (best2 - v2).sign() == 0 and ref_key(t) < ref_key(best_t)):
            best2, best_t = v2, t
    return best2, best_t, zeros, seen


def assert_ball_encloses_quad_sqrt(ball, v2: Quad):
    """The ball's interval [lo, hi] must satisfy lo^2 <= v2 <= hi^2."""
    lo = max(ball.lower_fraction(), Fraction(0))
    hi = ball.upper_fraction()
    assert (v2 - Quad(lo * lo, 0, v2.d)).sign() >= 0
    assert (Quad(hi * hi, 0, v2.d) - v2).sign() >= 0


def test_06_omega_matches_naive_reference():
    points = [
        (Fraction(1, 2), Quad(Fraction(1, 2), 0, 2)),
        (qbar.algebraic_number((-2, 0, 1), 1), Quad(0, 1, 2)),
        (qbar.algebraic_number((-1, -1, 1), 1), Quad(Fraction(1, 2), Fraction(1, 2), 5)),
    ]
    with Timer(120):
        for xi, xiq in points:
            for n in (1, 2):
                for H in range(1, 6):
                    ref2, ref_t, ref_zeros, ref_seen = naive_scan(xiq, n, H)
                    res = omega_search(OmegaQuery(xi=xi, n=n, H=H))
                    # the search reports the argmin trimmed to its degree
                    want = list(ref_t)
                    while len(want) > 1 and want[-1] == 0:
                        want.pop()
                    assert list(res.argmin.coeffs) == want
                    assert res.zeros_excluded == ref_zeros
                    assert res.candidates_scanned == ref_seen
                    assert_ball_encloses_quad_sqrt(res.omega_min, ref2)
                    if isinstance(xi, Fraction):
                        # rational case: the enclosure is a single point
                        assert res.omega_min.rad == 0
                        m2 = res.omega_min.mid_fraction() ** 2
                        assert ref2.b == 0 and m2 == ref2.a
            # worker count must not change a single output byte
            base = omega_search(OmegaQuery(xi=xi, n=2, H=3, workers=1))
            for workers in (2, 4):
                again = omega_search(OmegaQuery(xi=xi, n=2, H=3, workers=workers))
                assert balls.decimal_str(again.omega_min.mid) == \
                    balls.decimal_str(base.omega_min.mid)
                assert balls.decimal_str(again.omega_min.rad) == \
                    balls.decimal_str(base.omega_min.rad)
                assert again.argmin.coeffs == base.argmin.coeffs
                assert again.zeros_excluded == base.zeros_excluded
        # pinned spot values
        spot = omega_search(OmegaQuery(xi=Fraction(1, 2), n=1, H=10))
        assert spot.omega_min.rad == 0
        assert spot.omega_min.mid_fraction() == Fraction(1, 2)
        assert abs(spot.exponent.mid_fraction() - Fraction("0.3010300")) \
            < Fraction(1, 10 ** 6)
        for n in (1, 2):
            for H in (2, 5):
                z = omega_search(OmegaQuery(xi=Fraction(0), n=n, H=H))
                assert z.omega_min.rad == 0
                assert z.omega_min.mid_fraction() == 1
                assert z.exponent.mid == 0 and z.exponent.rad == 0


def test_07_liouville_witnesses_and_digits():
    with Timer(5):
        for n in range(1, 7):
            w = funcs.liouville_witness(n)
            assert w.certifies()
            # independent recheck from exact partial sums: the constant
            # lies strictly between S(m+1) and S(m+1) + 2*10^-(m+2)!
            s_next = funcs.partial_sum(w.m + 1)
            gap_lo = s_next - Fraction(w.p, w.q)
            gap_hi = gap_lo + 2 * Fraction(1, 10 ** math.factorial(w.m + 2))
            assert 0 < gap_lo < gap_hi < Fraction(w.q) ** -n
        # the constant exceeds 0.1100010 by only 10^-24, so certifying
        # the printed digits needs a radius well below that
        b = funcs.liouville_constant(Fraction(1, 10 ** 30))
        assert Fraction("0.1100010") <= b.lower_fraction()
        assert b.upper_fraction() < Fraction("0.1100011")


def test_08_baker_identity_residual():
    rng = random.Random(108)
    bound = Fraction(1, 10 ** 40)
    prec = Precision(200)
    with Timer(5):
        zs = []
        for _ in range(3):
            zs.append((dyadic(rng, -3, 3), Fraction(0)))
        for _ in range(3):
            zs.append((Fraction(rng.randint(-24, 24), 8), Fraction(0)))
        for _ in range(4):
            zs.append((dyadic(rng, -3, 3), dyadic(rng, -3, 3)))
        for re, im in zs:
            z = complex_from_fractions(re, im, prec)
            res = funcs.baker_identity_residual(z, prec)
            assert res.upper_fraction() <= bound


def test_09_enumeration_determinism_and_coverage():
    with Timer(60):
        enum = qbar.Enumeration()
        fresh = [qbar._record_for(enum, k, qbar.CACHE_RADIUS)
                 for k in range(1, 1001)]
        golden = [json.loads(line) for line in
                  GOLDEN.read_text().splitlines() if line.strip()]
        assert len(golden) == 1000
        assert fresh == golden

        keys = {(tuple(r["coeffs"]), r["root_index"]) for r in fresh}
        assert len(keys) == 1000

        # every number with deg + height <= 4, rebuilt from scratch
        expected = set()
        x = sympy.Symbol("x")
        for d in range(1, 4):
            for h in range(1, 5 - d):
                import itertools
                for t in itertools.product(*[range(-h, h + 1)] * (d + 1)):
                    if t[-1] <= 0 or max(abs(c) for c in t) != h:
                        continue
                    if math.gcd(*[abs(c) for c in t]) != 1:
                        continue
                    poly = sympy.Poly(list(reversed(t)), x)
                    if not poly.is_irreducible:
                        continue
                    for ridx in range(d):
                        expected.add((t, ridx))
        assert expected <= keys
        listed = {k for k in keys
                  if (len(k[0]) - 1) + max(abs(c) for c in k[0]) <= 4}
        assert listed == expected


def test_10_doubling_precision_refines_every_evaluator():
    rng = random.Random(110)

    def refines_real(a, b):
        return (b.rad_fraction() <= a.rad_fraction()
                and b.lower_fraction() <= a.upper_fraction()
                and a.lower_fraction() <= b.upper_fraction())

    def refines(a, b):
        if isinstance(a, BallComplex):
            return refines_real(a.re, b.re) and refines_real(a.im, b.im)
        return refines_real(a, b)

    def rc(rng, span=2):
        return complex_from_fractions(dyadic(rng, -span, span),
                                      dyadic(rng, -span, span), Precision(64))

    with Timer(60):
        for _ in range(100):
            p = IntPolynomial.make(tuple(rng.randint(-9, 9)
                                         for _ in range(rng.randint(1, 6))))
            z = rc(rng, 3)
            lo, hi = Precision(64), Precision(128)
            assert refines(eval_ball(p, z, lo), eval_ball(p, z, hi))

        for fn in (funcs.eval_exp_sum, funcs.eval_scaled_exp,
                   funcs.eval_exp_plus_liouville, funcs.eval_double_exp):
            for _ in range(100):
                z = rc(rng)
                assert refines(fn(z, Precision(64)), fn(z, Precision(128)))

        for _ in range(100):
            z = rc(rng)
            assert refines(funcs.baker_identity_residual(z, Precision(64)),
                           funcs.baker_identity_residual(z, Precision(128)))

        for _ in range(100):
            k = rng.randint(20, 60)
            r = Fraction(1, 2 ** k)
            assert refines(funcs.liouville_constant(r),
                           funcs.liouville_constant(r / 2))

        for _ in range(100):
            n = rng.randint(1, 8)
            w = (dyadic(rng, -2, 2), dyadic(rng, -2, 2))
            z = (dyadic(rng, -2, 2), dyadic(rng, -2, 2))
            assert refines(u_term(n, w, z, Precision(64)),
                           u_term(n, w, z, Precision(128)))

        for _ in range(100):
            t = rng.randint(0, 6)
            w = (dyadic(rng, -2, 2), dyadic(rng, -2, 2))
            assert refines(u_finite_sum(w, t, Precision(96)),
                           u_finite_sum(w, t, Precision(192)))

        for _ in range(100):
            w = (dyadic(rng, -2, 2), dyadic(rng, -2, 2))
            z = (dyadic(rng, -2, 2), dyadic(rng, -2, 2))
            k = rng.randint(10, 30)
            a = u_eval(w, z, Fraction(1, 2 ** k)).value
            b = u_eval(w, z, Fraction(1, 2 ** (k + 2))).value
            assert refines(a, b)

        for _ in range(100):
            k = rng.randint(1, 40)
            r = Fraction(1, 2 ** rng.randint(40, 80))
            a = qbar.approx(nth_algebraic(k), r)
            b = qbar.approx(nth_algebraic(k), r / 2)
            assert refines(a, b)
