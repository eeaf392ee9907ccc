"""Enumeration of algebraic numbers: order, identity, cache round-trips."""

import json
import threading
from fractions import Fraction

import pytest

from mahlertools.balls import mpfr_from_decimal
from mahlertools.errors import CapExceeded, NotIrreducible
from mahlertools.intpoly import IntPolynomial
from mahlertools.qbar import (
    AlgebraicNumber, CACHE_RADIUS, EnumKey, Enumeration, algebraic_number,
    approx, is_irreducible, read_cache, verify_cache, write_cache,
)

SQRT2 = Fraction("1.41421356237309504880168872420969807856967187537694")


# (coeffs constant-first, root_index, re, im) for the first 17 entries,
# worked out by hand from the documented order
PREFIX = [
    ((-1, 1), 0, Fraction(1), Fraction(0)),
    ((0, 1), 0, Fraction(0), Fraction(0)),
    ((1, 1), 0, Fraction(-1), Fraction(0)),
    ((-2, 1), 0, Fraction(2), Fraction(0)),
    ((2, 1), 0, Fraction(-2), Fraction(0)),
    ((-1, 2), 0, Fraction(1, 2), Fraction(0)),
    ((1, 2), 0, Fraction(-1, 2), Fraction(0)),
    ((-1, -1, 1), 0, None, Fraction(0)),       # (1 - sqrt5)/2
    ((-1, -1, 1), 1, None, Fraction(0)),       # (1 + sqrt5)/2
    ((1, -1, 1), 0, Fraction(1, 2), None),     # (1 - i sqrt3)/2
    ((1, -1, 1), 1, Fraction(1, 2), None),
    ((1, 0, 1), 0, Fraction(0), Fraction(-1)),
    ((1, 0, 1), 1, Fraction(0), Fraction(1)),
    ((-1, 1, 1), 0, None, Fraction(0)),        # (-1 - sqrt5)/2
    ((-1, 1, 1), 1, None, Fraction(0)),
    ((1, 1, 1), 0, Fraction(-1, 2), None),
    ((1, 1, 1), 1, Fraction(-1, 2), None),
]


class TestPrefix:
    def test_first_seventeen(self):
        enum = Enumeration()
        for k, (coeffs, idx, re, im) in enumerate(PREFIX, start=1):
            a = enum.alpha(k)
            assert a.minpoly.coeffs == coeffs
            assert a.root_index == idx
            ball = enum.approx(k, Fraction(1, 2 ** 80))
            if re is not None:
                assert ball.re.contains_fraction(re)
            if im is not None:
                assert ball.im.contains_fraction(im)

    def test_rational_values(self):
        enum = Enumeration()
        vals = [enum.alpha(k).as_fraction() for k in range(1, 8)]
        assert vals == [1, 0, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2)]

    def test_next_block_is_height_three_linears(self):
        enum = Enumeration()
        vals = [enum.alpha(k).as_fraction() for k in range(18, 26)]
        assert vals == [3, -3, Fraction(3, 2), Fraction(-3, 2),
                        Fraction(2, 3), Fraction(1, 3),
                        Fraction(-1, 3), Fraction(-2, 3)]


class TestKeyOrder:
    def test_keys_never_decrease(self):
        enum = Enumeration()
        xs = enum.first(300)
        keys = [EnumKey.of(a.minpoly) for a in xs]
        assert keys == sorted(keys)

    def test_roots_of_each_polynomial_are_consecutive(self):
        enum = Enumeration()
        xs = enum.first(300)
        seen_done = set()
        run_poly, run_len = None, 0
        for a in xs[:-10]:  # skip the possibly-truncated final polynomial
            if a.minpoly != run_poly:
                if run_poly is not None:
                    assert run_len == run_poly.degree
                    assert run_poly not in seen_done
                    seen_done.add(run_poly)
                run_poly, run_len = a.minpoly, 0
            run_len += 1
            assert a.root_index == run_len - 1


class TestIdentityAndSeparation:
    def test_pairwise_distinct(self):
        enum = Enumeration()
        xs = enum.first(500)
        assert len({(a.minpoly, a.root_index) for a in xs}) == 500
        assert len(set(xs)) == 500  # __eq__/__hash__ agree

    def test_first_hundred_separate_at_modest_radius(self):
        enum = Enumeration()
        balls = [enum.approx(k, Fraction(1, 2 ** 80)) for k in range(1, 101)]
        for i in range(len(balls)):
            for j in range(i + 1, len(balls)):
                a, b = balls[i], balls[j]
                assert not (a.re.overlaps(b.re) and a.im.overlaps(b.im))


class TestApprox:
    def test_rational_points_are_exact(self):
        enum = Enumeration()
        b = enum.approx(2, Fraction(1, 10 ** 30))
        assert b.re.mid_fraction() == 0 and b.re.rad_fraction() == 0
        b = enum.approx(6, Fraction(1, 10 ** 10))
        assert b.re.mid_fraction() == Fraction(1, 2)
        assert b.im.rad_fraction() == 0

    def test_sqrt_two_digits(self):
        a = algebraic_number((-2, 0, 1), 1)
        ball = approx(a, Fraction(1, 10 ** 30))
        assert ball.re.rad_fraction() <= Fraction(1, 10 ** 30)
        assert ball.re.lower_fraction() <= SQRT2 <= ball.re.upper_fraction()

    def test_refinement_stays_inside_isol(self):
        a = algebraic_number((-2, 0, 1), 1)
        tight = approx(a, Fraction(1, 2 ** 200))
        assert a.isol.re.lower_fraction() <= tight.re.lower_fraction()
        assert tight.re.upper_fraction() <= a.isol.re.upper_fraction()

    def test_tier_cache_returns_same_object(self):
        enum = Enumeration()
        b1 = enum.approx(8, Fraction(1, 2 ** 64))
        b2 = enum.approx(8, Fraction(1, 2 ** 64))
        assert b1 is b2

    def test_rejects_bad_radius(self):
        enum = Enumeration()
        with pytest.raises(ValueError):
            enum.approx(1, 0)
        with pytest.raises(ValueError):
            approx(enum.alpha(1), Fraction(-1, 2))


class TestIrreducibility:
    @pytest.mark.parametrize("coeffs,expect", [
        ((1, 0, 1), True),        # z^2 + 1
        ((-1, 0, 1), False),      # (z-1)(z+1)
        ((-1, -1, 1), True),      # golden ratio
        ((0, 1), True),           # z
        ((0, 0, 1), False),       # z^2
        ((-2, 0, 0, 1), True),    # z^3 - 2
        ((1, 2, 1), False),       # (z+1)^2
        ((1, 1, 1, 1, 1), True),  # fifth cyclotomic
        ((5,), False),            # constant
    ])
    def test_examples(self, coeffs, expect):
        assert is_irreducible(IntPolynomial.make(coeffs)) is expect


class TestConstruction:
    def test_normalizes_content_and_sign(self):
        a = algebraic_number((-4, 0, 2), 1)    # 2z^2 - 4
        b = algebraic_number((2, 0, -1), 1)    # -z^2 + 2
        c = algebraic_number((-2, 0, 1), 1)    # z^2 - 2
        assert a == b == c
        assert a.minpoly.coeffs == (-2, 0, 1)

    def test_rejects_reducible(self):
        with pytest.raises(NotIrreducible):
            algebraic_number((-1, 0, 1), 0)

    def test_rejects_bad_index_and_degree(self):
        with pytest.raises(ValueError):
            algebraic_number((1, 0, 1), 2)
        with pytest.raises(ValueError):
            algebraic_number((7,), 0)

    def test_cap_and_one_based_indexing(self):
        enum = Enumeration(max_index=10)
        with pytest.raises(CapExceeded):
            enum.alpha(11)
        with pytest.raises(ValueError):
            enum.alpha(0)


class TestCompleteness:
    def test_small_key_block_is_exactly_covered(self):
        # every algebraic number with deg + height <= 4 appears exactly once
        import itertools
        import math
        expected = set()
        for d in range(1, 4):
            for h in range(1, 5 - d):
                span = range(-h, h + 1)
                for tup in itertools.product(range(1, h + 1), *(span,) * d):
                    if max(abs(c) for c in tup) != h:
                        continue
                    if math.gcd(*tup) != 1:
                        continue
                    poly = IntPolynomial.make(tuple(reversed(tup)))
                    if not is_irreducible(poly):
                        continue
                    for i in range(d):
                        expected.add((poly.coeffs, i))
        enum = Enumeration()
        got = []
        k = 1
        while True:
            a = enum.alpha(k)
            if EnumKey.of(a.minpoly).s > 4:
                break
            got.append((a.minpoly.coeffs, a.root_index))
            k += 1
        assert len(got) == len(expected)
        assert set(got) == expected


class TestCache:
    def test_round_trip_and_determinism(self, tmp_path):
        p1 = tmp_path / "a.jsonl"
        p2 = tmp_path / "b.jsonl"
        write_cache(p1, 25)
        write_cache(p2, 25)
        assert p1.read_bytes() == p2.read_bytes()
        records = read_cache(p1)
        assert [r.k for r in records] == list(range(1, 26))
        enum = Enumeration()
        for rec in records:
            a = enum.alpha(rec.k)
            assert a.minpoly.coeffs == rec.coeffs
            assert a.root_index == rec.root_index
            ball = enum.approx(rec.k, CACHE_RADIUS)
            assert mpfr_from_decimal(rec.approx_re) == ball.re.mid
            assert mpfr_from_decimal(rec.approx_im) == ball.im.mid

    def test_verify_cache_detects_tampering(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_cache(path, 10)
        assert verify_cache(path)
        lines = path.read_text().splitlines()
        obj = json.loads(lines[4])
        obj["approx_re"] = "0.125"
        lines[4] = json.dumps(obj)
        path.write_text("\n".join(lines) + "\n")
        assert not verify_cache(path)


class TestThreading:
    def test_concurrent_extension_is_consistent(self):
        enum = Enumeration()
        results = {}

        def worker(tag, ks):
            results[tag] = [enum.alpha(k) for k in ks]

        ts = [threading.Thread(target=worker, args=(t, range(1, 151)))
              for t in range(4)]
        for t in ts:
            t.start()
        for t in ts:
            t.join()
        for tag in range(1, 4):
            assert results[tag] == results[0]
            # identical objects, not merely equal
            assert all(x is y for x, y in zip(results[tag], results[0]))
