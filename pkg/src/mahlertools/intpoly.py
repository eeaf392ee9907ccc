"""Integer and rational polynomials in one variable.

Coefficients are stored constant-first: ``coeffs[k]`` is the
coefficient of z^k, trailing zeros stripped, so the zero polynomial is
the empty tuple and otherwise the last entry is nonzero.  The text form
used by the CLI writes highest degree first ("z^2 - z - 1").

The height of a nonzero polynomial is max |a_k|, its length is
sum |a_k|.  ``eval_ball`` produces a certified enclosure by Horner over
ball arithmetic; ``eval_fraction`` and friends stay in exact rational
arithmetic and are the oracle-grade evaluation paths.
"""

from __future__ import annotations

import re as _re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence, Union

from . import balls
from .balls import BallComplex, BallReal, Precision
from .errors import PrecisionCapExceeded, Undecidable, ZeroPolynomialError

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class IntPolynomial:
    """Normal form: trailing zero coefficients stripped."""

    coeffs: tuple[int, ...]

    @staticmethod
    def make(seq: Iterable[int]) -> "IntPolynomial":
        cs = [int(c) for c in seq]
        while cs and cs[-1] == 0:
            cs.pop()
        return IntPolynomial(tuple(cs))

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> int:
        if not self.coeffs:
            raise ZeroPolynomialError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def to_rational(self) -> "RatPolynomial":
        return RatPolynomial(tuple(Fraction(c) for c in self.coeffs))

    def __str__(self):
        return format_poly(self.coeffs)


@dataclass(frozen=True)
class RatPolynomial:
    coeffs: tuple[Fraction, ...]

    @staticmethod
    def make(seq: Iterable[Rational]) -> "RatPolynomial":
        cs = [Fraction(c) for c in seq]
        while cs and cs[-1] == 0:
            cs.pop()
        return RatPolynomial(tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __str__(self):
        return format_poly(self.coeffs)


AnyPolynomial = Union[IntPolynomial, RatPolynomial]


# ---------------------------------------------------------------------------
# exact coefficient helpers (tuples, constant-first)

def poly_add(p: Sequence[Fraction], q: Sequence[Fraction]) -> tuple[Fraction, ...]:
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def poly_mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> tuple[Fraction, ...]:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def poly_scale(p: Sequence[Fraction], c: Rational) -> tuple[Fraction, ...]:
    if c == 0:
        return ()
    return tuple(Fraction(c) * a for a in p)


def derivative(p: AnyPolynomial) -> AnyPolynomial:
    cs = tuple(k * p.coeffs[k] for k in range(1, len(p.coeffs)))
    if isinstance(p, IntPolynomial):
        return IntPolynomial.make(cs)
    return RatPolynomial.make(cs)


def content(p: IntPolynomial) -> int:
    if p.is_zero():
        return 0
    g = 0
    for c in p.coeffs:
        g = gcd(g, abs(c))
    return g


def is_primitive(p: IntPolynomial) -> bool:
    return content(p) == 1


# ---------------------------------------------------------------------------
# height, length

def height(p: AnyPolynomial) -> Rational:
    """max |a_k|; rejects the zero polynomial."""
    if p.is_zero():
        raise ZeroPolynomialError("height of the zero polynomial is undefined")
    return max(abs(c) for c in p.coeffs)


def length(p: AnyPolynomial) -> Rational:
    """sum |a_k| (0 for the zero polynomial)."""
    return sum((abs(c) for c in p.coeffs), Fraction(0) if isinstance(p, RatPolynomial) else 0)


# ---------------------------------------------------------------------------
# evaluation

def eval_fraction(p: AnyPolynomial, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def eval_fraction_complex(p: AnyPolynomial, re: Fraction, im: Fraction) -> tuple[Fraction, Fraction]:
    ar, ai = Fraction(0), Fraction(0)
    for c in reversed(p.coeffs):
        ar, ai = ar * re - ai * im + c, ar * im + ai * re
    return ar, ai


def eval_ball(p: AnyPolynomial, z: BallComplex, prec: Precision) -> BallComplex:
    """Certified enclosure of p(z) by Horner over ball arithmetic."""
    acc = BallComplex.zero()
    for c in reversed(p.coeffs):
        acc = balls.mul(acc, z, prec)
        cb = (balls.real_from_int(c, prec) if isinstance(c, int)
              else balls.real_from_fraction(c, prec))
        acc = BallComplex(balls.real_add(acc.re, cb, prec), acc.im)
    return acc


# ---------------------------------------------------------------------------
# elementary symmetric functions and root expansion

def sigma(xs: Sequence, k: int, prec: Precision | None = None):
    """k-th elementary symmetric function of xs.

    Exact Fractions in, exact Fraction out; complex balls in, complex
    ball out (prec required).  k = 0 gives 1; k > len(xs) gives 0.
    """
    return sigma_all(xs, prec)[k]


def sigma_all(xs: Sequence, prec: Precision | None = None) -> list:
    """[sigma_0, ..., sigma_n] by the one-pass update
    e_j <- e_j + x * e_(j-1), processing one x at a time."""
    n = len(xs)
    if all(isinstance(x, (int, Fraction)) for x in xs):
        e = [Fraction(0)] * (n + 1)
        e[0] = Fraction(1)
        for x in xs:
            x = Fraction(x)
            for j in range(n, 0, -1):
                e[j] = e[j] + x * e[j - 1]
        return e
    if prec is None:
        raise ValueError("ball inputs need an explicit working precision")
    one = BallComplex(balls.real_from_int(1, prec), BallReal.zero())
    e = [BallComplex.zero() for _ in range(n + 1)]
    e[0] = one
    for x in xs:
        for j in range(n, 0, -1):
            e[j] = balls.add(e[j], balls.mul(x, e[j - 1], prec), prec)
    return e


def expand_roots(xs: Sequence[Rational]) -> RatPolynomial:
    """Monic polynomial with the given rational roots, by incremental
    multiplication; cross-checked against sigma_all before returning."""
    coeffs: tuple[Fraction, ...] = (Fraction(1),)
    for x in xs:
        coeffs = poly_mul(coeffs, (Fraction(-x), Fraction(1)))
    n = len(xs)
    e = sigma_all([Fraction(x) for x in xs])
    for k in range(n + 1):
        # coefficient of z^(n-k) must equal (-1)^k sigma_k
        want = e[k] if k % 2 == 0 else -e[k]
        if coeffs[n - k] != want:
            raise ArithmeticError("internal mismatch between product expansion "
                                  "and symmetric-function recurrence")
    return RatPolynomial(coeffs)


# ---------------------------------------------------------------------------
# the omitted-factor construction (nonzero unless all inputs vanish)

@lru_cache(maxsize=None)
def omitted_product_basis(n: int) -> tuple[tuple[int, ...], ...]:
    """Basis B_0..B_n: B_0 = prod_(j=1..n)(z^j + 1) and
    B_k = z^k * prod_(j != k)(z^j + 1).  All share degree n(n+1)/2."""
    if n < 1:
        raise ValueError("the construction needs n >= 1")
    factors = []
    for j in range(1, n + 1):
        f = [Fraction(0)] * (j + 1)
        f[0] = Fraction(1)
        f[j] = Fraction(1)
        factors.append(tuple(f))
    pref = [(Fraction(1),)]
    for f in factors:
        pref.append(poly_mul(pref[-1], f))
    suf = [(Fraction(1),)] * (n + 2)
    for j in range(n, 0, -1):
        suf[j] = poly_mul(factors[j - 1], suf[j + 1])
    basis = [tuple(int(c) for c in pref[n])]
    for k in range(1, n + 1):
        shifted = (Fraction(0),) * k + (Fraction(1),)
        bk = poly_mul(shifted, poly_mul(pref[k - 1], suf[k + 1]))
        basis.append(tuple(int(c) for c in bk))
    return tuple(basis)


def omitted_product_combination(a: Sequence[Rational]) -> RatPolynomial:
    """P = sum_k a_k B_k over the omitted-factor basis; P = 0 only when
    every a_k = 0, which makes the family a certificate of non-nullity."""
    n = len(a) - 1
    basis = omitted_product_basis(n)
    acc: tuple[Fraction, ...] = ()
    for ak, bk in zip(a, basis):
        if ak:
            acc = poly_add(acc, poly_scale([Fraction(c) for c in bk], ak))
    return RatPolynomial(acc)


# ---------------------------------------------------------------------------
# the length bound |P(z)| <= L(P) * max(1, |z|)^deg

def _max_with_one(b: BallReal, prec: Precision) -> BallReal:
    one = balls.real_from_int(1, prec).mid
    lo, hi = b.lower(), b.upper()
    return balls.ball_from_endpoints(max(lo, one), max(hi, one), prec)


def length_bound_holds(p: AnyPolynomial, z: BallComplex,
                       prec: Precision = Precision(64)) -> bool:
    """Check |p(z)| <= length(p) * max(1, |z|)^degree.

    Exact inputs take an exact rational path, which settles equality
    cases; ball inputs go through a refinement ladder and raise
    Undecidable if the two sides cannot be separated under the cap.
    """
    if p.is_zero():
        return True
    n = p.degree
    if z.is_exact():
        re, im = z.re.mid_fraction(), z.im.mid_fraction()
        vr, vi = eval_fraction_complex(p, re, im)
        lhs2 = vr * vr + vi * vi
        lf = Fraction(length(p))
        mod2 = re * re + im * im
        rhs2 = lf * lf * max(Fraction(1), mod2) ** n
        return lhs2 <= rhs2
    while True:
        lhs = balls.abs_ball(eval_ball(p, z, prec), prec)
        rhs = balls.real_mul(
            balls.real_from_fraction(Fraction(length(p)), prec),
            balls.pow_int(balls.lift(_max_with_one(balls.abs_ball(z, prec), prec)),
                          n, prec).re,
            prec)
        if lhs.upper_fraction() <= rhs.lower_fraction():
            return True
        if lhs.lower_fraction() > rhs.upper_fraction():
            return False
        try:
            prec = prec.double()
        except PrecisionCapExceeded as e:
            raise Undecidable(
                "length bound comparison hit the precision cap "
                "(likely an exact equality case; pass exact inputs)") from e


# ---------------------------------------------------------------------------
# text form: highest degree first, e.g. "z^2 - z - 1"

def format_poly(coeffs: Sequence[Rational]) -> str:
    if not coeffs:
        return "0"
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            var = "z" if k == 1 else f"z^{k}"
            body = var if mag == 1 else f"{mag}*{var}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts) if parts else "0"


_TERM_RE = _re.compile(
    r"""\s*(?P<sign>[+-]?)\s*
        (?:
            (?P<coef>\d+(?:/\d+)?)\s*(?:\*\s*)?(?P<var1>z(?:\^(?P<exp1>\d+))?)?
          | (?P<var2>z(?:\^(?P<exp2>\d+))?)
        )\s*""",
    _re.VERBOSE)


def parse_poly(text: str) -> IntPolynomial:
    """Parse the display form back into an integer polynomial."""
    s = text.strip()
    if s in ("0", ""):
        return IntPolynomial.make([])
    pos = 0
    terms: dict[int, int] = {}
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at: {s[pos:]!r}")
        sign = -1 if m.group("sign") == "-" else 1
        if m.group("coef") is not None:
            if "/" in m.group("coef"):
                raise ValueError("integer polynomial expected")
            c = int(m.group("coef"))
            if m.group("var1"):
                k = int(m.group("exp1") or 1)
            else:
                k = 0
        else:
            c = 1
            k = int(m.group("exp2") or 1)
        terms[k] = terms.get(k, 0) + sign * c
        pos = m.end()
    n = max(terms)
    return IntPolynomial.make([terms.get(k, 0) for k in range(n + 1)])
