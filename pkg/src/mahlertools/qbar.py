"""Deterministic enumeration of the algebraic numbers.

Each algebraic number is identified by its minimal polynomial --
primitive, irreducible over the rationals, positive leading coefficient
-- together with the position of the root in the canonical root order
(real part ascending, ties by imaginary part ascending).  Polynomials
are ordered by

    s = degree + height,  then degree,  then the coefficient tuple
    (a_d, ..., a_0) in plain lexicographic order,

and the d roots of a polynomial occupy d consecutive indices.  Under
this rule the stream starts 1, 0, -1, 2, -2, 1/2, -1/2, (1-sqrt5)/2,
(1+sqrt5)/2, ...

The order is a public contract: series evaluation changes if the order
changes, so ENUMERATION_ID names the scheme and travels with caches and
serialized results.
"""

from __future__ import annotations

import itertools
import json
import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .balls import BallComplex, decimal_str
from .errors import CapExceeded, NotIrreducible
from .intpoly import IntPolynomial, format_poly, height
from .roots import RootLocator, canonical_roots

ENUMERATION_ID = "deg+height,deg,lex/re-asc,im-asc/1"
DEFAULT_MAX_INDEX = 10 ** 6

# radius of the isolating ball attached to every enumerated number
ISOL_RADIUS = Fraction(1, 2 ** 32)
# radius used for cache records unless the caller overrides it
CACHE_RADIUS = Fraction(1, 2 ** 64)

_X = sympy.Symbol("x")


def is_irreducible(poly: IntPolynomial) -> bool:
    """Exact irreducibility over the rationals.

    Callers are expected to pass primitive polynomials of degree >= 1;
    degree-1 input is always irreducible, degree < 1 never is.
    """
    if poly.degree < 1:
        return False
    if poly.degree == 1:
        return True
    if poly.coeffs[0] == 0:
        return False  # divisible by z
    return bool(sympy.Poly(list(reversed(poly.coeffs)), _X, domain="ZZ").is_irreducible)


@dataclass(frozen=True, order=True)
class EnumKey:
    """Total order on minimal polynomials: (deg + height, deg, lex)."""

    s: int
    d: int
    lex: tuple[int, ...]

    @staticmethod
    def of(poly: IntPolynomial) -> "EnumKey":
        return EnumKey(poly.degree + height(poly), poly.degree,
                       tuple(reversed(poly.coeffs)))


class AlgebraicNumber:
    """One root of its minimal polynomial, refinable on demand.

    `isol` is the isolating ball fixed at construction; refinements from
    `approx` stay inside it.  Identity (equality, hashing) is the pair
    (minpoly, root_index).
    """

    __slots__ = ("minpoly", "root_index", "isol", "_locator", "_lock")

    def __init__(self, minpoly: IntPolynomial, root_index: int,
                 isol: BallComplex, locator: RootLocator, lock: threading.Lock):
        self.minpoly = minpoly
        self.root_index = root_index
        self.isol = isol
        self._locator = locator
        self._lock = lock

    @property
    def degree(self) -> int:
        return self.minpoly.degree

    def is_rational(self) -> bool:
        return self.minpoly.degree == 1

    def is_real(self) -> bool:
        return self._locator.kind == "real"

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        a0, a1 = self.minpoly.coeffs
        return Fraction(-a0, a1)

    def __eq__(self, other):
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        return (self.minpoly, self.root_index) == (other.minpoly, other.root_index)

    def __hash__(self):
        return hash((self.minpoly, self.root_index))

    def __repr__(self):
        return (f"<algebraic: root {self.root_index} of "
                f"{format_poly(self.minpoly.coeffs)}>")


def approx(a: AlgebraicNumber, target_radius) -> BallComplex:
    """Certified enclosure of `a` with both component radii <= target.

    Refinement is monotone: every enclosure is contained in `a.isol`.
    """
    target = _to_fraction(target_radius)
    if target <= 0:
        raise ValueError("target radius must be positive")
    with a._lock:
        return a._locator.enclosure(target)


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(str(x)) if isinstance(x, str) else Fraction(x)


def _normalized(coeffs) -> IntPolynomial:
    poly = IntPolynomial.make(tuple(int(c) for c in coeffs))
    if poly.degree < 1:
        raise ValueError("need degree >= 1")
    g = math.gcd(*poly.coeffs)
    sign = 1 if poly.leading() > 0 else -1
    if g != 1 or sign != 1:
        poly = IntPolynomial.make(tuple(c // (g * sign) for c in poly.coeffs))
    return poly


def algebraic_number(coeffs, root_index: int) -> AlgebraicNumber:
    """Construct a single algebraic number from minimal-polynomial
    coefficients (constant first) and a canonical root index.

    The sign and content of the coefficients are normalized away; the
    polynomial must be irreducible.
    """
    poly = _normalized(coeffs)
    if not is_irreducible(poly):
        raise NotIrreducible(f"{format_poly(poly.coeffs)} is not irreducible")
    locs = canonical_roots(poly)
    if not 0 <= root_index < len(locs):
        raise ValueError(f"root_index {root_index} out of range for degree {poly.degree}")
    lock = threading.Lock()
    loc = locs[root_index]
    return AlgebraicNumber(poly, root_index, loc.enclosure(ISOL_RADIUS), loc, lock)


# ---------------------------------------------------------------------------
# the stream

def _block(d: int, h: int):
    """Admissible coefficient tuples (a_d, ..., a_0) for one (s, d)
    block -- degree d, height exactly h -- in lexicographic order."""
    span = range(-h, h + 1)
    for tup in itertools.product(range(1, h + 1), *(span,) * d):
        if max(abs(c) for c in tup) != h:
            continue
        if math.gcd(*tup) != 1:
            continue
        poly = IntPolynomial.make(tuple(reversed(tup)))
        if not is_irreducible(poly):
            continue
        yield poly


def _number_stream():
    s = 2
    while True:
        for d in range(1, s):
            for poly in _block(d, s - d):
                locs = canonical_roots(poly)
                lock = threading.Lock()
                for i, loc in enumerate(locs):
                    yield AlgebraicNumber(poly, i, loc.enclosure(ISOL_RADIUS),
                                          loc, lock)
        s += 1


def _tier_of(target: Fraction) -> int:
    """Smallest t >= 0 with 2^-t <= target."""
    if target >= 1:
        return 0
    num, den = target.numerator, target.denominator
    t = max(0, den.bit_length() - num.bit_length())
    if num * (1 << t) < den:
        t += 1
    assert num * (1 << t) >= den
    return t


class Enumeration:
    """Lazily extended stream of algebraic numbers.

    Thread safe: the underlying generator is advanced under a lock, and
    approximations are cached per (index, radius tier) so identical
    queries return the identical ball object.
    """

    def __init__(self, max_index: int = DEFAULT_MAX_INDEX):
        self.max_index = max_index
        self._numbers: list[AlgebraicNumber] = []
        self._stream = _number_stream()
        self._lock = threading.RLock()
        self._approx_cache: dict[tuple[int, int], BallComplex] = {}

    @property
    def enumeration_id(self) -> str:
        return ENUMERATION_ID

    def alpha(self, k: int) -> AlgebraicNumber:
        """The k-th algebraic number, 1-based."""
        if k < 1:
            raise ValueError("enumeration indices are 1-based")
        if k > self.max_index:
            raise CapExceeded(
                f"index {k} beyond the configured maximum {self.max_index}")
        with self._lock:
            while len(self._numbers) < k:
                self._numbers.append(next(self._stream))
            return self._numbers[k - 1]

    def first(self, n: int) -> list[AlgebraicNumber]:
        return [self.alpha(k) for k in range(1, n + 1)]

    def approx(self, k: int, target_radius) -> BallComplex:
        """Cached enclosure of alpha(k); the target is quantized to the
        next power-of-two tier so repeats hit the cache."""
        target = _to_fraction(target_radius)
        if target <= 0:
            raise ValueError("target radius must be positive")
        tier = _tier_of(target)
        key = (k, tier)
        with self._lock:
            hit = self._approx_cache.get(key)
        if hit is not None:
            return hit
        ball = approx(self.alpha(k), Fraction(1, 2 ** tier))
        with self._lock:
            return self._approx_cache.setdefault(key, ball)


_default_lock = threading.Lock()
_default_enum: Enumeration | None = None


def default_enumeration() -> Enumeration:
    """Process-wide shared enumeration (the default for series work)."""
    global _default_enum
    with _default_lock:
        if _default_enum is None:
            _default_enum = Enumeration()
        return _default_enum


def nth_algebraic(k: int) -> AlgebraicNumber:
    return default_enumeration().alpha(k)


def first_algebraics(n: int) -> list[AlgebraicNumber]:
    return default_enumeration().first(n)


# ---------------------------------------------------------------------------
# cache files: one JSON record per line

@dataclass(frozen=True)
class CacheRecord:
    k: int
    coeffs: tuple[int, ...]
    root_index: int
    approx_re: str
    approx_im: str
    rad: str


def _record_for(enum: Enumeration, k: int, target_radius) -> dict:
    a = enum.alpha(k)
    ball = enum.approx(k, target_radius)
    worst = ball.re.rad if ball.re.rad >= ball.im.rad else ball.im.rad
    return {
        "k": k,
        "coeffs": list(a.minpoly.coeffs),
        "root_index": a.root_index,
        "approx_re": decimal_str(ball.re.mid),
        "approx_im": decimal_str(ball.im.mid),
        "rad": decimal_str(worst),
    }


def write_cache(path, count: int, target_radius=CACHE_RADIUS,
                max_index: int = DEFAULT_MAX_INDEX) -> None:
    """Write the first `count` entries as JSON lines.

    A fresh enumeration is used and entries are approximated in
    ascending order, so the output is bit-identical across runs.
    """
    enum = Enumeration(max_index=max_index)
    with open(path, "w", encoding="ascii") as fh:
        for k in range(1, count + 1):
            fh.write(json.dumps(_record_for(enum, k, target_radius)) + "\n")


def read_cache(path) -> list[CacheRecord]:
    records = []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            records.append(CacheRecord(
                k=int(obj["k"]),
                coeffs=tuple(int(c) for c in obj["coeffs"]),
                root_index=int(obj["root_index"]),
                approx_re=str(obj["approx_re"]),
                approx_im=str(obj["approx_im"]),
                rad=str(obj["rad"]),
            ))
    return records


def verify_cache(path, target_radius=CACHE_RADIUS) -> bool:
    """Recompute every record from a fresh enumeration and compare the
    stored strings exactly."""
    records = read_cache(path)
    enum = Enumeration()
    for rec in records:
        fresh = _record_for(enum, rec.k, target_radius)
        if (tuple(fresh["coeffs"]) != rec.coeffs
                or fresh["root_index"] != rec.root_index
                or fresh["approx_re"] != rec.approx_re
                or fresh["approx_im"] != rec.approx_im
                or fresh["rad"] != rec.rad):
            return False
    return True
