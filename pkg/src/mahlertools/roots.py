"""Certified complex root isolation with a canonical root order.

Strategy
--------
Real roots come from exact Sturm bisection (realroots module).  The
non-real roots are located by Durand-Kerner iteration in MPFR, polished
by Newton, and certified through the product bound: for a degree-d
polynomial P with leading coefficient a_d, every point z0 satisfies
min_root |z0 - root| <= (|P(z0)| / |a_d|)^(1/d), where |P(z0)| is
bounded above by ball evaluation at the exact dyadic point z0.  Once d
such disks are pairwise disjoint, each contains exactly one root
(pigeonhole), brackets are matched to disks, the leftover disks are
paired with their conjugates, and a pair is stored as its lower-half
member (the other root is exactly its conjugate).

Canonical order
---------------
Roots are sorted by real part ascending, ties by imaginary part
ascending.  Whether two real parts are exactly equal is decidable: both
doubled real parts are roots of the resultant S(x) = Res_y(P(y),
P(x - y)), so once the enclosures shrink below a root-separation bound
for the squarefree part of S, persistent overlap certifies equality.
The fallback is exact but slow; ordinary cases settle by plain interval
refinement much earlier.

Locators returned by canonical_roots refine monotonically (every new
enclosure is contained in the previous one) and deterministically, so
repeated runs give bit-identical results.  Locators are not thread
safe; share them only with external locking.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr

import sympy

from . import balls, realroots
from .balls import (
    BallComplex, BallReal, Precision, _ctx, _neg_exact, mpfr_to_fraction,
)
from .errors import IsolationFailure
from .intpoly import IntPolynomial, derivative, eval_ball

_ISOLATION_BITS_CAP = 1 << 20
_MODERATE_BITS = 192  # interval width threshold before the exact fallback


# ---------------------------------------------------------------------------
# plain mpfr complex helpers (tuples (re, im), one shared context)

def _cmul(c, a, b):
    return (c.sub(c.mul(a[0], b[0]), c.mul(a[1], b[1])),
            c.add(c.mul(a[0], b[1]), c.mul(a[1], b[0])))


def _csub(c, a, b):
    return (c.sub(a[0], b[0]), c.sub(a[1], b[1]))


def _cdiv(c, a, b):
    den = c.add(c.mul(b[0], b[0]), c.mul(b[1], b[1]))
    return (c.div(c.add(c.mul(a[0], b[0]), c.mul(a[1], b[1])), den),
            c.div(c.sub(c.mul(a[1], b[0]), c.mul(a[0], b[1])), den))


def _cabs2(c, a):
    return c.add(c.mul(a[0], a[0]), c.mul(a[1], a[1]))


def _poly_eval(c, coeffs, z):
    acc = (mpfr(0), mpfr(0))
    for a in reversed(coeffs):
        acc = _cmul(c, acc, z)
        acc = (c.add(acc[0], a), acc[1])
    return acc


def _durand_kerner(coeffs: tuple[int, ...], bits: int) -> list | None:
    """All-roots iteration; deterministic start, None if not converged."""
    c = _ctx(bits, gmpy2.RoundToNearest)
    d = len(coeffs) - 1
    lead = coeffs[-1]
    radius = c.add(mpfr(1), c.div(max(abs(a) for a in coeffs[:-1]), abs(lead)))
    base = (c.div(mpfr(2), mpfr(5)), c.div(mpfr(9), mpfr(10)))
    zs = []
    p = (mpfr(1), mpfr(0))
    for _ in range(d):
        p = _cmul(c, p, base)
        zs.append((c.mul(p[0], radius), c.mul(p[1], radius)))
    tol = _ctx(64, gmpy2.RoundToNearest).div_2exp(mpfr(1), bits // 2)
    for _ in range(64 + 16 * d):
        worst = mpfr(0)
        for i in range(d):
            num = _poly_eval(c, coeffs, zs[i])
            den = (mpfr(lead), mpfr(0))
            for j in range(d):
                if j != i:
                    den = _cmul(c, den, _csub(c, zs[i], zs[j]))
            if den[0] == 0 and den[1] == 0:
                return None
            delta = _cdiv(c, num, den)
            zs[i] = _csub(c, zs[i], delta)
            step = _cabs2(c, delta)
            if step > worst:
                worst = step
        if c.sqrt(worst) < tol:
            return zs
    return None


def _newton(coeffs, dcoeffs, z, bits, iters):
    c = _ctx(bits, gmpy2.RoundToNearest)
    z = (mpfr(z[0], bits), mpfr(z[1], bits))
    for _ in range(iters):
        v = _poly_eval(c, coeffs, z)
        dv = _poly_eval(c, dcoeffs, z)
        if dv[0] == 0 and dv[1] == 0:
            return z
        z = _csub(c, z, _cdiv(c, v, dv))
    return z


def _certified_radius(poly: IntPolynomial, z, bits: int) -> mpfr:
    """Upper bound (64-bit, rounded up) on the distance from the exact
    dyadic point z to the nearest root of poly.

    Clamped from below at 2^-bits so the disk geometry never becomes
    degenerate when z happens to hit a dyadic root exactly (a larger
    radius is still a correct upper bound)."""
    zb = BallComplex(BallReal(z[0], mpfr(0)), BallReal(z[1], mpfr(0)))
    val = eval_ball(poly, zb, Precision(min(bits, _ISOLATION_BITS_CAP)))
    mag_hi = balls.abs_ball(val, Precision(64)).upper()
    up = _ctx(64, gmpy2.RoundUp)
    r = up.rootn(up.div(mag_hi, abs(poly.leading())), poly.degree)
    return up.maxnum(r, up.div_2exp(mpfr(1), bits))


# ---------------------------------------------------------------------------
# exact disk geometry (Fractions; centers and radii are dyadic)

def _fr(x) -> Fraction:
    return mpfr_to_fraction(x)


def _dist2(a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]) -> Fraction:
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


class _Disk:
    __slots__ = ("re", "im", "rho", "c")

    def __init__(self, center, rho: mpfr):
        self.re, self.im = center
        self.rho = rho
        self.c = (_fr(self.re), _fr(self.im))

    def rho_fr(self) -> Fraction:
        return _fr(self.rho)

    def contains_point(self, p: tuple[Fraction, Fraction], inflate: int = 1) -> bool:
        return _dist2(self.c, p) <= (inflate * self.rho_fr()) ** 2

    def disjoint_from(self, other: "_Disk", inflate: int = 1) -> bool:
        gap = inflate * (self.rho_fr() + other.rho_fr())
        return _dist2(self.c, other.c) > gap * gap


class _RetryIsolation(Exception):
    pass


def _validate_and_pair(poly, brackets, disks):
    """Exact combinatorial checks; raises _RetryIsolation on any doubt.

    Returns (bracket_to_diskless_brackets, pairs) where pairs is a list
    of lower-half disks, one per conjugate pair.
    """
    # pairwise disjoint even after 2x inflation
    for i in range(len(disks)):
        for j in range(i + 1, len(disks)):
            if not disks[i].disjoint_from(disks[j], inflate=2):
                raise _RetryIsolation
    # each real bracket must sit inside exactly one inflated disk
    matched: dict[int, int] = {}
    for bi, (a, b) in enumerate(brackets):
        hit = None
        for di, disk in enumerate(disks):
            if disk.contains_point((a, Fraction(0)), inflate=2) and \
               disk.contains_point((b, Fraction(0)), inflate=2):
                hit = di
                break
        if hit is None or hit in matched.values():
            raise _RetryIsolation
        matched[bi] = hit
    rest = [d for i, d in enumerate(disks) if i not in matched.values()]
    # leftover disks hold the non-real roots: they must clear the axis
    for d in rest:
        if abs(d.c[1]) <= d.rho_fr():
            raise _RetryIsolation
    # conjugate pairing: exactly one candidate partner each, symmetric
    partner: list[int | None] = [None] * len(rest)
    for i, d in enumerate(rest):
        conj_center = (d.c[0], -d.c[1])
        hits = [j for j, e in enumerate(rest)
                if _dist2(conj_center, e.c) <= (d.rho_fr() + e.rho_fr()) ** 2]
        if len(hits) != 1 or hits[0] == i:
            raise _RetryIsolation
        partner[i] = hits[0]
    pairs = []
    for i, d in enumerate(rest):
        j = partner[i]
        if partner[j] != i or (d.c[1] < 0) == (rest[j].c[1] < 0):
            raise _RetryIsolation
        if d.c[1] < 0:
            pairs.append(d)
    if 2 * len(pairs) != len(rest):
        raise _RetryIsolation
    return pairs


def _isolate_at(poly: IntPolynomial, start_bits: int = 128):
    """Brackets for the real roots plus certified lower-half pair disks."""
    coeffs = poly.coeffs
    if poly.degree == 1:
        r = Fraction(-coeffs[0], coeffs[1])
        return [(r, r)], []
    brackets = realroots.isolate_real_roots(coeffs)
    if poly.degree == len(brackets):
        return brackets, []
    dcoeffs = derivative(poly).coeffs
    bits = max(128, start_bits)
    while bits <= _ISOLATION_BITS_CAP:
        points = _durand_kerner(coeffs, bits)
        if points is not None:
            points = [_newton(coeffs, dcoeffs, z, 2 * bits, 6) for z in points]
            disks = [_Disk(z, _certified_radius(poly, z, 2 * bits)) for z in points]
            # shrink brackets toward the disk scale before matching
            min_rho = min(dk.rho_fr() for dk in disks)
            refined = [realroots.refine_root_interval(coeffs, a, b, min_rho)
                       for a, b in brackets]
            try:
                return refined, _validate_and_pair(poly, refined, disks)
            except _RetryIsolation:
                brackets = refined
        bits *= 2
    raise IsolationFailure(
        f"could not isolate the roots of {poly} within {_ISOLATION_BITS_CAP} bits")


# ---------------------------------------------------------------------------
# refinable pair state

class _Pair:
    """Certified disk around the Im < 0 member of a conjugate pair."""

    __slots__ = ("poly", "dcoeffs", "disk", "_bits")

    def __init__(self, poly: IntPolynomial, disk: _Disk, bits: int):
        self.poly = poly
        self.dcoeffs = derivative(poly).coeffs
        self.disk = disk
        self._bits = bits

    def refine_below(self, target: Fraction) -> None:
        """Shrink the certified radius strictly below target (monotone)."""
        while not self.disk.rho_fr() < target:
            self._refine_once(target)

    def _refine_once(self, target: Fraction) -> None:
        d = self.poly.degree
        need = -(target / 4).numerator.bit_length() + (target / 4).denominator.bit_length()
        bits = max(2 * self._bits, 128, d * max(need, 1) + 64)
        if bits > _ISOLATION_BITS_CAP:
            raise IsolationFailure(
                f"pair refinement for {self.poly} exceeded {_ISOLATION_BITS_CAP} bits")
        z = _newton(self.poly.coeffs, self.dcoeffs,
                    (self.disk.re, self.disk.im), bits, 8)
        rho = _certified_radius(self.poly, z, bits)
        new = _Disk(z, rho)
        # accept only if contained in the old disk: same root for sure
        dist = _dist2(new.c, self.disk.c)
        margin = self.disk.rho_fr() - new.rho_fr()
        if margin >= 0 and dist <= margin * margin and new.rho_fr() < self.disk.rho_fr():
            self.disk = new
            self._bits = bits
            return
        # Newton drifted: redo a full isolation at higher precision and
        # pick the disk that lies inside the current one
        self._bits = bits
        _, cands = _isolate_at(self.poly, bits)
        for cand in cands:
            dist = _dist2(cand.c, self.disk.c)
            margin = self.disk.rho_fr() - cand.rho_fr()
            if margin >= 0 and dist <= margin * margin:
                self.disk = cand
                return
        raise IsolationFailure(
            f"lost track of a root of {self.poly} during refinement")

    def re_interval(self) -> tuple[Fraction, Fraction]:
        r = self.disk.rho_fr()
        return self.disk.c[0] - r, self.disk.c[0] + r

    def im_abs_interval(self) -> tuple[Fraction, Fraction]:
        r = self.disk.rho_fr()
        b = -self.disk.c[1]  # positive by construction
        return b - r, b + r


# ---------------------------------------------------------------------------
# locators and the canonical order

class RootLocator:
    """One root of a squarefree integer polynomial, refinable on demand.

    kind is "real" (exact bracket), "low" (Im < 0 member of a pair) or
    "high" (its conjugate).
    """

    __slots__ = ("poly", "kind", "bracket", "pair", "index")

    def __init__(self, poly, kind, bracket=None, pair=None):
        self.poly = poly
        self.kind = kind
        self.bracket = bracket
        self.pair = pair
        self.index = -1

    # -- exact interval views ----------------------------------------

    def re_interval(self) -> tuple[Fraction, Fraction]:
        if self.kind == "real":
            return self.bracket
        return self.pair.re_interval()

    def re_width(self) -> Fraction:
        a, b = self.re_interval()
        return b - a

    def _refine_re(self, width: Fraction) -> None:
        if self.kind == "real":
            self.bracket = realroots.refine_root_interval(
                self.poly.coeffs, *self.bracket, width)
        else:
            self.pair.refine_below(width / 2)

    # -- certified enclosures ----------------------------------------

    def enclosure(self, target_rad: Fraction) -> BallComplex:
        """Ball around this root with both component radii <= target_rad."""
        if target_rad <= 0:
            raise ValueError("target radius must be positive")
        if self.kind == "real":
            a, b = realroots.refine_root_interval(
                self.poly.coeffs, *self.bracket, target_rad)
            self.bracket = (a, b)
            prec = Precision(max(64, _fraction_bits(target_rad) + 32))
            if a == b:
                re = balls.real_from_fraction(a, prec)
                # widen to the conversion error only; rad may still be 0
                return BallComplex(re, BallReal.zero())
            lo = balls.real_from_fraction(a, prec)
            hi = balls.real_from_fraction(b, prec)
            re = balls.ball_from_endpoints(lo.lower(), hi.upper(), prec)
            return BallComplex(re, BallReal.zero())
        self.pair.refine_below(Fraction(target_rad) / 2)
        disk = self.pair.disk
        rho64 = _ctx(64, gmpy2.RoundUp).add(disk.rho, mpfr(0))
        im_mid = disk.im if self.kind == "low" else _neg_exact(disk.im)
        return BallComplex(BallReal(disk.re, rho64), BallReal(im_mid, rho64))

    def __repr__(self):
        return f"RootLocator({self.poly}, {self.kind}, index={self.index})"


def _fraction_bits(f: Fraction) -> int:
    """Roughly -floor(log2 f) for 0 < f <= 1, >= 1 otherwise small."""
    if f >= 1:
        return 1
    return (f.denominator // f.numerator).bit_length() + 1


# -- exact equality fallback for real parts --------------------------------

@lru_cache(maxsize=256)
def _re_separation_bound(coeffs: tuple[int, ...]) -> Fraction | None:
    """Lower bound on |s - t| for distinct roots s, t of the sum
    polynomial S(x) = Res_y(P(y), P(x - y)); doubled real parts of roots
    of P are roots of S.  None means S has a single distinct root."""
    x, y = sympy.symbols("x y")
    pe = sum(c * y ** k for k, c in enumerate(coeffs))
    ps = sum(c * (x - y) ** k for k, c in enumerate(coeffs))
    S = sympy.Poly(sympy.resultant(pe, ps, y), x)
    # primitive squarefree part, integer coefficients
    Sf = S
    g = sympy.gcd(S, S.diff(x))
    if g.degree() > 0:
        Sf, _ = S.div(g)
    Sf = sympy.Poly(Sf / sympy.content(Sf), x)
    D = Sf.degree()
    if D <= 1:
        return None
    cs = [int(c) for c in Sf.all_coeffs()]
    norm2 = math.isqrt(sum(c * c for c in cs)) + 1
    # Mahler-type separation: sep > sqrt(3) * D^(-(D+2)/2) * ||S||_2^(-(D-1))
    dd_pow = D ** ((D + 3) // 2)
    return Fraction(1, dd_pow * norm2 ** (D - 1))


def _cmp_re(u: RootLocator, v: RootLocator) -> int:
    """-1, 0, +1 comparing exact real parts; 0 means provably equal."""
    if u.kind != "real" and v.kind != "real" and u.pair is v.pair:
        return 0
    moderate = Fraction(1, 2 ** _MODERATE_BITS)
    while True:
        ua, ub = u.re_interval()
        va, vb = v.re_interval()
        if ub < va:
            return -1
        if vb < ua:
            return 1
        if u.kind == "real" and v.kind == "real":
            # distinct real roots separate once the wider interval shrinks
            w = max(ub - ua, vb - va)
            u._refine_re(w / 4)
            v._refine_re(w / 4)
            continue
        if max(ub - ua, vb - va) > moderate:
            w = max(ub - ua, vb - va)
            u._refine_re(w / 4)
            v._refine_re(w / 4)
            continue
        sep = _re_separation_bound(u.poly.coeffs)
        if sep is None:
            return 0
        # doubled real parts are roots of S: equal unless they differ by sep
        goal = sep / 8
        u._refine_re(goal)
        v._refine_re(goal)
        ua, ub = u.re_interval()
        va, vb = v.re_interval()
        if ub < va:
            return -1
        if vb < ua:
            return 1
        return 0


def _cmp_im_abs(p: _Pair, q: _Pair) -> int:
    """Compare |Im| of two distinct pairs known to share the real part."""
    while True:
        pa, pb = p.im_abs_interval()
        qa, qb = q.im_abs_interval()
        if pb < qa:
            return -1
        if qb < pa:
            return 1
        # overlap of zero-width intervals would mean equal pairs
        w = max(pb - pa, qb - qa)
        p.refine_below(w / 4)
        q.refine_below(w / 4)


def canonical_roots(poly: IntPolynomial) -> list[RootLocator]:
    """All roots, sorted by (Re ascending, Im ascending), refinable.

    Requires a squarefree polynomial of degree >= 1.
    """
    if poly.degree < 1:
        raise ValueError("need degree >= 1")
    if not _squarefree(poly):
        raise ValueError(f"{poly} is not squarefree")
    brackets, pair_disks = _isolate_at(poly)
    locs = [RootLocator(poly, "real", bracket=tuple(b)) for b in brackets]
    for disk in pair_disks:
        pr = _Pair(poly, disk, 128)
        locs.append(RootLocator(poly, "low", pair=pr))
        locs.append(RootLocator(poly, "high", pair=pr))
    # group by exact real part
    groups: list[list[RootLocator]] = []
    for loc in locs:
        placed = False
        for g in groups:
            c = _cmp_re(g[0], loc)
            if c == 0:
                g.append(loc)
                placed = True
                break
        if not placed:
            groups.append([loc])
    groups.sort(key=_GroupKey)
    ordered: list[RootLocator] = []
    for g in groups:
        ordered.extend(_order_within_group(g))
    for i, loc in enumerate(ordered):
        loc.index = i
    return ordered


class _GroupKey:
    """Sort adapter: compares groups through their first member."""

    def __init__(self, group):
        self.rep = group[0]

    def __lt__(self, other):
        return _cmp_re(self.rep, other.rep) < 0


def _order_within_group(group: list[RootLocator]) -> list[RootLocator]:
    if len(group) == 1:
        return group
    lows = [l for l in group if l.kind == "low"]
    reals = [l for l in group if l.kind == "real"]
    highs = [l for l in group if l.kind == "high"]
    assert len(reals) <= 1  # two distinct real roots cannot share a value
    lows.sort(key=functools.cmp_to_key(lambda a, b: _cmp_im_abs(a.pair, b.pair)),
              reverse=True)  # Im = -|b|: most negative (largest |b|) first
    highs.sort(key=functools.cmp_to_key(lambda a, b: _cmp_im_abs(a.pair, b.pair)))
    return lows + reals + highs


def _squarefree(poly: IntPolynomial) -> bool:
    g = _poly_gcd(tuple(Fraction(c) for c in poly.coeffs),
                  tuple(Fraction(c) for c in derivative(poly).coeffs))
    return len(g) <= 1


def _poly_gcd(a, b):
    while b:
        a, b = b, realroots._rem(a, b)
    return a


def roots_of(poly: IntPolynomial, prec: Precision) -> list[BallComplex]:
    """Certified, pairwise-separated enclosures of all roots in the
    canonical order; component radii at most 2^-(bits//2)."""
    target = Fraction(1, 2 ** (prec.bits // 2))
    return [loc.enclosure(target) for loc in canonical_roots(poly)]
