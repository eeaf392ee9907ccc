"""Exact real-root isolation for squarefree integer polynomials.

Everything here runs over Fractions: Sturm chains decide exact root
counts on intervals, and bisection both isolates and refines.  An
isolating interval is either a point (a, a), meaning the rational a is
a root, or an open interval (a, b) with p(a) != 0, p(b) != 0 that
contains exactly one root.  Intervals come back sorted ascending and
pairwise disjoint.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Poly = tuple[Fraction, ...]


def _normalize(coeffs: Sequence) -> Poly:
    cs = [Fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def _eval(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _deriv(p: Poly) -> Poly:
    return tuple(k * p[k] for k in range(1, len(p)))


def _rem(a: Poly, b: Poly) -> Poly:
    """Polynomial remainder of a by b (b nonzero)."""
    r = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(r) - 1 >= db and any(r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < db:
            break
        q = r[-1] / lb
        shift = len(r) - 1 - db
        for i, c in enumerate(b):
            r[shift + i] -= q * c
        r.pop()
    while r and r[-1] == 0:
        r.pop()
    return tuple(r)


def sturm_chain(coeffs: Sequence) -> list[Poly]:
    p = _normalize(coeffs)
    if len(p) <= 1:
        return [p] if p else []
    chain = [p, _deriv(p)]
    while chain[-1]:
        nxt = _rem(chain[-2], chain[-1])
        if not nxt:
            break
        chain.append(tuple(-c for c in nxt))
    return chain


def _variations(chain: list[Poly], x: Fraction) -> int:
    signs = []
    for p in chain:
        v = _eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots_between(chain: list[Poly], a: Fraction, b: Fraction) -> int:
    """Distinct real roots in the open interval (a, b); the endpoints
    must not be roots of the squarefree polynomial chain[0]."""
    assert _eval(chain[0], a) != 0 and _eval(chain[0], b) != 0
    return _variations(chain, a) - _variations(chain, b)


def cauchy_root_bound(coeffs: Sequence) -> Fraction:
    """M with every root strictly inside |x| < M."""
    p = _normalize(coeffs)
    if len(p) <= 1:
        return Fraction(1)
    lead = abs(p[-1])
    return 1 + max(abs(c) for c in p[:-1]) / lead


def isolate_real_roots(coeffs: Sequence) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals for all real roots of a squarefree polynomial."""
    p = _normalize(coeffs)
    if len(p) <= 1:
        return []
    chain = sturm_chain(p)
    M = cauchy_root_bound(p)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(-M, M)]
    while stack:
        a, b = stack.pop()
        k = count_roots_between(chain, a, b)
        if k == 0:
            continue
        if k == 1:
            out.append((a, b))
            continue
        m = (a + b) / 2
        if _eval(p, m) == 0:
            out.append((m, m))
            # shrink symmetric exclusion of the known root, then recurse
            d = (b - a) / 4
            while True:
                lo, hi = m - d, m + d
                if (_eval(p, lo) != 0 and _eval(p, hi) != 0
                        and count_roots_between(chain, lo, hi) == 1):
                    break
                d /= 2
            stack.append((a, lo))
            stack.append((hi, b))
        else:
            stack.append((a, m))
            stack.append((m, b))
    out.sort(key=lambda iv: iv[0])
    return out


def refine_root_interval(coeffs: Sequence, a: Fraction, b: Fraction,
                         width: Fraction) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval down to the requested width.

    Point intervals pass through unchanged; open intervals keep the
    sign-change invariant (one simple root means the signs differ).
    """
    if a == b:
        return a, b
    p = _normalize(coeffs)
    fa = _eval(p, a)
    assert fa != 0 and _eval(p, b) != 0
    sa = fa > 0
    while b - a > width:
        m = (a + b) / 2
        fm = _eval(p, m)
        if fm == 0:
            return m, m
        if (fm > 0) == sa:
            a = m
        else:
            b = m
    return a, b
