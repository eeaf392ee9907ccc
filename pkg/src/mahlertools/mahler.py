"""Exhaustive minimization of |P(xi)| over bounded integer polynomials.

The candidate space for bounds (n, H) is every tuple (a_0, ..., a_n)
with |a_k| <= H.  P and -P have the same absolute value, so one
representative per sign class is scanned: the zero tuple plus every
tuple whose highest nonzero coefficient is positive, which makes
((2H+1)^(n+1) - 1)/2 + 1 candidates.

The reported minimum is the exact one.  How comparisons are decided
depends on the kind of xi:

 *  rational            exact Fraction arithmetic
 *  real algebraic      residues mod the minimal polynomial; the sign
                        of v^2 - w^2 is decided by refining the root
                        interval (exact: a nonzero residue cannot
                        vanish at the root)
 *  complex quadratic   |v|^2 = v vbar is rational via trace and norm
 *  other algebraic     interval ladder; a persistent tie at high
                        precision is settled symbolically through the
                        minimal polynomial of |v1|^2 - |v2|^2
 *  pi, e, liouville    interval ladder; ties are impossible because
                        distinct representatives cannot agree at a
                        transcendental point, so the ladder terminates
 *  raw ball            one pass at fixed precision; the input cannot
                        be refined, so a candidate whose value ball
                        straddles zero raises UndecidableZero, and the
                        reported ball spans [min of lower bounds, upper
                        bound of the minimizing candidate]

Exact zeros are excluded from the minimum and counted (the zero tuple
always counts; for algebraic xi a candidate vanishes exactly when the
minimal polynomial divides it; at the named constants only the zero
polynomial vanishes).

Results are deterministic and independent of the worker count: slabs
(degree, leading coefficient) are scanned independently, local minima
are merged in slab order, and every comparison verdict is exact, so
the argmin and the tie-break do not depend on scheduling.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import sympy

from . import balls, realroots
from .balls import BallComplex, BallReal, Precision
from .errors import BudgetExceeded, PrecisionCapExceeded, UndecidableZero
from .intpoly import IntPolynomial, format_poly, poly_mul
from .qbar import AlgebraicNumber
from .qbar import approx as algebraic_approx

DEFAULT_BUDGET = 10 ** 9
NAMED_CONSTANTS = ("pi", "e", "liouville")

_FINAL_BITS = 192       # precision of the reported omega/exponent balls
_TIE_CHECK_BITS = 4096  # ladder depth that triggers the symbolic tie test


@dataclass(frozen=True)
class OmegaQuery:
    """One minimization request: xi, degree bound n, height bound H."""

    xi: object
    n: int
    H: int
    prec: Precision = Precision(64)
    budget: int = DEFAULT_BUDGET
    workers: int = 1


@dataclass(frozen=True)
class OmegaResult:
    omega_min: BallReal
    exponent: BallReal | None
    argmin: IntPolynomial
    zeros_excluded: int
    candidates_scanned: int


@dataclass(frozen=True)
class ZeroCheck:
    """Outcome of an exact-or-certified zero test of P(xi)."""

    is_zero: bool
    lower_bound: Fraction | None  # positive lower bound on |P(xi)| when nonzero


def scan_size(n: int, H: int) -> int:
    """Number of sign-class representatives, zero tuple included."""
    return ((2 * H + 1) ** (n + 1) - 1) // 2 + 1


def _argmin_key(coeffs: tuple[int, ...]):
    """Tie-break key: (degree + height, degree, (a_n, ..., a_0))."""
    d = max(i for i, c in enumerate(coeffs) if c)
    h = max(abs(c) for c in coeffs)
    return (d + h, d, tuple(reversed(coeffs)))


def _slab_candidates(n: int, H: int, d: int, lead: int):
    """Representatives with degree exactly d and leading coefficient
    `lead` (> 0), padded with zeros up to index n, constant first."""
    pad = (0,) * (n - d)
    for rest in itertools.product(range(-H, H + 1), repeat=d):
        yield rest + (lead,) + pad


def _residue(coeffs, minpoly_frac) -> tuple[Fraction, ...]:
    return realroots._rem(tuple(Fraction(c) for c in coeffs), minpoly_frac)


def _eval_real_ball(fr_coeffs, x: BallReal, prec: Precision) -> BallReal:
    acc = BallReal.zero()
    for c in reversed(fr_coeffs):
        acc = balls.real_mul(acc, x, prec)
        acc = balls.real_add(acc, balls.real_from_fraction(c, prec), prec)
    return acc


# ---------------------------------------------------------------------------
# backends: one per kind of xi

class _RationalXi:
    def __init__(self, value: Fraction):
        self.value = Fraction(value)

    def is_zero(self, coeffs) -> bool:
        return self._eval(coeffs) == 0

    def _eval(self, coeffs) -> Fraction:
        acc = Fraction(0)
        for c in reversed(coeffs):
            acc = acc * self.value + c
        return acc

    def record(self, coeffs):
        return abs(self._eval(coeffs))

    def cmp(self, a: Fraction, b: Fraction) -> int:
        return (a > b) - (a < b)

    def final_ball(self, rec: Fraction) -> BallReal:
        return balls.real_from_fraction(rec, Precision(_FINAL_BITS))

    def zero_lower_bound(self, coeffs) -> Fraction:
        return abs(self._eval(coeffs))


class _RealAlgebraicXi:
    """xi is a real root of an irreducible polynomial of degree >= 2.

    Values live in Q[xi]; a residue mod the minimal polynomial is zero
    exactly when the candidate is a multiple of it.  Comparisons refine
    the root interval until the sign of v^2 - w^2 settles, which always
    happens: a nonzero residue has degree below the minimal one and
    cannot vanish at xi.
    """

    def __init__(self, a: AlgebraicNumber, prec: Precision):
        self.a = a
        self.prec = prec
        self.minpoly_frac = tuple(Fraction(c) for c in a.minpoly.coeffs)
        self._tiers: dict[int, BallReal] = {}
        self._tier_lock = threading.Lock()

    def _xi_ball(self, bits: int) -> BallReal:
        with self._tier_lock:
            hit = self._tiers.get(bits)
        if hit is not None:
            return hit
        ball = algebraic_approx(self.a, Fraction(1, 2 ** bits)).re
        with self._tier_lock:
            return self._tiers.setdefault(bits, ball)

    def is_zero(self, coeffs) -> bool:
        return not _residue(coeffs, self.minpoly_frac)

    def record(self, coeffs):
        return _residue(coeffs, self.minpoly_frac)

    def _sign_at_root(self, fr_coeffs) -> int:
        bits = max(64, self.prec.bits)
        while bits <= self.prec.cap:
            v = _eval_real_ball(fr_coeffs, self._xi_ball(bits), Precision(bits))
            if not v.contains_zero():
                return 1 if v.lower_fraction() > 0 else -1
            bits *= 2
        raise PrecisionCapExceeded(
            "sign of a nonzero residue did not settle below the precision cap")

    def cmp(self, r1, r2) -> int:
        # quick interval pass at the base tier
        bits = max(64, self.prec.bits)
        x = self._xi_ball(bits)
        v1 = balls.real_abs(_eval_real_ball(r1, x, Precision(bits)), Precision(bits))
        v2 = balls.real_abs(_eval_real_ball(r2, x, Precision(bits)), Precision(bits))
        if v1.upper_fraction() < v2.lower_fraction():
            return -1
        if v2.upper_fraction() < v1.lower_fraction():
            return 1
        # exact: sign of (v1 - v2)(v1 + v2) at xi
        diff = realroots._rem(
            tuple(a - b for a, b in _padded(poly_mul(r1, r1), poly_mul(r2, r2))),
            self.minpoly_frac)
        if not diff:
            return 0
        return self._sign_at_root(diff)

    def final_ball(self, rec) -> BallReal:
        fresh = _fresh_copy(self.a)
        bits = 128
        target = Fraction(1, 2 ** 96)
        while bits <= self.prec.cap:
            x = algebraic_approx(fresh, Fraction(1, 2 ** bits)).re
            v = balls.real_abs(_eval_real_ball(rec, x, Precision(bits)),
                               Precision(bits))
            if not v.contains_zero() and v.rad_fraction() <= target:
                return v
            bits *= 2
        raise PrecisionCapExceeded("final enclosure did not settle")

    def zero_lower_bound(self, coeffs) -> Fraction:
        rec = _residue(coeffs, self.minpoly_frac)
        return self.final_ball(rec).lower_fraction()


def _padded(p, q):
    n = max(len(p), len(q))
    return zip(p + (Fraction(0),) * (n - len(p)),
               q + (Fraction(0),) * (n - len(q)))


def _fresh_copy(a: AlgebraicNumber) -> AlgebraicNumber:
    """Rebuild the number with fresh locators so the reported balls do
    not depend on how much refinement earlier comparisons triggered."""
    from .qbar import algebraic_number
    return algebraic_number(a.minpoly.coeffs, a.root_index)


class _QuadraticComplexXi:
    """xi is a non-real root of a quadratic: |v|^2 is exactly rational.

    For v = c0 + c1 xi, multiplying by the conjugate gives
    |v|^2 = c0^2 + c0 c1 (xi + xibar) + c1^2 xi xibar, and the trace and
    norm come straight from the minimal polynomial.
    """

    def __init__(self, a: AlgebraicNumber):
        self.a = a
        a0, a1, a2 = (Fraction(c) for c in a.minpoly.coeffs)
        self.trace = -a1 / a2
        self.norm = a0 / a2
        self.minpoly_frac = tuple(Fraction(c) for c in a.minpoly.coeffs)

    def _abs2(self, coeffs) -> Fraction:
        r = _residue(coeffs, self.minpoly_frac)
        c0 = r[0] if len(r) > 0 else Fraction(0)
        c1 = r[1] if len(r) > 1 else Fraction(0)
        return c0 * c0 + c0 * c1 * self.trace + c1 * c1 * self.norm

    def is_zero(self, coeffs) -> bool:
        return not _residue(coeffs, self.minpoly_frac)

    def record(self, coeffs):
        return self._abs2(coeffs)

    def cmp(self, a: Fraction, b: Fraction) -> int:
        return (a > b) - (a < b)

    def final_ball(self, rec: Fraction) -> BallReal:
        prec = Precision(_FINAL_BITS)
        return balls.real_sqrt(balls.real_from_fraction(rec, prec), prec)

    def zero_lower_bound(self, coeffs) -> Fraction:
        return self.final_ball(self._abs2(coeffs)).lower_fraction()


class _LadderXi:
    """Interval-ladder backend for xi given as a refinable ball source.

    `source(bits)` must return an enclosure of xi with radius <= 2^-bits
    deterministically.  `exact_zero(coeffs)` decides vanishing exactly;
    `exact_tie(c1, c2)` (optional) decides whether two candidates have
    exactly equal absolute values once the ladder passes the tie-check
    depth.  Without a tie decider the ladder runs to the cap, which is
    correct whenever ties are impossible.
    """

    def __init__(self, source, prec: Precision, exact_zero, exact_tie=None):
        self.source = source
        self.prec = prec
        self.exact_zero = exact_zero
        self.exact_tie = exact_tie
        self._powers: dict[int, list[BallComplex]] = {}
        self._lock = threading.Lock()

    def _powers_at(self, bits: int, n: int) -> list[BallComplex]:
        with self._lock:
            ps = self._powers.get(bits)
        if ps is None:
            prec = Precision(bits)
            xi = self.source(bits)
            ps = [balls.lift(balls.real_from_int(1, prec))]
            for _ in range(n):
                ps.append(balls.mul(ps[-1], xi, prec))
            with self._lock:
                ps = self._powers.setdefault(bits, ps)
        if len(ps) <= n:
            prec = Precision(bits)
            xi = self.source(bits)
            with self._lock:
                while len(ps) <= n:
                    ps.append(balls.mul(ps[-1], xi, prec))
        return ps

    def _value(self, coeffs, bits: int) -> BallReal:
        prec = Precision(bits)
        ps = self._powers_at(bits, len(coeffs) - 1)
        acc = BallComplex.zero()
        for k, c in enumerate(coeffs):
            if c == 0:
                continue
            term = balls.mul(balls.lift(balls.real_from_int(c, prec)), ps[k], prec)
            acc = balls.add(acc, term, prec)
        return balls.abs_ball(acc, prec)

    def is_zero(self, coeffs) -> bool:
        return self.exact_zero(coeffs)

    def record(self, coeffs):
        return coeffs

    def cmp(self, c1, c2) -> int:
        bits = max(64, self.prec.bits)
        tie_checked = False
        while bits <= self.prec.cap:
            v1 = self._value(c1, bits)
            v2 = self._value(c2, bits)
            if v1.upper_fraction() < v2.lower_fraction():
                return -1
            if v2.upper_fraction() < v1.lower_fraction():
                return 1
            if bits >= _TIE_CHECK_BITS and self.exact_tie and not tie_checked:
                if self.exact_tie(c1, c2):
                    return 0
                tie_checked = True  # provably distinct: keep climbing
            bits *= 2
        raise PrecisionCapExceeded(
            f"could not order |P(xi)| for {format_poly(c1)} and {format_poly(c2)} "
            f"below {self.prec.cap} bits")

    def final_ball(self, rec) -> BallReal:
        bits = 128
        target = Fraction(1, 2 ** 96)
        while bits <= self.prec.cap:
            v = self._value(rec, bits)
            if not v.contains_zero() and v.rad_fraction() <= target:
                return v
            bits *= 2
        raise PrecisionCapExceeded("final enclosure did not settle")

    def zero_lower_bound(self, coeffs) -> Fraction:
        return self.final_ball(coeffs).lower_fraction()


class _GeneralAlgebraicXi(_LadderXi):
    """Algebraic xi of degree >= 3 with a non-real value: ladder plus a
    symbolic last resort for exact |value| ties."""

    def __init__(self, a: AlgebraicNumber, prec: Precision):
        self.a = a
        self.minpoly_frac = tuple(Fraction(c) for c in a.minpoly.coeffs)
        self._sym_roots_cache = None
        self._sym_lock = threading.Lock()
        super().__init__(
            source=lambda bits: algebraic_approx(a, Fraction(1, 2 ** bits)),
            prec=prec,
            exact_zero=lambda coeffs: not _residue(coeffs, self.minpoly_frac),
            exact_tie=self._tie,
        )

    def _sym_pair(self):
        with self._sym_lock:
            if self._sym_roots_cache is not None:
                return self._sym_roots_cache
            x = sympy.Symbol("x")
            p = sympy.Poly(list(reversed(self.a.minpoly.coeffs)), x)
            ball = algebraic_approx(self.a, Fraction(1, 2 ** 80))
            slack = Fraction(1, 10 ** 18)

            def matches(root, re_lo, re_hi, im_lo, im_hi):
                v = root.evalf(30)
                vr = Fraction(str(sympy.re(v)))
                vi = Fraction(str(sympy.im(v)))
                return (re_lo - slack <= vr <= re_hi + slack
                        and im_lo - slack <= vi <= im_hi + slack)

            re_lo, re_hi = ball.re.lower_fraction(), ball.re.upper_fraction()
            im_lo, im_hi = ball.im.lower_fraction(), ball.im.upper_fraction()
            roots = [sympy.CRootOf(p, j) for j in range(self.a.degree)]
            mine = [r for r in roots if matches(r, re_lo, re_hi, im_lo, im_hi)]
            conj = [r for r in roots if matches(r, re_lo, re_hi, -im_hi, -im_lo)]
            assert len(mine) == 1 and len(conj) == 1
            self._sym_roots_cache = (mine[0], conj[0])
            return self._sym_roots_cache

    def _tie(self, c1, c2) -> bool:
        xi, xic = self._sym_pair()

        def v(coeffs, at):
            return sum(c * at ** k for k, c in enumerate(coeffs) if c)

        expr = sympy.expand(v(c1, xi) * v(c1, xic) - v(c2, xi) * v(c2, xic))
        x = sympy.Symbol("x")
        mp = sympy.minimal_polynomial(expr, x)
        return sympy.Poly(mp, x).all_coeffs() == [1, 0]

    def final_ball(self, rec) -> BallReal:
        fresh = _fresh_copy(self.a)
        inner = _LadderXi(
            source=lambda bits: algebraic_approx(fresh, Fraction(1, 2 ** bits)),
            prec=self.prec, exact_zero=self.exact_zero)
        return inner.final_ball(rec)


class _FixedBallXi:
    """xi supplied as a plain ball: one pass, no refinement possible."""

    def __init__(self, xi: BallComplex, prec: Precision):
        self.xi = xi
        self.bits = max(128, prec.bits)
        self._powers: list[BallComplex] = []
        self._lock = threading.Lock()

    def _powers_at(self, n: int) -> list[BallComplex]:
        prec = Precision(self.bits)
        with self._lock:
            if not self._powers:
                self._powers.append(balls.lift(balls.real_from_int(1, prec)))
            while len(self._powers) <= n:
                self._powers.append(balls.mul(self._powers[-1], self.xi, prec))
            return self._powers

    def value(self, coeffs) -> BallReal:
        prec = Precision(self.bits)
        ps = self._powers_at(len(coeffs) - 1)
        acc = BallComplex.zero()
        for k, c in enumerate(coeffs):
            if c == 0:
                continue
            term = balls.mul(balls.lift(balls.real_from_int(c, prec)), ps[k], prec)
            acc = balls.add(acc, term, prec)
        return balls.abs_ball(acc, prec)

    def is_zero(self, coeffs) -> bool:
        v = self.value(coeffs)
        if v.is_exact() and v.mid == 0:
            return True  # the input ball is exact and the value is exactly 0
        if v.contains_zero():
            raise UndecidableZero(
                f"value of {format_poly(coeffs)} straddles zero and the "
                f"supplied ball cannot be refined")
        return False

    def record(self, coeffs):
        return self.value(coeffs)

    def cmp(self, a: BallReal, b: BallReal) -> int:
        # deterministic order on upper bounds; exact values may overlap
        au, bu = a.upper(), b.upper()
        if au < bu:
            return -1
        if bu < au:
            return 1
        return 0

    def agg_update(self, agg, rec: BallReal):
        lo = rec.lower()
        return lo if agg is None or lo < agg else agg

    def agg_merge(self, a, b):
        if a is None:
            return b
        if b is None:
            return a
        return a if a < b else b

    def final_ball(self, rec: BallReal, min_lower) -> BallReal:
        return balls.ball_from_endpoints(min_lower, rec.upper(), Precision(128))

    def zero_lower_bound(self, coeffs) -> Fraction:
        return self.value(coeffs).lower_fraction()


# ---------------------------------------------------------------------------
# classification and the search itself

def _as_backend(xi, prec: Precision):
    if isinstance(xi, int):
        return _RationalXi(Fraction(xi))
    if isinstance(xi, Fraction):
        return _RationalXi(xi)
    if isinstance(xi, AlgebraicNumber):
        if xi.is_rational():
            return _RationalXi(xi.as_fraction())
        if xi.is_real():
            return _RealAlgebraicXi(xi, prec)
        if xi.degree == 2:
            return _QuadraticComplexXi(xi)
        return _GeneralAlgebraicXi(xi, prec)
    if isinstance(xi, str):
        if xi not in NAMED_CONSTANTS:
            raise ValueError(f"unknown constant {xi!r}; expected one of {NAMED_CONSTANTS}")
        from . import funcs
        sources = {
            "pi": lambda bits: balls.lift(balls.const_pi(Precision(bits))),
            "e": lambda bits: balls.lift(balls.const_e(Precision(bits))),
            "liouville": lambda bits: balls.lift(
                funcs.liouville_constant(Fraction(1, 2 ** bits))),
        }
        # only the zero polynomial vanishes at a transcendental point,
        # and the zero tuple is excluded before the backend is asked
        return _LadderXi(sources[xi], prec, exact_zero=lambda coeffs: False)
    if isinstance(xi, BallReal):
        return _FixedBallXi(balls.lift(xi), prec)
    if isinstance(xi, BallComplex):
        return _FixedBallXi(xi, prec)
    raise TypeError(f"unsupported xi kind: {type(xi).__name__}")


def _scan_slab(backend, n, H, d, lead):
    best = None  # (key, coeffs, record)
    zeros = 0
    count = 0
    agg = None
    has_agg = hasattr(backend, "agg_update")
    for cand in _slab_candidates(n, H, d, lead):
        count += 1
        if backend.is_zero(cand):
            zeros += 1
            continue
        rec = backend.record(cand)
        if has_agg:
            agg = backend.agg_update(agg, rec)
        if best is None:
            best = (_argmin_key(cand), cand, rec)
            continue
        c = backend.cmp(rec, best[2])
        if c < 0:
            best = (_argmin_key(cand), cand, rec)
        elif c == 0:
            key = _argmin_key(cand)
            if key < best[0]:
                best = (key, cand, rec)
    return best, zeros, count, agg


def _exponent_ball(omega: BallReal, n: int, H: int) -> BallReal:
    prec = Precision(_FINAL_BITS)
    ln_h = balls.real_log(balls.real_from_int(H, prec), prec)
    den = balls.real_mul(balls.real_from_int(n, prec), ln_h, prec)
    num = balls.real_neg(balls.real_log(omega, prec))
    return balls.real_div(num, den, prec)


def omega_search(q: OmegaQuery) -> OmegaResult:
    """Certified minimum of |P(xi)| over the (n, H) candidate space."""
    if q.n < 1 or q.H < 1:
        raise ValueError("need n >= 1 and H >= 1")
    if q.workers < 1:
        raise ValueError("need workers >= 1")
    total = scan_size(q.n, q.H)
    if total > q.budget:
        raise BudgetExceeded(
            f"candidate space has {total} sign classes, budget is {q.budget}")

    backend = _as_backend(q.xi, q.prec)
    slabs = [(d, lead) for d in range(q.n + 1) for lead in range(1, q.H + 1)]

    def run(slab):
        d, lead = slab
        return _scan_slab(backend, q.n, q.H, d, lead)

    if q.workers == 1:
        outcomes = [run(s) for s in slabs]
    else:
        with ThreadPoolExecutor(max_workers=q.workers) as pool:
            outcomes = list(pool.map(run, slabs))

    zeros = 1  # the zero tuple
    scanned = 1
    best = None
    agg = None
    for slab_best, slab_zeros, slab_count, slab_agg in outcomes:
        zeros += slab_zeros
        scanned += slab_count
        if hasattr(backend, "agg_merge"):
            agg = backend.agg_merge(agg, slab_agg)
        if slab_best is None:
            continue
        if best is None:
            best = slab_best
            continue
        c = backend.cmp(slab_best[2], best[2])
        if c < 0 or (c == 0 and slab_best[0] < best[0]):
            best = slab_best
    assert scanned == total
    if best is None:
        # cannot happen: the constant polynomial 1 never vanishes
        raise AssertionError("no nonzero candidate found")

    if isinstance(backend, _FixedBallXi):
        omega = backend.final_ball(best[2], agg)
    else:
        omega = backend.final_ball(best[2])
    exponent = _exponent_ball(omega, q.n, q.H) if q.H >= 2 else None
    return OmegaResult(
        omega_min=omega,
        exponent=exponent,
        argmin=IntPolynomial.make(best[1]),
        zeros_excluded=zeros,
        candidates_scanned=scanned,
    )


def omega(xi, n: int, H: int, **kwargs) -> OmegaResult:
    return omega_search(OmegaQuery(xi=xi, n=n, H=H, **kwargs))


def zero_detect(p: IntPolynomial, xi, prec: Precision = Precision(64)) -> ZeroCheck:
    """Decide P(xi) = 0: exactly for algebraic xi, by refinement with a
    precision cap otherwise."""
    if p.degree < 0:
        return ZeroCheck(is_zero=True, lower_bound=None)
    backend = _as_backend(xi, prec)
    if backend.is_zero(p.coeffs):
        return ZeroCheck(is_zero=True, lower_bound=None)
    return ZeroCheck(is_zero=False, lower_bound=backend.zero_lower_bound(p.coeffs))


def omega_trajectory(xi, n: int, H_list) -> list[tuple[int, BallReal, BallReal]]:
    """omega_search at each H in ascending order; xi state (root
    refinements, power caches) is shared across the points."""
    hs = list(H_list)
    if hs != sorted(hs) or any(h < 2 for h in hs):
        raise ValueError("H_list must be ascending integers >= 2")
    out = []
    for h in hs:
        res = omega_search(OmegaQuery(xi=xi, n=n, H=h))
        out.append((h, res.omega_min, res.exponent))
    return out
