"""Batch command line: one subcommand per process, one machine-readable
record on stdout.

Output contract:

 *  every measured quantity is a decimal string pair [mid, rad] holding
    the exact digits of the dyadic values, never a binary float;
 *  identical command lines produce byte-identical output (fixed seeds,
    deterministic enumeration, deterministic reduction);
 *  exit codes: 0 ok, 2 usage or parse error, 3 candidate budget or
    enumeration cap, 4 precision cap or undecidable comparison,
    5 property failure (a check suite trial failed, or a cache file
    disagrees with recomputation).

Complex literals are `a+bi` / `a-bi` where each component is an exact
decimal ("0.25") or a rational ("3/7"); pure-real ("2"), pure-imaginary
("3/5i", "-i") and scientific ("1e-3") forms parse too.  The u
subcommand additionally takes z as `alpha:k`, the k-th enumerated
algebraic number, which engages the exact truncation path.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from fractions import Fraction

from . import balls, funcs, qbar
from .balls import BallComplex, BallReal, Precision, decimal_str
from .errors import (
    BudgetExceeded,
    CapExceeded,
    DivisorContainsZero,
    IsolationFailure,
    MahlerToolsError,
    NotIrreducible,
    PrecisionCapExceeded,
    Undecidable,
    UndecidableZero,
    ZeroPolynomialError,
)
from .intpoly import (
    IntPolynomial,
    length_bound_holds,
    omitted_product_combination,
    expand_roots,
    sigma,
)
from .interpseries import u_bound_check, u_eval
from .mahler import DEFAULT_BUDGET, OmegaQuery, omega_search
from .qbar import algebraic_number, nth_algebraic


class UsageError(Exception):
    pass


class PropertyFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# literal parsing

def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"not a number: {text!r}") from e


def _parse_positive_fraction(text: str) -> Fraction:
    f = _parse_fraction(text)
    if f <= 0:
        raise UsageError(f"must be positive: {text!r}")
    return f


def _parse_complex(text: str) -> tuple[Fraction, Fraction]:
    """Grammar a+bi / a-bi, components decimal or rational; also bare
    real and bare imaginary forms."""
    s = text.strip().replace(" ", "")
    if not s:
        raise UsageError("empty literal")
    if not s.endswith(("i", "I")):
        return (_parse_fraction(s), Fraction(0))
    body = s[:-1]
    # the split sign is the last +/- that is neither the leading sign
    # nor part of an exponent like 1e-3
    for idx in range(len(body) - 1, 0, -1):
        if body[idx] in "+-" and body[idx - 1] not in "eE":
            re_part, im_part = body[:idx], body[idx:]
            break
    else:
        re_part, im_part = "", body
    if im_part in ("", "+"):
        im = Fraction(1)
    elif im_part == "-":
        im = Fraction(-1)
    else:
        im = _parse_fraction(im_part)
    re = _parse_fraction(re_part) if re_part else Fraction(0)
    return (re, im)


def _parse_xi(text: str):
    if text in ("pi", "e", "liouville"):
        return text
    if text.startswith("rat:"):
        return _parse_fraction(text[4:])
    if text.startswith("alg:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError("expected alg:<coeffs>:<root_index>")
        try:
            coeffs = tuple(int(c) for c in parts[1].split(","))
            root_index = int(parts[2])
        except ValueError as e:
            raise UsageError(f"bad algebraic spec: {text!r}") from e
        return algebraic_number(coeffs, root_index)
    raise UsageError(
        f"unknown point spec {text!r}: use rat:p/q, alg:<coeffs>:<root_index>, "
        "pi, e, or liouville")


# ---------------------------------------------------------------------------
# serialization

def _pair(b: BallReal) -> list[str]:
    return [decimal_str(b.mid), decimal_str(b.rad)]


def _complex_pairs(b: BallComplex) -> dict:
    return {"re": _pair(b.re), "im": _pair(b.im)}


def _exact_decimal(f: Fraction) -> str:
    """Exact decimal digits; only denominators of the form 2^a 5^b."""
    if f == 0:
        return "0"
    den = f.denominator
    a = 0
    while den % 2 == 0:
        den //= 2
        a += 1
    b = 0
    while den % 5 == 0:
        den //= 5
        b += 1
    if den != 1:
        raise ValueError(f"{f} has no finite decimal form")
    k = max(a, b)
    digits = str(abs(f.numerator) * 2 ** (k - a) * 5 ** (k - b))
    sign = "-" if f.numerator < 0 else ""
    if k == 0:
        return sign + digits
    if len(digits) <= k:
        digits = "0" * (k + 1 - len(digits)) + digits
    ip, fp = digits[:-k], digits[-k:].rstrip("0")
    return sign + ip + ("." + fp if fp else "")


def _upper_decimal(f: Fraction) -> str:
    """Decimal string >= f: exact digits when they exist, otherwise a
    96-bit dyadic upper bound."""
    if f == 0:
        return "0"
    try:
        return _exact_decimal(f)
    except ValueError:
        return decimal_str(balls.real_from_fraction(f, Precision(96)).upper())


def _emit(record: dict, fmt: str) -> None:
    if fmt == "csv":
        header, rows = _csv_rows(record["command"], record["result"])
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    else:
        print(json.dumps(record, indent=2))


def _flat(result: dict) -> tuple[list[str], list[str]]:
    """One CSV row: [mid, rad] pairs become _mid/_rad column pairs,
    nested dicts become dotted names, lists of integers join by space."""
    header: list[str] = []
    row: list[str] = []

    def walk(prefix: str, val) -> None:
        if isinstance(val, dict):
            for k, v in val.items():
                walk(f"{prefix}_{k}" if prefix else k, v)
        elif (isinstance(val, list) and len(val) == 2
              and all(isinstance(x, str) for x in val)):
            header.extend([f"{prefix}_mid", f"{prefix}_rad"])
            row.extend(val)
        elif isinstance(val, list):
            header.append(prefix)
            row.append(" ".join(str(x) for x in val))
        elif val is None:
            header.extend([f"{prefix}_mid", f"{prefix}_rad"])
            row.extend(["", ""])
        else:
            header.append(prefix)
            row.append(str(val))

    walk("", result)
    return header, row


def _csv_rows(command: str, result: dict) -> tuple[list[str], list[list[str]]]:
    if command == "qbar":
        header = ["k", "coeffs", "root_index", "approx_re", "approx_im", "rad"]
        rows = [[str(e["k"]), " ".join(str(c) for c in e["coeffs"]),
                 str(e["root_index"]), e["approx_re"], e["approx_im"], e["rad"]]
                for e in result["entries"]]
        return header, rows
    header, row = _flat(result)
    return header, [row]


# ---------------------------------------------------------------------------
# subcommands

def cmd_qbar(args) -> int:
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    enum = qbar.Enumeration()
    entries = [qbar._record_for(enum, k, qbar.CACHE_RADIUS)
               for k in range(1, args.count + 1)]
    if args.cache:
        import os
        if os.path.exists(args.cache):
            records = qbar.read_cache(args.cache)
            if len(records) < args.count:
                qbar.write_cache(args.cache, args.count)
            else:
                for rec, fresh in zip(records, entries):
                    stored = {"k": rec.k, "coeffs": list(rec.coeffs),
                              "root_index": rec.root_index,
                              "approx_re": rec.approx_re,
                              "approx_im": rec.approx_im, "rad": rec.rad}
                    if stored != fresh:
                        raise PropertyFailure(
                            f"cache entry {rec.k} disagrees with recomputation")
        else:
            qbar.write_cache(args.cache, args.count)
    record = {
        "command": "qbar",
        "inputs": {"count": args.count},
        "precision": {"radius": _upper_decimal(qbar.CACHE_RADIUS)},
        "result": {"enumeration_id": qbar.ENUMERATION_ID, "entries": entries},
    }
    _emit(record, args.format)
    return 0


def _parse_z(text: str):
    if text.startswith("alpha:"):
        try:
            k = int(text[6:])
        except ValueError as e:
            raise UsageError(f"bad index in {text!r}") from e
        if k < 1:
            raise UsageError("alpha index must be >= 1")
        return nth_algebraic(k)
    return _parse_complex(text)


def cmd_u(args) -> int:
    w = _parse_complex(args.w)
    z = _parse_z(args.z)
    radius = _parse_positive_fraction(args.radius)
    ev = u_eval(w, z, radius)
    record = {
        "command": "u",
        "inputs": {"w": args.w, "z": args.z, "radius": args.radius},
        "precision": {"target_radius": _upper_decimal(radius)},
        "result": {
            "value": _complex_pairs(ev.value),
            "N": ev.truncation,
            "tail_bound": _upper_decimal(ev.tail_bound),
            "enumeration_id": ev.enumeration_id,
        },
    }
    _emit(record, args.format)
    return 0


def cmd_omega(args) -> int:
    xi = _parse_xi(args.xi)
    query = OmegaQuery(xi=xi, n=args.n, H=args.H, budget=args.budget,
                       workers=args.workers)
    res = omega_search(query)
    record = {
        "command": "omega",
        "inputs": {"xi": args.xi, "n": args.n, "H": args.H,
                   "budget": args.budget, "workers": args.workers},
        "precision": {"bits": query.prec.bits},
        "result": {
            "omega": _pair(res.omega_min),
            "exponent": _pair(res.exponent) if res.exponent is not None else None,
            "argmin": list(res.argmin.coeffs),
            "zeros_excluded": res.zeros_excluded,
            "scanned": res.candidates_scanned,
        },
    }
    _emit(record, args.format)
    return 0


def cmd_liouville(args) -> int:
    if args.witness is not None:
        if args.witness < 1:
            raise UsageError("--witness must be >= 1")
        w = funcs.liouville_witness(args.witness)
        result = {
            "n": w.n,
            "m": w.m,
            "p": str(w.p),
            "q": str(w.q),
            "gap_lo": _exact_decimal(w.gap_lo),
            "gap_hi": _exact_decimal(w.gap_hi),
            "bound": _exact_decimal(Fraction(1, w.q ** w.n)),
            "certified": w.certifies(),
        }
        record = {
            "command": "liouville",
            "inputs": {"witness": args.witness},
            "precision": {},
            "result": result,
        }
    else:
        radius = _parse_positive_fraction(args.radius)
        ball = funcs.liouville_constant(radius)
        record = {
            "command": "liouville",
            "inputs": {"radius": args.radius},
            "precision": {"target_radius": _upper_decimal(radius)},
            "result": {"value": _pair(ball)},
        }
    _emit(record, args.format)
    return 0


_FN = {
    "f": funcs.eval_exp_sum,
    "g": funcs.eval_scaled_exp,
    "h": funcs.eval_exp_plus_liouville,
    "ee": funcs.eval_double_exp,
}


def cmd_fn(args) -> int:
    fn = _FN[args.name]
    re, im = _parse_complex(args.z)
    radius = _parse_positive_fraction(args.radius)
    bits = max(64, _target_bits(radius) + 32)
    while True:
        prec = Precision(bits)
        zb = balls.complex_from_fractions(re, im, prec)
        v = fn(zb, prec)
        if (v.re.rad_fraction() <= radius and v.im.rad_fraction() <= radius):
            break
        bits = Precision(bits).double().bits
    record = {
        "command": "fn",
        "inputs": {"name": args.name, "z": args.z, "radius": args.radius},
        "precision": {"bits": bits},
        "result": {"value": _complex_pairs(v)},
    }
    _emit(record, args.format)
    return 0


def _target_bits(radius: Fraction) -> int:
    return max(1, radius.denominator.bit_length() - radius.numerator.bit_length())


# ---------------------------------------------------------------------------
# property suites

def _dyadic(rng: random.Random, lo: int, hi: int, den: int = 8) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


def _trial_length_bound(rng: random.Random) -> bool:
    deg = rng.randint(0, 8)
    coeffs = tuple(rng.randint(-100, 100) for _ in range(deg + 1))
    p = IntPolynomial.make(coeffs)
    z = balls.complex_from_fractions(_dyadic(rng, -7, 7), _dyadic(rng, -7, 7),
                                     Precision(64))
    return length_bound_holds(p, z)


def _trial_nonnull(rng: random.Random) -> bool:
    n = rng.randint(1, 6)
    a = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 9))
              for _ in range(n + 1))
    combo = omitted_product_combination(a)
    return combo.is_zero() == all(x == 0 for x in a)


def _trial_symmetric(rng: random.Random) -> bool:
    n = rng.randint(1, 6)
    xs = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(n)]
    p = expand_roots(xs)
    return all(p.coeffs[n - k] == (-1) ** k * sigma(xs, k)
               for k in range(n + 1))


def _trial_baker(rng: random.Random) -> bool:
    z = balls.complex_from_fractions(_dyadic(rng, -5, 5), _dyadic(rng, -5, 5),
                                     Precision(200))
    res = funcs.baker_identity_residual(z, Precision(200))
    return res.upper_fraction() <= Fraction(1, 10 ** 40)


def _trial_ubound(rng: random.Random) -> bool:
    w = (_dyadic(rng, -3, 3), _dyadic(rng, -3, 3))
    z = (_dyadic(rng, -3, 3), _dyadic(rng, -3, 3))
    return u_bound_check(w, z)


_SUITES = {
    "lemma7": _trial_length_bound,
    "lemma6": _trial_nonnull,
    "symmetric": _trial_symmetric,
    "baker": _trial_baker,
    "ubound": _trial_ubound,
}


def cmd_check(args) -> int:
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    trial = _SUITES[args.suite]
    rng = random.Random(args.seed)
    passed = 0
    for _ in range(args.count):
        if trial(rng):
            passed += 1
    failed = args.count - passed
    record = {
        "command": "check",
        "inputs": {"suite": args.suite, "seed": args.seed, "count": args.count},
        "precision": {},
        "result": {"passed": passed, "failed": failed, "total": args.count},
    }
    _emit(record, args.format)
    return 0 if failed == 0 else 5


# ---------------------------------------------------------------------------
# driver

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mahlertools",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qbar", help="list the enumeration of algebraic numbers")
    p.add_argument("--count", type=int, required=True,
                   help="how many entries, starting at index 1")
    p.add_argument("--cache", metavar="PATH",
                   help="JSON-lines cache file: verified against "
                        "recomputation when present, written when absent")
    p.set_defaults(run=cmd_qbar)

    p = sub.add_parser("u", help="evaluate the interpolation series")
    p.add_argument("--w", required=True, help="base point, complex literal")
    p.add_argument("--z", required=True,
                   help="argument: complex literal or alpha:k for the "
                        "k-th enumerated algebraic number")
    p.add_argument("--radius", required=True,
                   help="target radius for both components, e.g. 1e-20")
    p.set_defaults(run=cmd_u)

    p = sub.add_parser("omega",
                       help="minimum of |P(xi)| over bounded polynomials")
    p.add_argument("--xi", required=True,
                   help="point: rat:p/q, alg:<coeffs>:<root_index> with "
                        "ascending comma-separated coefficients, pi, e, "
                        "or liouville")
    p.add_argument("--n", type=int, required=True, help="max degree")
    p.add_argument("--H", type=int, required=True, help="max |coefficient|")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help="candidate count limit (default %(default)s)")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel slab scanners; the result is identical "
                        "for any worker count")
    p.set_defaults(run=cmd_omega)

    p = sub.add_parser("liouville", help="the constant sum 10^-n!")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--radius", help="enclose the constant to this radius")
    g.add_argument("--witness", type=int,
                   help="rational p/q certifying 0 < value - p/q < q^-n")
    p.set_defaults(run=cmd_liouville)

    p = sub.add_parser("fn", help="evaluate one of the named functions")
    p.add_argument("--name", required=True, choices=sorted(_FN),
                   help="f: e^z + e^(1+z); g: e^(1+pi z); "
                        "h: e^z plus the liouville constant; ee: e^(e^z)")
    p.add_argument("--z", required=True, help="complex literal")
    p.add_argument("--radius", required=True, help="target radius")
    p.set_defaults(run=cmd_fn)

    p = sub.add_parser("check", help="run a seeded property suite")
    p.add_argument("--suite", required=True, choices=sorted(_SUITES),
                   help="lemma7: polynomial length bound; lemma6: "
                        "omitted-product combination is null only at zero; "
                        "symmetric: expanded roots match signed symmetric "
                        "functions; baker: exponential identity residual; "
                        "ubound: certified series growth bound")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.set_defaults(run=cmd_check)

    for sp in sub.choices.values():
        sp.add_argument("--format", choices=("json", "csv"), default="json",
                        help="output format (default json)")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.run(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (NotIrreducible, ZeroPolynomialError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (BudgetExceeded, CapExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (PrecisionCapExceeded, IsolationFailure, UndecidableZero,
            Undecidable, DivisorContainsZero) as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except PropertyFailure as e:
        print(f"error: {e}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
