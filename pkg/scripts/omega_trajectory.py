#!/usr/bin/env python3
"""Trace the minimum |P(xi)| and its height exponent as the height
budget grows.

For an algebraic xi of degree d, the exponent settles near min(n, d-1)
once H is large enough; for the transcendental constants it can keep
drifting.  This prints one row per height so the drift is visible.

Examples:
    python3 scripts/omega_trajectory.py --xi e --n 1 --h-max 20
    python3 scripts/omega_trajectory.py --xi alg:-2,0,1:1 --n 2 --h-max 12
    python3 scripts/omega_trajectory.py --xi rat:1/3 --n 1 --h-max 30
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from mahlertools.balls import decimal_str
from mahlertools.cli import _parse_xi
from mahlertools.mahler import omega_trajectory


def fmt(ball, digits=12) -> str:
    s = decimal_str(ball.mid)
    head, dot, tail = s.partition(".")
    return head + dot + tail[:digits]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--xi", default="e",
                    help="rat:p/q, alg:<coeffs>:<root_index>, pi, e, "
                         "or liouville (default e)")
    ap.add_argument("--n", type=int, default=1, help="max degree (default 1)")
    ap.add_argument("--h-max", type=int, default=20,
                    help="largest height to scan (default 20)")
    args = ap.parse_args()

    xi = _parse_xi(args.xi)
    rows = omega_trajectory(xi, args.n, range(2, args.h_max + 1))

    print(f"# xi={args.xi}  n={args.n}")
    print(f"{'H':>4}  {'min |P(xi)|':<16}  exponent")
    for h, omega, exponent in rows:
        print(f"{h:>4}  {fmt(omega, 14):<16}  {fmt(exponent)}")


if __name__ == "__main__":
    main()
