#!/usr/bin/env python3
"""Regenerate the committed golden artifacts.

Currently: tests/golden/qbar_1000.jsonl, the first 1000 enumerated
algebraic numbers with 2^-64 enclosures.  Output is deterministic, so a
regeneration on an unchanged tree must leave the file byte-identical.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from mahlertools.qbar import write_cache


def main() -> None:
    root = pathlib.Path(__file__).resolve().parents[1]
    golden = root / "tests" / "golden"
    golden.mkdir(parents=True, exist_ok=True)
    target = golden / "qbar_1000.jsonl"
    write_cache(target, 1000)
    print(f"wrote {target} ({target.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
