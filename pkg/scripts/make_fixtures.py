#!/usr/bin/env python3
"""Regenerate the bundled case fixtures under fixtures/.

Usage: python scripts/make_fixtures.py [--seed 7] [--out fixtures]
"""

import argparse
from pathlib import Path

from distrack.fixtures import PROFILES, write_case_fixture


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", default=Path(__file__).resolve().parents[1] / "fixtures")
    args = parser.parse_args()
    for name in PROFILES:
        target = Path(args.out) / f"case_{name}"
        fixture = write_case_fixture(name, args.seed, target)
        totals = fixture.expected_report["totals"]
        print(f"{name}: {totals['originals']} originals, {totals['posts']} posts -> {target}")


if __name__ == "__main__":
    main()
