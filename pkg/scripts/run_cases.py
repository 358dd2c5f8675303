#!/usr/bin/env python3
"""Run the full pipeline over every bundled case fixture.

Artifacts land in <fixtures>/case_<name>/out/.  A quick way to eyeball
the SVGs and reports after changing anything in the pipeline.
"""

import argparse
import json
import sys
from pathlib import Path

from distrack.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--fixtures", default=Path(__file__).resolve().parents[1] / "fixtures")
    args = parser.parse_args()
    root = Path(args.fixtures)
    failures = 0
    for config in sorted(root.glob("case_*/config.json")):
        case_dir = config.parent
        rc = cli_main(["--log-level", "WARNING", "pipeline", "--config", str(config)])
        if rc != 0:
            print(f"{case_dir.name}: pipeline failed with exit {rc}")
            failures += 1
            continue
        report = json.loads((case_dir / "out" / "report.json").read_text())
        expected = json.loads((case_dir / "expected_report.json").read_text())
        status = "ok" if report == expected else "REPORT MISMATCH"
        print(f"{case_dir.name}: {report['totals']['posts']} posts, {status}")
        if report != expected:
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
