#!/usr/bin/env python3
"""Run the full check suite on every built-in fixture and summarize.

Usage:
    python scripts/run_all_fixtures.py [--points N] [--out-dir DIR]

With --out-dir, one JSON report per fixture is written there.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from slantlab.fixtures import FIXTURE_NAMES, load_fixture
from slantlab.runner import run_suite

# negative fixtures are supposed to fail their suites
EXPECTED_EXIT = {name: 0 for name in FIXTURE_NAMES}
EXPECTED_EXIT["curved-non-kahler"] = 1
EXPECTED_EXIT["rank-deficient"] = 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=100)
    parser.add_argument("--out-dir", type=Path, default=None)
    args = parser.parse_args(argv)

    if args.out_dir:
        args.out_dir.mkdir(parents=True, exist_ok=True)

    surprises = 0
    rows = []
    for name in FIXTURE_NAMES:
        manifest = load_fixture(name, {"points": args.points})
        start = time.perf_counter()
        report = run_suite(manifest)
        elapsed = time.perf_counter() - start
        counts = report.counts()
        classification = report.metadata.get("classification", "-")
        as_expected = report.exit_code == EXPECTED_EXIT[name]
        surprises += not as_expected
        rows.append((name, classification, counts["pass"], counts["fail"],
                     counts["hypothesis-not-met"], counts["skipped"], elapsed,
                     "ok" if as_expected else "UNEXPECTED"))
        if args.out_dir:
            (args.out_dir / f"{name}.json").write_text(report.to_json())

    header = (f"{'fixture':22s} {'class':14s} {'pass':>4s} {'fail':>4s} "
              f"{'hyp':>4s} {'skip':>4s} {'time':>7s}  outcome")
    print(header)
    print("-" * len(header))
    for name, cls, np_, nf, nh, ns, dt, verdict in rows:
        print(f"{name:22s} {cls:14s} {np_:4d} {nf:4d} {nh:4d} {ns:4d} "
              f"{dt:6.1f}s  {verdict}")
    print("-" * len(header))
    print("(negative fixtures are expected to report failures; 'ok' means "
          "the exit code matched expectation)")
    return 1 if surprises else 0


if __name__ == "__main__":
    sys.exit(main())
