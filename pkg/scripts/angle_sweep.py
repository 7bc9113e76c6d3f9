#!/usr/bin/env python3
"""Sweep the rotation parameter of the slant-alpha fixture and report the
measured slant angle at each value, confirming theta = alpha across the
whole admissible range and the degeneration at the endpoints.

Usage:
    python scripts/angle_sweep.py [--steps N] [--points N]
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from slantlab.config import Tolerances
from slantlab.fixtures import load_fixture
from slantlab.sampling import halton_points
from slantlab.submersion import slant_scan


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=11)
    parser.add_argument("--points", type=int, default=40)
    parser.add_argument("--dirs", type=int, default=8)
    args = parser.parse_args(argv)

    tol = Tolerances()
    print(f"{'alpha':>10s} {'measured':>12s} {'|error|':>10s} {'spread':>10s}  class")
    for alpha in np.linspace(0.0, math.pi / 2, args.steps):
        manifest = load_fixture("slant-alpha",
                                {"params": {"alpha": float(alpha)},
                                 "points": args.points})
        inst = manifest.instance()
        pts = halton_points(inst.region, args.points, manifest.seed)
        frames = [inst.frame(p) for p in pts]
        report = slant_scan(frames, args.dirs, np.random.default_rng(0), tol)
        print(f"{alpha:10.6f} {report.angle:12.9f} "
              f"{abs(report.angle - alpha):10.2e} {report.deviation:10.2e}  "
              f"{report.classification}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
