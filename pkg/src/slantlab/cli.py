"""Command-line interface.

    slantlab run <manifest.toml> [options]
    slantlab run --fixture <name> [options]
    slantlab fixtures

Exit codes: 0 when every executed check passes (hypothesis-not-met and
skipped do not fail a run), 1 when any check fails, 2 on manifest or
expression errors.
"""

from __future__ import annotations

import argparse
import sys

from .expressions import ParseError
from .fixtures import FIXTURE_NAMES, list_fixtures, load_fixture
from .manifest import ManifestError, load_manifest, parse_param_value
from .runner import run_suite


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slantlab",
        description="Verify slant-submersion identities on chart-level instances.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the check suite on an instance")
    run_p.add_argument("manifest", nargs="?", help="path to a manifest TOML file")
    run_p.add_argument("--fixture", choices=FIXTURE_NAMES,
                       help="run a built-in fixture instead of a manifest file")
    run_p.add_argument("--points", type=int, help="number of sample points")
    run_p.add_argument("--dirs", type=int, help="direction draws per point")
    run_p.add_argument("--seed", type=int, help="sampling seed override")
    run_p.add_argument("--format", choices=("text", "json"), dest="format_")
    run_p.add_argument("--out", help="write the report to this path")
    run_p.add_argument("--param", action="append", default=[],
                       metavar="NAME=VALUE", help="override a declared parameter")
    run_p.add_argument("--tol-alg", type=float, help="algebraic tolerance")
    run_p.add_argument("--tol-diff", type=float, help="differential tolerance")
    run_p.add_argument("--tol-angle", type=float, help="angle tolerance (radians)")

    sub.add_parser("fixtures", help="list built-in fixtures")
    return parser


def _parse_params(pairs) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ManifestError("param", f"expected NAME=VALUE, got {pair!r}")
        name, _, value = pair.partition("=")
        try:
            out[name.strip()] = parse_param_value(value.strip())
        except ParseError as err:
            raise ManifestError(f"param.{name}", str(err)) from err
    return out


def _cmd_run(args) -> int:
    overrides = {
        "points": args.points,
        "directions": args.dirs,
        "seed": args.seed,
        "format": args.format_,
        "out": args.out,
        "tol_alg": args.tol_alg,
        "tol_diff": args.tol_diff,
        "tol_angle": args.tol_angle,
        "params": _parse_params(args.param),
    }
    if args.fixture and args.manifest:
        raise ManifestError("run", "give either a manifest path or --fixture, not both")
    if args.fixture:
        manifest = load_fixture(args.fixture, overrides)
    elif args.manifest:
        manifest = load_manifest(args.manifest, overrides)
    else:
        raise ManifestError("run", "a manifest path or --fixture is required")

    report = run_suite(manifest)
    rendered = (report.to_json() if manifest.output_format == "json"
                else report.to_text())
    if manifest.output_path:
        with open(manifest.output_path, "w", encoding="utf-8") as fh:
            fh.write(rendered)
        print(f"report written to {manifest.output_path}")
    else:
        sys.stdout.write(rendered)
    return report.exit_code


def _cmd_fixtures() -> int:
    for name, description in list_fixtures():
        print(f"{name:22s} {description}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_fixtures()
    except (ManifestError, ParseError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
