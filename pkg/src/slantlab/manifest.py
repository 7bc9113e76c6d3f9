"""Instance manifests: a small TOML dialect describing one submersion.

A manifest declares the total almost Hermitian chart (dimension, coordinate
names, metric entries, complex-structure entries), the base chart, the map
components, a sampling region, a seed, and optional tolerance/sampling
overrides.  All entries that vary over the chart are expression strings in
the declared coordinates and parameters.

Metric matrices may be given as the string "identity" or as a full array of
rows of expression strings; only the upper triangle is read (the stored
metric is mirrored from it), so symmetry holds by construction.  The
complex structure J is always a full array of rows, with the convention
(J X)^i = J[i][j] X^j.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field as dc_field

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .config import Region, Tolerances
from .expressions import ParseError, ScalarField
from .geometry import Chart, HermitianChart
from .submersion import SubmersionInstance

DEFAULT_POINTS = 100
DEFAULT_DIRECTIONS = 8

KNOWN_TOP_KEYS = {"name", "description", "seed", "total", "base", "map",
                  "params", "region", "sampling", "tolerances", "output",
                  "checks"}


class ManifestError(ValueError):
    """Invalid manifest content."""

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"manifest field {field!r}: {reason}")


@dataclass
class Manifest:
    name: str
    description: str
    seed: int
    total: HermitianChart
    base: Chart
    components: tuple
    region: Region
    params: dict
    tolerances: Tolerances
    points: int = DEFAULT_POINTS
    directions: int = DEFAULT_DIRECTIONS
    checks: tuple = ()
    output_format: str = "text"
    output_path: str = ""
    raw: dict = dc_field(default_factory=dict)

    def instance(self) -> SubmersionInstance:
        return SubmersionInstance(
            total=self.total, base=self.base, components=self.components,
            region=self.region, seed=self.seed, tol=self.tolerances,
            name=self.name)


def _expr_field(text, coords, params, where: str) -> ScalarField:
    if not isinstance(text, str):
        raise ManifestError(where, f"expected an expression string, got {text!r}")
    try:
        return ScalarField.from_text(text, coords, params)
    except ParseError as err:
        raise ManifestError(where, str(err)) from err


def _metric_rows(spec, coords, params, where: str):
    m = len(coords)
    if spec == "identity" or spec is None:
        return [[_expr_field("1" if i == j else "0", coords, params, where)
                 for j in range(m)] for i in range(m)]
    if not isinstance(spec, list) or len(spec) != m \
            or any(not isinstance(r, list) or len(r) != m for r in spec):
        raise ManifestError(where, f'expected "identity" or a {m}x{m} array of rows')
    return [[_expr_field(spec[i][j], coords, params, f"{where}[{i}][{j}]")
             for j in range(m)] for i in range(m)]


def _chart(block: dict, where: str, params: dict) -> Chart:
    try:
        dim = int(block["dim"])
        coords = list(block["coords"])
    except KeyError as err:
        raise ManifestError(where, f"missing key {err.args[0]!r}") from err
    if dim < 1:
        raise ManifestError(where, "dimension must be positive")
    if len(coords) != dim or len(set(coords)) != dim:
        raise ManifestError(where, "coords must be dim distinct names")
    rows = _metric_rows(block.get("metric"), coords, params, f"{where}.metric")
    return Chart.from_fields(coords, rows)


def parse_param_value(text: str) -> float:
    """Parse a CLI parameter value: a plain float or a constant expression."""
    field = ScalarField.from_text(text, coords=())
    return field.eval(())


def load_manifest_dict(data: dict, overrides: dict | None = None,
                       source: str = "<manifest>") -> Manifest:
    overrides = overrides or {}
    unknown = set(data) - KNOWN_TOP_KEYS
    if unknown:
        raise ManifestError(sorted(unknown)[0], "unknown manifest key")

    params = {str(k): float(v) for k, v in data.get("params", {}).items()}
    for key, value in overrides.get("params", {}).items():
        if key not in params:
            raise ManifestError(f"params.{key}", "override for undeclared parameter")
        params[key] = float(value)

    for section in ("total", "base", "map", "region"):
        if section not in data:
            raise ManifestError(section, "missing required section")

    total_block = data["total"]
    total_chart = _chart(total_block, "total", params)
    if total_chart.dim % 2:
        raise ManifestError("total.dim", "total dim must be even")
    j_spec = total_block.get("J")
    if j_spec is None:
        raise ManifestError("total.J", "missing complex structure entries")
    m = total_chart.dim
    if not isinstance(j_spec, list) or len(j_spec) != m \
            or any(not isinstance(r, list) or len(r) != m for r in j_spec):
        raise ManifestError("total.J", f"expected a {m}x{m} array of rows")
    j_rows = tuple(tuple(_expr_field(j_spec[i][k], total_chart.coords, params,
                                     f"total.J[{i}][{k}]")
                         for k in range(m)) for i in range(m))
    total = HermitianChart(total_chart, j_rows)

    base = _chart(data["base"], "base", params)
    if base.dim >= total.dim:
        raise ManifestError("base.dim", "base dim must be smaller than total dim")

    comp_spec = data["map"].get("components")
    if not isinstance(comp_spec, list) or len(comp_spec) != base.dim:
        raise ManifestError("map.components",
                            f"expected {base.dim} expression strings")
    components = tuple(_expr_field(text, total.coords, params, f"map.components[{i}]")
                       for i, text in enumerate(comp_spec))

    region_block = data["region"]
    try:
        region = Region.from_bounds(region_block["min"], region_block["max"])
    except (KeyError, ValueError, TypeError) as err:
        raise ManifestError("region", str(err)) from err
    if region.dim != total.dim:
        raise ManifestError("region", "bounds must match the total dimension")

    tol = Tolerances()
    tol_block = data.get("tolerances", {})
    known_tols = {"alg", "diff", "angle", "angle_guard", "pd", "rank", "cond_max"}
    bad = set(tol_block) - known_tols
    if bad:
        raise ManifestError(f"tolerances.{sorted(bad)[0]}", "unknown tolerance")
    tol = tol.with_overrides(**tol_block)
    tol = tol.with_overrides(
        alg=overrides.get("tol_alg"), diff=overrides.get("tol_diff"),
        angle=overrides.get("tol_angle"))

    sampling_block = data.get("sampling", {})
    points = int(overrides.get("points") or sampling_block.get("points", DEFAULT_POINTS))
    directions = int(overrides.get("directions")
                     or sampling_block.get("directions", DEFAULT_DIRECTIONS))
    if points < 1 or directions < 1:
        raise ManifestError("sampling", "points and directions must be positive")

    seed = overrides.get("seed")
    if seed is None:
        seed = data.get("seed", 0)
    seed = int(seed)

    output_block = data.get("output", {})
    output_format = overrides.get("format") or output_block.get("format", "text")
    if output_format not in ("text", "json"):
        raise ManifestError("output.format", "must be 'text' or 'json'")
    output_path = overrides.get("out")
    if output_path is None:
        output_path = output_block.get("path", "")

    checks = tuple(data.get("checks", ()))

    return Manifest(
        name=str(data.get("name", source)),
        description=str(data.get("description", "")),
        seed=seed,
        total=total,
        base=base,
        components=components,
        region=region,
        params=params,
        tolerances=tol,
        points=points,
        directions=directions,
        checks=checks,
        output_format=output_format,
        output_path=str(output_path),
        raw=data,
    )


def load_manifest(path, overrides: dict | None = None) -> Manifest:
    with open(path, "rb") as fh:
        try:
            data = _toml.load(fh)
        except _toml.TOMLDecodeError as err:
            raise ManifestError("<file>", f"TOML parse error: {err}") from err
    return load_manifest_dict(data, overrides, source=str(path))
