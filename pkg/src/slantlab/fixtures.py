"""Built-in instance fixtures shipped with the package.

Four positive fixtures cover the Hermitian (angle 0), anti-invariant
(angle pi/2) and proper-slant regimes on flat space with the standard
block complex structure J(d1) = d2, J(d3) = d4 (this convention is what
makes the shipped slant fixtures reproduce their stated angles, and it is
recorded explicitly in each manifest).  Two negative fixtures exercise the
failure paths: a conformally curved non-Kaehler total space and a
rank-deficient map.
"""

from __future__ import annotations

import sys
from importlib import resources

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .manifest import Manifest, load_manifest_dict

FIXTURE_NAMES = (
    "hermitian-projection",
    "anti-invariant",
    "slant-alpha",
    "slant-pi4",
    "curved-non-kahler",
    "rank-deficient",
)


def fixture_path(name: str):
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")
    return resources.files("slantlab").joinpath("data", f"{name}.toml")


def load_fixture(name: str, overrides: dict | None = None) -> Manifest:
    with fixture_path(name).open("rb") as fh:
        data = _toml.load(fh)
    return load_manifest_dict(data, overrides, source=name)


def list_fixtures() -> list:
    """(name, one-line description) pairs for every shipped fixture."""
    out = []
    for name in FIXTURE_NAMES:
        with fixture_path(name).open("rb") as fh:
            data = _toml.load(fh)
        out.append((name, data.get("description", "")))
    return out
